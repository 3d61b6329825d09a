#pragma once

// Umbrella header: the whole library in one include.

#include "paymine/app_ir.hpp"
#include "paymine/bitvec.hpp"
#include "paymine/clustering.hpp"
#include "paymine/evalgen.hpp"
#include "paymine/fingerprint.hpp"
#include "paymine/hash.hpp"
#include "paymine/libstrip.hpp"
#include "paymine/minhash.hpp"
#include "paymine/mining.hpp"
#include "paymine/parallel.hpp"
#include "paymine/payload.hpp"
#include "paymine/pipeline.hpp"
#include "paymine/prototype.hpp"
#include "paymine/reconstruct.hpp"
#include "paymine/rng.hpp"
#include "paymine/store.hpp"
