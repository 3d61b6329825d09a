#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "paymine/app_ir.hpp"
#include "paymine/bitvec.hpp"
#include "paymine/fingerprint.hpp"

namespace paymine {

// A run of instructions inside one function covered by the payload,
// inclusive on both ends.
struct ReconstructedRange {
  std::uint32_t function_offset = 0;
  std::uint32_t first_instruction = 0;
  std::uint32_t last_instruction = 0;

  bool operator==(const ReconstructedRange&) const = default;
};

// Maps a payload's set bits back to instruction ranges through an app's
// feature map. Each n-gram anchored at (i, j) covers instructions j..j+n-1;
// overlapping or adjacent ranges within a function are merged. Bits the map
// does not know are ignored (they came from other apps). Because hash
// collisions can attach unrelated locations to a shared bit, the result is an
// over-approximation: it always covers the true payload instructions but may
// include extra ones at small fingerprint widths.
inline std::vector<ReconstructedRange> locate_payload(const BitFingerprint& payload,
                                                      const FeatureBitMap& feature_map,
                                                      std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("locate_payload: n must be positive");
  std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> raw;
  payload.for_each_set_bit([&](std::uint32_t bit) {
    auto it = feature_map.find(bit);
    if (it == feature_map.end()) return;
    for (const FeatureTuple& t : it->second) {
      raw[t.function_offset].emplace_back(t.bytecode_offset, t.bytecode_offset + n - 1);
    }
  });
  std::vector<ReconstructedRange> out;
  for (auto& [fn, ranges] : raw) {
    std::sort(ranges.begin(), ranges.end());
    std::uint32_t start = ranges.front().first;
    std::uint32_t end = ranges.front().second;
    for (std::size_t i = 1; i < ranges.size(); ++i) {
      if (ranges[i].first <= end + 1) {  // overlap or adjacency: one run
        end = std::max(end, ranges[i].second);
      } else {
        out.push_back({fn, start, end});
        start = ranges[i].first;
        end = ranges[i].second;
      }
    }
    out.push_back({fn, start, end});
  }
  return out;
}

// Renders ranges as text against the app they were located in:
//
//   == <class_path>.<method_name> (fn <i>) ==
//   <j>: <instruction token>
//
// with one blank line after each function block. Instruction indices beyond
// the method's end (possible when collisions merge foreign locations) are
// clamped away.
inline std::string render_reconstruction(const AppIR& app,
                                         const std::vector<ReconstructedRange>& ranges) {
  std::map<std::uint32_t, const MethodIR*> methods;
  for (const MethodIR& method : app.methods) {
    methods.emplace(method.function_offset, &method);
  }
  std::ostringstream os;
  const MethodIR* current = nullptr;
  for (const ReconstructedRange& range : ranges) {
    auto it = methods.find(range.function_offset);
    if (it == methods.end()) {
      throw std::invalid_argument("render_reconstruction: app '" + app.app_id +
                                  "' has no function with offset " +
                                  std::to_string(range.function_offset));
    }
    const MethodIR& method = *it->second;
    if (current != &method) {
      current = &method;
      os << "== " << method.class_path << '.' << method.method_name << " (fn "
         << range.function_offset << ") ==\n";
    }
    const std::uint32_t limit = static_cast<std::uint32_t>(method.instructions.size());
    for (std::uint32_t j = range.first_instruction;
         j <= range.last_instruction && j < limit; ++j) {
      os << j << ": " << instruction_token(method.instructions[j]) << '\n';
    }
    // Peek: blank line once the block for this function is done.
    const ReconstructedRange* next = (&range == &ranges.back()) ? nullptr : (&range + 1);
    if (next == nullptr || next->function_offset != range.function_offset) {
      os << '\n';
    }
  }
  return os.str();
}

// Convenience: locate then render in one step.
inline std::string reconstruct_payload(const BitFingerprint& payload, const AppIR& app,
                                       const FeatureBitMap& feature_map, std::uint32_t n) {
  return render_reconstruction(app, locate_payload(payload, feature_map, n));
}

}  // namespace paymine
