#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paymine/bitvec.hpp"
#include "paymine/fingerprint.hpp"

namespace paymine {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

inline std::uint32_t get_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw StoreError(std::string("truncated store while reading ") + what);
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& is, const char* what) {
  std::uint64_t lo = get_u32(is, what);
  std::uint64_t hi = get_u32(is, what);
  return lo | (hi << 32);
}

inline std::string get_string(std::istream& is, const char* what) {
  std::uint32_t len = get_u32(is, what);
  std::string s(len, '\0');
  if (len > 0 && !is.read(s.data(), len)) {
    throw StoreError(std::string("truncated store while reading ") + what);
  }
  return s;
}

inline void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

// Raw bitmap: bit i = byte i/8, bit i%8, LSB-first. On little-endian hosts
// that is byte-identical to the word array.
inline void put_bitmap(std::ostream& os, const BitFingerprint& fp) {
  const std::size_t nbytes = (static_cast<std::size_t>(fp.width()) + 7) / 8;
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(fp.words().data()),
             static_cast<std::streamsize>(nbytes));
  } else {
    for (std::size_t i = 0; i < nbytes; ++i) {
      char b = static_cast<char>((fp.words()[i / 8] >> (8 * (i % 8))) & 0xff);
      os.write(&b, 1);
    }
  }
}

inline BitFingerprint get_bitmap(std::istream& is, std::uint32_t width) {
  BitFingerprint fp(width);
  const std::size_t nbytes = (static_cast<std::size_t>(width) + 7) / 8;
  if constexpr (std::endian::native == std::endian::little) {
    if (!is.read(reinterpret_cast<char*>(fp.words().data()),
                 static_cast<std::streamsize>(nbytes))) {
      throw StoreError("truncated bitmap");
    }
  } else {
    for (std::size_t i = 0; i < nbytes; ++i) {
      char b;
      if (!is.read(&b, 1)) throw StoreError("truncated bitmap");
      fp.words()[i / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(b))
                           << (8 * (i % 8));
    }
  }
  return fp;
}

inline void expect_magic(std::istream& is, const char* magic, const std::string& context) {
  char got[4];
  if (!is.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw StoreError("bad magic in " + context + ", expected " + magic);
  }
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw StoreError("cannot open for writing: " + path.string());
  return os;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw StoreError("cannot open for reading: " + path.string());
  return is;
}

}  // namespace detail

// --- fingerprint store (`FPV1`) --------------------------------------------
//
// A store file is a sequence of records, each:
//   magic `FPV1`, u32 width-in-bits, u32 id length, id bytes, raw bitmap.

inline void write_fingerprint_record(std::ostream& os, const std::string& id,
                                     const BitFingerprint& fp) {
  os.write("FPV1", 4);
  detail::put_u32(os, fp.width());
  detail::put_string(os, id);
  detail::put_bitmap(os, fp);
}

inline bool read_fingerprint_record(std::istream& is, std::string& id, BitFingerprint& fp) {
  char magic[4];
  if (!is.read(magic, 4)) return false;  // clean EOF
  if (std::memcmp(magic, "FPV1", 4) != 0) throw StoreError("bad FPV1 record magic");
  std::uint32_t width = detail::get_u32(is, "width");
  id = detail::get_string(is, "id");
  fp = detail::get_bitmap(is, width);
  return true;
}

inline void save_fingerprint(const std::filesystem::path& path, const std::string& id,
                             const BitFingerprint& fp) {
  auto os = detail::open_out(path);
  write_fingerprint_record(os, id, fp);
}

inline std::pair<std::string, BitFingerprint> load_fingerprint(
    const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  std::string id;
  BitFingerprint fp;
  if (!read_fingerprint_record(is, id, fp)) {
    throw StoreError("empty fingerprint store: " + path.string());
  }
  return {std::move(id), std::move(fp)};
}

inline void save_fingerprints(const std::filesystem::path& path,
                              const std::vector<std::pair<std::string, BitFingerprint>>& fps) {
  auto os = detail::open_out(path);
  for (const auto& [id, fp] : fps) write_fingerprint_record(os, id, fp);
}

inline std::vector<std::pair<std::string, BitFingerprint>> load_fingerprints(
    const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  std::vector<std::pair<std::string, BitFingerprint>> out;
  std::string id;
  BitFingerprint fp;
  while (read_fingerprint_record(is, id, fp)) {
    out.emplace_back(std::move(id), std::move(fp));
  }
  return out;
}

// --- feature map sidecar ----------------------------------------------------
//
// Line-oriented text, one line per set bit: `bit_index<TAB>i,j;i,j;...`.

inline void save_feature_map(const std::filesystem::path& path, const FeatureBitMap& map) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw StoreError("cannot open for writing: " + path.string());
  for (const auto& [bit, tuples] : map) {
    os << bit << '\t';
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      if (i) os << ';';
      os << tuples[i].function_offset << ',' << tuples[i].bytecode_offset;
    }
    os << '\n';
  }
}

inline FeatureBitMap load_feature_map(const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  FeatureBitMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw StoreError("feature map " + path.string() + ": missing tab on line " +
                       std::to_string(line_no));
    }
    std::uint32_t bit = static_cast<std::uint32_t>(std::stoul(line.substr(0, tab)));
    auto& tuples = map[bit];
    std::size_t pos = tab + 1;
    while (pos < line.size()) {
      std::size_t semi = line.find(';', pos);
      if (semi == std::string::npos) semi = line.size();
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos || comma >= semi) {
        throw StoreError("feature map " + path.string() + ": malformed tuple on line " +
                         std::to_string(line_no));
      }
      FeatureTuple t;
      t.function_offset = static_cast<std::uint32_t>(std::stoul(line.substr(pos, comma - pos)));
      t.bytecode_offset =
          static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1, semi - comma - 1)));
      tuples.push_back(t);
      pos = semi + 1;
    }
  }
  return map;
}

// --- library profile store (`LIB1`) ----------------------------------------

struct LibraryProfileRecord {
  std::string lib_name;
  std::vector<std::string> namespace_prefixes;
  BitFingerprint fingerprint;
};

inline void save_library_profile(const std::filesystem::path& path,
                                 const LibraryProfileRecord& rec) {
  auto os = detail::open_out(path);
  os.write("LIB1", 4);
  detail::put_u32(os, rec.fingerprint.width());
  detail::put_string(os, rec.lib_name);
  detail::put_u32(os, static_cast<std::uint32_t>(rec.namespace_prefixes.size()));
  for (const std::string& p : rec.namespace_prefixes) detail::put_string(os, p);
  detail::put_bitmap(os, rec.fingerprint);
}

inline LibraryProfileRecord load_library_profile(const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  detail::expect_magic(is, "LIB1", path.string());
  LibraryProfileRecord rec;
  std::uint32_t width = detail::get_u32(is, "width");
  rec.lib_name = detail::get_string(is, "lib name");
  std::uint32_t nprefixes = detail::get_u32(is, "prefix count");
  rec.namespace_prefixes.reserve(nprefixes);
  for (std::uint32_t i = 0; i < nprefixes; ++i) {
    rec.namespace_prefixes.push_back(detail::get_string(is, "prefix"));
  }
  rec.fingerprint = detail::get_bitmap(is, width);
  return rec;
}

// --- minHash signature store (`MHS1`) --------------------------------------
//
// Header: magic `MHS1`, u32 k, u64 seed, k u32 salts. Then one record per
// id: u32 id length, id bytes, k u32 signature values.

struct SignatureStore {
  std::uint32_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> salts;
  std::vector<std::pair<std::string, std::vector<std::uint32_t>>> signatures;
};

inline void save_signatures(const std::filesystem::path& path, const SignatureStore& store) {
  if (store.salts.size() != store.k) {
    throw StoreError("signature store: salt count does not match k");
  }
  auto os = detail::open_out(path);
  os.write("MHS1", 4);
  detail::put_u32(os, store.k);
  detail::put_u64(os, store.seed);
  for (std::uint32_t salt : store.salts) detail::put_u32(os, salt);
  for (const auto& [id, values] : store.signatures) {
    if (values.size() != store.k) {
      throw StoreError("signature store: signature for '" + id + "' has wrong length");
    }
    detail::put_string(os, id);
    for (std::uint32_t v : values) detail::put_u32(os, v);
  }
}

inline SignatureStore load_signatures(const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  detail::expect_magic(is, "MHS1", path.string());
  SignatureStore store;
  store.k = detail::get_u32(is, "k");
  store.seed = detail::get_u64(is, "seed");
  store.salts.resize(store.k);
  for (std::uint32_t i = 0; i < store.k; ++i) store.salts[i] = detail::get_u32(is, "salt");
  while (is.peek() != std::char_traits<char>::eof()) {
    std::string id = detail::get_string(is, "signature id");
    std::vector<std::uint32_t> values(store.k);
    for (std::uint32_t i = 0; i < store.k; ++i) {
      values[i] = detail::get_u32(is, "signature value");
    }
    store.signatures.emplace_back(std::move(id), std::move(values));
  }
  return store;
}

// --- cluster assignments ----------------------------------------------------
//
// `cluster_index<TAB>member_id`, one line per member.

inline void save_cluster_assignments(const std::filesystem::path& path,
                                     const std::vector<std::vector<std::string>>& clusters) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw StoreError("cannot open for writing: " + path.string());
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    for (const std::string& member : clusters[ci]) {
      os << ci << '\t' << member << '\n';
    }
  }
}

inline std::vector<std::vector<std::string>> load_cluster_assignments(
    const std::filesystem::path& path) {
  auto is = detail::open_in(path);
  std::vector<std::vector<std::string>> clusters;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw StoreError("cluster file " + path.string() + ": missing tab on line " +
                       std::to_string(line_no));
    }
    std::size_t index = std::stoul(line.substr(0, tab));
    if (index >= clusters.size()) clusters.resize(index + 1);
    clusters[index].push_back(line.substr(tab + 1));
  }
  return clusters;
}

}  // namespace paymine
