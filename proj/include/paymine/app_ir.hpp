#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace paymine {

/// One disassembled instruction. `string_literal` is stored decoded; the
/// on-disk form and the hashed token form keep it percent-encoded so that
/// token encoding stays injective.
struct InstructionRecord {
  std::string opcode;
  std::string type_sigs;
  std::string string_literal;
  std::string call_sig;

  friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

/// (function offset, bytecode offset): where one n-gram window starts.
struct FeatureTuple {
  std::uint32_t function_offset = 0;
  std::uint32_t bytecode_offset = 0;

  friend bool operator==(const FeatureTuple&, const FeatureTuple&) = default;
  friend auto operator<=>(const FeatureTuple&, const FeatureTuple&) = default;
};

struct MethodIR {
  std::string class_path;
  std::string method_name;
  std::string descriptor;
  std::vector<InstructionRecord> instructions;
  // 0-based position of the method in app file order; unique within the app.
  std::uint32_t function_offset = 0;

  friend bool operator==(const MethodIR&, const MethodIR&) = default;
};

struct AppIR {
  std::string app_id;
  std::vector<MethodIR> methods;
  std::set<std::string> class_paths;

  friend bool operator==(const AppIR&, const AppIR&) = default;
};

/// Parsed LIBRARY document; the grammar is the app grammar with a
/// `LIBRARY <name> <comma-separated namespace prefixes>` header, and may
/// concatenate several versions' methods into one document.
struct LibraryIR {
  std::string lib_name;
  std::vector<std::string> namespace_prefixes;
  AppIR code;
};

struct NGramFeature {
  std::string content;
  FeatureTuple location;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// --- percent escaping -------------------------------------------------------
//
// String literals escape ';', '|', '%', and newline as %XX (uppercase hex).
// Those four are exactly the characters with structural meaning in the IR
// line format and in the n-gram token join.

inline bool needs_percent_escape(char c) {
  return c == ';' || c == '|' || c == '%' || c == '\n';
}

inline std::string percent_encode(std::string_view raw) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (needs_percent_escape(c)) {
      unsigned char u = static_cast<unsigned char>(c);
      out += '%';
      out += hex[u >> 4];
      out += hex[u & 0xf];
    } else {
      out += c;
    }
  }
  return out;
}

namespace detail {
inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}
}  // namespace detail

/// Decodes %XX escapes; any well-formed escape is accepted, not just the four
/// we emit. Malformed escapes raise ParseError at `line`.
inline std::string percent_decode(std::string_view encoded, std::size_t line) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    char c = encoded[i];
    if (c != '%') {
      out += c;
      continue;
    }
    if (i + 2 >= encoded.size()) {
      throw ParseError(line, "truncated percent escape");
    }
    int hi = detail::hex_value(encoded[i + 1]);
    int lo = detail::hex_value(encoded[i + 2]);
    if (hi < 0 || lo < 0) {
      throw ParseError(line, "invalid percent escape '%" +
                                 std::string(encoded.substr(i + 1, 2)) + "'");
    }
    out += static_cast<char>((hi << 4) | lo);
    i += 2;
  }
  return out;
}

// --- tokenization -----------------------------------------------------------

/// Packs the four instruction fields into one hashable token,
/// `opcode;type_sigs;string_literal;call_sig`, literal re-encoded.
inline std::string instruction_token(const InstructionRecord& rec) {
  std::string out;
  out.reserve(rec.opcode.size() + rec.type_sigs.size() +
              rec.string_literal.size() + rec.call_sig.size() + 3);
  out += rec.opcode;
  out += ';';
  out += rec.type_sigs;
  out += ';';
  out += percent_encode(rec.string_literal);
  out += ';';
  out += rec.call_sig;
  return out;
}

// --- parsing ----------------------------------------------------------------

namespace detail {

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  bool next(std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return true;
  }
};

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline void check_plain_field(std::string_view field, const char* what, std::size_t line) {
  for (char c : field) {
    if (c == '|' || c == '\n') {
      throw ParseError(line, std::string(what) + " must not contain '|' or newline");
    }
  }
}

struct ParsedDocument {
  bool is_library = false;
  AppIR app;
  std::string lib_name;
  std::vector<std::string> lib_prefixes;
};

inline ParsedDocument parse_document(std::string_view text) {
  ParsedDocument doc;
  LineReader reader{text};
  std::string_view line;

  // Header: first non-blank line, APP or LIBRARY.
  bool have_header = false;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "APP") {
      if (tokens.size() != 2) throw ParseError(reader.line_no, "APP header wants exactly one id");
      doc.app.app_id = std::string(tokens[1]);
    } else if (tokens[0] == "LIBRARY") {
      if (tokens.size() != 3) {
        throw ParseError(reader.line_no,
                         "LIBRARY header wants a name and a comma-separated prefix list");
      }
      doc.is_library = true;
      doc.lib_name = std::string(tokens[1]);
      doc.app.app_id = doc.lib_name;
      std::string_view prefixes = tokens[2];
      std::size_t start = 0;
      while (start <= prefixes.size()) {
        std::size_t comma = prefixes.find(',', start);
        if (comma == std::string_view::npos) comma = prefixes.size();
        std::string_view p = prefixes.substr(start, comma - start);
        if (p.empty()) throw ParseError(reader.line_no, "empty namespace prefix");
        doc.lib_prefixes.emplace_back(p);
        start = comma + 1;
      }
    } else {
      throw ParseError(reader.line_no, "expected APP or LIBRARY header, got '" +
                                           std::string(tokens[0]) + "'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw ParseError(reader.line_no + 1, "empty document, missing header");

  std::string current_class;
  bool have_class = false;
  bool in_method = false;
  std::size_t method_line = 0;
  MethodIR method;

  while (reader.next(line)) {
    if (line.empty()) continue;
    std::size_t sp = line.find(' ');
    std::string_view tag = line.substr(0, sp == std::string_view::npos ? line.size() : sp);
    std::string_view rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);

    if (tag == "CLASS") {
      if (in_method) throw ParseError(reader.line_no, "CLASS inside a METHOD block");
      auto tokens = split_ws(rest);
      if (tokens.size() != 1) throw ParseError(reader.line_no, "CLASS wants exactly one path");
      current_class = std::string(tokens[0]);
      have_class = true;
      doc.app.class_paths.insert(current_class);
    } else if (tag == "METHOD") {
      if (in_method) throw ParseError(reader.line_no, "METHOD without closing END");
      if (!have_class) throw ParseError(reader.line_no, "METHOD before any CLASS");
      auto tokens = split_ws(rest);
      if (tokens.size() != 2) {
        throw ParseError(reader.line_no, "METHOD wants a name and a descriptor");
      }
      method = MethodIR{};
      method.class_path = current_class;
      method.method_name = std::string(tokens[0]);
      method.descriptor = std::string(tokens[1]);
      method.function_offset = static_cast<std::uint32_t>(doc.app.methods.size());
      in_method = true;
      method_line = reader.line_no;
    } else if (tag == "I") {
      if (!in_method) throw ParseError(reader.line_no, "I line outside a METHOD block");
      // Exactly four ';'-separated fields; the literal escapes its own ';'.
      std::vector<std::string_view> fields;
      std::size_t start = 0;
      while (true) {
        std::size_t semi = rest.find(';', start);
        if (semi == std::string_view::npos) {
          fields.push_back(rest.substr(start));
          break;
        }
        fields.push_back(rest.substr(start, semi - start));
        start = semi + 1;
      }
      if (fields.size() != 4) {
        throw ParseError(reader.line_no, "instruction wants 4 ';'-separated fields, got " +
                                             std::to_string(fields.size()));
      }
      if (fields[0].empty()) throw ParseError(reader.line_no, "empty opcode");
      check_plain_field(fields[0], "opcode", reader.line_no);
      check_plain_field(fields[1], "type signatures", reader.line_no);
      check_plain_field(fields[3], "call signature", reader.line_no);
      InstructionRecord rec;
      rec.opcode = std::string(fields[0]);
      rec.type_sigs = std::string(fields[1]);
      rec.string_literal = percent_decode(fields[2], reader.line_no);
      rec.call_sig = std::string(fields[3]);
      method.instructions.push_back(std::move(rec));
    } else if (tag == "END") {
      if (!in_method) throw ParseError(reader.line_no, "END without METHOD");
      if (!split_ws(rest).empty()) throw ParseError(reader.line_no, "END takes no arguments");
      doc.app.methods.push_back(std::move(method));
      in_method = false;
    } else {
      throw ParseError(reader.line_no, "unknown line tag '" + std::string(tag) + "'");
    }
  }
  if (in_method) {
    throw ParseError(method_line, "METHOD block not closed by END before end of document");
  }
  return doc;
}

}  // namespace detail

inline AppIR parse_app_ir(std::string_view text) {
  auto doc = detail::parse_document(text);
  if (doc.is_library) throw ParseError(1, "expected APP document, got LIBRARY");
  return std::move(doc.app);
}

inline LibraryIR parse_library_ir(std::string_view text) {
  auto doc = detail::parse_document(text);
  if (!doc.is_library) throw ParseError(1, "expected LIBRARY document, got APP");
  return LibraryIR{std::move(doc.lib_name), std::move(doc.lib_prefixes), std::move(doc.app)};
}

namespace detail {

inline void serialize_body(const AppIR& app, std::string& out) {
  std::string current_class;
  bool have_class = false;
  for (const MethodIR& m : app.methods) {
    if (!have_class || m.class_path != current_class) {
      out += "CLASS ";
      out += m.class_path;
      out += '\n';
      current_class = m.class_path;
      have_class = true;
    }
    out += "METHOD ";
    out += m.method_name;
    out += ' ';
    out += m.descriptor;
    out += '\n';
    for (const InstructionRecord& rec : m.instructions) {
      out += "I ";
      out += rec.opcode;
      out += ';';
      out += rec.type_sigs;
      out += ';';
      out += percent_encode(rec.string_literal);
      out += ';';
      out += rec.call_sig;
      out += '\n';
    }
    out += "END\n";
  }
}

}  // namespace detail

/// Normalized serialization: LF endings, no blank lines, literals re-encoded
/// with exactly the four structural escapes. parse(serialize(x)) == x and
/// serialize is a fixpoint on its own output.
inline std::string serialize_app_ir(const AppIR& app) {
  std::string out = "APP " + app.app_id + "\n";
  detail::serialize_body(app, out);
  return out;
}

inline std::string serialize_library_ir(const LibraryIR& lib) {
  std::string out = "LIBRARY " + lib.lib_name + " ";
  for (std::size_t i = 0; i < lib.namespace_prefixes.size(); ++i) {
    if (i) out += ',';
    out += lib.namespace_prefixes[i];
  }
  out += '\n';
  detail::serialize_body(lib.code, out);
  return out;
}

/// n-gram features at function level: windows of n consecutive instruction
/// tokens joined by '|', never crossing method boundaries. Output is ordered
/// by (function_offset, bytecode_offset).
inline std::vector<NGramFeature> extract_ngram_features(const AppIR& app, std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("gram size must be >= 1");
  std::vector<NGramFeature> out;
  for (const MethodIR& m : app.methods) {
    if (m.instructions.size() < n) continue;
    std::vector<std::string> tokens;
    tokens.reserve(m.instructions.size());
    for (const InstructionRecord& rec : m.instructions) {
      tokens.push_back(instruction_token(rec));
    }
    const std::size_t windows = m.instructions.size() - n + 1;
    for (std::size_t j = 0; j < windows; ++j) {
      std::string content = tokens[j];
      for (std::uint32_t t = 1; t < n; ++t) {
        content += '|';
        content += tokens[j + t];
      }
      out.push_back(NGramFeature{
          std::move(content),
          FeatureTuple{m.function_offset, static_cast<std::uint32_t>(j)}});
    }
  }
  return out;
}

/// True when `prefix` matches `path` on a dot boundary: equal, or a leading
/// `prefix.` component chain. `com.google` does not match `com.googleapi`.
inline bool namespace_prefix_matches(std::string_view prefix, std::string_view path) {
  if (path.size() < prefix.size()) return false;
  if (path.compare(0, prefix.size(), prefix) != 0) return false;
  return path.size() == prefix.size() || path[prefix.size()] == '.';
}

/// The subset of `lib_prefixes` that match at least one class path in `app`.
inline std::set<std::string> namespaces_present(const AppIR& app,
                                                const std::set<std::string>& lib_prefixes) {
  std::set<std::string> out;
  for (const std::string& prefix : lib_prefixes) {
    for (const std::string& path : app.class_paths) {
      if (namespace_prefix_matches(prefix, path)) {
        out.insert(prefix);
        break;
      }
    }
  }
  return out;
}

}  // namespace paymine
