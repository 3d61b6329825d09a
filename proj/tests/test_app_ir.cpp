#include "paymine/app_ir.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

namespace {

using namespace paymine;

// --- percent escaping -------------------------------------------------------

TEST(PercentEscape, EncodesExactlyTheStructuralCharacters) {
  EXPECT_EQ(percent_encode("plain_text.123"), "plain_text.123");
  EXPECT_EQ(percent_encode(";"), "%3B");
  EXPECT_EQ(percent_encode("|"), "%7C");
  EXPECT_EQ(percent_encode("%"), "%25");
  EXPECT_EQ(percent_encode("\n"), "%0A");
  EXPECT_EQ(percent_encode("a;b|c%d"), "a%3Bb%7Cc%25d");
}

TEST(PercentEscape, DecodeInvertsEncode) {
  const std::string nasty = "a;b|c%d\ne%3B;;||%%";
  EXPECT_EQ(percent_decode(percent_encode(nasty), 1), nasty);
}

TEST(PercentEscape, DecodeAcceptsAnyWellFormedEscape) {
  EXPECT_EQ(percent_decode("%41%62", 1), "Ab");
  EXPECT_EQ(percent_decode("%3b", 1), ";");  // lowercase accepted on input
}

TEST(PercentEscape, DecodeRejectsMalformed) {
  EXPECT_THROW(percent_decode("%", 7), ParseError);
  EXPECT_THROW(percent_decode("abc%4", 7), ParseError);
  EXPECT_THROW(percent_decode("%GG", 7), ParseError);
  try {
    percent_decode("%GG", 7);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
}

// --- token encoding ---------------------------------------------------------

TEST(InstructionToken, JoinsFourFieldsWithSemicolons) {
  InstructionRecord rec{"invoke", "int,String", "hi", "Lcom/a/B"};
  EXPECT_EQ(instruction_token(rec), "invoke;int,String;hi;Lcom/a/B");
}

TEST(InstructionToken, EncodingIsInjective) {
  // Without escaping these two would render identically.
  InstructionRecord a{"op", "", "x;y", "z"};
  InstructionRecord b{"op", "", "x", "y;z"};
  EXPECT_NE(instruction_token(a), instruction_token(b));
  EXPECT_EQ(instruction_token(a), "op;;x%3By;z");
  EXPECT_EQ(instruction_token(b), "op;;x;y;z");

  // '|' inside a literal must not fake an n-gram boundary.
  InstructionRecord c{"op", "", "u|v", ""};
  EXPECT_EQ(instruction_token(c), "op;;u%7Cv;");
}

// --- parsing ----------------------------------------------------------------

const char* kAppDoc =
    "APP demo-app\n"
    "CLASS com.example.Main\n"
    "METHOD onCreate (Landroid/os/Bundle;)V\n"
    "I invoke;int,String;hello;Lcom/a/B\n"
    "I move;;;\n"
    "END\n"
    "CLASS com.example.Util\n"
    "METHOD helper ()V\n"
    "I const-str;;escaped%3Bsemi;\n"
    "END\n";

TEST(ParseAppIr, ParsesStructure) {
  const AppIR app = parse_app_ir(kAppDoc);
  EXPECT_EQ(app.app_id, "demo-app");
  ASSERT_EQ(app.methods.size(), 2u);

  const MethodIR& m0 = app.methods[0];
  EXPECT_EQ(m0.class_path, "com.example.Main");
  EXPECT_EQ(m0.method_name, "onCreate");
  EXPECT_EQ(m0.descriptor, "(Landroid/os/Bundle;)V");
  EXPECT_EQ(m0.function_offset, 0u);
  ASSERT_EQ(m0.instructions.size(), 2u);
  EXPECT_EQ(m0.instructions[0].opcode, "invoke");
  EXPECT_EQ(m0.instructions[0].type_sigs, "int,String");
  EXPECT_EQ(m0.instructions[0].string_literal, "hello");
  EXPECT_EQ(m0.instructions[0].call_sig, "Lcom/a/B");
  EXPECT_EQ(m0.instructions[1].opcode, "move");
  EXPECT_EQ(m0.instructions[1].string_literal, "");

  const MethodIR& m1 = app.methods[1];
  EXPECT_EQ(m1.function_offset, 1u);
  // Literal is stored decoded.
  EXPECT_EQ(m1.instructions[0].string_literal, "escaped;semi");

  EXPECT_EQ(app.class_paths.size(), 2u);
  EXPECT_TRUE(app.class_paths.count("com.example.Main"));
  EXPECT_TRUE(app.class_paths.count("com.example.Util"));
}

TEST(ParseAppIr, SkipsBlankLines) {
  const AppIR app = parse_app_ir(
      "\nAPP a\n\nCLASS c.d\n\nMETHOD m ()V\nI op;;;\n\nEND\n\n");
  ASSERT_EQ(app.methods.size(), 1u);
  EXPECT_EQ(app.methods[0].instructions.size(), 1u);
}

TEST(ParseLibraryIr, ParsesHeaderPrefixes) {
  const LibraryIR lib = parse_library_ir(
      "LIBRARY adnet com.adnet,com.adnet.ads\n"
      "CLASS com.adnet.Core\n"
      "METHOD init ()V\n"
      "I op;;;\n"
      "END\n");
  EXPECT_EQ(lib.lib_name, "adnet");
  const std::vector<std::string> expected = {"com.adnet", "com.adnet.ads"};
  EXPECT_EQ(lib.namespace_prefixes, expected);
  EXPECT_EQ(lib.code.methods.size(), 1u);
}

TEST(ParseAppIr, WrongDocumentKindThrows) {
  EXPECT_THROW(parse_app_ir("LIBRARY x com.x\n"), ParseError);
  EXPECT_THROW(parse_library_ir("APP x\n"), ParseError);
}

struct ErrorCase {
  const char* doc;
  std::size_t line;
};

TEST(ParseAppIr, ErrorsCarryLineNumbers) {
  const std::vector<ErrorCase> cases = {
      {"", 1},                                                   // empty document
      {"APP a b\n", 1},                                          // header arity
      {"WHAT\n", 1},                                             // bad header
      {"APP a\nMETHOD m ()V\n", 2},                              // method before class
      {"APP a\nCLASS c\nMETHOD m\n", 3},                         // method arity
      {"APP a\nCLASS c\nI op;;;\n", 3},                          // instruction outside method
      {"APP a\nCLASS c\nMETHOD m ()V\nI op;;\nEND\n", 4},        // 3 fields
      {"APP a\nCLASS c\nMETHOD m ()V\nI op;;;;\nEND\n", 4},      // 5 fields
      {"APP a\nCLASS c\nMETHOD m ()V\nI ;;;\nEND\n", 4},         // empty opcode
      {"APP a\nCLASS c\nMETHOD m ()V\nI op;;%4;\nEND\n", 4},     // bad escape
      {"APP a\nCLASS c\nMETHOD m ()V\nCLASS d\nEND\n", 4},       // class inside method
      {"APP a\nCLASS c\nEND\n", 3},                              // END without METHOD
      {"APP a\nCLASS c\nMETHOD m ()V\nMETHOD n ()V\n", 4},       // nested method
      {"APP a\nCLASS c\nMETHOD m ()V\nI op;;;\n", 3},            // missing END at EOF
      {"APP a\nCLASS c\nBOGUS x\n", 3},                          // unknown tag
      {"LIBRARY l \n", 1},                                       // missing prefixes
      {"LIBRARY l a,,b\nCLASS c\n", 1},                          // empty prefix
  };
  for (const ErrorCase& c : cases) {
    try {
      parse_app_ir(c.doc);
      FAIL() << "expected ParseError for: " << c.doc;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), c.line) << "doc: " << c.doc << "\nmessage: " << e.what();
    }
  }
}

// --- serialization ----------------------------------------------------------

TEST(Serialize, RoundTripsParsedApp) {
  const AppIR app = parse_app_ir(kAppDoc);
  EXPECT_EQ(parse_app_ir(serialize_app_ir(app)), app);
}

TEST(Serialize, IsFixpointOnNormalizedOutput) {
  const std::string once = serialize_app_ir(parse_app_ir(kAppDoc));
  EXPECT_EQ(serialize_app_ir(parse_app_ir(once)), once);
}

TEST(Serialize, NormalizesRedundantClassLines) {
  // Two consecutive methods in the same class: CLASS is emitted once.
  const AppIR app = parse_app_ir(
      "APP a\nCLASS c.d\nMETHOD m ()V\nEND\nCLASS c.d\nMETHOD n ()V\nEND\n");
  const std::string out = serialize_app_ir(app);
  EXPECT_EQ(out, "APP a\nCLASS c.d\nMETHOD m ()V\nEND\nMETHOD n ()V\nEND\n");
}

TEST(Serialize, EscapesLiteralOnOutput) {
  AppIR app;
  app.app_id = "x";
  MethodIR m;
  m.class_path = "c";
  m.method_name = "m";
  m.descriptor = "()V";
  m.instructions.push_back({"op", "", "a;b", ""});
  app.methods.push_back(m);
  app.class_paths.insert("c");
  const std::string out = serialize_app_ir(app);
  EXPECT_NE(out.find("I op;;a%3Bb;\n"), std::string::npos);
  EXPECT_EQ(parse_app_ir(out), app);
}

TEST(Serialize, LibraryRoundTrip) {
  const LibraryIR lib = parse_library_ir(
      "LIBRARY lib.x com.x,org.x\nCLASS com.x.A\nMETHOD f ()V\nI op;;;\nEND\n");
  const std::string out = serialize_library_ir(lib);
  const LibraryIR again = parse_library_ir(out);
  EXPECT_EQ(again.lib_name, lib.lib_name);
  EXPECT_EQ(again.namespace_prefixes, lib.namespace_prefixes);
  EXPECT_EQ(again.code, lib.code);
  EXPECT_EQ(serialize_library_ir(again), out);
}

// --- n-gram extraction ------------------------------------------------------

TEST(ExtractNgrams, WindowsJoinedWithPipe) {
  const AppIR app = parse_app_ir(
      "APP a\nCLASS c\nMETHOD m ()V\nI x;;;\nI y;;;\nI z;;;\nEND\n");
  const auto grams = extract_ngram_features(app, 2);
  ASSERT_EQ(grams.size(), 2u);
  EXPECT_EQ(grams[0].content, "x;;;|y;;;");
  EXPECT_EQ(grams[0].location, (FeatureTuple{0, 0}));
  EXPECT_EQ(grams[1].content, "y;;;|z;;;");
  EXPECT_EQ(grams[1].location, (FeatureTuple{0, 1}));
}

TEST(ExtractNgrams, UnigramsAreSingleTokens) {
  const AppIR app =
      parse_app_ir("APP a\nCLASS c\nMETHOD m ()V\nI x;;;\nI y;;;\nEND\n");
  const auto grams = extract_ngram_features(app, 1);
  ASSERT_EQ(grams.size(), 2u);
  EXPECT_EQ(grams[0].content, "x;;;");
  EXPECT_EQ(grams[1].content, "y;;;");
}

TEST(ExtractNgrams, ShortMethodsYieldNothingAndWindowsNeverCrossMethods) {
  const AppIR app = parse_app_ir(
      "APP a\nCLASS c\nMETHOD one ()V\nI x;;;\nEND\n"
      "METHOD two ()V\nI y;;;\nI z;;;\nEND\n");
  const auto grams = extract_ngram_features(app, 2);
  ASSERT_EQ(grams.size(), 1u);  // nothing from the 1-instruction method
  EXPECT_EQ(grams[0].content, "y;;;|z;;;");
  EXPECT_EQ(grams[0].location, (FeatureTuple{1, 0}));
}

TEST(ExtractNgrams, CountInvariant) {
  // Total windows = sum over methods of max(0, len - n + 1).
  std::string doc = "APP a\nCLASS c\n";
  const std::vector<int> lens = {0, 1, 2, 3, 7, 11};
  for (std::size_t m = 0; m < lens.size(); ++m) {
    doc += "METHOD m" + std::to_string(m) + " ()V\n";
    for (int i = 0; i < lens[m]; ++i) {
      doc += "I op" + std::to_string(m) + "_" + std::to_string(i) + ";;;\n";
    }
    doc += "END\n";
  }
  const AppIR app = parse_app_ir(doc);
  for (std::uint32_t n : {1u, 2u, 3u, 5u}) {
    std::size_t expected = 0;
    for (int len : lens) {
      if (len >= static_cast<int>(n)) expected += len - n + 1;
    }
    EXPECT_EQ(extract_ngram_features(app, n).size(), expected) << "n=" << n;
  }
}

TEST(ExtractNgrams, ZeroGramSizeThrows) {
  const AppIR app = parse_app_ir("APP a\nCLASS c\nMETHOD m ()V\nEND\n");
  EXPECT_THROW(extract_ngram_features(app, 0), std::invalid_argument);
}

// --- namespace matching -----------------------------------------------------

TEST(NamespaceMatch, DotBoundarySemantics) {
  EXPECT_TRUE(namespace_prefix_matches("com.google", "com.google"));
  EXPECT_TRUE(namespace_prefix_matches("com.google", "com.google.ads.Loader"));
  EXPECT_FALSE(namespace_prefix_matches("com.google", "com.googleapi.Client"));
  EXPECT_FALSE(namespace_prefix_matches("com.google", "com.goog"));
  EXPECT_FALSE(namespace_prefix_matches("com.google", "org.com.google"));
}

TEST(NamespaceMatch, NamespacesPresentFiltersPrefixes) {
  const AppIR app = parse_app_ir(
      "APP a\nCLASS com.adnet.Core\nMETHOD m ()V\nEND\n"
      "CLASS com.example.Main\nMETHOD n ()V\nEND\n");
  const std::set<std::string> prefixes = {"com.adnet", "com.tracker", "com.example"};
  const auto present = namespaces_present(app, prefixes);
  EXPECT_EQ(present, (std::set<std::string>{"com.adnet", "com.example"}));
}

}  // namespace
