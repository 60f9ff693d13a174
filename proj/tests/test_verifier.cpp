#include <doctest.h>

#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "rlvr/error.hpp"
#include "rlvr/io.hpp"
#include "rlvr/math_expr.hpp"
#include "rlvr/rational.hpp"
#include "rlvr/rewards.hpp"
#include "rlvr/verifier.hpp"

using namespace rlvr;

namespace {

GroundTruth letter(const char* v) { return {AnswerKind::OptionLetter, v, std::nullopt, std::nullopt}; }
GroundTruth numeric(const char* v) { return {AnswerKind::Numeric, v, std::nullopt, std::nullopt}; }
GroundTruth math(const char* v) { return {AnswerKind::MathExpr, v, std::nullopt, std::nullopt}; }

ParsedResponse boxed(const std::string& payload) {
  return parse_response("<think>t</think><answer>\\boxed{" + payload + "}</answer>");
}

}  // namespace

TEST_CASE("parse_response shapes") {
  auto p = parse_response("<think>t</think><answer>\\boxed{C}</answer>");
  CHECK(p.well_formed);
  CHECK(p.think_text == "t");
  REQUIRE(p.boxed_payload);
  CHECK(*p.boxed_payload == "C");

  CHECK_FALSE(parse_response("<answer>x</answer>").well_formed);

  auto last = parse_response("<think>a</think><answer>so \\boxed{12} then \\boxed{13}</answer>");
  REQUIRE(last.boxed_payload);
  CHECK(*last.boxed_payload == "13");
}

TEST_CASE("parse_response rejects bad layouts") {
  CHECK_FALSE(parse_response("<answer>a</answer><think>t</think>").well_formed);
  CHECK_FALSE(parse_response("x<think>t</think><answer>a</answer>").well_formed);
  CHECK_FALSE(parse_response("<think>t</think>x<answer>a</answer>").well_formed);
  CHECK_FALSE(parse_response("<think>t</think><answer>a</answer>x").well_formed);
  CHECK_FALSE(parse_response("<think>t<think>u</think><answer>a</answer>").well_formed);
  CHECK_FALSE(parse_response("<think>t</think><answer>a").well_formed);
  CHECK(parse_response("  <think></think>\n<answer></answer>  ").well_formed);
}

TEST_CASE("last_boxed handles nesting") {
  CHECK(last_boxed("\\boxed{\\frac{1}{2}}").value() == "\\frac{1}{2}");
  CHECK(last_boxed("\\boxed{a} and \\boxed{{b}}").value() == "{b}");
  CHECK_FALSE(last_boxed("\\boxed{unclosed").has_value());
  CHECK_FALSE(last_boxed("nothing here").has_value());
}

TEST_CASE("normalize_text") {
  CHECK(normalize_text("The Answer.") == "the answer");
  CHECK(normalize_text("  A,  B ") == "a b");
  CHECK(normalize_text("") == "");
}

TEST_CASE("parse_math_expr trees") {
  CHECK(parse_math_expr("1/2").to_string() == "Div(1,2)");
  CHECK(parse_math_expr("2+3*4").to_string() == "Add(2,Mul(3,4))");
  auto neg = parse_math_expr("-(1+2)^2");
  CHECK(neg.to_string() == "Neg(Pow(Add(1,2),2))");
  CHECK(neg.evaluate().value() == Rational(-9));
  CHECK(parse_math_expr("8-3-2").evaluate().value() == Rational(3));
  CHECK(parse_math_expr("2^3^2").evaluate().value() == Rational(512));
  CHECK_THROWS_AS(parse_math_expr("(1+2"), ParseError);
  CHECK_THROWS_AS(parse_math_expr("1+"), ParseError);
  CHECK_THROWS_AS(parse_math_expr("x+1"), ParseError);
  CHECK_THROWS_AS(parse_math_expr(""), ParseError);
}

TEST_CASE("expr_equivalent") {
  CHECK(expr_equivalent(parse_math_expr("1/2"), parse_math_expr("0.5")));
  CHECK(expr_equivalent(parse_math_expr("2+3*4"), parse_math_expr("14")));
  CHECK_FALSE(expr_equivalent(parse_math_expr("1/0"), parse_math_expr("1/0")));
  CHECK_FALSE(parse_math_expr("0^-1").evaluate().has_value());
  CHECK_FALSE(parse_math_expr("2^(1/2)").evaluate().has_value());
}

TEST_CASE("verify dispatches on kind") {
  CHECK(verify(boxed("(B)"), letter("B")));
  CHECK(verify(boxed("0.5"), math("1/2")));
  GroundTruth degrees = letter("C");
  degrees.options = OptionList{{'A', "32°"}, {'B', "48°"}, {'C', "64°"}};
  CHECK_FALSE(verify(boxed("64"), degrees));
  CHECK(verify(boxed("1.50"), numeric("1.5")));
}

TEST_CASE("rational literals and decimal rendering") {
  CHECK(parse_decimal("-0.50").value() == Rational(-1, 2));
  CHECK(parse_decimal(".5").value() == Rational(1, 2));
  CHECK(parse_decimal("3.").value() == Rational(3));
  CHECK_FALSE(parse_decimal("1e3").has_value());
  CHECK_FALSE(parse_decimal("").has_value());
  CHECK(parse_rational_literal("3/4").value() == Rational(3, 4));
  CHECK_FALSE(parse_rational_literal("3/0").has_value());
  CHECK(to_decimal_string(Rational(150)) == "150");
  CHECK(to_decimal_string(Rational(3, 200)) == "0.015");
  CHECK(to_decimal_string(Rational(-1, 3)) == "-1/3");
}

TEST_CASE("decimal strings survive an exact round trip") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> mantissa(-10'000'000, 10'000'000);
  std::uniform_int_distribution<int> scale(0, 6);
  for (int i = 0; i < 2000; ++i) {
    const Rational v(mantissa(rng), static_cast<long long>(std::pow(10, scale(rng))));
    auto back = parse_decimal(to_decimal_string(v));
    REQUIRE(back.has_value());
    CHECK(*back == v);
  }
}

TEST_CASE("equivalent numeric spellings verify") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> whole(0, 999), frac(0, 99);
  for (int i = 0; i < 500; ++i) {
    const std::string base = std::to_string(whole(rng)) + "." + std::to_string(frac(rng) / 10) +
                             std::to_string(frac(rng) % 10);
    CHECK(verify(boxed(base + "000"), numeric(base.c_str())));
    CHECK(verify(boxed(" " + base + " "), math(base.c_str())));
  }
}

TEST_CASE("verifier corpus") {
  std::ifstream in(std::string(RLVR_SOURCE_DIR) + "/tests/data/verifier_corpus.jsonl");
  REQUIRE(in);
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    const GroundTruth gt = io::ground_truth_from_json(j["ground_truth"], 0);
    const bool got = general_accuracy_reward(parse_response(j["response"].get<std::string>()), gt) == 1;
    INFO(j["name"].get<std::string>());
    CHECK(got == j["expected"].get<bool>());
    ++cases;
  }
  CHECK(cases >= 50);
}
