#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles/reference_math.hpp"
#include "rlvr/error.hpp"
#include "rlvr/rewards.hpp"

using namespace rlvr;

namespace {

const std::string kWrap = "<think>t</think><answer>\\boxed{";
std::string wrap(const std::string& x) { return kWrap + x + "}</answer>"; }
GroundTruth numeric(const char* v) { return {AnswerKind::Numeric, v, std::nullopt, std::nullopt}; }
GroundTruth letter(const char* v) { return {AnswerKind::OptionLetter, v, std::nullopt, std::nullopt}; }

}  // namespace

TEST_CASE("format reward") {
  CHECK(format_reward(parse_response(wrap("A"))) == 1);
  CHECK(format_reward(parse_response("<answer>A</answer>")) == 0);
  CHECK(format_reward(parse_response("<answer>A</answer><think>t</think>")) == 0);
}

TEST_CASE("general accuracy reward") {
  CHECK(general_accuracy_reward(parse_response(wrap("C")), letter("C")) == 1);
  CHECK(general_accuracy_reward(parse_response(wrap("D")), letter("C")) == 0);
  CHECK(general_accuracy_reward(parse_response("<answer>\\boxed{C}</answer>"), letter("C")) == 0);
}

TEST_CASE("EDNM values") {
  CHECK(ednm_reward(300, 300) == 1.0);
  CHECK(ednm_reward(150, 300) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(ednm_reward(600, 300) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
  CHECK(std::abs(ednm_reward(150, 300) - 0.367879) < 1e-6);
  CHECK(std::abs(ednm_reward(600, 300) - 0.135335) < 1e-6);
  CHECK(ednm_reward(0, 0) == 1.0);
  CHECK_THROWS_AS(ednm_reward(std::numeric_limits<double>::quiet_NaN(), 1), DomainError);
  CHECK_THROWS_AS(ednm_reward(1, std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("EDNM matches the reference formula") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(-1000, 1000);
  EDNMParams p{0.7, 3.1, 1e-3};
  for (int i = 0; i < 5000; ++i) {
    const double a = x(rng), b = x(rng);
    CHECK(ednm_reward(a, b, p) == doctest::Approx(static_cast<double>(oracle::ednm(a, b, 0.7, 3.1, 1e-3))).epsilon(1e-12));
  }
}

TEST_CASE("spatial accuracy reward") {
  CHECK(spatial_accuracy_reward(parse_response(wrap("290")), numeric("300")) ==
        doctest::Approx(std::exp(-2.0 * 10 / 300.000001)).epsilon(1e-12));
  CHECK(std::abs(spatial_accuracy_reward(parse_response(wrap("290")), numeric("300")) - 0.935507) < 1e-6);
  CHECK(spatial_accuracy_reward(parse_response(wrap("B")), letter("B")) == 1.0);
  CHECK(spatial_accuracy_reward(parse_response(wrap("big")), numeric("300")) == 0.0);
  CHECK(spatial_accuracy_reward(parse_response("<answer>\\boxed{300}</answer>"), numeric("300")) == 0.0);
}

TEST_CASE("total reward") {
  CHECK(total_reward(1, 1) == 2.0);
  CHECK(total_reward(0.3679, 1) == doctest::Approx(1.3679));
  CHECK(total_reward(0, 0) == 0.0);
  auto r = score_completion(wrap("600"), numeric("300"), TaskFamily::Spatial);
  CHECK(r.format == 1);
  CHECK(r.total == r.accuracy + r.format);
}

TEST_CASE("batch scoring serial and parallel agree") {
  std::vector<ScoringItem> items;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> v(0, 600);
  for (int i = 0; i < 3000; ++i) {
    const std::string x = std::to_string(v(rng));
    ScoringItem item;
    item.text = i % 7 == 0 ? "<answer>" + x + "</answer>" : wrap(x);
    item.gt = i % 2 ? numeric("300") : letter("B");
    item.family = i % 3 ? TaskFamily::Spatial : TaskFamily::General;
    items.push_back(item);
  }
  auto a = score_batch_serial(items);
  auto b = score_batch_parallel(items);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].accuracy == b[i].accuracy);
    CHECK(a[i].format == b[i].format);
    CHECK(a[i].total == b[i].total);
  }
}
