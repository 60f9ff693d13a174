#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rlvr/curation.hpp"
#include "rlvr/error.hpp"
#include "rlvr/prompts.hpp"

using namespace rlvr;

namespace {

PromptRecord prompt() {
  PromptRecord p;
  p.id = "p1";
  p.task = "general";
  p.question = "What is 1/2 + 1/4?";
  p.ground_truth = {AnswerKind::MathExpr, "3/4", std::nullopt, std::nullopt};
  return p;
}

class StubGenerator : public ChainGenerator {
 public:
  std::vector<std::string> texts = {
      "<think>1/2 is 2/4, plus 1/4 is 3/4</think><answer>\\boxed{0.75}</answer>",
      "<think>guess</think><answer>\\boxed{1}</answer>",
      "no tags \\boxed{3/4}",
      "<think>careful</think><answer>\\boxed{3/4}</answer>",
  };
  int calls = 0;
  std::vector<std::string> generate(const PromptRecord&, int k, double) override {
    ++calls;
    return {texts.begin(), texts.begin() + std::min<std::size_t>(k, texts.size())};
  }
};

class ThrowingGenerator : public ChainGenerator {
 public:
  std::vector<std::string> generate(const PromptRecord&, int, double) override { throw std::runtime_error("down"); }
};

// Scores by chain text; unknown chains get a malformed reply.
class StubJudge : public CotJudge {
 public:
  std::map<std::string, std::string> replies;
  std::string score(const CoTRecord& record, const std::string& prompt) override {
    CHECK(prompt.find(record.chain_text) != std::string::npos);
    auto it = replies.find(record.chain_text);
    if (it == replies.end()) throw std::runtime_error("no reply");
    return it->second;
  }
};

}  // namespace

TEST_CASE("chain synthesis parses with the verifier") {
  StubGenerator gen;
  auto records = synthesize_chains(prompt(), gen, 4, 1.0);
  REQUIRE(records.size() == 4);
  CHECK(records[0].well_formed);
  CHECK(records[0].chain_text == "1/2 is 2/4, plus 1/4 is 3/4");
  CHECK(records[0].final_answer == "0.75");
  CHECK_FALSE(records[2].well_formed);
  CHECK(records[2].final_answer.empty());
  for (const auto& r : records) CHECK_FALSE(r.accuracy_pass);

  CHECK_THROWS_AS(synthesize_chains(prompt(), gen, 0, 1.0), PreconditionError);
  CHECK_THROWS_AS(synthesize_chains(prompt(), gen, 2, 0.0), PreconditionError);
  CHECK_THROWS_AS(synthesize_chains(prompt(), gen, 5, 1.0), GeneratorFailure);
  ThrowingGenerator broken;
  CHECK_THROWS_AS(synthesize_chains(prompt(), broken, 2, 1.0), GeneratorFailure);
}

TEST_CASE("answer filter keeps verified chains in order") {
  StubGenerator gen;
  auto kept = filter_by_answer(synthesize_chains(prompt(), gen, 4, 1.0), prompt().ground_truth);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].final_answer == "0.75");
  CHECK(kept[1].final_answer == "3/4");
  for (const auto& r : kept) CHECK(r.accuracy_pass);
}

TEST_CASE("quality replies") {
  CHECK(parse_quality_reply("4") == 4);
  CHECK(parse_quality_reply(" 5\n") == 5);
  CHECK_FALSE(parse_quality_reply("0").has_value());
  CHECK_FALSE(parse_quality_reply("6").has_value());
  CHECK_FALSE(parse_quality_reply("4/5").has_value());
  CHECK_FALSE(parse_quality_reply("").has_value());
  CHECK_FALSE(parse_quality_reply("score: 4").has_value());
}

TEST_CASE("quality prompt substitutes the chain") {
  CoTRecord r;
  r.chain_text = "step one";
  const auto p = quality_prompt(r);
  CHECK(p.find("The given reasoning process is: step one") != std::string::npos);
  CHECK(p.find("REASONING") == std::string::npos);
}

TEST_CASE("scoring and selection") {
  StubGenerator gen;
  auto passed = filter_by_answer(synthesize_chains(prompt(), gen, 4, 1.0), prompt().ground_truth);
  StubJudge judge;
  judge.replies = {{"1/2 is 2/4, plus 1/4 is 3/4", "5"}, {"careful", "3"}};
  auto scored = score_quality_batch(passed, judge, 2);
  CHECK(scored[0].quality_score == 5);
  CHECK(scored[1].quality_score == 3);
  auto selected = select_cold_start(scored, 4);
  REQUIRE(selected.size() == 1);
  CHECK(selected[0].chain_text == "1/2 is 2/4, plus 1/4 is 3/4");
  CHECK(select_cold_start(scored, 3).size() == 2);

  CHECK_THROWS_AS(select_cold_start(passed, 4), UnscoredRecord);
  auto unfiltered = synthesize_chains(prompt(), gen, 1, 1.0);
  CHECK_THROWS_AS(score_quality(unfiltered[0], judge), PreconditionError);
  CHECK_THROWS_AS(select_cold_start(unfiltered, 4), PreconditionError);

  judge.replies["careful"] = "four";
  CHECK_THROWS_AS(score_quality(passed[1], judge), MalformedJudgeOutput);
  judge.replies.erase("careful");
  CHECK_THROWS_AS(score_quality(passed[1], judge), JudgeFailure);
}

TEST_CASE("prompt constants match the prompt files") {
  auto read = [](const char* name) {
    std::ifstream in(std::string(RLVR_SOURCE_DIR) + "/prompts/" + name, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(read("system_prompt.txt") == prompts::kSystemPrompt);
  CHECK(read("cot_quality_scoring.txt") == prompts::kCotQualityScoringPrompt);
  CHECK(read("rlvr_difficulty.txt") == prompts::kRlvrDifficultyPrompt);
  CHECK(read("spatial_validation.txt") == prompts::kSpatialValidationPrompt);
  CHECK(prompts::fill("a SLOT b SLOT", {{"SLOT", "x"}}) == "a x b x");
}
