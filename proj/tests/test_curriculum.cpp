#include <doctest.h>

#include <map>
#include <random>
#include <stdexcept>

#include "rlvr/curriculum.hpp"
#include "rlvr/error.hpp"

using namespace rlvr;

namespace {

PromptRecord record(const std::string& id, const std::string& letter = "B") {
  PromptRecord r;
  r.id = id;
  r.task = "general";
  r.question = "q";
  r.ground_truth = {AnswerKind::OptionLetter, letter, std::nullopt, std::nullopt};
  return r;
}

// Answers correctly for the first `correct[id]` of n responses.
class StubSampler : public ResponseSampler {
 public:
  std::map<std::string, int> correct;
  std::vector<std::string> sample(const PromptRecord& prompt, int n) override {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
      const bool right = i < correct[prompt.id];
      out.push_back("<think>x</think><answer>\\boxed{" + std::string(right ? prompt.ground_truth.value : "Z") +
                    "}</answer>");
    }
    return out;
  }
};

class ShortSampler : public ResponseSampler {
 public:
  std::vector<std::string> sample(const PromptRecord&, int) override { return {"x"}; }
};

class ThrowingSampler : public ResponseSampler {
 public:
  std::vector<std::string> sample(const PromptRecord&, int) override { throw std::runtime_error("down"); }
};

}  // namespace

TEST_CASE("difficulty is one minus accuracy") {
  StubSampler s;
  s.correct = {{"a", 7}, {"b", 0}, {"c", 10}};
  auto a = score_difficulty(record("a"), s, 10);
  CHECK(a.accuracy == 0.7);
  CHECK(a.difficulty == 1.0 - 0.7);
  CHECK(a.record.difficulty.value() == a.difficulty);
  CHECK(score_difficulty(record("b"), s, 10).difficulty == 1.0);
  CHECK(score_difficulty(record("c"), s, 10).difficulty == 0.0);

  ShortSampler shorty;
  ThrowingSampler broken;
  CHECK_THROWS_AS(score_difficulty(record("a"), shorty, 10), SamplerFailure);
  CHECK_THROWS_AS(score_difficulty(record("a"), broken, 10), SamplerFailure);
  CHECK_THROWS_AS(score_difficulty(record("a"), s, 0), PreconditionError);
}

TEST_CASE("filter and order") {
  StubSampler s;
  std::vector<ScoredPrompt> scored;
  const int correct[] = {3, 10, 0, 8, 3, 5};
  for (int i = 0; i < 6; ++i) {
    const std::string id = "p" + std::to_string(i);
    s.correct[id] = correct[i];
    scored.push_back(score_difficulty(record(id), s, 10));
  }
  auto kept = order_ascending(filter_extremes(scored));
  std::vector<std::string> ids;
  for (const auto& k : kept) ids.push_back(k.record.id);
  CHECK(ids == std::vector<std::string>{"p3", "p5", "p0", "p4"});
  for (std::size_t i = 1; i < kept.size(); ++i) CHECK(kept[i - 1].difficulty <= kept[i].difficulty);
}

TEST_CASE("balanced schedule example") {
  std::vector<TaskQueue> tasks = {{"a", {"a0", "a1", "a2"}, 1}, {"b", {"b0"}, 3}, {"c", {"c0", "c1"}, 1}};
  auto s = balanced_schedule(tasks, 2);
  std::vector<std::string> order;
  for (const auto& e : s) order.push_back(e.task_id);
  CHECK(order == std::vector<std::string>{"a", "b", "c", "a", "b"});
  CHECK(s[1].prompt_ids == std::vector<std::string>{"b0", "b0"});
  CHECK(s[4].prompt_ids == std::vector<std::string>{"b0"});
  CHECK(s[3].rotation == 1);

  CHECK_THROWS_AS(balanced_schedule({{"e", {}, 1}}, 2), EmptyTask);
  CHECK_THROWS_AS(balanced_schedule(tasks, 0), PreconditionError);
  CHECK_THROWS_AS(balanced_schedule({{"e", {"x"}, 0}}, 2), PreconditionError);
  CHECK(balanced_schedule({}, 4).empty());
}

TEST_CASE("balanced schedule rotation property") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> ntasks(1, 6), nprompts(1, 30), epochs(1, 4), bs(1, 9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TaskQueue> tasks;
    const int n = ntasks(rng);
    for (int k = 0; k < n; ++k) {
      TaskQueue q;
      q.task_id = "t" + std::to_string(k);
      for (int i = nprompts(rng); i > 0; --i) q.prompt_ids.push_back(q.task_id + "-" + std::to_string(i));
      q.epochs = epochs(rng);
      tasks.push_back(q);
    }
    const int b = bs(rng);
    auto s = balanced_schedule(tasks, b);

    std::vector<int> batches;
    std::size_t expected_total = 0;
    for (const auto& q : tasks) {
      const int items = static_cast<int>(q.prompt_ids.size()) * q.epochs;
      batches.push_back((items + b - 1) / b);
      expected_total += batches.back();
    }
    REQUIRE(s.size() == expected_total);

    // Walk the rotations: rotation r holds every task with more than r batches, in input order.
    std::size_t pos = 0;
    for (int r = 0; pos < s.size(); ++r) {
      for (int k = 0; k < n; ++k) {
        if (batches[k] <= r) continue;
        REQUIRE(pos < s.size());
        CHECK(s[pos].task_id == tasks[k].task_id);
        CHECK(s[pos].rotation == r);
        CHECK(s[pos].step == static_cast<int>(pos));
        CHECK(static_cast<int>(s[pos].prompt_ids.size()) <= b);
        for (const auto& id : s[pos].prompt_ids) CHECK(id.rfind(tasks[k].task_id + "-", 0) == 0);
        ++pos;
      }
    }
  }
}
