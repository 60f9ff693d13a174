// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles/finite_diff.hpp"
#include "oracles/reference_math.hpp"
#include "oracles/scenes.hpp"
#include "oracles/spatial_oracle.hpp"
#include "rlvr/curriculum.hpp"
#include "rlvr/grpo.hpp"
#include "rlvr/harness.hpp"
#include "rlvr/io.hpp"
#include "rlvr/policy.hpp"
#include "rlvr/rewards.hpp"
#include "rlvr/spatial.hpp"
#include "rlvr/verifier.hpp"
#include "spatial_builders.hpp"
#include "temp_dir.hpp"
#include "toy_fixture.hpp"

using namespace rlvr;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// --- 1 ---------------------------------------------------------------------------
Outcome ednm_exactness() {
  const double r300 = ednm_reward(300, 300), r150 = ednm_reward(150, 300), r600 = ednm_reward(600, 300);
  bool ok = r300 == 1.0 && std::abs(r150 - std::exp(-1.0)) <= 1e-6 && std::abs(r600 - std::exp(-2.0)) <= 1e-6;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 3000.0);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    double a = d(rng), b = d(rng);
    if (a > b) std::swap(a, b);
    if (a == b) continue;
    // symmetric about x_gt and strictly decreasing in the distance from it
    const double up = ednm_reward(300 + a, 300), down = ednm_reward(300 - a, 300);
    if (std::abs(up - down) > 1e-15) ++violations;
    if (std::abs(up - static_cast<double>(oracle::ednm(300 + a, 300))) > 1e-12) ++violations;
    if (!(ednm_reward(300 + a, 300) > ednm_reward(300 + b, 300)) && ednm_reward(300 + b, 300) > 0) ++violations;
    if (!(ednm_reward(300 - a, 300) > ednm_reward(300 - b, 300)) && ednm_reward(300 - b, 300) > 0) ++violations;
  }
  ok = ok && violations == 0;
  return {ok, "R(150)=" + fmt("%.9f", r150) + " R(600)=" + fmt("%.9f", r600) + " violations=" +
                  std::to_string(violations)};
}

// --- 2 ---------------------------------------------------------------------------
Outcome dynamic_weight_values() {
  auto a = [](double m) { return dynamic_weight(std::vector<double>{m}, 7.2); };
  bool ok = a(0.5) == 1.8 && a(0.0) == 0.0 && a(1.0) == 0.0;
  int argmax = 0;
  for (int i = 0; i <= 1000; ++i) {
    if (a(i / 1000.0) > a(argmax / 1000.0)) argmax = i;
  }
  ok = ok && argmax == 500;
  return {ok, "alpha(0.5)=" + fmt("%.17g", a(0.5)) + " argmax=" + fmt("%.3f", argmax / 1000.0)};
}

// --- 3 ---------------------------------------------------------------------------
Outcome cosine_schedule() {
  const int t_max = 1000;
  bool ok = kl_coefficient(0.01, 0, t_max) == 0.01 && kl_coefficient(0.01, t_max, t_max) == 0.0 &&
            std::abs(kl_coefficient(0.01, t_max / 2, t_max) - 0.005) <= 1e-15;
  for (int t = 1; t <= t_max; ++t) ok = ok && kl_coefficient(0.01, t, t_max) <= kl_coefficient(0.01, t - 1, t_max);
  for (int tm : {1, 2, 7, 300}) {
    for (int t = 1; t <= tm; ++t) ok = ok && kl_coefficient(0.01, t, tm) <= kl_coefficient(0.01, t - 1, tm);
  }
  return {ok, "beta(T/2)=" + fmt("%.17g", kl_coefficient(0.01, t_max / 2, t_max))};
}

// --- 4 ---------------------------------------------------------------------------
Outcome advantage_normalization() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::bernoulli_distribution coin(0.5);
  double worst_mean = 0, worst_std = 0;
  int zero_groups = 0, bad_zero = 0;
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> r(16);
    const int mode = k % 4;
    for (double& v : r) {
      v = mode == 0 ? u(rng) : mode == 1 ? (coin(rng) ? 2.0 : 1.0) : mode == 2 ? 1.0 + u(rng) * 1e-3 : 1.0;
    }
    auto a = compute_advantages(r);
    if (*std::min_element(r.begin(), r.end()) == *std::max_element(r.begin(), r.end())) {
      ++zero_groups;
      for (double v : a) bad_zero += v != 0.0;
      continue;
    }
    double mean = 0, var = 0;
    for (double v : a) mean += v;
    mean /= 16;
    for (double v : a) var += (v - mean) * (v - mean);
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_std = std::max(worst_std, std::abs(std::sqrt(var / 16) - 1));
  }
  const bool ok = worst_mean <= 1e-9 && worst_std <= 1e-9 && bad_zero == 0 && zero_groups > 0;
  return {ok, "max|mean|=" + fmt("%.2e", worst_mean) + " max|std-1|=" + fmt("%.2e", worst_std) +
                  " zero-variance groups=" + std::to_string(zero_groups)};
}

// --- 5 ---------------------------------------------------------------------------
Outcome gradient_check() {
  std::mt19937_64 rng(5);
  double worst = 0;
  int instances = 0;
  std::size_t max_params = 0;
  while (instances < 150) {
    auto inst = fixture::random_instance(rng);
    if (inst.policy.num_params() > 50 || fixture::near_kink(inst.group, 0.2)) continue;
    const bool inside = instances % 2 == 1;
    auto og = objective_and_gradient(inst.policy, inst.ref, inst.group, inst.alpha, inst.beta_hat, 0.2, inside, 1.0);
    auto f = [&](const std::vector<double>& x) {
      ToyPolicy p = inst.policy;
      std::copy(x.begin(), x.end(), p.mutable_params().begin());
      RolloutGroup g = inst.group;
      refresh_group(g, p, inst.ref, 1.0);
      return grpo_objective(g, inst.alpha, inst.beta_hat, 0.2, inside);
    };
    std::vector<double> x(inst.policy.params().begin(), inst.policy.params().end());
    worst = std::max(worst, oracle::relative_error(og.gradient, oracle::central_difference(f, x, 1e-5)));
    max_params = std::max(max_params, inst.policy.num_params());
    ++instances;
  }
  return {worst <= 1e-4, std::to_string(instances) + " instances, <=" + std::to_string(max_params) +
                             " params, max rel err=" + fmt("%.2e", worst)};
}

// --- 6 ---------------------------------------------------------------------------
Outcome objective_identity() {
  std::mt19937_64 rng(6);
  double worst = 0;
  std::uniform_real_distribution<double> u(0, 2);
  for (int k = 0; k < 500; ++k) {
    auto inst = fixture::random_instance(rng, 0.0);
    std::vector<double> raw(inst.group.size());
    for (double& v : raw) v = u(rng);
    inst.group.advantages = compute_advantages(raw);
    const double v = grpo_objective(inst.group, inst.alpha, inst.beta_hat, 0.2, false);
    worst = std::max(worst, std::abs(v + inst.beta_hat * mean_group_kl(inst.group)));
  }
  return {worst <= 1e-9, "500 instances, max|J + beta*KL|=" + fmt("%.2e", worst)};
}

// --- 7 ---------------------------------------------------------------------------
ExperimentConfig mc_config() {
  ExperimentConfig c;
  c.seed = 2025;
  c.train.group_size = 16;
  c.train.batch_size = 8;
  c.train.temperature = 1.0;
  c.train.learning_rate = 20.0;
  TaskSpec t;
  t.id = "mc";
  t.kind = "mc4";
  t.count = 8;
  t.epochs = 300;
  c.tasks = {t};
  return c;
}

Outcome toy_rlvr() {
  std::vector<std::vector<double>> runs;
  double start = 0, final_exact = 0;
  int reached = -1;
  for (int run = 0; run < 2; ++run) {
    Trainer trainer(mc_config());
    if (run == 0) {
      for (const auto& t : trainer.tasks()) start += exact_accuracy(trainer.initial_policy(), t);
      start /= static_cast<double>(trainer.tasks().size());
    }
    std::vector<double> acc;
    while (!trainer.done()) {
      acc.push_back(trainer.step().mean_accuracy);
      if (run == 0 && reached < 0 && acc.size() >= 10) {
        double trailing = 0;
        for (std::size_t i = acc.size() - 10; i < acc.size(); ++i) trailing += acc[i];
        if (trailing / 10 >= 0.9) reached = static_cast<int>(acc.size());
      }
    }
    if (run == 0) {
      for (const auto& t : trainer.tasks()) final_exact += exact_accuracy(trainer.state().policy, t);
      final_exact /= static_cast<double>(trainer.tasks().size());
    }
    runs.push_back(acc);
  }
  const bool deterministic = runs[0] == runs[1];
  const bool ok = std::abs(start - 0.25) <= 0.05 && reached > 0 && reached <= 300 && final_exact >= 0.9 &&
                  deterministic;
  return {ok, "start=" + fmt("%.3f", start) + " trailing-10 acc>=0.9 at step " + std::to_string(reached) +
                  " final=" + fmt("%.3f", final_exact) + (deterministic ? " deterministic" : " NOT deterministic")};
}

// --- 8 ---------------------------------------------------------------------------
// Pooled exact-distribution median of |x - x_gt| / x_gt over the prompts.
double median_relative_error(const ToyPolicy& policy, const std::vector<SyntheticTask>& tasks,
                             const NumericGrid& grid) {
  std::vector<std::pair<double, double>> mass;  // (rel err, weight)
  for (const auto& t : tasks) {
    const double gt = std::stod(t.gt.value);
    auto p = policy.probabilities(t.context, 0);
    for (int b = 0; b < grid.count; ++b) mass.emplace_back(std::abs(grid.value(b) - gt) / gt, p[b] / tasks.size());
  }
  std::sort(mass.begin(), mass.end());
  double cum = 0;
  for (const auto& [err, w] : mass) {
    cum += w;
    if (cum >= 0.5) return err;
  }
  return mass.back().first;
}

Outcome ednm_vs_binary() {
  const NumericGrid grid;
  const auto vocab = Vocabulary::standard(grid);
  std::mt19937_64 setup(8);
  auto tasks = make_numeric_tasks(8, grid, 19, 30, setup, "num");
  tasks[0].gt.value = "300";
  ToyPolicy initial = make_policy_for(tasks, vocab);
  // the exact answer is practically unreachable from the start
  for (const auto& t : tasks) {
    initial.set_logit(t.context, 0, vocab.numeric_tokens()[grid.snap(std::stod(t.gt.value))], -30.0);
  }

  TrainConfig config;
  config.group_size = 16;
  config.learning_rate = 10.0;
  const int steps = 500;

  // binary: indicator reward on the numeric answer
  bool binary_zero = true;
  {
    auto state = TrainState::start(initial, steps);
    Rng rng(81);
    std::vector<RolloutGroup> batch;
    for (const auto& t : tasks) {
      auto g = sample_group(*state.old_policy, t, config.group_size, 1.0, rng);
      assign_rewards(g, t.gt, TaskFamily::General, config.ednm);
      for (const auto& r : g.rewards) binary_zero = binary_zero && r.accuracy == 0.0;
      for (double a : g.advantages) binary_zero = binary_zero && a == 0.0;
      auto og = objective_and_gradient(state.policy, *state.ref_policy, g, 1.0, 0.0, config.clip_epsilon, false, 1.0);
      for (double v : og.gradient) binary_zero = binary_zero && v == 0.0;
      batch.push_back(std::move(g));
    }
    const std::vector<double> before(state.policy.params().begin(), state.policy.params().end());
    grpo_step(state, batch, config);
    binary_zero = binary_zero && std::equal(before.begin(), before.end(), state.policy.params().begin());
  }

  // EDNM
  auto state = TrainState::start(initial, steps);
  const double start_median = median_relative_error(state.policy, tasks, grid);
  bool variance = false;
  int reached = -1;
  double median = start_median;
  for (int step = 0; step < steps && reached < 0; ++step) {
    std::seed_seq seq{8u, static_cast<unsigned>(step)};
    Rng rng(seq);
    std::vector<RolloutGroup> batch;
    for (const auto& t : tasks) {
      auto g = sample_group(*state.old_policy, t, config.group_size, 1.0, rng);
      assign_rewards(g, t.gt, TaskFamily::Spatial, config.ednm);
      if (step == 0) {
        for (double a : g.advantages) variance = variance || a != 0.0;
      }
      batch.push_back(std::move(g));
    }
    grpo_step(state, batch, config);
    median = median_relative_error(state.policy, tasks, grid);
    if (median <= 0.1) reached = step + 1;
  }
  const bool ok = binary_zero && variance && reached > 0;
  return {ok, std::string("binary gradient ") + (binary_zero ? "exactly zero" : "NONZERO") +
                  ", EDNM median rel err " + fmt("%.3f", start_median) + " -> " + fmt("%.3f", median) +
                  " (<=0.1 at step " + std::to_string(reached) + ")"};
}

// --- 9 ---------------------------------------------------------------------------
Outcome verifier_corpus() {
  std::ifstream in(std::string(RLVR_SOURCE_DIR) + "/tests/data/verifier_corpus.jsonl");
  int total = 0, passed = 0;
  std::string line, failures;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = json::parse(line);
    const GroundTruth gt = io::ground_truth_from_json(j["ground_truth"], 0);
    const bool got = general_accuracy_reward(parse_response(j["response"].get<std::string>()), gt) == 1;
    ++total;
    if (got == j["expected"].get<bool>()) {
      ++passed;
    } else {
      failures += " [" + j["name"].get<std::string>() + "]";
    }
  }
  return {total >= 50 && passed == total, std::to_string(passed) + "/" + std::to_string(total) + failures};
}

// --- 10 --------------------------------------------------------------------------
class StubSampler : public ResponseSampler {
 public:
  std::map<std::string, int> correct;
  std::vector<std::string> sample(const PromptRecord& p, int n) override {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
      out.push_back("<think>x</think><answer>\\boxed{" + std::string(i < correct[p.id] ? p.ground_truth.value : "Z") +
                    "}</answer>");
    }
    return out;
  }
};

Outcome difficulty_pipeline() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> c(0, 10);
  StubSampler sampler;
  std::vector<ScoredPrompt> scored;
  bool exact = true;
  for (int i = 0; i < 500; ++i) {
    PromptRecord r;
    r.id = "p" + std::to_string(i);
    r.ground_truth = {AnswerKind::OptionLetter, "C", std::nullopt, std::nullopt};
    sampler.correct[r.id] = c(rng);
    auto s = score_difficulty(r, sampler, 10);
    exact = exact && s.difficulty == 1.0 - sampler.correct[r.id] / 10.0 && s.accuracy == sampler.correct[r.id] / 10.0;
    scored.push_back(s);
  }
  auto kept = order_ascending(filter_extremes(scored));
  bool no_extremes = true, monotone = true;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    no_extremes = no_extremes && kept[i].accuracy > 0.0 && kept[i].accuracy < 1.0;
    if (i) monotone = monotone && kept[i - 1].difficulty <= kept[i].difficulty;
  }
  std::size_t expected = 0;
  for (const auto& s : scored) expected += s.accuracy > 0.0 && s.accuracy < 1.0;
  const bool ok = exact && no_extremes && monotone && kept.size() == expected;
  return {ok, std::to_string(kept.size()) + " of 500 kept, monotone=" + (monotone ? "yes" : "no")};
}

// --- 11 --------------------------------------------------------------------------
Outcome balanced_scheduler() {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> ntasks(1, 7), nprompts(1, 40), epochs(1, 4), bs(1, 16);
  int violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<TaskQueue> tasks;
    for (int k = ntasks(rng); k > 0; --k) {
      TaskQueue q;
      q.task_id = "t" + std::to_string(tasks.size());
      // duplicate task ids across entries are allowed in a multiset; keep ids distinct per entry
      for (int i = nprompts(rng); i > 0; --i) q.prompt_ids.push_back(q.task_id + ":" + std::to_string(i));
      q.epochs = epochs(rng);
      tasks.push_back(q);
    }
    const int b = bs(rng);
    const auto s = balanced_schedule(tasks, b);
    std::map<std::string, int> batches;
    for (const auto& q : tasks) batches[q.task_id] = (static_cast<int>(q.prompt_ids.size()) * q.epochs + b - 1) / b;
    // Prefix covering k full rotations: entries of rotations < k.
    int max_rot = 0;
    for (const auto& e : s) max_rot = std::max(max_rot, e.rotation);
    for (int k = 1; k <= max_rot + 1; ++k) {
      std::map<std::string, int> count;
      for (const auto& e : s) {
        if (e.rotation < k) ++count[e.task_id];
      }
      for (const auto& [id, n] : batches) {
        if (count[id] != std::min(k, n)) ++violations;
      }
    }
    for (const auto& e : s) {
      for (const auto& id : e.prompt_ids) {
        if (id.substr(0, id.find(':')) != e.task_id) ++violations;
      }
    }
  }
  return {violations == 0, "2000 random task sets, violations=" + std::to_string(violations)};
}

// --- 12 --------------------------------------------------------------------------
Outcome spatial_oracle() {
  std::mt19937_64 rng(12);
  SynthConfig config;
  config.seed = 12;
  config.appearance_questions = 2;
  int items = 0, mismatches = 0;
  std::string first_error;
  for (int k = 0; k < 1000; ++k) {
    auto scene = oracle::random_scene(rng, "scene" + std::to_string(k));
    auto video = oracle::random_video(rng, scene, "video" + std::to_string(k));
    const oracle::Context ctx{&scene, &video, config.tie_ratio, config.min_pixel_area, config.adjacent_window,
                              config.min_lateral_offset};
    auto check = [&](const QAItem& item) {
      ++items;
      if (auto err = oracle::check(item, ctx)) {
        if (first_error.empty()) first_error = *err;
        ++mismatches;
      }
    };
    for (auto c : kImageCategories) {
      for (const auto& item : gen_image_qa(scene, c, config)) check(item);
    }
    for (auto c : kVideoCategories) {
      for (const auto& item : gen_video_qa(video, scene, c, config)) check(item);
    }
  }
  auto s = build::scene("s", {});
  auto v = build::video("s", {{"sofa", 1}, {"blanket", 5}, {"trash can", 20}, {"microwave", 28}});
  config.appearance_questions = 16;
  bool example = false;
  for (const auto& item : gen_video_qa(v, s, SpatialCategory::AppearanceOrder, config)) {
    example = example || item.target_content() == "sofa, blanket, trash can, microwave";
  }
  const bool ok = mismatches == 0 && items > 0 && example;
  return {ok, std::to_string(items) + " items, mismatches=" + std::to_string(mismatches) +
                  (example ? ", appearance example reproduced" : ", appearance example MISSING") +
                  (first_error.empty() ? "" : " first: " + first_error)};
}

// --- 13 --------------------------------------------------------------------------
Outcome augmentation_invariants() {
  std::mt19937_64 rng(13);
  const std::map<std::string, Rational> base = {
      {"m", Rational(1)}, {"cm", Rational(1, 100)}, {"m2", Rational(1)}, {"cm2", Rational(1, 10000)}};
  int rotations = 0, conversions = 0, negations = 0, violations = 0;
  double worst_rel = 0;
  for (int k = 0; k < 300; ++k) {
    auto scene = oracle::random_scene(rng, "s" + std::to_string(k));
    auto video = oracle::random_video(rng, scene, "v" + std::to_string(k));
    std::vector<QAItem> items;
    for (auto c : kImageCategories) {
      for (auto& i : gen_image_qa(scene, c)) items.push_back(std::move(i));
    }
    for (auto c : kVideoCategories) {
      for (auto& i : gen_video_qa(video, scene, c)) items.push_back(std::move(i));
    }
    for (const auto& item : items) {
      if (item.has_options()) {
        const int n = static_cast<int>(item.target.options->size());
        std::multiset<std::string> before;
        for (const auto& o : *item.target.options) before.insert(o.second);
        for (int off = 0; off < n; ++off) {
          auto out = augment_distribution(item, off);
          std::multiset<std::string> after;
          for (const auto& o : *out.target.options) after.insert(o.second);
          violations += after != before || out.target_content() != item.target_content();
          ++rotations;
        }
        if (n == 2) {
          const auto a = to_true_false(item, 0).target.value, b = to_true_false(item, 1).target.value;
          const int yes = a == "Yes" ? 0 : 1;
          violations += a == b || (*item.target.options)[yes].second != item.target_content();
          ++negations;
        }
      }
      if (item.target.kind == AnswerKind::Numeric && item.target.unit) {
        const bool area = *item.target.unit == "m2";
        for (const char* unit : {area ? "m2" : "m", area ? "cm2" : "cm"}) {
          auto out = augment_instruction(item, unit);
          const Rational before = *parse_decimal(item.target.value) * base.at(*item.target.unit);
          const Rational after = *parse_rational_literal(out.target.value) * base.at(unit);
          const double rel = before == 0 ? to_double(abs(after)) : to_double(abs(after - before) / abs(before));
          worst_rel = std::max(worst_rel, rel);
          ++conversions;
        }
      }
    }
  }
  const bool ok = violations == 0 && worst_rel <= 1e-12 && rotations > 0 && conversions > 0 && negations > 0;
  return {ok, std::to_string(rotations) + " rotations, " + std::to_string(conversions) + " conversions (max rel " +
                  fmt("%.1e", worst_rel) + "), " + std::to_string(negations) + " negation pairs, violations=" +
                  std::to_string(violations)};
}

// --- 14 --------------------------------------------------------------------------
Outcome determinism() {
  testing_fs::TempDir dir;
  std::ifstream in(std::string(RLVR_SOURCE_DIR) + "/configs/example_train.json");
  auto config = parse_experiment_config(json::parse(in));
  run_training(config, dir / "a");
  run_training(config, dir / "b");
  const auto a = testing_fs::read(dir / "a/metrics.jsonl"), b = testing_fs::read(dir / "b/metrics.jsonl");
  const bool ok = !a.empty() && a == b;
  return {ok, std::to_string(a.size()) + " bytes of metrics, " + (ok ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"EDNM exactness", ednm_exactness},
      {"dynamic weight", dynamic_weight_values},
      {"cosine KL schedule", cosine_schedule},
      {"advantage normalization", advantage_normalization},
      {"gradient correctness", gradient_check},
      {"objective identity", objective_identity},
      {"end-to-end toy RLVR", toy_rlvr},
      {"EDNM vs binary learning signal", ednm_vs_binary},
      {"verifier conformance", verifier_corpus},
      {"difficulty pipeline", difficulty_pipeline},
      {"balanced scheduler", balanced_scheduler},
      {"spatial oracle equivalence", spatial_oracle},
      {"augmentation invariants", augmentation_invariants},
      {"training determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
