#include "rlvr/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "rlvr/curation.hpp"
#include "rlvr/error.hpp"
#include "rlvr/io.hpp"
#include "rlvr/prompts.hpp"

namespace rlvr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// --- config parsing -------------------------------------------------------------

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  std::set<std::string> names(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!names.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& dst, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    dst = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where + ": " + it->dump());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

TaskSpec parse_task(const json& j, std::size_t index) {
  const std::string where = "tasks[" + std::to_string(index) + "]";
  require(j.is_object(), where + " must be an object");
  reject_unknown(j, {"id", "kind", "count", "epochs", "group_size", "reward", "min_bin", "max_bin", "dataset"},
                 where);
  TaskSpec t;
  read(j, "id", t.id, where);
  read(j, "kind", t.kind, where);
  read(j, "count", t.count, where);
  read(j, "epochs", t.epochs, where);
  read(j, "group_size", t.group_size, where);
  read(j, "reward", t.reward, where);
  read(j, "min_bin", t.min_bin, where);
  read(j, "max_bin", t.max_bin, where);
  if (j.contains("dataset") && !j["dataset"].is_null()) {
    std::string path;
    read(j, "dataset", path, where);
    t.dataset = path;
  }
  require(!t.id.empty(), where + ".id must be non-empty");
  require(t.kind == "mc4" || t.kind == "numeric", where + ".kind must be mc4 or numeric");
  require(t.reward == "ednm" || t.reward == "binary", where + ".reward must be ednm or binary");
  require(t.dataset || t.count >= 1, where + ".count must be at least 1");
  require(t.epochs >= 0 && t.group_size >= 0, where + ": epochs and group_size must be non-negative");
  require(t.group_size != 1, where + ".group_size must be at least 2");
  return t;
}

// --- prompts as sandbox tasks ---------------------------------------------------------

SyntheticTask task_from_prompt(const PromptRecord& p, const TaskSpec& task_cfg, const NumericGrid& grid, int context) {
  SyntheticTask task;
  task.prompt_id = p.id;
  task.task_id = task_cfg.id;
  task.gt = p.ground_truth;
  task.context = context;
  if (task_cfg.kind == "mc4") {
    require(p.ground_truth.kind == AnswerKind::OptionLetter && p.ground_truth.value.size() == 1 &&
                p.ground_truth.value[0] >= 'A' && p.ground_truth.value[0] <= 'D',
            "prompt '" + p.id + "' is not a four-option letter item");
    task.kind = SyntheticTask::Kind::MultipleChoice4;
    task.gt.options.reset();
  } else {
    auto x = parse_number(p.ground_truth.value);
    require(p.ground_truth.kind == AnswerKind::Numeric && x.has_value(),
            "prompt '" + p.id + "' does not have a numeric answer");
    const int bin = grid.snap(*x);
    require(std::abs(grid.value(bin) - *x) <= 1e-9 * std::max(1.0, std::abs(*x)),
            "prompt '" + p.id + "' answer " + p.ground_truth.value + " is not on the numeric grid");
    task.kind = SyntheticTask::Kind::NumericEstimate;
  }
  task.family = task_cfg.kind == "numeric" && task_cfg.reward == "ednm" ? TaskFamily::Spatial : TaskFamily::General;
  return task;
}

std::vector<SyntheticTask> build_tasks(const ExperimentConfig& config) {
  std::vector<SyntheticTask> all;
  Rng rng(config.seed);
  for (const auto& task_cfg : config.tasks) {
    const int first = static_cast<int>(all.size());
    std::vector<SyntheticTask> tasks;
    if (task_cfg.dataset) {
      int ctx = first;
      for (const auto& p : io::load_prompts(*task_cfg.dataset)) {
        tasks.push_back(task_from_prompt(p, task_cfg, config.grid, ctx++));
      }
      if (tasks.empty()) throw EmptyTask("dataset for task '" + task_cfg.id + "' is empty");
    } else if (task_cfg.kind == "mc4") {
      tasks = make_mc4_tasks(task_cfg.count, rng, task_cfg.id, first);
    } else {
      tasks = make_numeric_tasks(task_cfg.count, config.grid, task_cfg.min_bin, task_cfg.max_bin, rng, task_cfg.id, first);
    }
    for (auto& t : tasks) {
      t.family = task_cfg.kind == "numeric" && task_cfg.reward == "ednm" ? TaskFamily::Spatial : TaskFamily::General;
      all.push_back(std::move(t));
    }
  }
  return all;
}

// Draws responses from a fixed policy; used to score curriculum difficulty.
class PolicySampler : public ResponseSampler {
 public:
  PolicySampler(const ToyPolicy& policy, const std::map<std::string, const SyntheticTask*>& tasks,
                double temperature, std::uint64_t seed)
      : policy_(policy), tasks_(tasks), temperature_(temperature), rng_(seed) {}

  std::vector<std::string> sample(const PromptRecord& prompt, int n) override {
    const SyntheticTask& task = *tasks_.at(prompt.id);
    RolloutGroup g = sample_group(policy_, task, std::max(n, 2), temperature_, rng_);
    g.texts.resize(static_cast<std::size_t>(n));
    return g.texts;
  }

 private:
  const ToyPolicy& policy_;
  const std::map<std::string, const SyntheticTask*>& tasks_;
  double temperature_;
  Rng rng_;
};

Rng step_rng(std::uint64_t seed, int step) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), 0x5eedu};
  return Rng(seq);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << text;
    if (!out.flush()) throw IoError("write error on '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void save_progress(const Trainer& trainer, const std::string& hash, const fs::path& out_dir) {
  std::ostringstream ckpt;
  save_checkpoint(trainer.state().policy, hash, ckpt);
  write_file(out_dir / "policy.ckpt", ckpt.str());
  json state = {{"completed_steps", trainer.completed_steps()},
                {"t_cur", trainer.state().t_cur},
                {"config_hash", hash}};
  write_file(out_dir / "state.json", state.dump(2) + "\n");
}

}  // namespace

// --- config -------------------------------------------------------------------------------

ExperimentConfig parse_experiment_config(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  reject_unknown(j, {"seed", "train", "grid", "tasks", "curriculum", "curriculum_samples", "max_steps",
                     "checkpoint_every", "exec", "system_prompt"},
                 "config");
  ExperimentConfig c;
  read(j, "seed", c.seed, "config");
  if (j.contains("train")) {
    const json& t = j["train"];
    require(t.is_object(), "train must be an object");
    reject_unknown(t, {"group_size", "clip_epsilon", "kl_beta", "sigma", "t_max", "learning_rate", "temperature",
                       "batch_size", "epochs_per_task", "group_size_per_task", "ednm", "kl_inside_weight"},
                   "train");
    TrainConfig& tc = c.train;
    read(t, "group_size", tc.group_size, "train");
    read(t, "clip_epsilon", tc.clip_epsilon, "train");
    read(t, "kl_beta", tc.kl_beta, "train");
    read(t, "sigma", tc.sigma, "train");
    tc.t_max = 0;
    read(t, "t_max", tc.t_max, "train");
    read(t, "learning_rate", tc.learning_rate, "train");
    read(t, "temperature", tc.temperature, "train");
    read(t, "batch_size", tc.batch_size, "train");
    read(t, "epochs_per_task", tc.epochs_per_task, "train");
    read(t, "group_size_per_task", tc.group_size_per_task, "train");
    read(t, "kl_inside_weight", tc.kl_inside_weight, "train");
    if (t.contains("ednm")) {
      const json& e = t["ednm"];
      require(e.is_object(), "train.ednm must be an object");
      reject_unknown(e, {"gamma", "lambda", "epsilon"}, "train.ednm");
      read(e, "gamma", tc.ednm.gamma, "train.ednm");
      read(e, "lambda", tc.ednm.lambda, "train.ednm");
      read(e, "epsilon", tc.ednm.epsilon, "train.ednm");
    }
  } else {
    c.train.t_max = 0;
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    require(g.is_object(), "grid must be an object");
    reject_unknown(g, {"lo", "step", "count"}, "grid");
    read(g, "lo", c.grid.lo, "grid");
    read(g, "step", c.grid.step, "grid");
    read(g, "count", c.grid.count, "grid");
  }
  if (j.contains("tasks")) {
    require(j["tasks"].is_array(), "tasks must be an array");
    for (std::size_t i = 0; i < j["tasks"].size(); ++i) c.tasks.push_back(parse_task(j["tasks"][i], i));
  }
  read(j, "curriculum", c.curriculum, "config");
  read(j, "curriculum_samples", c.curriculum_samples, "config");
  if (j.contains("max_steps") && !j["max_steps"].is_null()) {
    int steps = 0;
    read(j, "max_steps", steps, "config");
    c.max_steps = steps;
  }
  read(j, "checkpoint_every", c.checkpoint_every, "config");
  std::string exec = "parallel";
  read(j, "exec", exec, "config");
  require(exec == "parallel" || exec == "serial", "exec must be parallel or serial");
  c.exec = exec == "serial" ? Exec::Serial : Exec::Parallel;
  c.system_prompt = std::string(prompts::kSystemPrompt);
  read(j, "system_prompt", c.system_prompt, "config");

  const TrainConfig& tc = c.train;
  require(!c.tasks.empty(), "config needs at least one task");
  std::set<std::string> ids;
  for (const auto& t : c.tasks) require(ids.insert(t.id).second, "duplicate task id '" + t.id + "'");
  require(tc.group_size >= 2, "train.group_size must be at least 2");
  require(tc.batch_size >= 1, "train.batch_size must be at least 1");
  require(tc.temperature > 0.0, "train.temperature must be positive");
  require(tc.clip_epsilon >= 0.0 && tc.kl_beta >= 0.0 && tc.sigma >= 0.0,
          "clip_epsilon, kl_beta and sigma must be non-negative");
  require(tc.t_max >= 0, "train.t_max must be non-negative (0 = schedule length)");
  require(std::isfinite(tc.learning_rate), "train.learning_rate must be finite");
  require(c.grid.count >= 1 && c.grid.count <= Vocabulary::kMaxSize - Vocabulary::TemplateCount - 4,
          "grid.count out of range");
  require(c.grid.step > 0.0, "grid.step must be positive");
  require(c.curriculum_samples >= 1, "curriculum_samples must be at least 1");
  require(!c.max_steps || *c.max_steps >= 1, "max_steps must be at least 1");
  require(c.checkpoint_every >= 0, "checkpoint_every must be non-negative");
  for (const auto& t : c.tasks) {
    require(t.min_bin >= 0 && t.max_bin < c.grid.count && t.min_bin <= t.max_bin,
            "task '" + t.id + "' bin range outside the grid");
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("'" + path.string() + "' is not valid JSON");
  return parse_experiment_config(j);
}

json to_json(const ExperimentConfig& c) {
  json tasks = json::array();
  for (const auto& t : c.tasks) {
    tasks.push_back({{"id", t.id},
                     {"kind", t.kind},
                     {"count", t.count},
                     {"epochs", t.epochs},
                     {"group_size", t.group_size},
                     {"reward", t.reward},
                     {"min_bin", t.min_bin},
                     {"max_bin", t.max_bin},
                     {"dataset", t.dataset ? json(*t.dataset) : json(nullptr)}});
  }
  const TrainConfig& tc = c.train;
  return {{"seed", c.seed},
          {"train",
           {{"group_size", tc.group_size},
            {"clip_epsilon", tc.clip_epsilon},
            {"kl_beta", tc.kl_beta},
            {"sigma", tc.sigma},
            {"t_max", tc.t_max},
            {"learning_rate", tc.learning_rate},
            {"temperature", tc.temperature},
            {"batch_size", tc.batch_size},
            {"epochs_per_task", tc.epochs_per_task},
            {"group_size_per_task", tc.group_size_per_task},
            {"ednm", {{"gamma", tc.ednm.gamma}, {"lambda", tc.ednm.lambda}, {"epsilon", tc.ednm.epsilon}}},
            {"kl_inside_weight", tc.kl_inside_weight}}},
          {"grid", {{"lo", c.grid.lo}, {"step", c.grid.step}, {"count", c.grid.count}}},
          {"tasks", std::move(tasks)},
          {"curriculum", c.curriculum},
          {"curriculum_samples", c.curriculum_samples},
          {"max_steps", c.max_steps ? json(*c.max_steps) : json(nullptr)},
          {"checkpoint_every", c.checkpoint_every},
          {"exec", c.exec == Exec::Serial ? "serial" : "parallel"},
          {"system_prompt", c.system_prompt}};
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  // Execution mode and checkpoint cadence do not change results.
  j.erase("exec");
  j.erase("checkpoint_every");
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- trainer ------------------------------------------------------------------------------

Trainer::Trainer(ExperimentConfig config)
    : config_(std::move(config)),
      tasks_(build_tasks(config_)),
      state_(TrainState::start(make_policy_for(tasks_, Vocabulary::standard(config_.grid)), 1)) {
  std::map<std::string, const SyntheticTask*> by_id;
  for (const auto& t : tasks_) {
    if (!by_id.emplace(t.prompt_id, &t).second) throw ConfigError("duplicate prompt id '" + t.prompt_id + "'");
  }

  std::vector<TaskQueue> queues;
  for (const auto& task_cfg : config_.tasks) {
    TaskQueue q;
    q.task_id = task_cfg.id;
    q.epochs = task_cfg.epochs > 0 ? task_cfg.epochs : config_.train.epochs_for(task_cfg.id);
    std::vector<ScoredPrompt> scored;
    PolicySampler sampler(state_.policy, by_id, config_.train.temperature, config_.seed ^ 0xd1ffULL);
    for (const auto& t : tasks_) {
      if (t.task_id != task_cfg.id) continue;
      if (!config_.curriculum) {
        q.prompt_ids.push_back(t.prompt_id);
        continue;
      }
      PromptRecord record;
      record.id = t.prompt_id;
      record.task = t.task_id;
      record.ground_truth = t.gt;
      scored.push_back(score_difficulty(record, sampler, config_.curriculum_samples));
    }
    if (config_.curriculum) {
      for (const auto& s : order_ascending(filter_extremes(scored))) q.prompt_ids.push_back(s.record.id);
      spdlog::info("task {}: {} of {} prompts kept after difficulty filtering", task_cfg.id, q.prompt_ids.size(),
                   scored.size());
    }
    queues.push_back(std::move(q));
  }
  schedule_ = balanced_schedule(queues, config_.train.batch_size);
  if (config_.max_steps && static_cast<int>(schedule_.size()) > *config_.max_steps) {
    schedule_.resize(static_cast<std::size_t>(*config_.max_steps));
  }
  if (schedule_.empty()) throw ScheduleError("training schedule is empty");

  for (const auto& t : tasks_) {
    family_.push_back(t.family);
    const TaskSpec* task_cfg = nullptr;
    for (const auto& s : config_.tasks) {
      if (s.id == t.task_id) task_cfg = &s;
    }
    group_size_.push_back(task_cfg->group_size > 0 ? task_cfg->group_size : config_.train.group_size_for(t.task_id));
  }
  state_.t_max = config_.train.t_max > 0 ? config_.train.t_max : total_steps();
}

const SyntheticTask& Trainer::task_for(const std::string& prompt_id) const {
  for (const auto& t : tasks_) {
    if (t.prompt_id == prompt_id) return t;
  }
  throw ConfigError("schedule refers to unknown prompt '" + prompt_id + "'");
}

StepMetrics Trainer::step() {
  if (done()) throw ScheduleError("training schedule exhausted");
  const ScheduleEntry& entry = schedule_[static_cast<std::size_t>(step_)];
  Rng rng = step_rng(config_.seed, step_);
  std::vector<RolloutGroup> batch;
  batch.reserve(entry.prompt_ids.size());
  for (const auto& id : entry.prompt_ids) {
    const SyntheticTask& task = task_for(id);
    const auto index = static_cast<std::size_t>(&task - tasks_.data());
    RolloutGroup group = sample_group(*state_.old_policy, task, group_size_[index], config_.train.temperature, rng);
    assign_rewards(group, task.gt, family_[index], config_.train.ednm);
    batch.push_back(std::move(group));
  }
  StepMetrics m = grpo_step(state_, batch, config_.train, config_.exec);
  m.step = step_;
  ++step_;
  return m;
}

void Trainer::restore(ToyPolicy policy, int completed_steps, int t_cur) {
  if (policy.num_params() != state_.policy.num_params() || policy.num_contexts() != state_.policy.num_contexts()) {
    throw CheckpointError("checkpoint policy does not match the configured tasks");
  }
  if (completed_steps < 0 || completed_steps > total_steps() || t_cur < 0 || t_cur > state_.t_max) {
    throw CheckpointError("saved progress outside the schedule");
  }
  state_.policy = std::move(policy);
  state_.old_policy = snapshot(state_.policy);
  state_.t_cur = t_cur;
  step_ = completed_steps;
}

TrainSummary run_training(const ExperimentConfig& config, const fs::path& out_dir, bool resume) {
  fs::create_directories(out_dir);
  TrainSummary summary;
  summary.config_hash = config_hash(config);
  Trainer trainer(config);

  const fs::path metrics_path = out_dir / "metrics.jsonl";
  std::vector<std::string> kept_lines;
  if (resume && fs::exists(out_dir / "state.json")) {
    json state = json::parse(read_file(out_dir / "state.json"), nullptr, false);
    if (state.is_discarded() || !state.is_object()) throw CheckpointError("state.json is not valid JSON");
    std::ifstream ckpt(out_dir / "policy.ckpt");
    if (!ckpt) throw CheckpointError("state.json present but policy.ckpt missing");
    LoadedCheckpoint loaded = load_checkpoint(ckpt);
    if (loaded.config_hash != summary.config_hash || state.value("config_hash", "") != summary.config_hash) {
      throw ConfigError("checkpoint was written under config " + loaded.config_hash + ", current config is " +
                        summary.config_hash);
    }
    const int done = state.value("completed_steps", -1);
    trainer.restore(std::move(loaded.policy), done, state.value("t_cur", -1));
    std::ifstream in(metrics_path);
    std::string line;
    while (static_cast<int>(kept_lines.size()) < done && std::getline(in, line)) kept_lines.push_back(line);
    if (static_cast<int>(kept_lines.size()) != done) throw CheckpointError("metrics.jsonl shorter than saved progress");
    spdlog::info("resuming at step {} of {}", done, trainer.total_steps());
  }

  std::vector<json> schedule;
  for (const auto& e : trainer.schedule()) schedule.push_back(io::to_json(e));
  io::write_jsonl(out_dir / "schedule.jsonl", schedule);
  write_file(out_dir / "config.resolved.json", to_json(config).dump(2) + "\n");

  std::ofstream metrics(metrics_path, std::ios::binary | std::ios::trunc);
  if (!metrics) throw IoError("cannot open '" + metrics_path.string() + "' for writing");
  for (const auto& line : kept_lines) metrics << line << '\n';

  while (!trainer.done()) {
    StepMetrics m = trainer.step();
    metrics << io::to_json(m).dump() << '\n';
    metrics.flush();
    spdlog::debug("step {} task {} acc {:.4f} kl {:.6f}", m.step, m.task_id, m.mean_accuracy, m.mean_kl);
    if (config.checkpoint_every > 0 && trainer.completed_steps() % config.checkpoint_every == 0) {
      save_progress(trainer, summary.config_hash, out_dir);
    }
    summary.last = std::move(m);
  }
  if (!metrics) throw IoError("write error on '" + metrics_path.string() + "'");
  save_progress(trainer, summary.config_hash, out_dir);
  summary.steps = trainer.completed_steps();
  return summary;
}

// --- verify ----------------------------------------------------------------------------------

std::vector<json> verify_predictions(const fs::path& predictions, const fs::path& ground_truths,
                                     const EDNMParams& ednm) {
  std::map<std::string, PromptRecord> gt;
  for (auto& p : io::load_prompts(ground_truths)) {
    const std::string id = p.id;
    if (!gt.emplace(id, std::move(p)).second) throw ConfigError("duplicate ground-truth id '" + id + "'");
  }
  std::vector<json> out;
  for (const auto& line : io::read_jsonl(predictions, {io::kPredictionSchema})) {
    const json& j = line.value;
    if (!j.contains("id") || !j["id"].is_string()) throw SchemaError(line.number, "missing field 'id'");
    if (!j.contains("response") || !j["response"].is_string()) {
      throw SchemaError(line.number, "missing field 'response'");
    }
    const std::string id = j["id"].get<std::string>();
    auto it = gt.find(id);
    if (it == gt.end()) throw SchemaError(line.number, "no ground truth for id '" + id + "'");
    const std::string response = j["response"].get<std::string>();
    const RewardBreakdown r = score_completion(response, it->second.ground_truth, it->second.family, ednm);
    out.push_back({{"schema", io::kVerifyResultSchema},
                   {"id", id},
                   {"well_formed", parse_response(response).well_formed},
                   {"accuracy", r.accuracy},
                   {"format", r.format},
                   {"total", r.total}});
  }
  return out;
}

// --- synth -----------------------------------------------------------------------------------

std::vector<SpatialCategory> parse_categories(const std::string& list) {
  std::vector<SpatialCategory> out;
  auto add = [&](SpatialCategory c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name.empty()) continue;
    if (name == "all" || name == "image") {
      for (auto c : kImageCategories) add(c);
    }
    if (name == "all" || name == "video") {
      for (auto c : kVideoCategories) add(c);
    }
    if (name == "all" || name == "image" || name == "video") continue;
    auto c = spatial_category_from_string(name);
    if (!c) throw ConfigError("unknown category '" + name + "'");
    add(*c);
  }
  if (out.empty()) throw ConfigError("no categories given");
  return out;
}

std::vector<QAItem> synthesize_files(const fs::path& scenes_path, const std::optional<fs::path>& videos_path,
                                     const std::vector<SpatialCategory>& categories, const SynthConfig& config,
                                     Exec exec) {
  const auto scenes = io::load_scenes(scenes_path);
  std::vector<VideoAnnotation> videos;
  if (videos_path) videos = io::load_videos(*videos_path);

  std::map<std::string, const SceneAnnotation*> by_id;
  for (const auto& s : scenes) {
    if (!by_id.emplace(s.scene_id, &s).second) throw ConfigError("duplicate scene id '" + s.scene_id + "'");
  }
  std::map<std::string, std::vector<const VideoAnnotation*>> scene_videos;
  for (const auto& v : videos) {
    if (!by_id.count(v.scene_id)) {
      throw ConfigError("video '" + v.video_id + "' refers to unknown scene '" + v.scene_id + "'");
    }
    scene_videos[v.scene_id].push_back(&v);
  }

  // Image categories once per scene; video categories once per video.
  std::vector<SpatialCategory> image_cats, video_cats;
  for (auto c : categories) (is_video_category(c) ? video_cats : image_cats).push_back(c);
  std::vector<SynthJob> image_jobs, video_jobs;
  for (const auto& s : scenes) {
    image_jobs.push_back({&s, nullptr});
    for (const auto* v : scene_videos[s.scene_id]) video_jobs.push_back({&s, v});
  }
  auto run = [&](const std::vector<SynthJob>& jobs, const std::vector<SpatialCategory>& cats) {
    if (cats.empty() || jobs.empty()) return std::vector<QAItem>{};
    return exec == Exec::Serial ? synthesize_serial(jobs, cats, config) : synthesize_parallel(jobs, cats, config);
  };
  std::vector<QAItem> items = run(image_jobs, image_cats);
  std::vector<QAItem> more = run(video_jobs, video_cats);
  std::move(more.begin(), more.end(), std::back_inserter(items));
  return items;
}

// --- score-difficulty ------------------------------------------------------------------------------

namespace {

class ReplaySampler : public ResponseSampler {
 public:
  explicit ReplaySampler(std::map<std::string, std::vector<std::string>> responses)
      : responses_(std::move(responses)) {}

  std::vector<std::string> sample(const PromptRecord& prompt, int n) override {
    auto it = responses_.find(prompt.id);
    if (it == responses_.end()) throw IoError("no recorded responses for '" + prompt.id + "'");
    if (it->second.size() < static_cast<std::size_t>(n)) {
      throw IoError("only " + std::to_string(it->second.size()) + " recorded responses for '" + prompt.id + "'");
    }
    return {it->second.begin(), it->second.begin() + n};
  }

 private:
  std::map<std::string, std::vector<std::string>> responses_;
};

std::vector<std::string> string_list(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_array()) throw SchemaError(line, std::string("missing array '") + key + "'");
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw SchemaError(line, std::string("'") + key + "' entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string id_field(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_string()) throw SchemaError(line, std::string("missing field '") + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

std::vector<ScoredPrompt> score_difficulty_files(const fs::path& data, const fs::path& responses, int n,
                                                 bool keep_all) {
  std::map<std::string, std::vector<std::string>> recorded;
  for (const auto& line : io::read_jsonl(responses, {io::kResponsesSchema})) {
    recorded[id_field(line.value, "id", line.number)] = string_list(line.value, "responses", line.number);
  }
  ReplaySampler sampler(std::move(recorded));
  std::vector<ScoredPrompt> scored;
  for (const auto& p : io::load_prompts(data)) scored.push_back(score_difficulty(p, sampler, n));
  if (keep_all) return scored;
  return order_ascending(filter_extremes(scored));
}

// --- curate ----------------------------------------------------------------------------------------

namespace {

struct Transcript {
  std::vector<std::string> texts;
  std::map<std::string, std::string> scores;  // chain text -> judge reply
};

class ReplayGenerator : public ChainGenerator {
 public:
  explicit ReplayGenerator(const std::map<std::string, Transcript>& t) : t_(t) {}
  std::vector<std::string> generate(const PromptRecord& prompt, int k, double) override {
    auto it = t_.find(prompt.id);
    if (it == t_.end()) throw IoError("no recorded chains for '" + prompt.id + "'");
    if (it->second.texts.size() < static_cast<std::size_t>(k)) {
      throw IoError("only " + std::to_string(it->second.texts.size()) + " recorded chains for '" + prompt.id + "'");
    }
    return {it->second.texts.begin(), it->second.texts.begin() + k};
  }

 private:
  const std::map<std::string, Transcript>& t_;
};

class ReplayJudge : public CotJudge {
 public:
  explicit ReplayJudge(const std::map<std::string, Transcript>& t) : t_(t) {}
  std::string score(const CoTRecord& record, const std::string&) override {
    const auto& scores = t_.at(record.prompt_id).scores;
    auto it = scores.find(record.raw_text);
    if (it == scores.end()) throw IoError("no recorded score for a chain of '" + record.prompt_id + "'");
    return it->second;
  }

 private:
  const std::map<std::string, Transcript>& t_;
};

}  // namespace

std::vector<CoTRecord> curate_files(const fs::path& prompts_path, const fs::path& transcripts, int k,
                                    int threshold, double temperature, int max_in_flight) {
  std::map<std::string, Transcript> recorded;
  for (const auto& line : io::read_jsonl(transcripts, {io::kTranscriptSchema})) {
    const json& j = line.value;
    Transcript& t = recorded[id_field(j, "prompt_id", line.number)];
    if (!j.contains("chains") || !j["chains"].is_array()) throw SchemaError(line.number, "missing array 'chains'");
    for (const auto& c : j["chains"]) {
      if (!c.is_object()) throw SchemaError(line.number, "chains entries must be objects");
      const std::string text = id_field(c, "text", line.number);
      t.texts.push_back(text);
      if (c.contains("score")) t.scores[text] = c["score"].is_string() ? c["score"].get<std::string>() : c["score"].dump();
    }
  }
  ReplayGenerator generator(recorded);
  ReplayJudge judge(recorded);
  std::vector<CoTRecord> selected;
  for (const auto& p : io::load_prompts(prompts_path)) {
    auto chains = synthesize_chains(p, generator, k, temperature);
    auto passed = filter_by_answer(chains, p.ground_truth);
    auto scored = score_quality_batch(passed, judge, max_in_flight);
    auto kept = select_cold_start(scored, threshold);
    spdlog::info("prompt {}: {} chains, {} correct, {} selected", p.id, chains.size(), passed.size(), kept.size());
    std::move(kept.begin(), kept.end(), std::back_inserter(selected));
  }
  return selected;
}

}  // namespace rlvr
