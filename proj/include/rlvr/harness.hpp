#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlvr/curation.hpp"
#include "rlvr/curriculum.hpp"
#include "rlvr/grpo.hpp"
#include "rlvr/policy.hpp"
#include "rlvr/spatial.hpp"

namespace rlvr {

/// One task of a training run. Prompts are generated (`kind` mc4 or numeric)
/// unless `dataset` names a prompt JSONL file.
struct TaskSpec {
  std::string id;
  std::string kind = "mc4";        // mc4 | numeric
  int count = 16;
  int epochs = 0;                  // 0 = TrainConfig::epochs_for(id)
  int group_size = 0;              // 0 = TrainConfig::group_size_for(id)
  std::string reward = "ednm";     // ednm | binary (numeric tasks)
  int min_bin = 0;                 // numeric target range, grid bins
  int max_bin = 39;
  std::optional<std::string> dataset;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  TrainConfig train;
  NumericGrid grid;
  std::vector<TaskSpec> tasks;
  bool curriculum = false;         // score with the initial policy, drop extremes, sort
  int curriculum_samples = 10;
  std::optional<int> max_steps;
  int checkpoint_every = 0;        // 0 = only at the end
  Exec exec = Exec::Parallel;
  std::string system_prompt;
};

/// Parses and validates a config object. Missing keys take defaults; unknown
/// keys are rejected. Throws ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical JSON of every setting, defaults included.
nlohmann::json to_json(const ExperimentConfig& config);

/// FNV-1a of the canonical JSON, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Deterministic GRPO training over the policy sandbox.
class Trainer {
 public:
  explicit Trainer(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const std::vector<SyntheticTask>& tasks() const { return tasks_; }
  const std::vector<ScheduleEntry>& schedule() const { return schedule_; }
  const TrainState& state() const { return state_; }
  const ToyPolicy& initial_policy() const { return *state_.ref_policy; }

  int completed_steps() const { return step_; }
  int total_steps() const { return static_cast<int>(schedule_.size()); }
  bool done() const { return step_ >= total_steps(); }

  /// Samples, scores and updates on the next scheduled batch.
  StepMetrics step();

  /// Restores progress from a checkpointed policy.
  void restore(ToyPolicy policy, int completed_steps, int t_cur);

 private:
  const SyntheticTask& task_for(const std::string& prompt_id) const;

  ExperimentConfig config_;
  std::vector<SyntheticTask> tasks_;
  std::vector<ScheduleEntry> schedule_;
  std::vector<TaskFamily> family_;  // per task index
  std::vector<int> group_size_;     // per task index
  TrainState state_;
  int step_ = 0;
};

struct TrainSummary {
  int steps = 0;
  std::string config_hash;
  std::optional<StepMetrics> last;
};

/// Runs training into `out_dir`: schedule.jsonl, metrics.jsonl, policy.ckpt and
/// state.json. With `resume`, continues from the saved state and refuses a
/// checkpoint written under a different config hash (ConfigError).
TrainSummary run_training(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          bool resume = false);

/// Batch verification: predictions {id, response} against prompt records.
/// Writes one verify_result per prediction, in prediction order.
std::vector<nlohmann::json> verify_predictions(const std::filesystem::path& predictions,
                                               const std::filesystem::path& ground_truths,
                                               const EDNMParams& ednm = {});

/// Spatial synthesis over annotation files. Videos join their scene by scene_id.
std::vector<QAItem> synthesize_files(const std::filesystem::path& scenes,
                                     const std::optional<std::filesystem::path>& videos,
                                     const std::vector<SpatialCategory>& categories,
                                     const SynthConfig& config, Exec exec = Exec::Parallel);

/// Parses a comma-separated category list; "all", "image" and "video" expand.
std::vector<SpatialCategory> parse_categories(const std::string& list);

/// Difficulty scoring from recorded responses {id, responses: [...]}. Unless
/// `keep_all`, the output is filtered to 0 < accuracy < 1 and sorted ascending.
std::vector<ScoredPrompt> score_difficulty_files(const std::filesystem::path& data,
                                                 const std::filesystem::path& responses, int n,
                                                 bool keep_all);

/// Cold-start curation from recorded transcripts {prompt_id, chains: [{text, score}]}.
std::vector<CoTRecord> curate_files(const std::filesystem::path& prompts,
                                    const std::filesystem::path& transcripts, int k, int threshold,
                                    double temperature, int max_in_flight);

}  // namespace rlvr
