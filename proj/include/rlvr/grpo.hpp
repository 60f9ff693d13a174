#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "rlvr/policy.hpp"
#include "rlvr/rewards.hpp"
#include "rlvr/rollout.hpp"

namespace rlvr {

/// Per-task training preset.
struct TaskPreset {
  int epochs = 1;
  int group_size = 16;
};

struct TrainConfig {
  int group_size = 16;
  double clip_epsilon = 0.2;
  double kl_beta = 0.01;
  double sigma = 7.2;
  int t_max = 1;
  double learning_rate = 1e-6;
  double temperature = 1.0;
  int batch_size = 64;
  std::map<std::string, int> epochs_per_task = {{"general", 1}, {"spatial_image", 2}, {"spatial_video", 3}};
  std::map<std::string, int> group_size_per_task = {{"general", 16}, {"spatial_image", 16}, {"spatial_video", 4}};
  EDNMParams ednm;
  bool kl_inside_weight = false;

  int group_size_for(const std::string& task) const;
  int epochs_for(const std::string& task) const;
};

struct TrainState {
  ToyPolicy policy;
  PolicySnapshot old_policy;  // sampling policy of the current step
  PolicySnapshot ref_policy;  // frozen at RLVR start
  int t_cur = 0;
  int t_max = 1;

  /// Fresh state: old and reference snapshots both equal `initial`.
  static TrainState start(ToyPolicy initial, int t_max);
};

struct StepMetrics {
  int step = 0;
  std::string task_id;
  int groups = 0;
  double mean_total_reward = 0.0;
  double mean_accuracy = 0.0;
  double alpha_mean = 0.0;
  double beta_hat = 0.0;
  double mean_kl = 0.0;
  double objective = 0.0;
  int t_cur = 0;
  int t_max = 0;
  std::vector<double> group_accuracy;
};

/// (R_i - mean) / std with population std; all zeros when the rewards are all
/// equal. Throws GroupTooSmall for fewer than two rewards.
std::vector<double> compute_advantages(std::span<const double> rewards);

/// sigma * m * (1 - m), m = mean accuracy reward of the group.
double dynamic_weight(std::span<const double> acc_rewards, double sigma);

/// (beta / 2) * (1 + cos(pi * t_cur / t_max)). Throws ScheduleError unless
/// 0 <= t_cur <= t_max and t_max >= 1.
double kl_coefficient(double beta, int t_cur, int t_max);

/// exp(logp_new - logp_old), element-wise. Throws LengthMismatch.
std::vector<double> importance_ratios(std::span<const double> logp_new,
                                      std::span<const double> logp_old);

/// Exact KL(new || ref) between categorical distributions. Zero-probability
/// points of `p_new` contribute nothing. Throws SupportMismatch on differing
/// support sizes and InfiniteKL when ref has zero mass where new does not.
double per_token_kl(std::span<const double> p_new, std::span<const double> p_ref);

/// Clipped-surrogate objective of one group, built from the group's logp_new,
/// logp_old, kl and advantages (broadcast over tokens).
double grpo_objective(const RolloutGroup& group, double alpha, double beta_hat, double clip_epsilon,
                      bool kl_inside_weight);

/// Mean of the group's per-token KL with the same 1/G, 1/|o_i| normalisation.
double mean_group_kl(const RolloutGroup& group);

struct ObjectiveGradient {
  double value = 0.0;
  double kl = 0.0;
  std::vector<double> gradient;  // d value / d policy params
};

/// Refreshes logp_new, logp_ref and kl of `group` from `policy` and `ref`.
void refresh_group(RolloutGroup& group, const ToyPolicy& policy, const ToyPolicy& ref,
                   double temperature);

/// Objective of one group at `policy` with its analytic gradient. The value is
/// exactly grpo_objective on the refreshed group.
ObjectiveGradient objective_and_gradient(const ToyPolicy& policy, const ToyPolicy& ref,
                                         const RolloutGroup& group, double alpha, double beta_hat,
                                         double clip_epsilon, bool kl_inside_weight,
                                         double temperature);

struct BatchObjective {
  double objective = 0.0;  // mean over groups
  double kl = 0.0;         // mean over groups
  std::vector<double> gradient;
  std::vector<double> alphas;
};

/// Batch objective/gradient (mean over groups). The serial form is the
/// reference; the parallel form evaluates groups on OpenMP threads and reduces
/// in group order, so both return bit-identical results.
BatchObjective batch_objective_serial(const ToyPolicy& policy, const ToyPolicy& ref,
                                      std::span<const RolloutGroup> batch, double beta_hat,
                                      const TrainConfig& config);
BatchObjective batch_objective_parallel(const ToyPolicy& policy, const ToyPolicy& ref,
                                        std::span<const RolloutGroup> batch, double beta_hat,
                                        const TrainConfig& config);

/// Fills rewards for each completion of `group` and its advantages.
void assign_rewards(RolloutGroup& group, const GroundTruth& gt, TaskFamily family,
                    const EDNMParams& ednm);

enum class Exec { Serial, Parallel };

/// One ascent step on a single-task batch. Throws MixedTaskBatch. An empty
/// batch returns zeroed metrics and leaves the state untouched.
StepMetrics grpo_step(TrainState& state, std::span<const RolloutGroup> batch,
                      const TrainConfig& config, Exec exec = Exec::Parallel);

}  // namespace rlvr
