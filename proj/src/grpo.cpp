#include "rlvr/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rlvr/error.hpp"

namespace rlvr {
namespace {

double clip(double r, double eps) { return std::clamp(r, 1.0 - eps, 1.0 + eps); }

void check_group_shapes(const RolloutGroup& group) {
  const std::size_t g = group.size();
  if (group.logp_new.size() != g || group.logp_old.size() != g || group.kl.size() != g ||
      group.advantages.size() != g) {
    throw LengthMismatch("rollout group lists differ in completion count");
  }
  for (std::size_t i = 0; i < g; ++i) {
    const std::size_t len = group.completions[i].size();
    if (group.logp_new[i].size() != len || group.logp_old[i].size() != len ||
        group.kl[i].size() != len) {
      throw LengthMismatch("per-token lists differ in length for completion " + std::to_string(i));
    }
    if (len == 0) throw LengthMismatch("empty completion " + std::to_string(i));
  }
}

std::vector<double> accuracies(const RolloutGroup& group) {
  std::vector<double> acc;
  acc.reserve(group.rewards.size());
  for (const auto& r : group.rewards) acc.push_back(r.accuracy);
  return acc;
}

// Weight of the KL term relative to the normalised per-token sum.
double kl_weight(double alpha, double beta_hat, bool kl_inside_weight) {
  return kl_inside_weight ? alpha * beta_hat : beta_hat;
}

}  // namespace

int TrainConfig::group_size_for(const std::string& task) const {
  auto it = group_size_per_task.find(task);
  return it == group_size_per_task.end() ? group_size : it->second;
}

int TrainConfig::epochs_for(const std::string& task) const {
  auto it = epochs_per_task.find(task);
  return it == epochs_per_task.end() ? 1 : it->second;
}

TrainState TrainState::start(ToyPolicy initial, int t_max) {
  if (t_max < 1) throw ScheduleError("t_max must be at least 1");
  auto frozen = snapshot(initial);
  return TrainState{std::move(initial), frozen, frozen, 0, t_max};
}

std::vector<double> compute_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) throw GroupTooSmall("advantages need at least two completions, got " + std::to_string(g));
  std::vector<double> adv(g, 0.0);
  auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi) return adv;
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(g);
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double stdev = std::sqrt(ss / static_cast<double>(g));
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - mean) / stdev;
  return adv;
}

double dynamic_weight(std::span<const double> acc_rewards, double sigma) {
  if (acc_rewards.empty()) return 0.0;
  const double m =
      std::accumulate(acc_rewards.begin(), acc_rewards.end(), 0.0) / static_cast<double>(acc_rewards.size());
  return sigma * m * (1.0 - m);
}

double kl_coefficient(double beta, int t_cur, int t_max) {
  if (t_max < 1) throw ScheduleError("t_max must be at least 1");
  if (t_cur < 0 || t_cur > t_max) {
    throw ScheduleError("t_cur " + std::to_string(t_cur) + " outside [0, " + std::to_string(t_max) + "]");
  }
  return beta / 2.0 *
         (1.0 + std::cos(std::numbers::pi * static_cast<double>(t_cur) / static_cast<double>(t_max)));
}

std::vector<double> importance_ratios(std::span<const double> logp_new,
                                      std::span<const double> logp_old) {
  if (logp_new.size() != logp_old.size()) {
    throw LengthMismatch("logp_new has " + std::to_string(logp_new.size()) + " tokens, logp_old " +
                         std::to_string(logp_old.size()));
  }
  std::vector<double> r(logp_new.size());
  for (std::size_t t = 0; t < r.size(); ++t) r[t] = std::exp(logp_new[t] - logp_old[t]);
  return r;
}

double per_token_kl(std::span<const double> p_new, std::span<const double> p_ref) {
  if (p_new.size() != p_ref.size()) throw SupportMismatch("distributions have different supports");
  double kl = 0.0;
  for (std::size_t k = 0; k < p_new.size(); ++k) {
    if (p_new[k] == 0.0) continue;
    if (p_ref[k] == 0.0) throw InfiniteKL("reference has zero mass where the new policy does not");
    kl += p_new[k] * (std::log(p_new[k]) - std::log(p_ref[k]));
  }
  return kl;
}

double grpo_objective(const RolloutGroup& group, double alpha, double beta_hat, double clip_epsilon,
                      bool kl_inside_weight) {
  check_group_shapes(group);
  const double g = static_cast<double>(group.size());
  double surrogate = 0.0;
  double kl_sum = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const double adv = group.advantages[i];
    auto ratios = importance_ratios(group.logp_new[i], group.logp_old[i]);
    double s = 0.0, k = 0.0;
    for (std::size_t t = 0; t < ratios.size(); ++t) {
      s += std::min(ratios[t] * adv, clip(ratios[t], clip_epsilon) * adv);
      k += group.kl[i][t];
    }
    const double len = static_cast<double>(ratios.size());
    surrogate += s / len;
    kl_sum += k / len;
  }
  return alpha / g * surrogate - kl_weight(alpha, beta_hat, kl_inside_weight) / g * kl_sum;
}

double mean_group_kl(const RolloutGroup& group) {
  if (group.size() == 0) return 0.0;
  double total = 0.0;
  for (const auto& kl : group.kl) {
    total += std::accumulate(kl.begin(), kl.end(), 0.0) / static_cast<double>(kl.size());
  }
  return total / static_cast<double>(group.size());
}

void refresh_group(RolloutGroup& group, const ToyPolicy& policy, const ToyPolicy& ref,
                   double temperature) {
  const std::size_t g = group.size();
  group.logp_new.resize(g);
  group.logp_ref.resize(g);
  group.kl.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    group.logp_new[i] = token_logprobs(policy, group.completions[i], group.context, temperature);
    group.logp_ref[i] = token_logprobs(ref, group.completions[i], group.context, temperature);
    group.kl[i] = token_kl(policy, ref, group.completions[i], group.context, temperature);
  }
}

ObjectiveGradient objective_and_gradient(const ToyPolicy& policy, const ToyPolicy& ref,
                                         const RolloutGroup& group, double alpha, double beta_hat,
                                         double clip_epsilon, bool kl_inside_weight,
                                         double temperature) {
  RolloutGroup fresh = group;
  refresh_group(fresh, policy, ref, temperature);

  ObjectiveGradient out;
  out.value = grpo_objective(fresh, alpha, beta_hat, clip_epsilon, kl_inside_weight);
  out.kl = mean_group_kl(fresh);
  out.gradient.assign(policy.num_params(), 0.0);

  const double g = static_cast<double>(fresh.size());
  const double w_kl = kl_weight(alpha, beta_hat, kl_inside_weight);
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    const auto& tokens = fresh.completions[i];
    const double coef = 1.0 / (g * static_cast<double>(tokens.size()));
    const double adv = fresh.advantages[i];
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (policy.template_token(static_cast<int>(t)) != -1) continue;
      const int position = static_cast<int>(t) - ToyPolicy::kFirstAnswerSlot;
      const auto& acts = policy.actions(fresh.context);
      const auto k = static_cast<std::size_t>(
          std::find(acts.begin(), acts.end(), tokens[t]) - acts.begin());
      if (k == acts.size()) continue;

      // d min(r A, clip(r) A) / d logp = r A on the unclipped branch, 0 otherwise.
      const double r = std::exp(fresh.logp_new[i][t] - fresh.logp_old[i][t]);
      const double d_surrogate = r * adv <= clip(r, clip_epsilon) * adv ? r * adv : 0.0;

      const auto p = policy.probabilities(fresh.context, position, temperature);
      const auto q = ref.probabilities(fresh.context, position, temperature);
      const double kl_t = fresh.kl[i][t];
      const std::size_t base = policy.offset(fresh.context, position);
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double dlogp = ((j == k ? 1.0 : 0.0) - p[j]) / temperature;
        double dkl = 0.0;
        if (p[j] > 0.0) dkl = p[j] * (std::log(p[j]) - std::log(q[j]) - kl_t) / temperature;
        out.gradient[base + j] += coef * (alpha * d_surrogate * dlogp - w_kl * dkl);
      }
    }
  }
  return out;
}

namespace {

BatchObjective reduce(std::vector<ObjectiveGradient>& parts, std::vector<double> alphas,
                      std::size_t num_params) {
  BatchObjective out;
  out.gradient.assign(num_params, 0.0);
  out.alphas = std::move(alphas);
  if (parts.empty()) return out;
  const double n = static_cast<double>(parts.size());
  for (const auto& part : parts) {
    out.objective += part.value;
    out.kl += part.kl;
    for (std::size_t j = 0; j < num_params; ++j) out.gradient[j] += part.gradient[j];
  }
  out.objective /= n;
  out.kl /= n;
  for (double& v : out.gradient) v /= n;
  return out;
}

std::vector<double> group_alphas(std::span<const RolloutGroup> batch, double sigma) {
  std::vector<double> alphas;
  alphas.reserve(batch.size());
  for (const auto& group : batch) alphas.push_back(dynamic_weight(accuracies(group), sigma));
  return alphas;
}

}  // namespace

BatchObjective batch_objective_serial(const ToyPolicy& policy, const ToyPolicy& ref,
                                      std::span<const RolloutGroup> batch, double beta_hat,
                                      const TrainConfig& config) {
  auto alphas = group_alphas(batch, config.sigma);
  std::vector<ObjectiveGradient> parts(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    parts[b] = objective_and_gradient(policy, ref, batch[b], alphas[b], beta_hat, config.clip_epsilon,
                                      config.kl_inside_weight, config.temperature);
  }
  return reduce(parts, std::move(alphas), policy.num_params());
}

BatchObjective batch_objective_parallel(const ToyPolicy& policy, const ToyPolicy& ref,
                                        std::span<const RolloutGroup> batch, double beta_hat,
                                        const TrainConfig& config) {
  auto alphas = group_alphas(batch, config.sigma);
  std::vector<ObjectiveGradient> parts(batch.size());
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    parts[b] = objective_and_gradient(policy, ref, batch[b], alphas[b], beta_hat, config.clip_epsilon,
                                      config.kl_inside_weight, config.temperature);
  }
  return reduce(parts, std::move(alphas), policy.num_params());
}

void assign_rewards(RolloutGroup& group, const GroundTruth& gt, TaskFamily family,
                    const EDNMParams& ednm) {
  group.rewards.clear();
  std::vector<double> totals;
  for (const auto& text : group.texts) {
    group.rewards.push_back(score_completion(text, gt, family, ednm));
    totals.push_back(group.rewards.back().total);
  }
  group.advantages = compute_advantages(totals);
}

StepMetrics grpo_step(TrainState& state, std::span<const RolloutGroup> batch,
                      const TrainConfig& config, Exec exec) {
  StepMetrics m;
  m.step = state.t_cur;
  m.t_cur = state.t_cur;
  m.t_max = state.t_max;
  if (batch.empty()) return m;

  m.task_id = batch.front().task_id;
  for (const auto& group : batch) {
    if (group.task_id != m.task_id) {
      throw MixedTaskBatch("batch mixes tasks '" + m.task_id + "' and '" + group.task_id + "'");
    }
  }
  m.beta_hat = kl_coefficient(config.kl_beta, state.t_cur, state.t_max);

  const BatchObjective obj =
      exec == Exec::Serial
          ? batch_objective_serial(state.policy, *state.ref_policy, batch, m.beta_hat, config)
          : batch_objective_parallel(state.policy, *state.ref_policy, batch, m.beta_hat, config);

  auto params = state.policy.mutable_params();
  for (std::size_t j = 0; j < params.size(); ++j) params[j] += config.learning_rate * obj.gradient[j];

  m.groups = static_cast<int>(batch.size());
  m.objective = obj.objective;
  m.mean_kl = obj.kl;
  m.alpha_mean = std::accumulate(obj.alphas.begin(), obj.alphas.end(), 0.0) / static_cast<double>(batch.size());
  double total = 0.0, acc = 0.0;
  std::size_t completions = 0;
  for (const auto& group : batch) {
    auto a = accuracies(group);
    double group_acc = a.empty() ? 0.0 : std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    m.group_accuracy.push_back(group_acc);
    for (const auto& r : group.rewards) {
      total += r.total;
      acc += r.accuracy;
      ++completions;
    }
  }
  if (completions > 0) {
    m.mean_total_reward = total / static_cast<double>(completions);
    m.mean_accuracy = acc / static_cast<double>(completions);
  }

  state.t_cur = std::min(state.t_cur + 1, state.t_max);
  state.old_policy = snapshot(state.policy);
  return m;
}

}  // namespace rlvr
