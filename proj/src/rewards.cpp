#include "rlvr/rewards.hpp"

#include <cmath>

#include "rlvr/error.hpp"

namespace rlvr {

std::string_view to_string(TaskFamily family) {
  return family == TaskFamily::General ? "general" : "spatial";
}

std::optional<TaskFamily> task_family_from_string(std::string_view name) {
  if (name == "general") return TaskFamily::General;
  if (name == "spatial") return TaskFamily::Spatial;
  return std::nullopt;
}

int format_reward(const ParsedResponse& parsed) { return parsed.well_formed ? 1 : 0; }

int general_accuracy_reward(const ParsedResponse& parsed, const GroundTruth& gt) {
  if (!parsed.well_formed) return 0;
  return verify(parsed, gt) ? 1 : 0;
}

double ednm_reward(double x, double x_gt, const EDNMParams& p) {
  if (!std::isfinite(x) || !std::isfinite(x_gt)) {
    throw DomainError("ednm_reward: non-finite input");
  }
  return p.gamma * std::exp(-p.lambda * std::abs(x - x_gt) / (std::abs(x_gt) + p.epsilon));
}

double spatial_accuracy_reward(const ParsedResponse& parsed, const GroundTruth& gt,
                               const EDNMParams& p) {
  if (!parsed.well_formed) return 0.0;
  if (gt.kind != AnswerKind::Numeric) return verify(parsed, gt) ? 1.0 : 0.0;
  auto x = parse_number(parsed.candidate());
  auto x_gt = parse_number(gt.value);
  if (!x || !x_gt) return 0.0;
  return ednm_reward(*x, *x_gt, p);
}

double total_reward(double accuracy, int format) { return accuracy + format; }

RewardBreakdown score_completion(std::string_view text, const GroundTruth& gt, TaskFamily family,
                                 const EDNMParams& p) {
  ParsedResponse parsed = parse_response(text);
  RewardBreakdown r;
  r.format = format_reward(parsed);
  r.accuracy = family == TaskFamily::General ? general_accuracy_reward(parsed, gt)
                                             : spatial_accuracy_reward(parsed, gt, p);
  r.total = total_reward(r.accuracy, r.format);
  return r;
}

std::vector<RewardBreakdown> score_batch_serial(std::span<const ScoringItem> items,
                                                const EDNMParams& p) {
  std::vector<RewardBreakdown> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out[i] = score_completion(items[i].text, items[i].gt, items[i].family, p);
  }
  return out;
}

std::vector<RewardBreakdown> score_batch_parallel(std::span<const ScoringItem> items,
                                                  const EDNMParams& p) {
  std::vector<RewardBreakdown> out(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = score_completion(items[i].text, items[i].gt, items[i].family, p);
  }
  return out;
}

}  // namespace rlvr
