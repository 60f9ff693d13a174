#pragma once

#include <span>
#include <string>
#include <vector>

#include "rlvr/verifier.hpp"

namespace rlvr {

/// Per-completion reward: accuracy plus format, total = accuracy + format.
struct RewardBreakdown {
  double accuracy = 0.0;
  int format = 0;
  double total = 0.0;
};

/// Exponential-decay numeric matching parameters.
struct EDNMParams {
  double gamma = 1.0;    // peak reward
  double lambda = 2.0;   // decay rate
  double epsilon = 1e-6; // guards x_gt = 0
};

enum class TaskFamily { General, Spatial };

std::string_view to_string(TaskFamily family);
std::optional<TaskFamily> task_family_from_string(std::string_view name);

int format_reward(const ParsedResponse& parsed);

/// Indicator accuracy; malformed completions score 0.
int general_accuracy_reward(const ParsedResponse& parsed, const GroundTruth& gt);

/// gamma * exp(-lambda * |x - x_gt| / (|x_gt| + epsilon)). Throws DomainError on
/// non-finite inputs.
double ednm_reward(double x, double x_gt, const EDNMParams& p = {});

/// EDNM for Numeric ground truths, indicator otherwise. Malformed or
/// unparsable candidates score 0.
double spatial_accuracy_reward(const ParsedResponse& parsed, const GroundTruth& gt,
                               const EDNMParams& p = {});

double total_reward(double accuracy, int format);

/// Full breakdown of one completion text.
RewardBreakdown score_completion(std::string_view text, const GroundTruth& gt, TaskFamily family,
                                 const EDNMParams& p = {});

struct ScoringItem {
  std::string text;
  GroundTruth gt;
  TaskFamily family = TaskFamily::General;
};

/// Batch scoring. The serial form is the reference; the parallel form splits
/// items across OpenMP threads and returns identical results.
std::vector<RewardBreakdown> score_batch_serial(std::span<const ScoringItem> items,
                                                const EDNMParams& p = {});
std::vector<RewardBreakdown> score_batch_parallel(std::span<const ScoringItem> items,
                                                  const EDNMParams& p = {});

}  // namespace rlvr
