#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlvr/rewards.hpp"
#include "rlvr/verifier.hpp"

namespace rlvr {

/// A verifiable training item.
struct PromptRecord {
  std::string id;
  std::string task;
  std::string question;
  GroundTruth ground_truth;
  TaskFamily family = TaskFamily::General;
  std::optional<double> difficulty;
  nlohmann::json extra = nlohmann::json::object();  // unknown fields, preserved on round-trip
};

struct ScoredPrompt {
  PromptRecord record;
  double accuracy = 0.0;
  double difficulty = 1.0;  // always 1 - accuracy
};

/// Source of model responses for a prompt. Implementations may call a real
/// generator; tests plug deterministic stubs.
class ResponseSampler {
 public:
  virtual ~ResponseSampler() = default;
  virtual std::vector<std::string> sample(const PromptRecord& prompt, int n) = 0;
};

/// Draws n responses, counts exact matches, difficulty = 1 - correct / n.
/// Throws PreconditionError for n < 1 and SamplerFailure when the sampler
/// throws or returns a different number of responses.
ScoredPrompt score_difficulty(const PromptRecord& record, ResponseSampler& sampler, int n = 10);

/// Keeps records with accuracy strictly between 0 and 1, in input order.
std::vector<ScoredPrompt> filter_extremes(const std::vector<ScoredPrompt>& scored);

/// Stable ascending sort by difficulty.
std::vector<ScoredPrompt> order_ascending(std::vector<ScoredPrompt> scored);

struct TaskQueue {
  std::string task_id;
  std::vector<std::string> prompt_ids;  // already in curriculum order
  int epochs = 1;
};

struct ScheduleEntry {
  int step = 0;
  int rotation = 0;
  std::string task_id;
  std::vector<std::string> prompt_ids;
};

/// One-task-per-batch round-robin schedule. Each task's prompt stream is its
/// ordered prompts repeated `epochs` times, cut into batches of `batch_size`;
/// every rotation visits each task that still has batches exactly once, in
/// input order. Throws EmptyTask for a task without prompts and
/// PreconditionError for batch_size < 1 or epochs < 1.
std::vector<ScheduleEntry> balanced_schedule(const std::vector<TaskQueue>& tasks, int batch_size);

}  // namespace rlvr
