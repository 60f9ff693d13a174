#include "rlvr/curriculum.hpp"

#include <algorithm>

#include "rlvr/error.hpp"

namespace rlvr {

ScoredPrompt score_difficulty(const PromptRecord& record, ResponseSampler& sampler, int n) {
  if (n < 1) throw PreconditionError("score_difficulty needs n >= 1");
  std::vector<std::string> responses;
  try {
    responses = sampler.sample(record, n);
  } catch (const std::exception& e) {
    throw SamplerFailure("sampler failed for prompt '" + record.id + "': " + e.what());
  }
  if (responses.size() != static_cast<std::size_t>(n)) {
    throw SamplerFailure("sampler returned " + std::to_string(responses.size()) + " responses for '" +
                         record.id + "', expected " + std::to_string(n));
  }
  int correct = 0;
  for (const auto& text : responses) {
    correct += general_accuracy_reward(parse_response(text), record.ground_truth);
  }
  ScoredPrompt out;
  out.record = record;
  out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  out.difficulty = 1.0 - out.accuracy;
  out.record.difficulty = out.difficulty;
  return out;
}

std::vector<ScoredPrompt> filter_extremes(const std::vector<ScoredPrompt>& scored) {
  std::vector<ScoredPrompt> kept;
  std::copy_if(scored.begin(), scored.end(), std::back_inserter(kept),
               [](const ScoredPrompt& s) { return s.accuracy > 0.0 && s.accuracy < 1.0; });
  return kept;
}

std::vector<ScoredPrompt> order_ascending(std::vector<ScoredPrompt> scored) {
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredPrompt& a, const ScoredPrompt& b) { return a.difficulty < b.difficulty; });
  return scored;
}

std::vector<ScheduleEntry> balanced_schedule(const std::vector<TaskQueue>& tasks, int batch_size) {
  if (batch_size < 1) throw PreconditionError("batch_size must be at least 1");

  std::vector<std::vector<std::vector<std::string>>> batches(tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto& task = tasks[k];
    if (task.prompt_ids.empty()) throw EmptyTask("task '" + task.task_id + "' has no prompts");
    if (task.epochs < 1) throw PreconditionError("task '" + task.task_id + "' has epochs < 1");
    std::vector<std::string> current;
    for (int e = 0; e < task.epochs; ++e) {
      for (const auto& id : task.prompt_ids) {
        current.push_back(id);
        if (current.size() == static_cast<std::size_t>(batch_size)) {
          batches[k].push_back(std::move(current));
          current.clear();
        }
      }
    }
    if (!current.empty()) batches[k].push_back(std::move(current));
  }

  std::vector<ScheduleEntry> schedule;
  std::vector<std::size_t> cursor(tasks.size(), 0);
  for (int rotation = 0;; ++rotation) {
    bool any = false;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (cursor[k] == batches[k].size()) continue;
      any = true;
      ScheduleEntry entry;
      entry.step = static_cast<int>(schedule.size());
      entry.rotation = rotation;
      entry.task_id = tasks[k].task_id;
      entry.prompt_ids = std::move(batches[k][cursor[k]++]);
      schedule.push_back(std::move(entry));
    }
    if (!any) break;
  }
  return schedule;
}

}  // namespace rlvr
