#pragma once

#include <string>
#include <vector>

#include "rlvr/rewards.hpp"

namespace rlvr {

/// G completions sampled for one prompt, with everything the objective needs.
/// Every per-completion list is indexed by completion; every per-token list
/// has the completion's token length.
struct RolloutGroup {
  std::string prompt_id;
  std::string task_id;
  int context = 0;

  std::vector<std::vector<int>> completions;
  std::vector<std::string> texts;

  std::vector<std::vector<double>> logp_new;
  std::vector<std::vector<double>> logp_old;
  std::vector<std::vector<double>> logp_ref;
  // Exact per-token KL(pi_theta || pi_ref) of the distribution each token was drawn from.
  std::vector<std::vector<double>> kl;

  std::vector<RewardBreakdown> rewards;
  std::vector<double> advantages;

  std::size_t size() const { return completions.size(); }
};

}  // namespace rlvr
