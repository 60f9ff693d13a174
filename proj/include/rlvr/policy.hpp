#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rlvr/rollout.hpp"
#include "rlvr/verifier.hpp"

namespace rlvr {

using Rng = std::mt19937_64;

/// Answers of numeric tasks live on a fixed grid lo, lo+step, ..., one token each.
struct NumericGrid {
  double lo = 15.0;
  double step = 15.0;
  int count = 40;

  double value(int bin) const { return lo + step * bin; }
  int snap(double x) const;
};

/// Token inventory of the sandbox: seven template tokens, option letters A..D
/// and one token per numeric bin.
class Vocabulary {
 public:
  enum Template : int {
    ThinkOpen = 0,
    Reasoning,
    ThinkClose,
    AnswerOpen,
    BoxedOpen,
    BoxedClose,
    AnswerClose,
    TemplateCount
  };

  static constexpr int kMaxSize = 64;

  static Vocabulary standard(const NumericGrid& grid = {});
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::string& text(int id) const;
  int id(std::string_view token) const;  // throws UnknownToken
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> letter_tokens() const;
  std::vector<int> numeric_tokens() const;

 private:
  explicit Vocabulary(std::vector<std::string> tokens);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Tiny categorical sequence policy. Every completion is
///   <think> <reasoning> </think> <answer> \boxed{ a_0 .. a_{P-1} } </answer>
/// where template tokens have probability 1 and each answer slot a_k draws
/// from softmax(logits[context][k] / temperature) over the context's action set.
class ToyPolicy {
 public:
  ToyPolicy(Vocabulary vocab, std::vector<std::vector<int>> context_actions, int answer_positions = 1);

  const Vocabulary& vocab() const { return vocab_; }
  int num_contexts() const { return static_cast<int>(actions_.size()); }
  int answer_positions() const { return positions_; }
  const std::vector<int>& actions(int context) const { return actions_.at(context); }

  /// Token length of every completion.
  int completion_length() const { return Vocabulary::TemplateCount + positions_; }
  /// Index in the completion of the first answer slot.
  static constexpr int kFirstAnswerSlot = 5;

  std::size_t num_params() const { return params_.size(); }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }

  /// Offset of logits[context][position][0] in the flat parameter vector.
  std::size_t offset(int context, int position) const;
  std::span<const double> logits(int context, int position) const;
  void set_logit(int context, int position, int token, double value);

  /// Softmax over the action set at (context, position).
  std::vector<double> probabilities(int context, int position, double temperature = 1.0) const;

  /// Template token expected at completion index `t`, or -1 for an answer slot.
  int template_token(int t) const;

 private:
  Vocabulary vocab_;
  std::vector<std::vector<int>> actions_;
  int positions_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

using PolicySnapshot = std::shared_ptr<const ToyPolicy>;

/// Immutable deep copy.
PolicySnapshot snapshot(const ToyPolicy& policy);

struct SyntheticTask {
  enum class Kind { MultipleChoice4, NumericEstimate };

  Kind kind = Kind::MultipleChoice4;
  std::string prompt_id;
  std::string task_id;
  GroundTruth gt;
  TaskFamily family = TaskFamily::General;
  int context = 0;
};

struct LogProbResult {
  std::vector<double> logp;      // per token
  std::vector<double> gradient;  // d sum_t logp / d params
};

/// Exact log-probs and the gradient of their sum. Throws UnknownToken for ids
/// outside the vocabulary; tokens the policy cannot emit get -inf.
LogProbResult logprob_and_grad(const ToyPolicy& policy, std::span<const int> completion,
                               int context, double temperature = 1.0);

/// Log-probs only.
std::vector<double> token_logprobs(const ToyPolicy& policy, std::span<const int> completion,
                                   int context, double temperature = 1.0);

/// Per-token KL(policy || ref) at each position of the completion; template
/// positions contribute 0.
std::vector<double> token_kl(const ToyPolicy& policy, const ToyPolicy& ref,
                             std::span<const int> completion, int context,
                             double temperature = 1.0);

std::string render_completion(std::string_view answer_text, std::string_view think_stub);

/// Renders a token sequence; the Reasoning token expands to `think_stub`.
std::string render_tokens(const ToyPolicy& policy, std::span<const int> completion,
                          std::string_view think_stub);

/// Draws G completions from `policy` for `task` and records their log-probs
/// under it in both logp_old and logp_new. Rewards and advantages are left empty.
RolloutGroup sample_group(const ToyPolicy& policy, const SyntheticTask& task, int group_size,
                          double temperature, Rng& rng);

/// Probability the policy answers `task` correctly under exact matching.
double exact_accuracy(const ToyPolicy& policy, const SyntheticTask& task, double temperature = 1.0);

/// MultipleChoice4 tasks with uniformly random letters, one context each,
/// contexts numbered from `first_context`.
std::vector<SyntheticTask> make_mc4_tasks(int count, Rng& rng, const std::string& task_id,
                                          int first_context = 0);

/// NumericEstimate tasks with targets drawn uniformly from the grid bins in
/// [min_bin, max_bin].
std::vector<SyntheticTask> make_numeric_tasks(int count, const NumericGrid& grid, int min_bin,
                                              int max_bin, Rng& rng, const std::string& task_id,
                                              int first_context = 0);

/// Policy with one context per task: letters for MC tasks, numeric bins for numeric tasks.
ToyPolicy make_policy_for(const std::vector<SyntheticTask>& tasks, const Vocabulary& vocab);

/// Checkpoint text format; see docs/formats.md.
void save_checkpoint(const ToyPolicy& policy, std::string_view config_hash, std::ostream& out);
struct LoadedCheckpoint {
  ToyPolicy policy;
  std::string config_hash;
};
LoadedCheckpoint load_checkpoint(std::istream& in);

}  // namespace rlvr
