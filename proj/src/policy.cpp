#include "rlvr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "rlvr/error.hpp"
#include "rlvr/numfmt.hpp"

namespace rlvr {
namespace {

constexpr std::string_view kCheckpointMagic = "rlvr-policy";
constexpr int kCheckpointVersion = 1;
constexpr std::string_view kDefaultThinkStub = "Compare the options and commit to one.";

const char* const kTemplateText[Vocabulary::TemplateCount] = {
    "<think>", "<reasoning>", "</think>", "<answer>", "\\boxed{", "}", "</answer>"};

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp((logits[k] - peak) / temperature);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::vector<double> log_softmax(std::span<const double> logits, double temperature) {
  std::vector<double> lp(logits.size());
  if (logits.empty()) return lp;
  double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp((z - peak) / temperature);
  double log_norm = std::log(sum);
  for (std::size_t k = 0; k < logits.size(); ++k) lp[k] = (logits[k] - peak) / temperature - log_norm;
  return lp;
}

int action_index(const ToyPolicy& policy, int context, int token) {
  const auto& acts = policy.actions(context);
  auto it = std::find(acts.begin(), acts.end(), token);
  return it == acts.end() ? -1 : static_cast<int>(it - acts.begin());
}

void check_tokens(const ToyPolicy& policy, std::span<const int> completion, int context) {
  if (context < 0 || context >= policy.num_contexts()) {
    throw PreconditionError("context " + std::to_string(context) + " out of range");
  }
  for (int tok : completion) {
    if (tok < 0 || tok >= static_cast<int>(policy.vocab().size())) {
      throw UnknownToken("token id " + std::to_string(tok) + " not in vocabulary");
    }
  }
}

}  // namespace

int NumericGrid::snap(double x) const {
  long bin = std::lround((x - lo) / step);
  return static_cast<int>(std::clamp<long>(bin, 0, count - 1));
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() > static_cast<std::size_t>(kMaxSize)) {
    throw PreconditionError("vocabulary larger than " + std::to_string(kMaxSize) + " tokens");
  }
  for (int i = 0; i < TemplateCount; ++i) {
    if (i >= static_cast<int>(tokens_.size()) || tokens_[i] != kTemplateText[i]) {
      throw PreconditionError("vocabulary must start with the template tokens");
    }
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw PreconditionError("duplicate token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::standard(const NumericGrid& grid) {
  std::vector<std::string> tokens(kTemplateText, kTemplateText + TemplateCount);
  for (char c : {'A', 'B', 'C', 'D'}) tokens.emplace_back(1, c);
  for (int b = 0; b < grid.count; ++b) tokens.push_back(shortest(grid.value(b)));
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  return Vocabulary(std::move(tokens));
}

const std::string& Vocabulary::text(int id) const {
  if (id < 0 || id >= static_cast<int>(tokens_.size())) {
    throw UnknownToken("token id " + std::to_string(id) + " not in vocabulary");
  }
  return tokens_[id];
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) throw UnknownToken("unknown token '" + std::string(token) + "'");
  return it->second;
}

std::vector<int> Vocabulary::letter_tokens() const {
  std::vector<int> ids;
  for (std::size_t i = TemplateCount; i < tokens_.size(); ++i) {
    const auto& t = tokens_[i];
    if (t.size() == 1 && t[0] >= 'A' && t[0] <= 'Z') ids.push_back(static_cast<int>(i));
  }
  return ids;
}

std::vector<int> Vocabulary::numeric_tokens() const {
  std::vector<int> ids;
  for (std::size_t i = TemplateCount; i < tokens_.size(); ++i) {
    if (parse_number(tokens_[i])) ids.push_back(static_cast<int>(i));
  }
  return ids;
}

ToyPolicy::ToyPolicy(Vocabulary vocab, std::vector<std::vector<int>> context_actions,
                     int answer_positions)
    : vocab_(std::move(vocab)), actions_(std::move(context_actions)), positions_(answer_positions) {
  if (positions_ < 1) throw PreconditionError("policy needs at least one answer position");
  std::size_t total = 0;
  for (const auto& acts : actions_) {
    if (acts.empty()) throw PreconditionError("context with an empty action set");
    for (int tok : acts) {
      if (tok < Vocabulary::TemplateCount || tok >= static_cast<int>(vocab_.size())) {
        throw UnknownToken("action token " + std::to_string(tok) + " is not an answer token");
      }
    }
    offsets_.push_back(total);
    total += acts.size() * static_cast<std::size_t>(positions_);
  }
  params_.assign(total, 0.0);
}

std::size_t ToyPolicy::offset(int context, int position) const {
  return offsets_.at(context) + static_cast<std::size_t>(position) * actions_.at(context).size();
}

std::span<const double> ToyPolicy::logits(int context, int position) const {
  return std::span<const double>(params_).subspan(offset(context, position), actions_.at(context).size());
}

void ToyPolicy::set_logit(int context, int position, int token, double value) {
  int k = action_index(*this, context, token);
  if (k < 0) throw UnknownToken("token " + std::to_string(token) + " not an action of context");
  params_[offset(context, position) + k] = value;
}

std::vector<double> ToyPolicy::probabilities(int context, int position, double temperature) const {
  return softmax(logits(context, position), temperature);
}

int ToyPolicy::template_token(int t) const {
  if (t < kFirstAnswerSlot) return t;
  if (t < kFirstAnswerSlot + positions_) return -1;
  if (t < completion_length()) return t - positions_;
  return -2;
}

PolicySnapshot snapshot(const ToyPolicy& policy) { return std::make_shared<const ToyPolicy>(policy); }

LogProbResult logprob_and_grad(const ToyPolicy& policy, std::span<const int> completion,
                               int context, double temperature) {
  check_tokens(policy, completion, context);
  LogProbResult out;
  out.logp.assign(completion.size(), 0.0);
  out.gradient.assign(policy.num_params(), 0.0);
  for (std::size_t t = 0; t < completion.size(); ++t) {
    int expected = policy.template_token(static_cast<int>(t));
    if (expected != -1) {
      if (expected != completion[t]) out.logp[t] = -std::numeric_limits<double>::infinity();
      continue;
    }
    int position = static_cast<int>(t) - ToyPolicy::kFirstAnswerSlot;
    int k = action_index(policy, context, completion[t]);
    if (k < 0) {
      out.logp[t] = -std::numeric_limits<double>::infinity();
      continue;
    }
    auto logits = policy.logits(context, position);
    auto lp = log_softmax(logits, temperature);
    out.logp[t] = lp[k];
    std::size_t base = policy.offset(context, position);
    for (std::size_t j = 0; j < lp.size(); ++j) {
      double p = std::exp(lp[j]);
      out.gradient[base + j] += ((static_cast<int>(j) == k ? 1.0 : 0.0) - p) / temperature;
    }
  }
  return out;
}

std::vector<double> token_logprobs(const ToyPolicy& policy, std::span<const int> completion,
                                   int context, double temperature) {
  check_tokens(policy, completion, context);
  std::vector<double> logp(completion.size(), 0.0);
  for (std::size_t t = 0; t < completion.size(); ++t) {
    int expected = policy.template_token(static_cast<int>(t));
    if (expected != -1) {
      if (expected != completion[t]) logp[t] = -std::numeric_limits<double>::infinity();
      continue;
    }
    int k = action_index(policy, context, completion[t]);
    if (k < 0) {
      logp[t] = -std::numeric_limits<double>::infinity();
      continue;
    }
    int position = static_cast<int>(t) - ToyPolicy::kFirstAnswerSlot;
    logp[t] = log_softmax(policy.logits(context, position), temperature)[k];
  }
  return logp;
}

std::vector<double> token_kl(const ToyPolicy& policy, const ToyPolicy& ref,
                             std::span<const int> completion, int context, double temperature) {
  check_tokens(policy, completion, context);
  std::vector<double> kl(completion.size(), 0.0);
  for (std::size_t t = 0; t < completion.size(); ++t) {
    if (policy.template_token(static_cast<int>(t)) != -1) continue;
    int position = static_cast<int>(t) - ToyPolicy::kFirstAnswerSlot;
    auto lp = log_softmax(policy.logits(context, position), temperature);
    auto lq = log_softmax(ref.logits(context, position), temperature);
    double sum = 0.0;
    for (std::size_t j = 0; j < lp.size(); ++j) {
      double p = std::exp(lp[j]);
      if (p > 0.0) sum += p * (lp[j] - lq[j]);
    }
    kl[t] = sum;
  }
  return kl;
}

std::string render_completion(std::string_view answer_text, std::string_view think_stub) {
  std::string out;
  out.reserve(answer_text.size() + think_stub.size() + 48);
  out.append("<think>").append(think_stub).append("</think><answer>\\boxed{");
  out.append(answer_text).append("}</answer>");
  return out;
}

std::string render_tokens(const ToyPolicy& policy, std::span<const int> completion,
                          std::string_view think_stub) {
  std::string out;
  for (int tok : completion) {
    if (tok == Vocabulary::Reasoning) {
      out.append(think_stub);
    } else {
      out.append(policy.vocab().text(tok));
    }
  }
  return out;
}

RolloutGroup sample_group(const ToyPolicy& policy, const SyntheticTask& task, int group_size,
                          double temperature, Rng& rng) {
  if (group_size < 2) throw PreconditionError("group size must be at least 2");
  if (!(temperature > 0.0)) throw PreconditionError("temperature must be positive");
  RolloutGroup group;
  group.prompt_id = task.prompt_id;
  group.task_id = task.task_id;
  group.context = task.context;

  std::vector<std::vector<double>> probs;
  for (int pos = 0; pos < policy.answer_positions(); ++pos) {
    probs.push_back(policy.probabilities(task.context, pos, temperature));
  }
  const auto& acts = policy.actions(task.context);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < group_size; ++i) {
    std::vector<int> tokens;
    tokens.reserve(policy.completion_length());
    for (int t = 0; t < policy.completion_length(); ++t) {
      int expected = policy.template_token(t);
      if (expected >= 0) {
        tokens.push_back(expected);
        continue;
      }
      const auto& p = probs[t - ToyPolicy::kFirstAnswerSlot];
      double u = unif(rng);
      std::size_t k = 0;
      double cum = p[0];
      while (u >= cum && k + 1 < p.size()) cum += p[++k];
      tokens.push_back(acts[k]);
    }
    auto logp = token_logprobs(policy, tokens, task.context, temperature);
    group.texts.push_back(render_tokens(policy, tokens, kDefaultThinkStub));
    group.logp_old.push_back(logp);
    group.logp_new.push_back(std::move(logp));
    group.completions.push_back(std::move(tokens));
  }
  return group;
}

double exact_accuracy(const ToyPolicy& policy, const SyntheticTask& task, double temperature) {
  if (policy.answer_positions() != 1) {
    throw PreconditionError("exact_accuracy needs a single answer position");
  }
  auto p = policy.probabilities(task.context, 0, temperature);
  const auto& acts = policy.actions(task.context);
  double acc = 0.0;
  for (std::size_t k = 0; k < acts.size(); ++k) {
    if (verify_candidate(policy.vocab().text(acts[k]), task.gt)) acc += p[k];
  }
  return acc;
}

std::vector<SyntheticTask> make_mc4_tasks(int count, Rng& rng, const std::string& task_id,
                                          int first_context) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::vector<SyntheticTask> tasks;
  for (int i = 0; i < count; ++i) {
    SyntheticTask task;
    task.kind = SyntheticTask::Kind::MultipleChoice4;
    task.prompt_id = task_id + "-" + std::to_string(i);
    task.task_id = task_id;
    task.gt.kind = AnswerKind::OptionLetter;
    task.gt.value = std::string(1, static_cast<char>('A' + letter(rng)));
    task.family = TaskFamily::General;
    task.context = first_context + i;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<SyntheticTask> make_numeric_tasks(int count, const NumericGrid& grid, int min_bin,
                                              int max_bin, Rng& rng, const std::string& task_id,
                                              int first_context) {
  std::uniform_int_distribution<int> bin(min_bin, max_bin);
  std::vector<SyntheticTask> tasks;
  for (int i = 0; i < count; ++i) {
    SyntheticTask task;
    task.kind = SyntheticTask::Kind::NumericEstimate;
    task.prompt_id = task_id + "-" + std::to_string(i);
    task.task_id = task_id;
    task.gt.kind = AnswerKind::Numeric;
    task.gt.value = shortest(grid.value(bin(rng)));
    task.family = TaskFamily::Spatial;
    task.context = first_context + i;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

ToyPolicy make_policy_for(const std::vector<SyntheticTask>& tasks, const Vocabulary& vocab) {
  int contexts = 0;
  for (const auto& t : tasks) contexts = std::max(contexts, t.context + 1);
  std::vector<std::vector<int>> actions(contexts, vocab.letter_tokens());
  for (const auto& t : tasks) {
    actions[t.context] = t.kind == SyntheticTask::Kind::MultipleChoice4 ? vocab.letter_tokens()
                                                                        : vocab.numeric_tokens();
  }
  return ToyPolicy(vocab, std::move(actions));
}

void save_checkpoint(const ToyPolicy& policy, std::string_view config_hash, std::ostream& out) {
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "config_hash " << (config_hash.empty() ? std::string_view("-") : config_hash) << '\n';
  out << "vocab " << policy.vocab().size() << '\n';
  for (const auto& tok : policy.vocab().tokens()) out << tok << '\n';
  out << "positions " << policy.answer_positions() << '\n';
  out << "contexts " << policy.num_contexts() << '\n';
  for (int c = 0; c < policy.num_contexts(); ++c) {
    const auto& acts = policy.actions(c);
    out << acts.size();
    for (int tok : acts) out << ' ' << tok;
    out << '\n';
  }
  out << "params " << policy.num_params() << '\n';
  for (double v : policy.params()) out << shortest(v) << '\n';
}

LoadedCheckpoint load_checkpoint(std::istream& in) {
  auto fail = [](const std::string& what) -> CheckpointError {
    return CheckpointError("malformed checkpoint: " + what);
  };
  auto expect_key = [&](std::istringstream& line, std::string_view key) {
    std::string word;
    if (!(line >> word) || word != key) throw fail("expected '" + std::string(key) + "'");
  };
  auto next_line = [&](std::string& s) {
    if (!std::getline(in, s)) throw fail("unexpected end of file");
  };
  std::string s;
  next_line(s);
  {
    std::istringstream line(s);
    expect_key(line, kCheckpointMagic);
    int version = 0;
    if (!(line >> version) || version != kCheckpointVersion) throw fail("unsupported version");
  }
  std::string hash;
  next_line(s);
  {
    std::istringstream line(s);
    expect_key(line, "config_hash");
    if (!(line >> hash)) throw fail("missing config hash");
    if (hash == "-") hash.clear();
  }
  std::size_t vocab_size = 0;
  next_line(s);
  {
    std::istringstream line(s);
    expect_key(line, "vocab");
    if (!(line >> vocab_size)) throw fail("missing vocabulary size");
  }
  std::vector<std::string> tokens(vocab_size);
  for (auto& tok : tokens) next_line(tok);
  int positions = 0, contexts = 0;
  next_line(s);
  {
    std::istringstream line(s);
    expect_key(line, "positions");
    if (!(line >> positions)) throw fail("missing positions");
  }
  next_line(s);
  {
    std::istringstream line(s);
    expect_key(line, "contexts");
    if (!(line >> contexts) || contexts < 0) throw fail("missing contexts");
  }
  std::vector<std::vector<int>> actions(contexts);
  for (auto& acts : actions) {
    next_line(s);
    std::istringstream line(s);
    std::size_t k = 0;
    if (!(line >> k)) throw fail("missing action count");
    acts.resize(k);
    for (auto& tok : acts) {
      if (!(line >> tok)) throw fail("missing action token");
    }
  }
  std::size_t n = 0;
  next_line(s);
  {
    std::istringstream line(s);
    expect_key(line, "params");
    if (!(line >> n)) throw fail("missing parameter count");
  }
  ToyPolicy policy(Vocabulary::from_tokens(std::move(tokens)), std::move(actions), positions);
  if (policy.num_params() != n) throw fail("parameter count does not match the header shape");
  auto params = policy.mutable_params();
  for (std::size_t i = 0; i < n; ++i) {
    next_line(s);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), params[i]);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail("bad parameter value");
  }
  return {std::move(policy), hash};
}

}  // namespace rlvr
