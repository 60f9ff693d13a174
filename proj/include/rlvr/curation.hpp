#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlvr/curriculum.hpp"
#include "rlvr/verifier.hpp"

namespace rlvr {

/// One candidate reasoning chain and its two assessments.
struct CoTRecord {
  std::string prompt_id;
  std::string chain_text;    // content of the think block
  std::string final_answer;  // boxed payload or answer block; empty when unparsable
  std::string raw_text;
  bool well_formed = false;
  bool accuracy_pass = false;  // set only by filter_by_answer
  std::optional<int> quality_score;  // 1..5
};

class ChainGenerator {
 public:
  virtual ~ChainGenerator() = default;
  virtual std::vector<std::string> generate(const PromptRecord& prompt, int k, double temperature) = 0;
};

class CotJudge {
 public:
  virtual ~CotJudge() = default;
  /// Reply to the scoring prompt; must be a single digit 1..5.
  virtual std::string score(const CoTRecord& record, const std::string& prompt) = 0;
};

/// k candidates through the generator, parsed with the verifier. Malformed
/// chains keep an empty final_answer and can never pass the answer filter.
/// Throws PreconditionError (k < 1, temperature <= 0) and GeneratorFailure.
std::vector<CoTRecord> synthesize_chains(const PromptRecord& prompt, ChainGenerator& generator, int k,
                                         double temperature);

/// Records whose final answer verifies against `gt`, in input order, with accuracy_pass set.
std::vector<CoTRecord> filter_by_answer(const std::vector<CoTRecord>& records, const GroundTruth& gt);

/// The scoring prompt with the chain substituted.
std::string quality_prompt(const CoTRecord& record);

/// Parses a judge reply: optional whitespace around one digit 1..5.
std::optional<int> parse_quality_reply(std::string_view reply);

/// Throws PreconditionError when the record did not pass the answer filter,
/// MalformedJudgeOutput on a bad reply and JudgeFailure when the judge throws.
CoTRecord score_quality(const CoTRecord& record, CotJudge& judge);

/// score_quality over many records with at most `max_in_flight` concurrent
/// judge calls. Output order matches input order.
std::vector<CoTRecord> score_quality_batch(const std::vector<CoTRecord>& records, CotJudge& judge,
                                           int max_in_flight);

/// Records with quality_score >= threshold. Throws UnscoredRecord when any
/// record lacks a score and PreconditionError when one skipped the answer filter.
std::vector<CoTRecord> select_cold_start(const std::vector<CoTRecord>& records, int threshold = 4);

}  // namespace rlvr
