#include "rlvr/curation.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "rlvr/error.hpp"
#include "rlvr/prompts.hpp"

namespace rlvr {

std::vector<CoTRecord> synthesize_chains(const PromptRecord& prompt, ChainGenerator& generator, int k,
                                         double temperature) {
  if (k < 1) throw PreconditionError("k must be at least 1, got " + std::to_string(k));
  if (!(temperature > 0.0)) throw PreconditionError("temperature must be positive");
  std::vector<std::string> texts;
  try {
    texts = generator.generate(prompt, k, temperature);
  } catch (const std::exception& e) {
    throw GeneratorFailure("generator failed on '" + prompt.id + "': " + e.what());
  }
  if (texts.size() != static_cast<std::size_t>(k)) {
    throw GeneratorFailure("generator returned " + std::to_string(texts.size()) + " chains, expected " +
                           std::to_string(k));
  }
  std::vector<CoTRecord> out;
  out.reserve(texts.size());
  for (auto& text : texts) {
    const ParsedResponse parsed = parse_response(text);
    CoTRecord record;
    record.prompt_id = prompt.id;
    record.well_formed = parsed.well_formed;
    if (parsed.well_formed) {
      record.chain_text = parsed.think_text;
      record.final_answer = parsed.candidate();
    }
    record.raw_text = std::move(text);
    out.push_back(std::move(record));
  }
  return out;
}

std::vector<CoTRecord> filter_by_answer(const std::vector<CoTRecord>& records, const GroundTruth& gt) {
  std::vector<CoTRecord> out;
  for (const auto& r : records) {
    if (!r.well_formed || !verify_candidate(r.final_answer, gt)) continue;
    out.push_back(r);
    out.back().accuracy_pass = true;
  }
  return out;
}

std::string quality_prompt(const CoTRecord& record) {
  return prompts::fill(prompts::kCotQualityScoringPrompt, {{"REASONING", record.chain_text}});
}

std::optional<int> parse_quality_reply(std::string_view reply) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!reply.empty() && is_space(reply.front())) reply.remove_prefix(1);
  while (!reply.empty() && is_space(reply.back())) reply.remove_suffix(1);
  if (reply.size() != 1 || reply[0] < '1' || reply[0] > '5') return std::nullopt;
  return reply[0] - '0';
}

CoTRecord score_quality(const CoTRecord& record, CotJudge& judge) {
  if (!record.accuracy_pass) {
    throw PreconditionError("record for '" + record.prompt_id + "' has not passed the answer filter");
  }
  std::string reply;
  try {
    reply = judge.score(record, quality_prompt(record));
  } catch (const std::exception& e) {
    throw JudgeFailure("judge failed scoring '" + record.prompt_id + "': " + e.what());
  }
  auto score = parse_quality_reply(reply);
  if (!score) throw MalformedJudgeOutput("expected a single score 1..5, got '" + reply + "'");
  CoTRecord out = record;
  out.quality_score = *score;
  return out;
}

std::vector<CoTRecord> score_quality_batch(const std::vector<CoTRecord>& records, CotJudge& judge,
                                           int max_in_flight) {
  std::vector<CoTRecord> out(records.size());
  if (max_in_flight <= 1 || records.size() <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = score_quality(records[i], judge);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      try {
        out[i] = score_quality(records[i], judge);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = records.size();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), records.size());
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<CoTRecord> select_cold_start(const std::vector<CoTRecord>& records, int threshold) {
  std::vector<CoTRecord> out;
  for (const auto& r : records) {
    if (!r.accuracy_pass) throw PreconditionError("record for '" + r.prompt_id + "' skipped the answer filter");
    if (!r.quality_score) throw UnscoredRecord("record for '" + r.prompt_id + "' has no quality score");
    if (*r.quality_score >= threshold) out.push_back(r);
  }
  return out;
}

}  // namespace rlvr
