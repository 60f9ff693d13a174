#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rlvr/curation.hpp"
#include "rlvr/curriculum.hpp"
#include "rlvr/grpo.hpp"
#include "rlvr/rewards.hpp"
#include "rlvr/spatial.hpp"

namespace rlvr::io {

using nlohmann::json;

// Schema identifiers written into every record's "schema" field.
inline constexpr std::string_view kPromptSchema = "rlvr.prompt.v1";
inline constexpr std::string_view kQAItemSchema = "rlvr.qa_item.v1";
inline constexpr std::string_view kSceneSchema = "rlvr.scene.v1";
inline constexpr std::string_view kVideoSchema = "rlvr.video.v1";
inline constexpr std::string_view kCoTSchema = "rlvr.cot.v1";
inline constexpr std::string_view kPredictionSchema = "rlvr.prediction.v1";
inline constexpr std::string_view kVerifyResultSchema = "rlvr.verify_result.v1";
inline constexpr std::string_view kMetricsSchema = "rlvr.metrics.v1";
inline constexpr std::string_view kScheduleSchema = "rlvr.schedule.v1";
inline constexpr std::string_view kResponsesSchema = "rlvr.responses.v1";
inline constexpr std::string_view kTranscriptSchema = "rlvr.cot_transcript.v1";

/// One parsed line with its 1-based line number.
struct Line {
  std::size_t number = 0;
  json value;
};

/// Reads newline-delimited JSON objects, skipping blank lines. A record whose
/// "schema" field is present must name one of `accepted` (any when empty).
/// Throws IoError when the file cannot be opened and SchemaError on bad lines.
std::vector<Line> read_jsonl(const std::filesystem::path& path,
                             const std::vector<std::string_view>& accepted = {});

/// Writes one compact object per line. Throws IoError.
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

/// Ground truth <-> JSON: {"kind", "value", "unit"?, "options"?: [{"letter","content"}]}.
json to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const json& j, std::size_t line);

json to_json(const PromptRecord& record);
PromptRecord prompt_from_json(const json& j, std::size_t line);

/// QA items keep unrecognised fields in `extra` for round-tripping.
struct QARecord {
  QAItem item;
  json extra = json::object();
};
json to_json(const QAItem& item, const json& extra = json::object());
QARecord qa_item_from_json(const json& j, std::size_t line);

/// PromptRecord view of a QA item for curriculum scoring and training.
PromptRecord qa_to_prompt(const QAItem& item);

json to_json(const SceneAnnotation& scene);
SceneAnnotation scene_from_json(const json& j, std::size_t line);
json to_json(const VideoAnnotation& video);
VideoAnnotation video_from_json(const json& j, std::size_t line);

json to_json(const CoTRecord& record);
CoTRecord cot_from_json(const json& j, std::size_t line);

json to_json(const StepMetrics& m);
json to_json(const ScheduleEntry& e);

/// Typed loaders over read_jsonl.
std::vector<PromptRecord> load_prompts(const std::filesystem::path& path);
std::vector<QARecord> load_qa_items(const std::filesystem::path& path);
std::vector<SceneAnnotation> load_scenes(const std::filesystem::path& path);
std::vector<VideoAnnotation> load_videos(const std::filesystem::path& path);
std::vector<CoTRecord> load_cot_records(const std::filesystem::path& path);

}  // namespace rlvr::io
