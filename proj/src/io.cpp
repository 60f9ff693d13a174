#include "rlvr/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rlvr/error.hpp"
#include "rlvr/numfmt.hpp"

namespace rlvr::io {
namespace {

const json& field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(line, std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const json& j, const char* key, std::size_t line) {
  const json& v = field(j, key, line);
  if (!v.is_string()) throw SchemaError(line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double num(const json& v, const std::string& what, std::size_t line) {
  if (!v.is_number()) throw SchemaError(line, what + " must be a number");
  return v.get<double>();
}

double num(const json& j, const char* key, std::size_t line) { return num(field(j, key, line), std::string(key), line); }

long integer(const json& j, const char* key, std::size_t line) {
  const json& v = field(j, key, line);
  if (!v.is_number_integer()) throw SchemaError(line, std::string("field '") + key + "' must be an integer");
  return v.get<long>();
}

const json& array(const json& j, const char* key, std::size_t line) {
  const json& v = field(j, key, line);
  if (!v.is_array()) throw SchemaError(line, std::string("field '") + key + "' must be an array");
  return v;
}

json extras(const json& j, std::initializer_list<const char*> known) {
  json out = json::object();
  std::set<std::string> names(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "schema" && !names.count(it.key())) out[it.key()] = it.value();
  }
  return out;
}

void merge(json& into, const json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!into.contains(it.key())) into[it.key()] = it.value();
  }
}

json vec3(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from(const json& j, const char* key, std::size_t line) {
  const json& v = array(j, key, line);
  if (v.size() != 3) throw SchemaError(line, std::string("field '") + key + "' must have 3 entries");
  const std::string what(key);
  return {num(v[0], what, line), num(v[1], what, line), num(v[2], what, line)};
}

template <typename T, typename F>
std::vector<T> load_as(const std::filesystem::path& path, std::vector<std::string_view> accepted, F convert) {
  std::vector<T> out;
  for (const auto& line : read_jsonl(path, accepted)) out.push_back(convert(line.value, line.number));
  return out;
}

}  // namespace

std::vector<Line> read_jsonl(const std::filesystem::path& path, const std::vector<std::string_view>& accepted) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<Line> out;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) throw SchemaError(number, "not valid JSON");
    if (!value.is_object()) throw SchemaError(number, "record must be a JSON object");
    if (auto it = value.find("schema"); it != value.end() && !accepted.empty()) {
      if (!it->is_string() ||
          std::find(accepted.begin(), accepted.end(), it->get<std::string>()) == accepted.end()) {
        throw SchemaError(number, "unexpected schema " + it->dump());
      }
    }
    out.push_back({number, std::move(value)});
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  for (const auto& r : records) out << r.dump() << '\n';
  out.flush();
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

// --- ground truth / prompts ---------------------------------------------------------

json to_json(const GroundTruth& gt) {
  json j = {{"kind", std::string(to_string(gt.kind))}, {"value", gt.value}};
  if (gt.unit) j["unit"] = *gt.unit;
  if (gt.options) {
    json options = json::array();
    for (const auto& [letter, content] : *gt.options) {
      options.push_back({{"letter", std::string(1, letter)}, {"content", content}});
    }
    j["options"] = std::move(options);
  }
  return j;
}

GroundTruth ground_truth_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) throw SchemaError(line, "ground_truth must be an object");
  GroundTruth gt;
  const std::string kind = str(j, "kind", line);
  auto k = answer_kind_from_string(kind);
  if (!k) throw SchemaError(line, "unknown answer kind '" + kind + "'");
  gt.kind = *k;
  const json& value = field(j, "value", line);
  if (value.is_string()) {
    gt.value = value.get<std::string>();
  } else if (value.is_number()) {
    gt.value = value.is_number_integer() ? std::to_string(value.get<long long>()) : shortest(value.get<double>());
  } else {
    throw SchemaError(line, "field 'value' must be a string or number");
  }
  if (j.contains("unit") && !j["unit"].is_null()) gt.unit = str(j, "unit", line);
  if (j.contains("options") && !j["options"].is_null()) {
    OptionList options;
    for (const auto& o : array(j, "options", line)) {
      const std::string letter = str(o, "letter", line);
      if (letter.size() != 1) throw SchemaError(line, "option letter must be one character");
      options.emplace_back(letter[0], str(o, "content", line));
    }
    gt.options = std::move(options);
  }
  if (!is_valid(gt)) throw SchemaError(line, "ground truth violates its kind's invariants");
  return gt;
}

json to_json(const PromptRecord& record) {
  json j = {{"schema", kPromptSchema},
            {"id", record.id},
            {"task", record.task},
            {"question", record.question},
            {"ground_truth", to_json(record.ground_truth)},
            {"family", std::string(to_string(record.family))}};
  if (record.difficulty) j["difficulty"] = *record.difficulty;
  merge(j, record.extra);
  return j;
}

PromptRecord prompt_from_json(const json& j, std::size_t line) {
  PromptRecord r;
  r.id = str(j, "id", line);
  r.task = str(j, "task", line);
  r.question = str(j, "question", line);
  r.ground_truth = ground_truth_from_json(field(j, "ground_truth", line), line);
  if (j.contains("family")) {
    const std::string family = str(j, "family", line);
    auto f = task_family_from_string(family);
    if (!f) throw SchemaError(line, "unknown family '" + family + "'");
    r.family = *f;
  }
  if (j.contains("difficulty") && !j["difficulty"].is_null()) r.difficulty = num(j, "difficulty", line);
  r.extra = extras(j, {"id", "task", "question", "ground_truth", "family", "difficulty"});
  return r;
}

// --- QA items ---------------------------------------------------------------------

json to_json(const QAItem& item, const json& extra) {
  json j = {{"schema", kQAItemSchema},
            {"id", item.id},
            {"scene_id", item.scene_id},
            {"task", is_video_category(item.category) ? "spatial_video" : "spatial_image"},
            {"family", "spatial"},
            {"category", std::string(to_string(item.category))},
            {"format", std::string(to_string(item.format))},
            {"question", item.question},
            {"ground_truth", to_json(item.target)},
            {"subjects", item.subjects}};
  if (item.quality) {
    j["quality"] = {{"difficulty", item.quality->difficulty},
                    {"ObjectS", item.quality->object_s},
                    {"AnswerS", item.quality->answer_s},
                    {"OptionS", item.quality->option_s}};
  }
  merge(j, extra);
  return j;
}

QARecord qa_item_from_json(const json& j, std::size_t line) {
  QARecord r;
  QAItem& item = r.item;
  item.id = str(j, "id", line);
  item.scene_id = j.contains("scene_id") ? str(j, "scene_id", line) : std::string();
  const std::string category = str(j, "category", line);
  auto c = spatial_category_from_string(category);
  if (!c) throw SchemaError(line, "unknown category '" + category + "'");
  item.category = *c;
  const std::string format = j.contains("format") ? str(j, "format", line) : "multiple_choice";
  auto f = question_format_from_string(format);
  if (!f) throw SchemaError(line, "unknown format '" + format + "'");
  item.format = *f;
  item.question = str(j, "question", line);
  item.target = ground_truth_from_json(field(j, "ground_truth", line), line);
  if (j.contains("subjects")) {
    for (const auto& s : array(j, "subjects", line)) {
      if (!s.is_string()) throw SchemaError(line, "subjects must be strings");
      item.subjects.push_back(s.get<std::string>());
    }
  }
  if (j.contains("quality") && !j["quality"].is_null()) {
    const json& q = j["quality"];
    QualityLabels labels;
    labels.difficulty = num(q, "difficulty", line);
    labels.object_s = static_cast<int>(integer(q, "ObjectS", line));
    labels.answer_s = static_cast<int>(integer(q, "AnswerS", line));
    labels.option_s = static_cast<int>(integer(q, "OptionS", line));
    item.quality = labels;
  }
  r.extra = extras(j, {"id", "scene_id", "task", "family", "category", "format", "question", "ground_truth",
                       "subjects", "quality"});
  return r;
}

PromptRecord qa_to_prompt(const QAItem& item) {
  PromptRecord r;
  r.id = item.id;
  r.task = is_video_category(item.category) ? "spatial_video" : "spatial_image";
  r.question = render_question(item);
  r.ground_truth = item.target;
  r.family = TaskFamily::Spatial;
  if (item.quality) r.difficulty = item.quality->difficulty;
  r.extra = {{"category", std::string(to_string(item.category))}};
  return r;
}

// --- annotations ------------------------------------------------------------------

json to_json(const SceneAnnotation& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    objects.push_back({{"object_id", o.object_id},
                       {"label", o.label},
                       {"center", vec3(o.box.center)},
                       {"size", vec3(o.box.size)}});
  }
  json j = {{"schema", kSceneSchema},
            {"scene_id", scene.scene_id},
            {"objects", std::move(objects)},
            {"camera", {{"position", vec3(scene.camera.position)}, {"forward", vec3(scene.camera.forward)}}}};
  if (scene.floor_polygon) {
    json poly = json::array();
    for (const auto& p : *scene.floor_polygon) poly.push_back(json::array({p.x, p.y}));
    j["floor_polygon"] = std::move(poly);
  }
  return j;
}

SceneAnnotation scene_from_json(const json& j, std::size_t line) {
  SceneAnnotation scene;
  scene.scene_id = str(j, "scene_id", line);
  for (const auto& o : array(j, "objects", line)) {
    SceneObject obj;
    obj.object_id = str(o, "object_id", line);
    obj.label = str(o, "label", line);
    obj.box.center = vec3_from(o, "center", line);
    obj.box.size = vec3_from(o, "size", line);
    scene.objects.push_back(std::move(obj));
  }
  const json& camera = field(j, "camera", line);
  scene.camera.position = vec3_from(camera, "position", line);
  scene.camera.forward = vec3_from(camera, "forward", line);
  if (j.contains("floor_polygon") && !j["floor_polygon"].is_null()) {
    std::vector<Vec2> poly;
    for (const auto& p : array(j, "floor_polygon", line)) {
      if (!p.is_array() || p.size() != 2) throw SchemaError(line, "floor_polygon vertices must be [x, y]");
      poly.push_back({num(p[0], std::string("floor_polygon"), line), num(p[1], std::string("floor_polygon"), line)});
    }
    scene.floor_polygon = std::move(poly);
  }
  if (auto problem = validate(scene)) throw SchemaError(line, *problem);
  return scene;
}

json to_json(const VideoAnnotation& video) {
  json frames = json::array();
  for (const auto& f : video.frames) {
    json detections = json::array();
    for (const auto& d : f.detections) {
      detections.push_back({{"object_id", d.object_id}, {"label", d.label}, {"pixel_area", d.pixel_area}});
    }
    frames.push_back({{"frame_index", f.frame_index}, {"detections", std::move(detections)}});
  }
  return {{"schema", kVideoSchema},
          {"video_id", video.video_id},
          {"scene_id", video.scene_id},
          {"frames", std::move(frames)}};
}

VideoAnnotation video_from_json(const json& j, std::size_t line) {
  VideoAnnotation video;
  video.video_id = str(j, "video_id", line);
  video.scene_id = str(j, "scene_id", line);
  for (const auto& f : array(j, "frames", line)) {
    Frame frame;
    frame.frame_index = static_cast<int>(integer(f, "frame_index", line));
    for (const auto& d : array(f, "detections", line)) {
      Detection det;
      det.object_id = d.contains("object_id") ? str(d, "object_id", line) : std::string();
      det.label = str(d, "label", line);
      det.pixel_area = integer(d, "pixel_area", line);
      frame.detections.push_back(std::move(det));
    }
    video.frames.push_back(std::move(frame));
  }
  if (auto problem = validate(video)) throw SchemaError(line, *problem);
  return video;
}

// --- CoT records --------------------------------------------------------------------

json to_json(const CoTRecord& r) {
  json j = {{"schema", kCoTSchema},
            {"prompt_id", r.prompt_id},
            {"chain_text", r.chain_text},
            {"final_answer", r.final_answer},
            {"raw_text", r.raw_text},
            {"well_formed", r.well_formed},
            {"accuracy_pass", r.accuracy_pass}};
  j["quality_score"] = r.quality_score ? json(*r.quality_score) : json(nullptr);
  return j;
}

CoTRecord cot_from_json(const json& j, std::size_t line) {
  CoTRecord r;
  r.prompt_id = str(j, "prompt_id", line);
  r.chain_text = str(j, "chain_text", line);
  r.final_answer = str(j, "final_answer", line);
  r.raw_text = j.contains("raw_text") ? str(j, "raw_text", line) : std::string();
  const json& pass = field(j, "accuracy_pass", line);
  if (!pass.is_boolean()) throw SchemaError(line, "field 'accuracy_pass' must be a boolean");
  r.accuracy_pass = pass.get<bool>();
  r.well_formed = j.value("well_formed", r.accuracy_pass);
  if (j.contains("quality_score") && !j["quality_score"].is_null()) {
    const long score = integer(j, "quality_score", line);
    if (score < 1 || score > 5) throw SchemaError(line, "quality_score must be in 1..5");
    r.quality_score = static_cast<int>(score);
  }
  return r;
}

// --- training artifacts ---------------------------------------------------------------

json to_json(const StepMetrics& m) {
  return {{"schema", kMetricsSchema},
          {"step", m.step},
          {"task_id", m.task_id},
          {"groups", m.groups},
          {"mean_total_reward", m.mean_total_reward},
          {"mean_accuracy", m.mean_accuracy},
          {"alpha_mean", m.alpha_mean},
          {"beta_hat", m.beta_hat},
          {"mean_kl", m.mean_kl},
          {"objective", m.objective},
          {"t_cur", m.t_cur},
          {"t_max", m.t_max},
          {"group_accuracy", m.group_accuracy}};
}

json to_json(const ScheduleEntry& e) {
  return {{"schema", kScheduleSchema},
          {"step", e.step},
          {"rotation", e.rotation},
          {"task_id", e.task_id},
          {"prompt_ids", e.prompt_ids}};
}

// --- loaders ------------------------------------------------------------------------------

std::vector<PromptRecord> load_prompts(const std::filesystem::path& path) {
  std::vector<PromptRecord> out;
  for (const auto& line : read_jsonl(path, {kPromptSchema, kQAItemSchema})) {
    const auto schema = line.value.value("schema", std::string());
    if (schema == kQAItemSchema) {
      out.push_back(qa_to_prompt(qa_item_from_json(line.value, line.number).item));
    } else {
      out.push_back(prompt_from_json(line.value, line.number));
    }
  }
  return out;
}

std::vector<QARecord> load_qa_items(const std::filesystem::path& path) {
  return load_as<QARecord>(path, {kQAItemSchema}, qa_item_from_json);
}

std::vector<SceneAnnotation> load_scenes(const std::filesystem::path& path) {
  return load_as<SceneAnnotation>(path, {kSceneSchema}, scene_from_json);
}

std::vector<VideoAnnotation> load_videos(const std::filesystem::path& path) {
  return load_as<VideoAnnotation>(path, {kVideoSchema}, video_from_json);
}

std::vector<CoTRecord> load_cot_records(const std::filesystem::path& path) {
  return load_as<CoTRecord>(path, {kCoTSchema}, cot_from_json);
}

}  // namespace rlvr::io
