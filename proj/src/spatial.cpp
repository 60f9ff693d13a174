#include "rlvr/spatial.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "rlvr/error.hpp"
#include "rlvr/numfmt.hpp"
#include "rlvr/prompts.hpp"
#include "rlvr/rational.hpp"

namespace rlvr {
namespace {

using Rng = std::mt19937_64;

constexpr double kTiny = 1e-9;
constexpr std::string_view kUnitSuffix = " Please answer measured in ";

constexpr std::string_view kCategoryNames[] = {
    "ObjectCount",      "SpatialRelation",  "RelativeSize", "AbsoluteSize",
    "AbsoluteDistance", "RelativeDistance", "RelativeDepth", "RoomSize",
    "AppearanceOrder",  "RelativeDirection"};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng category_rng(const SynthConfig& config, std::string_view scene_id, SpatialCategory category) {
  return Rng(splitmix(config.seed ^ splitmix(fnv1a(scene_id) + static_cast<std::uint64_t>(category))));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_planar(const SynthConfig& config, std::string_view label) {
  const std::string l = lower(label);
  return std::any_of(config.planar_labels.begin(), config.planar_labels.end(),
                     [&](const std::string& p) { return lower(p) == l; });
}

char letter(std::size_t i) { return static_cast<char>('A' + i); }

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

double volume(const Box3& box) { return box.size.x * box.size.y * box.size.z; }

double ratio(double a, double b) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  return lo <= 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
}

// Objects that a question may name unambiguously: single-instance, non-planar labels.
std::vector<const SceneObject*> nameable(const SceneAnnotation& scene, const SynthConfig& config) {
  std::map<std::string, int> counts;
  for (const auto& o : scene.objects) ++counts[o.label];
  std::vector<const SceneObject*> out;
  for (const auto& o : scene.objects) {
    if (counts[o.label] == 1 && !is_planar(config, o.label)) out.push_back(&o);
  }
  return out;
}

QAItem base_item(const SceneAnnotation& scene, SpatialCategory category) {
  QAItem item;
  item.scene_id = scene.scene_id;
  item.category = category;
  return item;
}

void set_choice(QAItem& item, const std::vector<std::string>& contents, std::size_t correct) {
  OptionList options;
  for (std::size_t i = 0; i < contents.size(); ++i) options.emplace_back(letter(i), contents[i]);
  item.format = QuestionFormat::MultipleChoice;
  item.target.kind = AnswerKind::OptionLetter;
  item.target.value = std::string(1, letter(correct));
  item.target.unit.reset();
  item.target.options = std::move(options);
}

// Two-way choice with a coin flip deciding which content is listed first.
void set_binary_choice(QAItem& item, const std::string& correct, const std::string& other, Rng& rng) {
  if (std::bernoulli_distribution(0.5)(rng)) {
    set_choice(item, {correct, other}, 0);
  } else {
    set_choice(item, {other, correct}, 1);
  }
}

void set_metric(QAItem& item, double value, std::string unit) {
  item.format = QuestionFormat::FillInBlank;
  item.target.kind = AnswerKind::Numeric;
  item.target.value = shortest(round_metric(value));
  item.target.unit = std::move(unit);
  item.target.options.reset();
}

std::vector<QAItem> finish(std::vector<QAItem> items, const SceneAnnotation& scene,
                           SpatialCategory category, const SynthConfig& config, Rng& rng) {
  if (config.max_items_per_category > 0 &&
      items.size() > static_cast<std::size_t>(config.max_items_per_category)) {
    std::vector<std::size_t> idx(items.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(config.max_items_per_category);
    std::sort(idx.begin(), idx.end());
    std::vector<QAItem> kept;
    for (auto i : idx) kept.push_back(std::move(items[i]));
    items = std::move(kept);
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].id = scene.scene_id + ":" + std::string(to_string(category)) + ":" + std::to_string(i);
  }
  return items;
}

// Ground-plane components of `d` relative to heading `f`: (forward, left).
std::pair<double, double> heading_components(double fx, double fy, double dx, double dy) {
  const double nf = std::hypot(fx, fy);
  return {(fx * dx + fy * dy) / nf, (fx * dy - fy * dx) / nf};
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

// --- image categories ---------------------------------------------------------

std::vector<QAItem> object_count(const SceneAnnotation& scene, const SynthConfig& config, Rng& rng) {
  std::vector<std::string> order;
  std::map<std::string, int> counts;
  for (const auto& o : scene.objects) {
    if (is_planar(config, o.label)) continue;
    if (counts[o.label]++ == 0) order.push_back(o.label);
  }
  std::vector<QAItem> items;
  for (const auto& label : order) {
    const int c = counts[label];
    std::vector<int> pool;
    for (int v = 1; v <= c + 4; ++v) {
      if (v != c) pool.push_back(v);
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<int> values = {c, pool[0], pool[1], pool[2]};
    std::shuffle(values.begin(), values.end(), rng);
    std::vector<std::string> contents;
    for (int v : values) contents.push_back(std::to_string(v));
    auto correct = static_cast<std::size_t>(std::find(values.begin(), values.end(), c) - values.begin());

    QAItem item = base_item(scene, SpatialCategory::ObjectCount);
    item.question = "How many " + label + "(s) are in this scene?";
    item.subjects = {label};
    set_choice(item, contents, correct);
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<QAItem> spatial_relation(const SceneAnnotation& scene, const SynthConfig& config) {
  const double fx = scene.camera.forward.x, fy = scene.camera.forward.y;
  if (std::hypot(fx, fy) < kTiny) return {};
  auto objs = nameable(scene, config);
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      const auto& a = *objs[i];
      const auto& b = *objs[j];
      auto [fwd, left] = heading_components(fx, fy, b.box.center.x - a.box.center.x,
                                            b.box.center.y - a.box.center.y);
      (void)fwd;
      if (std::abs(left) < config.min_lateral_offset) continue;
      QAItem item = base_item(scene, SpatialCategory::SpatialRelation);
      item.question = "From the camera's viewpoint, is the " + b.label + " to the left or to the right of the " +
                      a.label + "?";
      item.subjects = {a.label, b.label};
      set_choice(item, {"left", "right"}, left > 0.0 ? 0 : 1);
      items.push_back(std::move(item));
    }
  }
  return items;
}

std::vector<QAItem> relative_size(const SceneAnnotation& scene, const SynthConfig& config, Rng& rng) {
  auto objs = nameable(scene, config);
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      const double vi = volume(objs[i]->box), vj = volume(objs[j]->box);
      if (ratio(vi, vj) < config.tie_ratio) continue;
      const auto& larger = vi > vj ? *objs[i] : *objs[j];
      const auto& smaller = vi > vj ? *objs[j] : *objs[i];
      QAItem item = base_item(scene, SpatialCategory::RelativeSize);
      item.question = "Which is larger in volume, the " + objs[i]->label + " or the " + objs[j]->label + "?";
      item.subjects = {objs[i]->label, objs[j]->label};
      set_binary_choice(item, larger.label, smaller.label, rng);
      items.push_back(std::move(item));
    }
  }
  return items;
}

std::vector<QAItem> absolute_size(const SceneAnnotation& scene, const SynthConfig& config) {
  std::vector<QAItem> items;
  for (const auto* o : nameable(scene, config)) {
    const double longest = std::max({o->box.size.x, o->box.size.y, o->box.size.z});
    QAItem item = base_item(scene, SpatialCategory::AbsoluteSize);
    item.question = "What is the length of the longest dimension (length, width, or height) of the " +
                    o->label + "?";
    item.subjects = {o->label};
    set_metric(item, longest, "m");
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<QAItem> absolute_distance(const SceneAnnotation& scene, const SynthConfig& config) {
  auto objs = nameable(scene, config);
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      QAItem item = base_item(scene, SpatialCategory::AbsoluteDistance);
      item.question = "What is the distance between the centers of the " + objs[i]->label + " and the " +
                      objs[j]->label + "?";
      item.subjects = {objs[i]->label, objs[j]->label};
      set_metric(item, distance(objs[i]->box.center, objs[j]->box.center), "m");
      items.push_back(std::move(item));
    }
  }
  return items;
}

std::vector<QAItem> relative_distance(const SceneAnnotation& scene, const SynthConfig& config, Rng& rng) {
  auto objs = nameable(scene, config);
  std::vector<QAItem> items;
  for (std::size_t a = 0; a < objs.size(); ++a) {
    for (std::size_t b = 0; b < objs.size(); ++b) {
      for (std::size_t c = b + 1; c < objs.size(); ++c) {
        if (b == a || c == a) continue;
        const double dab = distance(objs[a]->box.center, objs[b]->box.center);
        const double dac = distance(objs[a]->box.center, objs[c]->box.center);
        if (ratio(dab, dac) < config.tie_ratio) continue;
        const auto& closer = dab < dac ? *objs[b] : *objs[c];
        const auto& farther = dab < dac ? *objs[c] : *objs[b];
        QAItem item = base_item(scene, SpatialCategory::RelativeDistance);
        item.question = "Which is closer to the " + objs[a]->label + ", the " + objs[b]->label + " or the " +
                        objs[c]->label + "?";
        item.subjects = {objs[a]->label, objs[b]->label, objs[c]->label};
        set_binary_choice(item, closer.label, farther.label, rng);
        items.push_back(std::move(item));
      }
    }
  }
  return items;
}

std::vector<QAItem> relative_depth(const SceneAnnotation& scene, const SynthConfig& config, Rng& rng) {
  const Vec3 f = scene.camera.forward;
  const double nf = std::sqrt(f.x * f.x + f.y * f.y + f.z * f.z);
  if (nf < kTiny) return {};
  auto depth = [&](const SceneObject& o) {
    const Vec3& c = o.box.center;
    const Vec3& p = scene.camera.position;
    return ((c.x - p.x) * f.x + (c.y - p.y) * f.y + (c.z - p.z) * f.z) / nf;
  };
  auto objs = nameable(scene, config);
  std::vector<QAItem> items;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      const double di = depth(*objs[i]), dj = depth(*objs[j]);
      if (di <= 0.0 || dj <= 0.0 || ratio(di, dj) < config.tie_ratio) continue;
      const auto& nearer = di < dj ? *objs[i] : *objs[j];
      const auto& farther = di < dj ? *objs[j] : *objs[i];
      QAItem item = base_item(scene, SpatialCategory::RelativeDepth);
      item.question = "Which is closer to the camera, the " + objs[i]->label + " or the " + objs[j]->label + "?";
      item.subjects = {objs[i]->label, objs[j]->label};
      set_binary_choice(item, nearer.label, farther.label, rng);
      items.push_back(std::move(item));
    }
  }
  return items;
}

// --- video categories ---------------------------------------------------------

std::vector<QAItem> room_size(const SceneAnnotation& scene) {
  if (!scene.floor_polygon || scene.floor_polygon->size() < 3) return {};
  const double area = std::abs(polygon_signed_area(*scene.floor_polygon));
  if (area <= 0.0) return {};
  QAItem item = base_item(scene, SpatialCategory::RoomSize);
  item.question = "What is the floor area of this room?";
  set_metric(item, area, "m2");
  return {std::move(item)};
}

std::vector<QAItem> appearance_order(const VideoAnnotation& video, const SceneAnnotation& scene,
                                     const SynthConfig& config, Rng& rng) {
  std::vector<std::pair<std::string, int>> firsts;
  for (auto& entry : first_appearances(video, config.min_pixel_area)) {
    if (!is_planar(config, entry.first)) firsts.push_back(std::move(entry));
  }
  std::vector<std::pair<std::string, int>> survivors;
  for (std::size_t i = 0; i < firsts.size(); ++i) {
    bool clash = false;
    for (std::size_t j = 0; j < firsts.size() && !clash; ++j) {
      clash = i != j && std::abs(firsts[i].second - firsts[j].second) <= config.adjacent_window;
    }
    if (!clash) survivors.push_back(firsts[i]);
  }
  if (survivors.size() < 3) return {};

  std::vector<QAItem> items;
  std::set<std::vector<std::string>> seen;
  for (int q = 0; q < config.appearance_questions; ++q) {
    std::size_t k = 3;
    if (survivors.size() >= 4 && std::bernoulli_distribution(0.5)(rng)) k = 4;
    std::vector<std::size_t> idx(survivors.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());  // survivors are frame-sorted
    std::vector<std::string> order;
    for (auto i : idx) order.push_back(survivors[i].first);
    if (!seen.insert(order).second) continue;

    const std::string correct = join(order, ", ");
    std::vector<std::string> contents = {correct};
    std::vector<std::string> perm = order;
    while (contents.size() < 4) {
      std::shuffle(perm.begin(), perm.end(), rng);
      std::string candidate = join(perm, ", ");
      if (std::find(contents.begin(), contents.end(), candidate) == contents.end()) {
        contents.push_back(std::move(candidate));
      }
    }
    std::shuffle(contents.begin(), contents.end(), rng);
    auto answer = static_cast<std::size_t>(std::find(contents.begin(), contents.end(), correct) - contents.begin());

    std::vector<std::string> listed = order;
    std::shuffle(listed.begin(), listed.end(), rng);
    QAItem item = base_item(scene, SpatialCategory::AppearanceOrder);
    item.question = "What will be the first-time appearance order of the following categories in the video: " +
                    join(listed, ", ") + "?";
    item.subjects = order;
    set_choice(item, contents, answer);
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<QAItem> relative_direction(const VideoAnnotation& video, const SceneAnnotation& scene,
                                       const SynthConfig& config) {
  std::set<std::string> seen_ids, seen_labels;
  for (const auto& frame : video.frames) {
    for (const auto& d : frame.detections) {
      seen_ids.insert(d.object_id);
      seen_labels.insert(d.label);
    }
  }
  std::vector<const SceneObject*> objs;
  for (const auto* o : nameable(scene, config)) {
    if (seen_ids.count(o->object_id) || seen_labels.count(o->label)) objs.push_back(o);
  }
  static const std::vector<std::string> kDirections = {"left", "right", "front", "back"};
  std::vector<QAItem> items;
  for (std::size_t a = 0; a < objs.size(); ++a) {
    for (std::size_t b = 0; b < objs.size(); ++b) {
      if (b == a) continue;
      const double fx = objs[b]->box.center.x - objs[a]->box.center.x;
      const double fy = objs[b]->box.center.y - objs[a]->box.center.y;
      if (std::hypot(fx, fy) < kTiny) continue;
      for (std::size_t c = 0; c < objs.size(); ++c) {
        if (c == a || c == b) continue;
        auto [fwd, left] = heading_components(fx, fy, objs[c]->box.center.x - objs[a]->box.center.x,
                                              objs[c]->box.center.y - objs[a]->box.center.y);
        std::size_t answer;
        if (std::abs(fwd) >= config.tie_ratio * std::abs(left) && std::abs(fwd) > kTiny) {
          answer = fwd > 0.0 ? 2 : 3;
        } else if (std::abs(left) >= config.tie_ratio * std::abs(fwd) && std::abs(left) > kTiny) {
          answer = left > 0.0 ? 0 : 1;
        } else {
          continue;
        }
        QAItem item = base_item(scene, SpatialCategory::RelativeDirection);
        item.question = "If I am standing by the " + objs[a]->label + " and facing the " + objs[b]->label +
                        ", is the " + objs[c]->label + " to my left, right, front, or back?";
        item.subjects = {objs[a]->label, objs[b]->label, objs[c]->label};
        set_choice(item, kDirections, answer);
        items.push_back(std::move(item));
      }
    }
  }
  return items;
}

// --- units ---------------------------------------------------------------------

struct UnitInfo {
  std::string_view name;
  int dimension;  // 1 length, 2 area
  Rational in_base;
  std::string_view phrase;
};

const std::vector<UnitInfo>& unit_table() {
  static const std::vector<UnitInfo> table = {
      {"m", 1, Rational(1), "meters"},
      {"cm", 1, Rational(1, 100), "centimeters"},
      {"m2", 2, Rational(1), "square meters"},
      {"cm2", 2, Rational(1, 10000), "square centimeters"},
  };
  return table;
}

const UnitInfo* find_unit(std::string_view name) {
  for (const auto& u : unit_table()) {
    if (u.name == name) return &u;
  }
  return nullptr;
}

}  // namespace

// --- public: geometry, names ------------------------------------------------------

double polygon_signed_area(std::span<const Vec2> polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& p = polygon[i];
    const Vec2& q = polygon[(i + 1) % polygon.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return twice / 2.0;
}

bool polygon_is_simple(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0) - (v < 0);
  };
  auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
  };
  auto intersects = [&](const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2), o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2)) ||
           (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (intersects(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return std::abs(polygon_signed_area(polygon)) > 0.0;
}

std::optional<std::string> validate(const SceneAnnotation& scene) {
  for (const auto& o : scene.objects) {
    if (!(o.box.size.x > 0.0 && o.box.size.y > 0.0 && o.box.size.z > 0.0)) {
      return "object '" + o.object_id + "' has a non-positive box size";
    }
  }
  const Vec3& f = scene.camera.forward;
  if (std::abs(std::sqrt(f.x * f.x + f.y * f.y + f.z * f.z) - 1.0) > 1e-6) {
    return std::string("camera forward is not a unit vector");
  }
  if (scene.floor_polygon && !polygon_is_simple(*scene.floor_polygon)) {
    return std::string("floor polygon is not simple");
  }
  return std::nullopt;
}

std::optional<std::string> validate(const VideoAnnotation& video) {
  for (std::size_t i = 1; i < video.frames.size(); ++i) {
    if (video.frames[i].frame_index <= video.frames[i - 1].frame_index) {
      return "frame indices not strictly increasing at position " + std::to_string(i);
    }
  }
  for (const auto& frame : video.frames) {
    for (const auto& d : frame.detections) {
      if (d.pixel_area < 0) return "negative pixel area in frame " + std::to_string(frame.frame_index);
    }
  }
  return std::nullopt;
}

std::string_view to_string(SpatialCategory category) {
  return kCategoryNames[static_cast<int>(category)];
}

std::optional<SpatialCategory> spatial_category_from_string(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kCategoryNames); ++i) {
    if (kCategoryNames[i] == name) return static_cast<SpatialCategory>(i);
  }
  return std::nullopt;
}

bool is_video_category(SpatialCategory category) {
  return category == SpatialCategory::RoomSize || category == SpatialCategory::AppearanceOrder ||
         category == SpatialCategory::RelativeDirection;
}

std::string_view to_string(QuestionFormat format) {
  switch (format) {
    case QuestionFormat::MultipleChoice: return "multiple_choice";
    case QuestionFormat::FillInBlank: return "fill_in_blank";
    case QuestionFormat::TrueFalse: return "true_false";
  }
  return "multiple_choice";
}

std::optional<QuestionFormat> question_format_from_string(std::string_view name) {
  for (auto f : {QuestionFormat::MultipleChoice, QuestionFormat::FillInBlank, QuestionFormat::TrueFalse}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::optional<std::string> QAItem::target_content() const {
  if (!has_options() || target.kind != AnswerKind::OptionLetter || target.value.size() != 1) {
    return std::nullopt;
  }
  return target.option_content(target.value[0]);
}

double round_metric(double value) { return std::round(value * 100.0) / 100.0; }

// --- public: generation -------------------------------------------------------------

std::vector<std::pair<std::string, int>> first_appearances(const VideoAnnotation& video,
                                                           long min_pixel_area) {
  std::map<std::string, int> first;
  for (const auto& frame : video.frames) {
    for (const auto& d : frame.detections) {
      if (d.pixel_area < min_pixel_area) continue;
      first.emplace(d.label, frame.frame_index);
    }
  }
  std::vector<std::pair<std::string, int>> out(first.begin(), first.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

std::vector<QAItem> gen_image_qa(const SceneAnnotation& scene, SpatialCategory category,
                                 const SynthConfig& config) {
  Rng rng = category_rng(config, scene.scene_id, category);
  std::vector<QAItem> items;
  switch (category) {
    case SpatialCategory::ObjectCount: items = object_count(scene, config, rng); break;
    case SpatialCategory::SpatialRelation: items = spatial_relation(scene, config); break;
    case SpatialCategory::RelativeSize: items = relative_size(scene, config, rng); break;
    case SpatialCategory::AbsoluteSize: items = absolute_size(scene, config); break;
    case SpatialCategory::AbsoluteDistance: items = absolute_distance(scene, config); break;
    case SpatialCategory::RelativeDistance: items = relative_distance(scene, config, rng); break;
    case SpatialCategory::RelativeDepth: items = relative_depth(scene, config, rng); break;
    default:
      throw PreconditionError(std::string(to_string(category)) + " is not an image category");
  }
  return finish(std::move(items), scene, category, config, rng);
}

std::vector<QAItem> gen_video_qa(const VideoAnnotation& video, const SceneAnnotation& scene,
                                 SpatialCategory category, const SynthConfig& config) {
  Rng rng = category_rng(config, scene.scene_id + "/" + video.video_id, category);
  std::vector<QAItem> items;
  switch (category) {
    case SpatialCategory::RoomSize: items = room_size(scene); break;
    case SpatialCategory::AppearanceOrder: items = appearance_order(video, scene, config, rng); break;
    case SpatialCategory::RelativeDirection: items = relative_direction(video, scene, config); break;
    default:
      throw PreconditionError(std::string(to_string(category)) + " is not a video category");
  }
  items = finish(std::move(items), scene, category, config, rng);
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].id = scene.scene_id + "/" + video.video_id + ":" + std::string(to_string(category)) + ":" +
                  std::to_string(i);
  }
  return items;
}

namespace {

std::vector<QAItem> synthesize_one(const SynthJob& job, std::span<const SpatialCategory> categories,
                                   const SynthConfig& config) {
  std::vector<QAItem> out;
  for (auto category : categories) {
    std::vector<QAItem> items;
    if (is_video_category(category)) {
      if (job.video == nullptr) continue;
      items = gen_video_qa(*job.video, *job.scene, category, config);
    } else {
      items = gen_image_qa(*job.scene, category, config);
    }
    std::move(items.begin(), items.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<QAItem> concat(std::vector<std::vector<QAItem>>& parts) {
  std::vector<QAItem> out;
  for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<QAItem> synthesize_serial(std::span<const SynthJob> jobs,
                                      std::span<const SpatialCategory> categories,
                                      const SynthConfig& config) {
  std::vector<std::vector<QAItem>> parts(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) parts[i] = synthesize_one(jobs[i], categories, config);
  return concat(parts);
}

std::vector<QAItem> synthesize_parallel(std::span<const SynthJob> jobs,
                                        std::span<const SpatialCategory> categories,
                                        const SynthConfig& config) {
  std::vector<std::vector<QAItem>> parts(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      parts[i] = synthesize_one(jobs[i], categories, config);
    } catch (...) {
#pragma omp critical(rlvr_synth_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return concat(parts);
}

// --- public: augmentation ----------------------------------------------------------

QAItem to_true_false(const QAItem& item, int probe) {
  if (item.format != QuestionFormat::MultipleChoice || !item.has_options()) {
    throw UnsupportedConversion("true/false rewrite needs a multiple-choice item");
  }
  const auto& options = *item.target.options;
  if (options.size() != 2) {
    throw UnsupportedConversion(std::string(to_string(item.category)) + " is not a binary question");
  }
  if (probe < 0 || probe >= 2) throw PreconditionError("probe must be 0 or 1");
  const std::string asked = options[probe].second;
  const std::string other = options[1 - probe].second;
  const bool yes = item.target_content() == asked;

  QAItem out = item;
  const auto& s = item.subjects;
  switch (item.category) {
    case SpatialCategory::SpatialRelation:
      out.question = "From the camera's viewpoint, is the " + s.at(1) + " to the " + asked + " of the " + s.at(0) + "?";
      break;
    case SpatialCategory::RelativeDistance:
      out.question = "Is the " + asked + " closer to the " + s.at(0) + " than the " + other + "?";
      break;
    case SpatialCategory::RelativeSize:
      out.question = "Is the " + asked + " larger in volume than the " + other + "?";
      break;
    case SpatialCategory::RelativeDepth:
      out.question = "Is the " + asked + " closer to the camera than the " + other + "?";
      break;
    default:
      throw UnsupportedConversion("no true/false rewrite for " + std::string(to_string(item.category)));
  }
  out.id = item.id + "+tf" + std::to_string(probe);
  out.format = QuestionFormat::TrueFalse;
  out.target = GroundTruth{AnswerKind::Text, yes ? "Yes" : "No", std::nullopt, std::nullopt};
  return out;
}

QAItem augment_question_type(const QAItem& item, QuestionFormat mode, std::uint64_t seed) {
  if (item.format != QuestionFormat::MultipleChoice || !item.has_options()) {
    throw UnsupportedConversion("question-type augmentation needs a multiple-choice item");
  }
  switch (mode) {
    case QuestionFormat::MultipleChoice:
      return item;
    case QuestionFormat::TrueFalse: {
      Rng rng(splitmix(seed));
      return to_true_false(item, std::uniform_int_distribution<int>(0, 1)(rng));
    }
    case QuestionFormat::FillInBlank: {
      auto content = item.target_content();
      if (!content) throw UnsupportedConversion("target letter has no option content");
      QAItem out = item;
      out.id = item.id + "+fib";
      out.format = QuestionFormat::FillInBlank;
      out.target.options.reset();
      out.target.unit.reset();
      out.target.value = *content;
      out.target.kind = parse_number(*content) ? AnswerKind::Numeric : AnswerKind::Text;
      return out;
    }
  }
  throw UnsupportedConversion("unknown question format");
}

QAItem augment_instruction(const QAItem& item, std::string_view unit) {
  if (item.target.kind != AnswerKind::Numeric || !item.target.unit) {
    throw UnsupportedConversion("instruction augmentation needs a numeric target with a unit");
  }
  const UnitInfo* from = find_unit(*item.target.unit);
  const UnitInfo* to = find_unit(unit);
  if (to == nullptr) throw UnknownUnit("unknown unit '" + std::string(unit) + "'");
  if (from == nullptr) throw UnknownUnit("item carries unknown unit '" + *item.target.unit + "'");
  if (from->dimension != to->dimension) {
    throw UnknownUnit("unit '" + std::string(unit) + "' does not measure the same quantity as '" +
                      *item.target.unit + "'");
  }
  Rational value;
  if (auto exact = parse_decimal(item.target.value)) {
    value = *exact;
  } else if (auto approx = parse_number(item.target.value)) {
    value = Rational(*approx);
  } else {
    throw UnsupportedConversion("target value '" + item.target.value + "' is not a number");
  }

  QAItem out = item;
  out.target.value = to_decimal_string(value * from->in_base / to->in_base);
  out.target.unit = std::string(to->name);
  if (auto cut = out.question.find(kUnitSuffix); cut != std::string::npos) out.question.resize(cut);
  out.question += std::string(kUnitSuffix) + std::string(to->phrase) + ".";
  out.id = item.id + "+" + std::string(to->name);
  return out;
}

QAItem augment_distribution(const QAItem& item, int offset) {
  if (!item.has_options() || item.target.kind != AnswerKind::OptionLetter) {
    throw UnsupportedConversion("distribution augmentation needs options");
  }
  const auto& options = *item.target.options;
  const int n = static_cast<int>(options.size());
  if (offset < 0 || offset >= n) {
    throw PreconditionError("offset " + std::to_string(offset) + " outside [0, " + std::to_string(n) + ")");
  }
  int target = -1;
  for (int i = 0; i < n; ++i) {
    if (options[i].first == item.target.value[0]) target = i;
  }
  if (target < 0) throw PreconditionError("target letter not among the options");

  OptionList rotated(options.size());
  for (int i = 0; i < n; ++i) {
    rotated[(i + offset) % n] = {letter((i + offset) % n), options[i].second};
  }
  QAItem out = item;
  out.target.options = std::move(rotated);
  out.target.value = std::string(1, letter((target + offset) % n));
  if (offset != 0) out.id = item.id + "+rot" + std::to_string(offset);
  return out;
}

// --- public: assessment -------------------------------------------------------------

std::string render_question(const QAItem& item) {
  std::string out = item.question;
  switch (item.format) {
    case QuestionFormat::MultipleChoice:
      if (item.has_options()) {
        out += "\nOptions:";
        for (const auto& [l, content] : *item.target.options) out += "\n" + std::string(1, l) + ". " + content;
      }
      out += "\nAnswer with the option's letter from the given choices directly.";
      break;
    case QuestionFormat::FillInBlank:
      out += "\nPlease answer the question using a single word or phrase.";
      break;
    case QuestionFormat::TrueFalse:
      out += "\nAnswer Yes or No.";
      break;
  }
  return out;
}

std::string validation_prompt(const QAItem& item) {
  std::string choices = "N/A";
  std::string answer = item.target.value;
  if (item.has_options()) {
    std::vector<std::string> parts;
    for (const auto& [l, content] : *item.target.options) parts.push_back(std::string(1, l) + ". " + content);
    choices = join(parts, "; ");
    if (auto content = item.target_content()) answer = item.target.value + ". " + *content;
  } else if (item.target.unit) {
    answer += " " + *item.target.unit;
  }
  return prompts::fill(prompts::kSpatialValidationPrompt,
                       {{"QUESTION", item.question}, {"ANSWER_CHOICES", choices}, {"CORRECT_ANSWER", answer}});
}

QualityLabels parse_assessment(std::string_view reply) {
  std::vector<std::string> candidates;
  if (auto boxed = last_boxed(reply)) candidates.push_back(*boxed);
  auto open = reply.find('{');
  auto close = reply.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    candidates.emplace_back(reply.substr(open, close - open + 1));
  }
  for (const auto& text : candidates) {
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    QualityLabels labels;
    auto read = [&](const char* key, int& dst) {
      if (!j.contains(key) || !j[key].is_number_integer()) {
        throw MalformedJudgeOutput(std::string("judge JSON lacks integer label '") + key + "'");
      }
      dst = j[key].get<int>();
      if (dst != 0 && dst != 1) throw MalformedJudgeOutput(std::string("label '") + key + "' is not 0 or 1");
    };
    read("ObjectS", labels.object_s);
    read("AnswerS", labels.answer_s);
    read("OptionS", labels.option_s);
    return labels;
  }
  throw MalformedJudgeOutput("judge reply contains no JSON object");
}

QAItem assess_item(const QAItem& item, QAJudge& judge, int n_trials) {
  if (n_trials < 1) throw PreconditionError("n_trials must be at least 1");
  const std::string header =
      item.format == QuestionFormat::MultipleChoice
          ? "According to the following question, please first conduct step by step reasoning, then answer the "
            "question and put the correct option letter, e.g., A, B, C, D, within \\boxed{}."
          : "According to the following question, please first conduct step by step reasoning, then answer the "
            "question and put the final answer within \\boxed{}.";
  const std::string prompt = header + "\n\n" + render_question(item);
  int correct = 0;
  for (int t = 0; t < n_trials; ++t) {
    std::string reply;
    try {
      reply = judge.answer(item, prompt);
    } catch (const std::exception& e) {
      throw JudgeFailure("judge failed answering '" + item.id + "': " + e.what());
    }
    auto boxed = last_boxed(reply);
    if (verify_candidate(boxed ? *boxed : reply, item.target)) ++correct;
  }
  std::string reply;
  try {
    reply = judge.assess(item, validation_prompt(item));
  } catch (const std::exception& e) {
    throw JudgeFailure("judge failed assessing '" + item.id + "': " + e.what());
  }
  QualityLabels labels = parse_assessment(reply);
  labels.difficulty = 1.0 - static_cast<double>(correct) / static_cast<double>(n_trials);
  QAItem out = item;
  out.quality = labels;
  return out;
}

std::vector<QAItem> assess_items(const std::vector<QAItem>& items, QAJudge& judge, int n_trials,
                                 int max_in_flight) {
  std::vector<QAItem> out(items.size());
  if (max_in_flight <= 1 || items.size() <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = assess_item(items[i], judge, n_trials);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        out[i] = assess_item(items[i], judge, n_trials);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = items.size();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), items.size());
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace rlvr
