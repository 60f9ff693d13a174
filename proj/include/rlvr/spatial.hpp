#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlvr/verifier.hpp"

namespace rlvr {

// Geometry is in meters, z up.
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};
struct Vec2 {
  double x = 0.0, y = 0.0;
};

struct Box3 {
  Vec3 center;
  Vec3 size;  // full extents, strictly positive
};

struct SceneObject {
  std::string object_id;
  std::string label;
  Box3 box;
};

struct Camera {
  Vec3 position;
  Vec3 forward;  // unit vector
};

struct SceneAnnotation {
  std::string scene_id;
  std::vector<SceneObject> objects;
  Camera camera;
  std::optional<std::vector<Vec2>> floor_polygon;
};

struct Detection {
  std::string object_id;
  std::string label;
  long pixel_area = 0;  // px^2
};

struct Frame {
  int frame_index = 0;
  std::vector<Detection> detections;
};

struct VideoAnnotation {
  std::string video_id;
  std::string scene_id;
  std::vector<Frame> frames;  // strictly increasing frame_index
};

/// Empty when the annotation is valid, otherwise the first violated invariant.
std::optional<std::string> validate(const SceneAnnotation& scene);
std::optional<std::string> validate(const VideoAnnotation& video);

/// Signed shoelace area; positive for counter-clockwise polygons.
double polygon_signed_area(std::span<const Vec2> polygon);
bool polygon_is_simple(std::span<const Vec2> polygon);

enum class SpatialCategory {
  ObjectCount,
  SpatialRelation,
  RelativeSize,
  AbsoluteSize,
  AbsoluteDistance,
  RelativeDistance,
  RelativeDepth,
  RoomSize,
  AppearanceOrder,
  RelativeDirection,
};

inline constexpr SpatialCategory kImageCategories[] = {
    SpatialCategory::ObjectCount,      SpatialCategory::SpatialRelation,
    SpatialCategory::RelativeSize,     SpatialCategory::AbsoluteSize,
    SpatialCategory::AbsoluteDistance, SpatialCategory::RelativeDistance,
    SpatialCategory::RelativeDepth};
inline constexpr SpatialCategory kVideoCategories[] = {
    SpatialCategory::RoomSize, SpatialCategory::AppearanceOrder, SpatialCategory::RelativeDirection};

std::string_view to_string(SpatialCategory category);
std::optional<SpatialCategory> spatial_category_from_string(std::string_view name);
bool is_video_category(SpatialCategory category);

enum class QuestionFormat { MultipleChoice, FillInBlank, TrueFalse };
std::string_view to_string(QuestionFormat format);
std::optional<QuestionFormat> question_format_from_string(std::string_view name);

/// Labels from the model-based quality check.
struct QualityLabels {
  double difficulty = 0.0;
  int object_s = 0;
  int answer_s = 0;
  int option_s = 0;

  /// Items whose answer the judge could not confirm are dropped downstream.
  bool excluded() const { return answer_s != 1; }
};

struct QAItem {
  std::string id;
  std::string scene_id;
  SpatialCategory category = SpatialCategory::ObjectCount;
  QuestionFormat format = QuestionFormat::MultipleChoice;
  std::string question;
  GroundTruth target;                 // target.options holds the candidate options
  std::vector<std::string> subjects;  // labels the question refers to, in template order
  std::optional<QualityLabels> quality;

  bool has_options() const { return target.options.has_value() && !target.options->empty(); }
  /// Content under the target letter of a multiple-choice item.
  std::optional<std::string> target_content() const;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  double tie_ratio = 1.2;             // min ratio between compared quantities
  long min_pixel_area = 400;          // AppearanceOrder detection floor, px^2
  int adjacent_window = 1;            // first appearances this many frames apart or closer clash
  double min_lateral_offset = 0.1;    // SpatialRelation dead zone, m
  std::vector<std::string> planar_labels = {"floor", "ceiling", "wall"};
  int max_items_per_category = 0;     // 0 = no cap
  int appearance_questions = 1;       // AppearanceOrder items per video
};

/// Round-to-centimeter used for every metric answer.
double round_metric(double value);

/// Image categories. Unfillable categories yield an empty list.
std::vector<QAItem> gen_image_qa(const SceneAnnotation& scene, SpatialCategory category,
                                 const SynthConfig& config = {});

/// Video categories. Unfillable categories yield an empty list.
std::vector<QAItem> gen_video_qa(const VideoAnnotation& video, const SceneAnnotation& scene,
                                 SpatialCategory category, const SynthConfig& config = {});

/// First frame index at which each label shows up with at least
/// `min_pixel_area`, sorted by frame then label.
std::vector<std::pair<std::string, int>> first_appearances(const VideoAnnotation& video,
                                                           long min_pixel_area);

struct SynthJob {
  const SceneAnnotation* scene = nullptr;
  const VideoAnnotation* video = nullptr;  // optional; required for video categories
};

/// All requested categories over many scenes. The parallel form runs one
/// scene per OpenMP iteration and concatenates in job order, matching the
/// serial reference exactly.
std::vector<QAItem> synthesize_serial(std::span<const SynthJob> jobs,
                                      std::span<const SpatialCategory> categories,
                                      const SynthConfig& config = {});
std::vector<QAItem> synthesize_parallel(std::span<const SynthJob> jobs,
                                        std::span<const SpatialCategory> categories,
                                        const SynthConfig& config = {});

// --- augmentation -----------------------------------------------------------

/// Multiple-choice item to fill-in-the-blank or true/false. Throws
/// UnsupportedConversion when the item is not multiple choice or the category
/// has no sound rewrite. The seed picks which option a true/false question probes.
QAItem augment_question_type(const QAItem& item, QuestionFormat mode, std::uint64_t seed);

/// True/false rewrite probing option `probe` (0-based): "Is ... <option> ...?"
/// answered "Yes" iff that option is the target.
QAItem to_true_false(const QAItem& item, int probe);

/// Appends a unit requirement and converts the numeric target exactly.
/// Units: m, cm, m2, cm2. Throws UnknownUnit for other or dimension-mismatched
/// units and UnsupportedConversion for non-numeric or unitless targets.
QAItem augment_instruction(const QAItem& item, std::string_view unit);

/// Rotates option contents by `offset` positions; letters stay in order and
/// the target letter follows its content. Requires 0 <= offset < option count.
QAItem augment_distribution(const QAItem& item, int offset);

// --- quality assessment -----------------------------------------------------

/// Model used for difficulty trials and the comprehensive assessment.
class QAJudge {
 public:
  virtual ~QAJudge() = default;
  /// Free-form answer to the rendered question; the last \boxed{} is graded.
  virtual std::string answer(const QAItem& item, const std::string& prompt) = 0;
  /// Reply to the validation prompt; must contain the JSON labels.
  virtual std::string assess(const QAItem& item, const std::string& prompt) = 0;
};

/// Question text plus options and the answering instruction, as shown to a model.
std::string render_question(const QAItem& item);

/// The validation prompt with the item substituted into its slots.
std::string validation_prompt(const QAItem& item);

/// Parses ObjectS/AnswerS/OptionS (each 0 or 1) from a judge reply. Throws
/// MalformedJudgeOutput.
QualityLabels parse_assessment(std::string_view reply);

/// Difficulty = 1 - correct/n_trials plus the three labels. Throws
/// JudgeFailure when the judge throws, MalformedJudgeOutput on bad labels.
QAItem assess_item(const QAItem& item, QAJudge& judge, int n_trials);

/// assess_item over many items with at most `max_in_flight` concurrent judge calls.
/// The judge must be thread-safe when max_in_flight > 1.
std::vector<QAItem> assess_items(const std::vector<QAItem>& items, QAJudge& judge, int n_trials,
                                 int max_in_flight);

}  // namespace rlvr
