#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlvr/math_expr.hpp"

namespace rlvr {

/// A completion split into its think block, answer block and last boxed payload.
/// Malformed completions carry empty fields.
struct ParsedResponse {
  std::string think_text;
  std::string answer_text;
  std::optional<std::string> boxed_payload;
  bool well_formed = false;

  /// The string answer-matching looks at: the boxed payload when present,
  /// otherwise the whole answer block.
  const std::string& candidate() const { return boxed_payload ? *boxed_payload : answer_text; }
};

enum class AnswerKind { OptionLetter, Numeric, Text, MathExpr };

std::string_view to_string(AnswerKind kind);
std::optional<AnswerKind> answer_kind_from_string(std::string_view name);

using OptionList = std::vector<std::pair<char, std::string>>;

struct GroundTruth {
  AnswerKind kind = AnswerKind::Text;
  std::string value;
  std::optional<std::string> unit;
  std::optional<OptionList> options;

  /// Content of option `letter`, if options are present and contain it.
  std::optional<std::string> option_content(char letter) const;
};

/// Checks the kind-specific invariants (single A..Z letter, finite numeric value).
bool is_valid(const GroundTruth& gt);

/// Total: never throws. A completion is well formed when it is exactly one
/// closed <think> block followed by exactly one closed <answer> block, with
/// only whitespace around and between them.
ParsedResponse parse_response(std::string_view text);

/// Content of the last \boxed{...} in `text`, honouring nested braces.
std::optional<std::string> last_boxed(std::string_view text);

/// Lowercase, strip ASCII punctuation, collapse whitespace runs, trim.
std::string normalize_text(std::string_view s);

/// Decimal / integer / simple-fraction number, optionally signed. Surrounding
/// whitespace and a trailing period are tolerated; anything else fails.
std::optional<double> parse_number(std::string_view s);

/// Indicator of a match under the kind of `gt`. Assumes
/// `parsed.well_formed`; never throws.
bool verify(const ParsedResponse& parsed, const GroundTruth& gt);

/// Matching of a bare candidate string; `verify` forwards `parsed.candidate()`.
bool verify_candidate(std::string_view candidate, const GroundTruth& gt);

}  // namespace rlvr
