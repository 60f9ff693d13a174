#include "rlvr/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "rlvr/error.hpp"

namespace rlvr {
namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";
constexpr std::string_view kBoxed = "\\boxed{";

constexpr double kNumericRelTol = 1e-9;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool all_space(std::string_view s) { return std::all_of(s.begin(), s.end(), is_space); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::size_t count_of(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

bool is_option_separator(char c) {
  return c == '(' || c == ')' || c == '.' || c == ':' || is_space(c);
}

std::string_view strip_option_separators(std::string_view s) {
  while (!s.empty() && is_option_separator(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_option_separator(s.back())) s.remove_suffix(1);
  return s;
}

char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

bool match_option_letter(std::string_view candidate, const GroundTruth& gt) {
  if (gt.value.size() != 1) return false;
  const char target = upper(gt.value[0]);
  std::string_view s = strip_option_separators(candidate);
  if (s.empty() || !is_alpha(s[0])) return false;
  if (s.size() == 1) return upper(s[0]) == target;

  // "(B) table" style: a letter, then separators, then the option's content.
  if (is_alpha(s[1]) || upper(s[0]) != target) return false;
  std::string_view rest = s.substr(1);
  while (!rest.empty() && is_option_separator(rest.front())) rest.remove_prefix(1);
  auto content = gt.option_content(target);
  if (!content) return false;
  return normalize_text(rest) == normalize_text(*content);
}

bool match_numeric(std::string_view candidate, const GroundTruth& gt) {
  auto x = parse_number(candidate);
  auto ref = parse_number(gt.value);
  if (!x || !ref) return false;
  double scale = std::max(std::abs(*x), std::abs(*ref));
  return std::abs(*x - *ref) <= kNumericRelTol * scale;
}

bool match_math(std::string_view candidate, const GroundTruth& gt) {
  try {
    return expr_equivalent(parse_math_expr(candidate), parse_math_expr(gt.value));
  } catch (const ParseError&) {
    return false;
  }
}

}  // namespace

std::string_view to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::OptionLetter: return "OptionLetter";
    case AnswerKind::Numeric: return "Numeric";
    case AnswerKind::Text: return "Text";
    case AnswerKind::MathExpr: return "MathExpr";
  }
  return "Text";
}

std::optional<AnswerKind> answer_kind_from_string(std::string_view name) {
  for (auto kind : {AnswerKind::OptionLetter, AnswerKind::Numeric, AnswerKind::Text,
                    AnswerKind::MathExpr}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<std::string> GroundTruth::option_content(char letter) const {
  if (!options) return std::nullopt;
  for (const auto& [l, content] : *options) {
    if (upper(l) == upper(letter)) return content;
  }
  return std::nullopt;
}

bool is_valid(const GroundTruth& gt) {
  switch (gt.kind) {
    case AnswerKind::OptionLetter:
      return gt.value.size() == 1 && gt.value[0] >= 'A' && gt.value[0] <= 'Z';
    case AnswerKind::Numeric:
      return parse_number(gt.value).has_value();
    case AnswerKind::MathExpr:
      try {
        parse_math_expr(gt.value);
        return true;
      } catch (const ParseError&) {
        return false;
      }
    case AnswerKind::Text:
      return true;
  }
  return false;
}

std::optional<std::string> last_boxed(std::string_view text) {
  auto start = text.rfind(kBoxed);
  while (start != std::string_view::npos) {
    std::size_t pos = start + kBoxed.size();
    int depth = 1;
    std::size_t i = pos;
    for (; i < text.size(); ++i) {
      if (text[i] == '{') {
        ++depth;
      } else if (text[i] == '}' && --depth == 0) {
        break;
      }
    }
    if (depth == 0) return std::string(text.substr(pos, i - pos));
    // Unclosed marker: fall back to an earlier, closed one.
    if (start == 0) break;
    start = text.rfind(kBoxed, start - 1);
  }
  return std::nullopt;
}

ParsedResponse parse_response(std::string_view text) {
  ParsedResponse out;
  if (count_of(text, kThinkOpen) != 1 || count_of(text, kThinkClose) != 1 ||
      count_of(text, kAnswerOpen) != 1 || count_of(text, kAnswerClose) != 1) {
    return out;
  }
  const auto t_open = text.find(kThinkOpen);
  const auto t_close = text.find(kThinkClose);
  const auto a_open = text.find(kAnswerOpen);
  const auto a_close = text.find(kAnswerClose);
  if (!(t_open < t_close && t_close < a_open && a_open < a_close)) return out;
  if (!all_space(text.substr(0, t_open)) ||
      !all_space(text.substr(t_close + kThinkClose.size(),
                             a_open - t_close - kThinkClose.size())) ||
      !all_space(text.substr(a_close + kAnswerClose.size()))) {
    return out;
  }
  const auto think_begin = t_open + kThinkOpen.size();
  const auto answer_begin = a_open + kAnswerOpen.size();
  out.think_text = std::string(text.substr(think_begin, t_close - think_begin));
  out.answer_text = std::string(text.substr(answer_begin, a_close - answer_begin));
  out.boxed_payload = last_boxed(out.answer_text);
  out.well_formed = true;
  return out;
}

std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    auto uc = static_cast<unsigned char>(c);
    if (std::ispunct(uc)) continue;
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (auto exact = parse_rational_literal(s)) {
    double v = to_double(*exact);
    if (std::isfinite(v)) return v;
    return std::nullopt;
  }
  // Scientific notation ("1.5e3") is accepted through the floating-point path.
  std::string_view body = s.front() == '+' ? s.substr(1) : s;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool verify_candidate(std::string_view candidate, const GroundTruth& gt) {
  switch (gt.kind) {
    case AnswerKind::OptionLetter: return match_option_letter(candidate, gt);
    case AnswerKind::Numeric: return match_numeric(candidate, gt);
    case AnswerKind::Text: return normalize_text(candidate) == normalize_text(gt.value);
    case AnswerKind::MathExpr: return match_math(candidate, gt);
  }
  return false;
}

bool verify(const ParsedResponse& parsed, const GroundTruth& gt) {
  return verify_candidate(parsed.candidate(), gt);
}

}  // namespace rlvr
