#include "rlvr/prompts.hpp"

namespace rlvr::prompts {

const std::string_view kSystemPrompt = R"PROMPT(You are a helpful assistant. When the user asks a question, your response must include two parts: first, the reasoning process enclosed in <think>...</think> tags, then the final answer enclosed in <answer>...</answer> tags. The critical answer or key result should be placed within \boxed{}.
)PROMPT";

const std::string_view kCotQualityScoringPrompt = R"PROMPT(You are given a written mathematical solution. Please rate the quality of its reasoning process on a scale from 1 (lowest) to 5 (highest) based on the following three criteria:

1. Optimal Structural Organization: Is the reasoning process clearly and logically structured? Does it break down complex steps with sufficient detail, while keeping straightforward steps concise? High-quality solutions adapt the level of detail (granularity) to the complexity of each step, ensuring that critical transitions receive appropriate elaboration.

2. Effective Cognitive Scaffolding: Does the solution guide the reader’s understanding by gradually building up concepts and insights? Are key ideas introduced at the right time, and does the explanation bridge conceptual gaps thoughtfully, making the solution easier to follow and learn from?

3. Rigorous Verification: Does the reasoning include frequent verification of intermediate results? Are assumptions explicitly checked, and is logical consistency maintained throughout the solution? A high-quality answer thoroughly validates its correctness at each stage.

Scoring Rubric:
- 5 — Excellent: Exemplary reasoning with adaptive step granularity, strong pedagogical clarity, and thorough verification.
- 4 — Good: Clear and mostly well-paced explanation with minor issues in elaboration or verification.
- 3 — Fair: Reasonable logic but with noticeable issues in structure, clarity, or verification.
- 2 — Poor: Disorganized or incomplete reasoning with major gaps in explanation or checks.
- 1 — Very Poor: Lacks coherent structure, explanation, and verification; difficult to understand or trust.

The given reasoning process is: REASONING

You MUST output your score with one single number.
)PROMPT";

const std::string_view kRlvrDifficultyPrompt = R"PROMPT(### For multiple-choice questions:
According to the following question, please first conduct step by step reasoning, then answer the question and put the correct option letter, e.g., A, B, C, D, within \boxed{}.

### For fill-in-the-blank questions:
According to the following question, please first conduct step by step reasoning, then answer the question and put the final answer within \boxed{}.
)PROMPT";

const std::string_view kSpatialValidationPrompt = R"PROMPT(You are a logic consistency evaluator. Evaluate the Input by the Evaluation Rules and output the final response with Output Format.

### Input:
- Question: QUESTION
- Choice List: ANSWER_CHOICES
- Answer: CORRECT_ANSWER

### Evaluation Rules:
1. Thoroughly analyze the provided image, question, answer, and the choice list before scoring.
2. Evaluate the data quality based on the following three dimensions, providing a score of 1 (Good) or 0 (Bad) for each.
  – ObjectS (Object Score): Assess if the object(s) relevant to the question are clearly visible and identifiable in the image.
    – Score 1 if the objects are clear and unambiguous.
    – Score 0 if the objects are significantly occluded, blurry, overlapping, too small, cut off at the image edge, or otherwise difficult to discern in a way that impedes answering the question.
  – AnswerS (Answer Score): Verify if the provided answer is correct and unambiguous based on the image and the question.
    – Score 1 if the answer is factually correct and logically sound.
    – Score 0 if the answer is ambiguous, factually incorrect, inconsistent with the image, or cannot be confirmed from the provided information.
  – OptionS (Options Score): Examine the quality and validity of the Choice List.
    – Score 1 if all choices are meaningful, distinct, and plausible distractors that don't confuse the question's intent.
    – Score 0 if choices are redundant, highly similar, nonsensical, or clearly irrelevant to the question or image.

### Output Format:
1. Output MUST be valid JSON format which can be loaded by json.loads() and contains the reasoning step.
2. Example:
{
    "Reason_Step": <reasoning step by step>,
    "ObjectS": 1,
    "AnswerS": 1,
    "OptionS": 0
}
3. Please reason step by step, and put your final JSON format output within \boxed{}.
)PROMPT";

std::string fill(std::string_view tmpl,
                 const std::vector<std::pair<std::string_view, std::string>>& slots) {
  std::string out(tmpl);
  for (const auto& [name, value] : slots) {
    for (auto pos = out.find(name); pos != std::string::npos; pos = out.find(name, pos + value.size())) {
      out.replace(pos, name.size(), value);
    }
  }
  return out;
}

}  // namespace rlvr::prompts
