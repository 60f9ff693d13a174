#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rlvr {

// Base for every error raised by the library. `kind()` is a stable identifier
// used in the CLI's machine-readable error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define RLVR_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

// verifier
RLVR_DEFINE_ERROR(ParseError)
// rewards
RLVR_DEFINE_ERROR(DomainError)
// grpo
RLVR_DEFINE_ERROR(GroupTooSmall)
RLVR_DEFINE_ERROR(ScheduleError)
RLVR_DEFINE_ERROR(LengthMismatch)
RLVR_DEFINE_ERROR(SupportMismatch)
RLVR_DEFINE_ERROR(InfiniteKL)
RLVR_DEFINE_ERROR(MixedTaskBatch)
// policy sandbox
RLVR_DEFINE_ERROR(UnknownToken)
RLVR_DEFINE_ERROR(CheckpointError)
// curriculum
RLVR_DEFINE_ERROR(SamplerFailure)
RLVR_DEFINE_ERROR(EmptyTask)
// spatial synthesis
RLVR_DEFINE_ERROR(UnsupportedConversion)
RLVR_DEFINE_ERROR(UnknownUnit)
RLVR_DEFINE_ERROR(JudgeFailure)
RLVR_DEFINE_ERROR(MalformedJudgeOutput)
// curation
RLVR_DEFINE_ERROR(GeneratorFailure)
RLVR_DEFINE_ERROR(UnscoredRecord)
// shared
RLVR_DEFINE_ERROR(PreconditionError)
RLVR_DEFINE_ERROR(IoError)
RLVR_DEFINE_ERROR(ConfigError)

#undef RLVR_DEFINE_ERROR

// Raised by the JSONL loader; carries the 1-based line number of the offending record.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& message)
      : Error("SchemaError", "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rlvr
