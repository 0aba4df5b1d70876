#pragma once

// Collapsed ("folded") stack text format:
//
//   frame;frame;...;frame<whitespace>value\n
//
// The value is the token after the last whitespace run on the line, so frame
// labels may contain spaces. Canonical emission writes one line per stack,
// sorted byte-wise by stack, a single space and the shortest decimal that
// round-trips the weight.

#include <filesystem>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "fgalgebra/core_model.hpp"
#include "fgalgebra/sample_set.hpp"

namespace fga {

// Maps raw frame labels onto the labels used for stack identity. All rules
// are idempotent.
class FrameNormalizer {
 public:
  enum class Rule { identity, strip_trailing_location, regex_replace };

  FrameNormalizer() = default;

  static FrameNormalizer identity() { return {}; }
  // Removes trailing ":<digits>" groups, e.g. "main.py:run:42" -> "main.py:run".
  static FrameNormalizer strip_trailing_location();
  // Applies the substitution until the label stops changing. Throws
  // InvalidConfig on a bad pattern.
  static FrameNormalizer regex_replace(std::string pattern, std::string replacement);

  Rule rule() const noexcept { return rule_; }
  std::string apply(std::string_view label) const;

 private:
  Rule rule_ = Rule::identity;
  std::shared_ptr<const std::regex> regex_;
  std::string replacement_;
};

struct ParseOptions {
  FrameNormalizer normalizer;
  Unit unit = Unit::samples;
  std::size_t max_depth = kDefaultMaxDepth;
  // Used in error messages.
  std::string source_name;
};

struct FoldedLine {
  Stack stack;
  double value;
};

// Lines as they appear in the input, after frame normalization, before
// duplicate summing. Zero-valued lines are kept.
struct FoldedDocument {
  std::vector<FoldedLine> lines;
  std::string source_name;
};

FoldedDocument read_folded_document(std::string_view text, const ParseOptions& options = {});

// Throws ParseError(MalformedLine) on a bad line and ParseError(NegativeValue)
// for negative weights.
FlameGraph parse_folded(std::string_view text, const ParseOptions& options = {});
DeltaGraph parse_folded_signed(std::string_view text, const ParseOptions& options = {});

std::string format_value(double value);

template <Sign S>
std::string emit_folded(const BasicGraph<S>& g);

extern template std::string emit_folded(const FlameGraph&);
extern template std::string emit_folded(const DeltaGraph&);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

FlameGraph load_folded_file(const std::filesystem::path& path, const ParseOptions& options = {});

// One run per regular file (dot-files ignored), ordered by file name.
// Throws EmptySample for a directory without runs.
SampleSet load_sample_dir(const std::filesystem::path& dir, const ParseOptions& options = {});

// Chart text: one event per line, "timestamp<TAB>stack<SP>value", with
// non-decreasing timestamps.
FlameChart parse_chart(std::string_view text, const ParseOptions& options = {});

}  // namespace fga
