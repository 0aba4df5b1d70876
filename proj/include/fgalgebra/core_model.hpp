#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fgalgebra/error.hpp"

namespace fga {

inline constexpr std::size_t kDefaultMaxDepth = 2048;
inline constexpr char kFrameSeparator = ';';

enum class Unit { samples, microseconds, milliseconds, unitless };

std::string_view to_string(Unit unit) noexcept;
std::optional<Unit> parse_unit(std::string_view text) noexcept;

// An opaque frame label. Non-empty, no ';' or line breaks, no surrounding
// whitespace.
class Frame {
 public:
  explicit Frame(std::string label);

  const std::string& label() const noexcept { return label_; }

  // Reason the label is unacceptable, or nullopt when it is a valid frame.
  static std::optional<std::string> check(std::string_view label);

  friend bool operator==(const Frame&, const Frame&) = default;
  friend auto operator<=>(const Frame&, const Frame&) = default;

 private:
  std::string label_;
};

// A root-first sequence of frames. Stored in its joined "a;b;c" form, which
// makes equality element-wise and ordering byte-lexicographic on the folded
// text (the order `LC_ALL=C sort` would give).
class Stack {
 public:
  explicit Stack(std::span<const Frame> frames, std::size_t max_depth = kDefaultMaxDepth);

  static Stack parse(std::string_view joined, std::size_t max_depth = kDefaultMaxDepth);

  const std::string& str() const noexcept { return joined_; }
  std::size_t depth() const noexcept;
  std::vector<std::string_view> frames() const;

  friend bool operator==(const Stack&, const Stack&) = default;
  friend std::strong_ordering operator<=>(const Stack& a, const Stack& b) noexcept {
    return a.joined_.compare(b.joined_) <=> 0;
  }

 private:
  struct Trusted {};
  Stack(Trusted, std::string joined) : joined_(std::move(joined)) {}

  std::string joined_;
};

enum class Sign { positive, any };

// Finitely supported map Stack -> weight, stored sorted by stack with the
// weights in a contiguous array. Zero weights are never stored, so the key
// set is the support. With Sign::positive every weight is > 0 (a flame
// graph); with Sign::any weights are non-zero reals (a signed delta).
template <Sign S>
class BasicGraph {
 public:
  using Entry = std::pair<Stack, double>;

  BasicGraph() = default;
  explicit BasicGraph(Unit unit) : unit_(unit) {}

  // Sums duplicate stacks and drops zero totals. Duplicates are added in
  // ascending value order so the result does not depend on input order.
  static BasicGraph from_entries(std::vector<Entry> entries, Unit unit = Unit::samples);

  // Builds from parallel arrays already strictly sorted by stack with no
  // zero weights; throws if that does not hold.
  static BasicGraph from_canonical(std::vector<Stack> stacks, std::vector<double> values,
                                   Unit unit = Unit::samples);

  std::span<const Stack> stacks() const noexcept { return stacks_; }
  std::span<const double> values() const noexcept { return values_; }
  Unit unit() const noexcept { return unit_; }
  std::size_t size() const noexcept { return stacks_.size(); }
  bool empty() const noexcept { return stacks_.empty(); }

  // Weight of `s`, 0 when it is outside the support.
  double at(const Stack& s) const noexcept;
  bool contains(const Stack& s) const noexcept;

  BasicGraph with_unit(Unit unit) const {
    BasicGraph copy = *this;
    copy.unit_ = unit;
    return copy;
  }

  friend bool operator==(const BasicGraph&, const BasicGraph&) = default;

 private:
  static void check_value(const Stack& s, double v);

  std::vector<Stack> stacks_;
  std::vector<double> values_;
  Unit unit_ = Unit::samples;
};

using FlameGraph = BasicGraph<Sign::positive>;
using DeltaGraph = BasicGraph<Sign::any>;

extern template class BasicGraph<Sign::positive>;
extern template class BasicGraph<Sign::any>;

template <Sign S>
std::vector<Stack> support(const BasicGraph<S>& g) {
  return {g.stacks().begin(), g.stacks().end()};
}

struct ChartEvent {
  double timestamp = 0.0;
  FlameGraph graph;
};

// Time-ordered sequence of flame graphs; construction rejects any timestamp
// smaller than its predecessor.
class FlameChart {
 public:
  FlameChart() = default;
  explicit FlameChart(std::vector<ChartEvent> events);

  std::span<const ChartEvent> events() const noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }

 private:
  std::vector<ChartEvent> events_;
};

// Unchecked input to `validate`.
struct RawEntry {
  std::string stack;
  double value = 0.0;
};

struct Violation {
  enum class Kind { invalid_stack, over_depth, zero_weight, negative_weight, non_finite_weight };
  Kind kind;
  std::string stack;
  std::string message;
};

std::vector<Violation> validate(std::span<const RawEntry> entries, std::size_t max_depth = kDefaultMaxDepth);
std::vector<Violation> validate(const FlameGraph& g, std::size_t max_depth = kDefaultMaxDepth);

}  // namespace fga

template <>
struct std::hash<fga::Stack> {
  std::size_t operator()(const fga::Stack& s) const noexcept { return std::hash<std::string>{}(s.str()); }
};
