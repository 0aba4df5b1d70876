#include "fgalgebra/core_model.hpp"
#include "fgalgebra/sample_set.hpp"

#include <algorithm>
#include <cmath>

namespace fga {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidFrame: return "InvalidFrame";
    case ErrorCode::InvalidStack: return "InvalidStack";
    case ErrorCode::NonFiniteWeight: return "NonFiniteWeight";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::UnitMismatch: return "UnitMismatch";
    case ErrorCode::NegativeScale: return "NegativeScale";
    case ErrorCode::NonFiniteScale: return "NonFiniteScale";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::OutOfOrderTimestamp: return "OutOfOrderTimestamp";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::EmptyBasis: return "EmptyBasis";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateDof: return "DegenerateDof";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Error";
}

std::string_view to_string(Unit unit) noexcept {
  switch (unit) {
    case Unit::samples: return "samples";
    case Unit::microseconds: return "us";
    case Unit::milliseconds: return "ms";
    case Unit::unitless: return "unitless";
  }
  return "samples";
}

std::optional<Unit> parse_unit(std::string_view text) noexcept {
  if (text == "samples") return Unit::samples;
  if (text == "us" || text == "microseconds") return Unit::microseconds;
  if (text == "ms" || text == "milliseconds") return Unit::milliseconds;
  if (text == "unitless") return Unit::unitless;
  return std::nullopt;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\v' || c == '\f' || c == '\r'; }

}  // namespace

// ---------------------------------------------------------------------------
// Frame / Stack

std::optional<std::string> Frame::check(std::string_view label) {
  if (label.empty()) return "empty frame label";
  if (label.find(kFrameSeparator) != std::string_view::npos) return "frame label contains ';'";
  if (label.find('\n') != std::string_view::npos) return "frame label contains a newline";
  if (is_space(label.front()) || is_space(label.back())) return "frame label has surrounding whitespace";
  return std::nullopt;
}

Frame::Frame(std::string label) : label_(std::move(label)) {
  if (auto why = check(label_)) throw Error(ErrorCode::InvalidFrame, *why + " in '" + label_ + "'");
}

Stack::Stack(std::span<const Frame> frames, std::size_t max_depth) {
  if (frames.empty()) throw Error(ErrorCode::InvalidStack, "stack has no frames");
  if (frames.size() > max_depth) {
    throw Error(ErrorCode::InvalidStack,
                "stack depth " + std::to_string(frames.size()) + " exceeds " + std::to_string(max_depth));
  }
  for (const Frame& f : frames) {
    if (!joined_.empty()) joined_ += kFrameSeparator;
    joined_ += f.label();
  }
}

Stack Stack::parse(std::string_view joined, std::size_t max_depth) {
  std::size_t depth = 0;
  std::size_t start = 0;
  while (true) {
    std::size_t end = joined.find(kFrameSeparator, start);
    std::string_view label = joined.substr(start, end == std::string_view::npos ? end : end - start);
    if (auto why = Frame::check(label)) {
      throw Error(ErrorCode::InvalidStack, *why + " in stack '" + std::string(joined) + "'");
    }
    ++depth;
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (depth > max_depth) {
    throw Error(ErrorCode::InvalidStack,
                "stack depth " + std::to_string(depth) + " exceeds " + std::to_string(max_depth));
  }
  return Stack(Trusted{}, std::string(joined));
}

std::size_t Stack::depth() const noexcept {
  return static_cast<std::size_t>(std::count(joined_.begin(), joined_.end(), kFrameSeparator)) + 1;
}

std::vector<std::string_view> Stack::frames() const {
  std::vector<std::string_view> out;
  std::string_view rest = joined_;
  while (true) {
    std::size_t end = rest.find(kFrameSeparator);
    out.push_back(rest.substr(0, end));
    if (end == std::string_view::npos) break;
    rest.remove_prefix(end + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// BasicGraph

template <Sign S>
void BasicGraph<S>::check_value(const Stack& s, double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteWeight, "non-finite weight for '" + s.str() + "'");
  if constexpr (S == Sign::positive) {
    if (v < 0.0) throw Error(ErrorCode::NegativeValue, "negative weight for '" + s.str() + "'");
  }
}

template <Sign S>
BasicGraph<S> BasicGraph<S>::from_entries(std::vector<Entry> entries, Unit unit) {
  for (const auto& [s, v] : entries) check_value(s, v);
  std::sort(entries.begin(), entries.end());

  BasicGraph g(unit);
  g.stacks_.reserve(entries.size());
  g.values_.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    double total = 0.0;
    for (; j < entries.size() && entries[j].first == entries[i].first; ++j) total += entries[j].second;
    if (!std::isfinite(total)) {
      throw Error(ErrorCode::NonFiniteWeight, "weight overflow for '" + entries[i].first.str() + "'");
    }
    if (total != 0.0) {
      g.stacks_.push_back(std::move(entries[i].first));
      g.values_.push_back(total);
    }
    i = j;
  }
  return g;
}

template <Sign S>
BasicGraph<S> BasicGraph<S>::from_canonical(std::vector<Stack> stacks, std::vector<double> values, Unit unit) {
  if (stacks.size() != values.size()) throw Error(ErrorCode::DomainError, "stack/value length mismatch");
  for (std::size_t i = 0; i < stacks.size(); ++i) {
    check_value(stacks[i], values[i]);
    if (values[i] == 0.0) throw Error(ErrorCode::DomainError, "zero weight stored for '" + stacks[i].str() + "'");
    if (i > 0 && !(stacks[i - 1] < stacks[i])) {
      throw Error(ErrorCode::DomainError, "stacks not strictly sorted at '" + stacks[i].str() + "'");
    }
  }
  BasicGraph g(unit);
  g.stacks_ = std::move(stacks);
  g.values_ = std::move(values);
  return g;
}

template <Sign S>
double BasicGraph<S>::at(const Stack& s) const noexcept {
  auto it = std::lower_bound(stacks_.begin(), stacks_.end(), s);
  if (it == stacks_.end() || *it != s) return 0.0;
  return values_[static_cast<std::size_t>(it - stacks_.begin())];
}

template <Sign S>
bool BasicGraph<S>::contains(const Stack& s) const noexcept {
  return std::binary_search(stacks_.begin(), stacks_.end(), s);
}

template class BasicGraph<Sign::positive>;
template class BasicGraph<Sign::any>;

// ---------------------------------------------------------------------------
// FlameChart

FlameChart::FlameChart(std::vector<ChartEvent> events) : events_(std::move(events)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (!std::isfinite(events_[i].timestamp)) {
      throw Error(ErrorCode::DomainError, "non-finite timestamp at event " + std::to_string(i));
    }
    if (i > 0 && events_[i].timestamp < events_[i - 1].timestamp) {
      throw Error(ErrorCode::OutOfOrderTimestamp, "event " + std::to_string(i) + " precedes event " +
                                                      std::to_string(i - 1));
    }
  }
}

// ---------------------------------------------------------------------------
// SampleSet

SampleSet::SampleSet(std::vector<FlameGraph> runs, Unit unit, std::vector<std::string> names)
    : runs_(std::move(runs)), names_(std::move(names)), unit_(unit) {
  if (runs_.empty()) throw Error(ErrorCode::EmptySample, "sample set has no runs");
  if (!names_.empty() && names_.size() != runs_.size()) {
    throw Error(ErrorCode::DomainError, "run/name count mismatch");
  }
  for (const FlameGraph& g : runs_) {
    if (g.unit() != unit_) {
      throw Error(ErrorCode::UnitMismatch, std::string("run unit ") + std::string(to_string(g.unit())) +
                                               " differs from sample unit " + std::string(to_string(unit_)));
    }
  }
}

// ---------------------------------------------------------------------------
// validate

namespace {

void check_weight(std::vector<Violation>& out, const std::string& stack, double v) {
  if (!std::isfinite(v)) {
    out.push_back({Violation::Kind::non_finite_weight, stack, "non-finite weight"});
  } else if (v == 0.0) {
    out.push_back({Violation::Kind::zero_weight, stack, "zero-weight entry"});
  } else if (v < 0.0) {
    out.push_back({Violation::Kind::negative_weight, stack, "negative weight"});
  }
}

}  // namespace

std::vector<Violation> validate(std::span<const RawEntry> entries, std::size_t max_depth) {
  std::vector<Violation> out;
  for (const RawEntry& e : entries) {
    std::string_view rest = e.stack;
    std::size_t depth = 0;
    while (true) {
      std::size_t end = rest.find(kFrameSeparator);
      if (auto why = Frame::check(rest.substr(0, end))) {
        out.push_back({Violation::Kind::invalid_stack, e.stack, *why});
        break;
      }
      ++depth;
      if (end == std::string_view::npos) break;
      rest.remove_prefix(end + 1);
    }
    if (depth > max_depth) {
      out.push_back({Violation::Kind::over_depth, e.stack,
                     "stack depth " + std::to_string(depth) + " exceeds " + std::to_string(max_depth)});
    }
    check_weight(out, e.stack, e.value);
  }
  return out;
}

std::vector<Violation> validate(const FlameGraph& g, std::size_t max_depth) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Stack& s = g.stacks()[i];
    if (s.depth() > max_depth) {
      out.push_back({Violation::Kind::over_depth, s.str(),
                     "stack depth " + std::to_string(s.depth()) + " exceeds " + std::to_string(max_depth)});
    }
    check_weight(out, s.str(), g.values()[i]);
  }
  return out;
}

}  // namespace fga
