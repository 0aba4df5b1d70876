#include "fgalgebra/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fgalgebra/kernels.hpp"

namespace fga {

namespace {

template <Sign A, Sign B>
void require_same_unit(const BasicGraph<A>& a, const BasicGraph<B>& b) {
  if (a.unit() != b.unit()) {
    throw Error(ErrorCode::UnitMismatch,
                std::string(to_string(a.unit())) + " vs " + std::string(to_string(b.unit())));
  }
}

// Walks the union of both supports in stack order and stores op(a(s), b(s)),
// absent weights read as 0. Exact zeros are dropped.
template <Sign Out, Sign A, Sign B, typename Op>
BasicGraph<Out> merge(const BasicGraph<A>& a, const BasicGraph<B>& b, Op op) {
  require_same_unit(a, b);
  std::vector<Stack> stacks;
  std::vector<double> values;
  stacks.reserve(a.size() + b.size());
  values.reserve(a.size() + b.size());
  auto emit = [&](const Stack& s, double v) {
    if (v != 0.0) {
      stacks.push_back(s);
      values.push_back(v);
    }
  };
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a.stacks()[i] < b.stacks()[j])) {
      emit(a.stacks()[i], op(a.values()[i], 0.0));
      ++i;
    } else if (i == a.size() || b.stacks()[j] < a.stacks()[i]) {
      emit(b.stacks()[j], op(0.0, b.values()[j]));
      ++j;
    } else {
      emit(a.stacks()[i], op(a.values()[i], b.values()[j]));
      ++i;
      ++j;
    }
  }
  return BasicGraph<Out>::from_canonical(std::move(stacks), std::move(values), a.unit());
}

template <Sign Out, Sign In, typename Fn>
BasicGraph<Out> map_values(const BasicGraph<In>& g, Unit unit, Fn fn) {
  std::vector<Stack> stacks;
  std::vector<double> values;
  stacks.reserve(g.size());
  values.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = fn(g.values()[i]);
    if (v != 0.0) {
      stacks.push_back(g.stacks()[i]);
      values.push_back(v);
    }
  }
  return BasicGraph<Out>::from_canonical(std::move(stacks), std::move(values), unit);
}

void check_scale(double c) {
  if (!std::isfinite(c)) throw Error(ErrorCode::NonFiniteScale, "scale factor is not finite");
}

void check_norm(double by) {
  if (!(by > 0.0) || !std::isfinite(by)) {
    throw Error(ErrorCode::ZeroNorm, "cannot normalise by " + std::to_string(by));
  }
}

struct Builder {
  std::vector<Stack> stacks;
  std::vector<double> values;

  void push(const Stack& s, double v) {
    stacks.push_back(s);
    values.push_back(v);
  }
  FlameGraph build(Unit unit) { return FlameGraph::from_canonical(std::move(stacks), std::move(values), unit); }
};

}  // namespace

std::string_view to_string(DeltaClass c) noexcept {
  switch (c) {
    case DeltaClass::appeared: return "appeared";
    case DeltaClass::grown: return "grown";
    case DeltaClass::disappeared: return "disappeared";
    case DeltaClass::shrunk: return "shrunk";
  }
  return "appeared";
}

std::optional<DeltaClass> classify(const DeltaDecomposition& d, const Stack& s) {
  if (d.appeared.contains(s)) return DeltaClass::appeared;
  if (d.grown.contains(s)) return DeltaClass::grown;
  if (d.disappeared.contains(s)) return DeltaClass::disappeared;
  if (d.shrunk.contains(s)) return DeltaClass::shrunk;
  return std::nullopt;
}

DeltaGraph DeltaDecomposition::recombine() const {
  return subtract(add(as_delta(appeared), as_delta(grown)), add(as_delta(disappeared), as_delta(shrunk)));
}

FlameGraph add(const FlameGraph& f, const FlameGraph& g) {
  return merge<Sign::positive>(f, g, [](double a, double b) { return a + b; });
}

DeltaGraph add(const DeltaGraph& f, const DeltaGraph& g) {
  return merge<Sign::any>(f, g, [](double a, double b) { return a + b; });
}

DeltaGraph subtract(const DeltaGraph& f, const DeltaGraph& g) {
  return merge<Sign::any>(f, g, [](double a, double b) { return a - b; });
}

FlameGraph scale(const FlameGraph& f, double c) {
  check_scale(c);
  if (c < 0.0) throw Error(ErrorCode::NegativeScale, "cone scaling needs c >= 0");
  return map_values<Sign::positive>(f, f.unit(), [c](double v) { return v * c; });
}

DeltaGraph scale_signed(const DeltaGraph& d, double c) {
  check_scale(c);
  return map_values<Sign::any>(d, d.unit(), [c](double v) { return v * c; });
}

DeltaGraph as_delta(const FlameGraph& f) {
  return DeltaGraph::from_canonical({f.stacks().begin(), f.stacks().end()}, {f.values().begin(), f.values().end()},
                                    f.unit());
}

DeltaGraph diff(const FlameGraph& f2, const FlameGraph& f1) {
  return merge<Sign::any>(f2, f1, [](double a, double b) { return a - b; });
}

SignedSplit split_signed(const DeltaGraph& d) {
  Builder plus, minus;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double v = d.values()[i];
    if (v > 0.0) plus.push(d.stacks()[i], v);
    else minus.push(d.stacks()[i], -v);
  }
  return {plus.build(d.unit()), minus.build(d.unit())};
}

// Classifies each stack of the union by support membership and the sign of
// f2 - f1, without going through split_signed.
DeltaDecomposition decompose(const FlameGraph& f2, const FlameGraph& f1) {
  require_same_unit(f2, f1);
  Builder appeared, grown, disappeared, shrunk;
  std::size_t i = 0, j = 0;
  while (i < f2.size() || j < f1.size()) {
    if (j == f1.size() || (i < f2.size() && f2.stacks()[i] < f1.stacks()[j])) {
      appeared.push(f2.stacks()[i], f2.values()[i]);
      ++i;
    } else if (i == f2.size() || f1.stacks()[j] < f2.stacks()[i]) {
      disappeared.push(f1.stacks()[j], f1.values()[j]);
      ++j;
    } else {
      double d = f2.values()[i] - f1.values()[j];
      if (d > 0.0) grown.push(f2.stacks()[i], d);
      else if (d < 0.0) shrunk.push(f2.stacks()[i], -d);
      ++i;
      ++j;
    }
  }
  Unit u = f2.unit();
  return {appeared.build(u), grown.build(u), disappeared.build(u), shrunk.build(u)};
}

template <Sign S>
double norm(const BasicGraph<S>& x) {
  return kernels::sum_abs(x.values());
}

template double norm(const FlameGraph&);
template double norm(const DeltaGraph&);

double distance(const FlameGraph& f, const FlameGraph& g) { return norm(diff(f, g)); }

double similarity(const FlameGraph& f, const FlameGraph& g) {
  double d = distance(f, g);
  double total = norm(f) + norm(g);
  if (total == 0.0) return 1.0;
  return std::clamp(1.0 - d / total, 0.0, 1.0);
}

DeltaGraph normalize(const DeltaGraph& d, double by) {
  check_norm(by);
  return map_values<Sign::any>(d, Unit::unitless, [by](double v) { return v / by; });
}

DeltaDecomposition normalize(const DeltaDecomposition& d, double by) {
  check_norm(by);
  auto part = [by](const FlameGraph& g) {
    return map_values<Sign::positive>(g, Unit::unitless, [by](double v) { return v / by; });
  };
  return {part(d.appeared), part(d.grown), part(d.disappeared), part(d.shrunk)};
}

template <Sign S>
BasicGraph<S> restrict_to(const BasicGraph<S>& g, std::span<const Stack> keep) {
  std::vector<Stack> stacks;
  std::vector<double> values;
  std::size_t k = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Stack& s = g.stacks()[i];
    while (k < keep.size() && keep[k] < s) ++k;
    if (k < keep.size() && keep[k] == s) {
      stacks.push_back(s);
      values.push_back(g.values()[i]);
    }
  }
  return BasicGraph<S>::from_canonical(std::move(stacks), std::move(values), g.unit());
}

template FlameGraph restrict_to(const FlameGraph&, std::span<const Stack>);
template DeltaGraph restrict_to(const DeltaGraph&, std::span<const Stack>);

FlameGraph fold_chart(const FlameChart& chart) {
  if (chart.empty()) return FlameGraph{};
  const Unit unit = chart.events().front().graph.unit();
  std::vector<FlameGraph::Entry> entries;
  for (const ChartEvent& e : chart.events()) {
    if (e.graph.unit() != unit) throw Error(ErrorCode::UnitMismatch, "chart events use different units");
    for (std::size_t i = 0; i < e.graph.size(); ++i) entries.emplace_back(e.graph.stacks()[i], e.graph.values()[i]);
  }
  return FlameGraph::from_entries(std::move(entries), unit);
}

}  // namespace fga
