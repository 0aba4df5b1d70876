#pragma once

#include <optional>
#include <span>

#include "fgalgebra/core_model.hpp"

namespace fga {

// Four support-disjoint flame graphs with
//   diff(f2, f1) = (appeared + grown) - (disappeared + shrunk).
// Every part holds magnitudes; the sign is implied by the field.
struct DeltaDecomposition {
  FlameGraph appeared;     // in f2 only
  FlameGraph grown;        // in both, f2 > f1
  FlameGraph disappeared;  // in f1 only
  FlameGraph shrunk;       // in both, f2 < f1

  DeltaGraph recombine() const;

  friend bool operator==(const DeltaDecomposition&, const DeltaDecomposition&) = default;
};

enum class DeltaClass { appeared, grown, disappeared, shrunk };

std::string_view to_string(DeltaClass c) noexcept;
std::optional<DeltaClass> classify(const DeltaDecomposition& d, const Stack& s);

struct SignedSplit {
  FlameGraph plus;
  FlameGraph minus;
};

FlameGraph add(const FlameGraph& f, const FlameGraph& g);
DeltaGraph add(const DeltaGraph& f, const DeltaGraph& g);
DeltaGraph subtract(const DeltaGraph& f, const DeltaGraph& g);

// Throws NegativeScale for c < 0 and NonFiniteScale for non-finite c.
FlameGraph scale(const FlameGraph& f, double c);
DeltaGraph scale_signed(const DeltaGraph& d, double c);

DeltaGraph as_delta(const FlameGraph& f);

// f2 - f1 over the union of supports; exact zeros are dropped.
DeltaGraph diff(const FlameGraph& f2, const FlameGraph& f1);

SignedSplit split_signed(const DeltaGraph& d);

DeltaDecomposition decompose(const FlameGraph& f2, const FlameGraph& f1);

template <Sign S>
double norm(const BasicGraph<S>& x);

extern template double norm(const FlameGraph&);
extern template double norm(const DeltaGraph&);

double distance(const FlameGraph& f, const FlameGraph& g);

// 1 - |f - g| / (|f| + |g|), with similarity({}, {}) = 1.
double similarity(const FlameGraph& f, const FlameGraph& g);

// Divides every weight by `by` (a norm, > 0). The result is unitless.
DeltaGraph normalize(const DeltaGraph& d, double by);
DeltaDecomposition normalize(const DeltaDecomposition& d, double by);

// Keeps only the stacks in `keep`, which must be sorted.
template <Sign S>
BasicGraph<S> restrict_to(const BasicGraph<S>& g, std::span<const Stack> keep);

extern template FlameGraph restrict_to(const FlameGraph&, std::span<const Stack>);
extern template DeltaGraph restrict_to(const DeltaGraph&, std::span<const Stack>);

FlameGraph fold_chart(const FlameChart& chart);

}  // namespace fga
