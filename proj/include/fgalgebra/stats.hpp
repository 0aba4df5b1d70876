#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fgalgebra/algebra.hpp"
#include "fgalgebra/core_model.hpp"
#include "fgalgebra/sample_set.hpp"

namespace fga {

// How the G^2 constant is formed.
//   standard:           (n1+n2-p-1) / ((n1+n2-2) p) * n1 n2 / (n1+n2)
//   example_compatible: (n1+n2-p-1) / ((n1+n2-2) p)
// The second form exists to reproduce published worked examples that leave
// out the sample-size factor; reports always state which one was used.
enum class Scaling { standard, example_compatible };

std::string_view to_string(Scaling s) noexcept;
std::optional<Scaling> parse_scaling(std::string_view text) noexcept;

struct HotellingConfig {
  double p_star = 0.01;
  Scaling scaling = Scaling::standard;
  // Relative ridge: Sigma + ridge * mean(diag(Sigma)) * I, used only when the
  // plain Cholesky factorization fails.
  double ridge = 1e-9;
  // Minimum number of runs (over both samples) a stack must appear in to be
  // tested. Defaults to max(2, ceil(min(n1, n2) / 2)).
  std::optional<std::size_t> min_df;
  // Use this critical value instead of the (1 - p_star) quantile.
  std::optional<double> f_star_override;

  // Throws InvalidConfig.
  void validate() const;
};

std::size_t default_min_df(std::size_t n1, std::size_t n2) noexcept;

// Ordered stacks spanning the test space; index k is coordinate k.
struct StackBasis {
  std::vector<Stack> stacks;

  std::size_t size() const noexcept { return stacks.size(); }
  friend bool operator==(const StackBasis&, const StackBasis&) = default;
};

// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static Matrix diagonal(std::span<const double> diag);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * n_, n_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }
  std::vector<double> diag() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct PooledStats {
  StackBasis basis;
  std::vector<double> mean1;
  std::vector<double> mean2;
  std::vector<double> delta;  // mean2 - mean1
  Matrix pooled_cov;
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  // Assembles from known moments (delta is derived). Throws DomainError on
  // shape mismatch.
  static PooledStats from_moments(StackBasis basis, std::vector<double> mean1, std::vector<double> mean2,
                                  Matrix pooled_cov, std::size_t n1, std::size_t n2);
};

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double x) const noexcept { return low <= x && x <= high; }
};

struct HotellingResult {
  double statistic_f = 0.0;
  double p_value = 1.0;
  double critical_f_star = 0.0;
  double g_squared = 0.0;
  std::size_t dof1 = 0;
  std::size_t dof2 = 0;
  bool ridge_applied = false;
};

// Per-stack arithmetic mean over all runs; a stack absent from a run counts
// as 0 for that run.
FlameGraph mean_graph(const SampleSet& s);

// Document-frequency reduction of the union of stacks seen in both samples.
// Throws EmptyBasis when nothing survives.
StackBasis frequency_reduce(const SampleSet& s1, const SampleSet& s2, const HotellingConfig& cfg);

// Per-sample covariances over the basis pooled as
// ((n1-1) S1 + (n2-1) S2) / (n1+n2-2). Needs n1, n2 >= 2.
PooledStats pooled_stats(const SampleSet& s1, const SampleSet& s2, const StackBasis& basis);

// Throws DegenerateDof unless 1 <= p <= n1+n2-3.
double g_squared(std::size_t n1, std::size_t n2, std::size_t p, Scaling scaling);

double critical_value(const PooledStats& stats, const HotellingConfig& cfg);

// f = G^2 delta^T Sigma^-1 delta ~ F(p, n1+n2-p-1).
HotellingResult hotelling_test(const PooledStats& stats, const HotellingConfig& cfg);

// delta_k +/- sqrt(F* diag(Sigma)_k / G^2) for every basis stack.
std::vector<Interval> confidence_intervals(const PooledStats& stats, const HotellingConfig& cfg);

// Stacks with delta_k^2 > F* diag(Sigma)_k / G^2, in basis order.
std::vector<Stack> significant_stacks(const PooledStats& stats, const HotellingConfig& cfg);

// Restriction of `delta` to the (sorted) significant stacks.
DeltaGraph reduce_delta(const DeltaGraph& delta, std::span<const Stack> significant);

struct StackResult {
  Stack stack;
  double delta = 0.0;
  double var_pooled = 0.0;
  Interval ci;
  bool significant = false;
  std::optional<DeltaClass> delta_class;  // set for significant stacks
};

struct RegressionReport {
  Unit unit = Unit::samples;
  Scaling scaling = Scaling::standard;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t p = 0;
  HotellingResult test;
  std::vector<StackResult> stacks;  // basis order
  std::vector<Stack> significant;   // sorted
  DeltaGraph delta;                 // mean(candidate) - mean(baseline)
  DeltaGraph reduced_delta;
  DeltaDecomposition decomposition_r;
};

// frequency_reduce -> pooled_stats -> hotelling_test -> intervals ->
// significant stacks -> reduced delta -> decomposition.
RegressionReport run_regression(const SampleSet& baseline, const SampleSet& candidate, const HotellingConfig& cfg);

}  // namespace fga
