#include "fgalgebra/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "fgalgebra/fdist.hpp"
#include "fgalgebra/kernels.hpp"

namespace fga {

std::string_view to_string(Scaling s) noexcept {
  return s == Scaling::standard ? "standard" : "example-compatible";
}

std::optional<Scaling> parse_scaling(std::string_view text) noexcept {
  if (text == "standard") return Scaling::standard;
  if (text == "example-compatible" || text == "example_compatible") return Scaling::example_compatible;
  return std::nullopt;
}

void HotellingConfig::validate() const {
  if (!(p_star > 0.0 && p_star < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "p-star must lie in (0, 1), got " + std::to_string(p_star));
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorCode::InvalidConfig, "ridge must be >= 0");
  }
  if (min_df && *min_df == 0) throw Error(ErrorCode::InvalidConfig, "min-df must be >= 1");
  if (f_star_override && !(*f_star_override > 0.0 && std::isfinite(*f_star_override))) {
    throw Error(ErrorCode::InvalidConfig, "F* override must be positive");
  }
}

std::size_t default_min_df(std::size_t n1, std::size_t n2) noexcept {
  std::size_t half = (std::min(n1, n2) + 1) / 2;
  return std::max<std::size_t>(2, half);
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

std::vector<double> Matrix::diag() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
  return d;
}

PooledStats PooledStats::from_moments(StackBasis basis, std::vector<double> mean1, std::vector<double> mean2,
                                      Matrix pooled_cov, std::size_t n1, std::size_t n2) {
  const std::size_t p = basis.size();
  if (mean1.size() != p || mean2.size() != p || pooled_cov.size() != p) {
    throw Error(ErrorCode::DomainError, "moment dimensions do not match the basis");
  }
  PooledStats s;
  s.delta.resize(p);
  for (std::size_t k = 0; k < p; ++k) s.delta[k] = mean2[k] - mean1[k];
  s.basis = std::move(basis);
  s.mean1 = std::move(mean1);
  s.mean2 = std::move(mean2);
  s.pooled_cov = std::move(pooled_cov);
  s.n1 = n1;
  s.n2 = n2;
  return s;
}

namespace {

// Coordinates of `g` over `basis` (both sorted); stacks outside the basis are
// ignored.
void project(const FlameGraph& g, const StackBasis& basis, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < g.size() && k < basis.size(); ++i) {
    const Stack& s = g.stacks()[i];
    while (k < basis.size() && basis.stacks[k] < s) ++k;
    if (k < basis.size() && basis.stacks[k] == s) out[k] = g.values()[i];
  }
}

StackBasis union_basis(std::span<const FlameGraph> runs) {
  std::vector<Stack> all;
  for (const FlameGraph& g : runs) all.insert(all.end(), g.stacks().begin(), g.stacks().end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return {std::move(all)};
}

// Sums run coordinates in run order, then divides by n. mean_graph and
// pooled_stats both go through here so their means agree bit for bit.
std::vector<double> column_means(const SampleSet& s, const StackBasis& basis, std::vector<double>* rows) {
  const std::size_t p = basis.size();
  std::vector<double> sum(p, 0.0);
  std::vector<double> row(p);
  if (rows) rows->assign(s.size() * p, 0.0);
  for (std::size_t r = 0; r < s.size(); ++r) {
    project(s.runs()[r], basis, row);
    for (std::size_t k = 0; k < p; ++k) sum[k] += row[k];
    if (rows) std::copy(row.begin(), row.end(), rows->begin() + static_cast<std::ptrdiff_t>(r * p));
  }
  const double n = static_cast<double>(s.size());
  for (double& v : sum) v /= n;
  return sum;
}

// Adds sum_r (x_r - mean)(x_r - mean)^T into the upper triangle of `scatter`.
void accumulate_scatter(std::span<const double> rows, std::size_t n_rows, std::span<const double> mean,
                        Matrix& scatter) {
  const std::size_t p = mean.size();
  std::vector<double> centered(p);
  for (std::size_t r = 0; r < n_rows; ++r) {
    kernels::subtract(rows.subspan(r * p, p), mean, centered);
    for (std::size_t i = 0; i < p; ++i) {
      const double ci = centered[i];
      if (ci == 0.0) continue;
      kernels::axpy(ci, std::span<const double>(centered).subspan(i), scatter.row(i).subspan(i));
    }
  }
}

// Lower Cholesky factor, or nullopt when a pivot is not safely positive.
std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t p = a.size();
  Matrix l(p);
  for (std::size_t j = 0; j < p; ++j) {
    std::span<const double> lj = l.row(j).first(j);
    double pivot = a(j, j) - kernels::dot(lj, lj);
    if (!(pivot > 1e-12 * a(j, j)) || !(pivot > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      l(i, j) = (a(i, j) - kernels::dot(l.row(i).first(j), lj)) / ljj;
    }
  }
  return l;
}

// delta^T A^-1 delta = |L^-1 delta|^2.
double quadratic_form(const Matrix& l, std::span<const double> delta) {
  const std::size_t p = delta.size();
  std::vector<double> z(p);
  for (std::size_t i = 0; i < p; ++i) {
    z[i] = (delta[i] - kernels::dot(l.row(i).first(i), std::span<const double>(z).first(i))) / l(i, i);
  }
  return kernels::dot(z, z);
}

void check_stats(const PooledStats& stats) {
  if (stats.basis.size() == 0) throw Error(ErrorCode::EmptyBasis, "no stacks to test");
}

}  // namespace

FlameGraph mean_graph(const SampleSet& s) {
  StackBasis basis = union_basis(s.runs());
  std::vector<double> means = column_means(s, basis, nullptr);
  std::vector<Stack> stacks;
  std::vector<double> values;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (means[k] != 0.0) {
      stacks.push_back(std::move(basis.stacks[k]));
      values.push_back(means[k]);
    }
  }
  return FlameGraph::from_canonical(std::move(stacks), std::move(values), s.unit());
}

StackBasis frequency_reduce(const SampleSet& s1, const SampleSet& s2, const HotellingConfig& cfg) {
  cfg.validate();
  if (s1.unit() != s2.unit()) throw Error(ErrorCode::UnitMismatch, "samples use different units");

  struct Tally {
    std::size_t df = 0;
    double total = 0.0;
  };
  std::map<Stack, Tally> table;
  for (const SampleSet* s : {&s1, &s2}) {
    for (const FlameGraph& g : s->runs()) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        Tally& t = table[g.stacks()[i]];
        ++t.df;
        t.total += g.values()[i];
      }
    }
  }

  const std::size_t threshold = cfg.min_df.value_or(default_min_df(s1.size(), s2.size()));
  std::vector<std::pair<Stack, Tally>> kept;
  for (auto& [stack, tally] : table) {
    if (tally.df >= threshold) kept.emplace_back(stack, tally);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyBasis, "no stack appears in at least " + std::to_string(threshold) + " runs");
  }

  const std::size_t n = s1.size() + s2.size();
  if (n >= 4 && kept.size() > n - 3) {
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      if (a.second.df != b.second.df) return a.second.df > b.second.df;
      if (a.second.total != b.second.total) return a.second.total > b.second.total;
      return a.first < b.first;
    });
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(n - 3), kept.end());
  }

  StackBasis basis;
  basis.stacks.reserve(kept.size());
  for (auto& [stack, tally] : kept) basis.stacks.push_back(std::move(stack));
  std::sort(basis.stacks.begin(), basis.stacks.end());
  return basis;
}

PooledStats pooled_stats(const SampleSet& s1, const SampleSet& s2, const StackBasis& basis) {
  if (s1.size() < 2 || s2.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "each sample needs at least 2 runs (got " +
                                                    std::to_string(s1.size()) + " and " + std::to_string(s2.size()) +
                                                    ")");
  }
  if (s1.unit() != s2.unit()) throw Error(ErrorCode::UnitMismatch, "samples use different units");
  if (basis.size() == 0) throw Error(ErrorCode::EmptyBasis, "empty stack basis");

  const std::size_t p = basis.size();
  std::vector<double> rows1, rows2;
  std::vector<double> mean1 = column_means(s1, basis, &rows1);
  std::vector<double> mean2 = column_means(s2, basis, &rows2);

  Matrix cov(p);
  accumulate_scatter(rows1, s1.size(), mean1, cov);
  accumulate_scatter(rows2, s2.size(), mean2, cov);
  const double dof = static_cast<double>(s1.size() + s2.size() - 2);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      cov(i, j) /= dof;
      cov(j, i) = cov(i, j);
    }
  }
  return PooledStats::from_moments(basis, std::move(mean1), std::move(mean2), std::move(cov), s1.size(), s2.size());
}

double g_squared(std::size_t n1, std::size_t n2, std::size_t p, Scaling scaling) {
  const long long n = static_cast<long long>(n1) + static_cast<long long>(n2);
  const long long dof2 = n - static_cast<long long>(p) - 1;
  // p <= n1+n2-3, the same bound frequency_reduce caps at.
  if (p == 0 || dof2 < 2) {
    throw Error(ErrorCode::DegenerateDof, "n1+n2-p-1 = " + std::to_string(dof2) + " with p = " + std::to_string(p) +
                                              "; increase --min-df or collect more runs");
  }
  const double base = static_cast<double>(dof2) / (static_cast<double>(n - 2) * static_cast<double>(p));
  if (scaling == Scaling::example_compatible) return base;
  return base * (static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n));
}

double critical_value(const PooledStats& stats, const HotellingConfig& cfg) {
  cfg.validate();
  if (cfg.f_star_override) return *cfg.f_star_override;
  const std::size_t p = stats.basis.size();
  const long long dof2 = static_cast<long long>(stats.n1 + stats.n2) - static_cast<long long>(p) - 1;
  if (p == 0 || dof2 < 2) throw Error(ErrorCode::DegenerateDof, "no degrees of freedom left");
  return f_quantile(1.0 - cfg.p_star, static_cast<double>(p), static_cast<double>(dof2));
}

HotellingResult hotelling_test(const PooledStats& stats, const HotellingConfig& cfg) {
  cfg.validate();
  check_stats(stats);
  const std::size_t p = stats.basis.size();
  HotellingResult r;
  r.g_squared = g_squared(stats.n1, stats.n2, p, cfg.scaling);
  r.dof1 = p;
  r.dof2 = stats.n1 + stats.n2 - p - 1;
  r.critical_f_star = critical_value(stats, cfg);

  const bool zero_delta = std::all_of(stats.delta.begin(), stats.delta.end(), [](double d) { return d == 0.0; });
  if (zero_delta) {
    r.statistic_f = 0.0;
    r.p_value = 1.0;
    return r;
  }

  std::optional<Matrix> l = cholesky(stats.pooled_cov);
  if (!l && cfg.ridge > 0.0) {
    std::vector<double> d = stats.pooled_cov.diag();
    const double lambda = cfg.ridge * std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(p);
    if (lambda > 0.0 && std::isfinite(lambda)) {
      Matrix regularized = stats.pooled_cov;
      for (std::size_t k = 0; k < p; ++k) regularized(k, k) += lambda;
      l = cholesky(regularized);
      r.ridge_applied = true;
    }
  }
  if (!l) {
    throw Error(ErrorCode::SingularCovariance, "pooled covariance is not positive definite (p = " +
                                                   std::to_string(p) + "); increase --min-df or collect more runs");
  }
  r.statistic_f = r.g_squared * quadratic_form(*l, stats.delta);
  r.p_value = f_sf(r.statistic_f, static_cast<double>(r.dof1), static_cast<double>(r.dof2));
  return r;
}

std::vector<Interval> confidence_intervals(const PooledStats& stats, const HotellingConfig& cfg) {
  check_stats(stats);
  const double g2 = g_squared(stats.n1, stats.n2, stats.basis.size(), cfg.scaling);
  const double f_star = critical_value(stats, cfg);
  std::vector<Interval> out(stats.basis.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double h = std::sqrt(f_star * stats.pooled_cov(k, k) / g2);
    out[k] = {stats.delta[k] - h, stats.delta[k] + h};
  }
  return out;
}

std::vector<Stack> significant_stacks(const PooledStats& stats, const HotellingConfig& cfg) {
  check_stats(stats);
  const double g2 = g_squared(stats.n1, stats.n2, stats.basis.size(), cfg.scaling);
  const double f_star = critical_value(stats, cfg);
  std::vector<Stack> out;
  for (std::size_t k = 0; k < stats.basis.size(); ++k) {
    const double d = stats.delta[k];
    if (d * d > f_star * stats.pooled_cov(k, k) / g2) out.push_back(stats.basis.stacks[k]);
  }
  return out;
}

DeltaGraph reduce_delta(const DeltaGraph& delta, std::span<const Stack> significant) {
  return restrict_to(delta, significant);
}

RegressionReport run_regression(const SampleSet& baseline, const SampleSet& candidate, const HotellingConfig& cfg) {
  cfg.validate();
  if (baseline.size() < 2 || candidate.size() < 2) {
    throw Error(ErrorCode::InsufficientSamples, "each sample needs at least 2 runs (got " +
                                                    std::to_string(baseline.size()) + " and " +
                                                    std::to_string(candidate.size()) + ")");
  }
  StackBasis basis = frequency_reduce(baseline, candidate, cfg);
  PooledStats stats = pooled_stats(baseline, candidate, basis);

  RegressionReport report;
  report.unit = baseline.unit();
  report.scaling = cfg.scaling;
  report.n1 = stats.n1;
  report.n2 = stats.n2;
  report.p = basis.size();
  report.test = hotelling_test(stats, cfg);
  std::vector<Interval> intervals = confidence_intervals(stats, cfg);
  report.significant = significant_stacks(stats, cfg);

  FlameGraph mean1 = mean_graph(baseline);
  FlameGraph mean2 = mean_graph(candidate);
  report.delta = diff(mean2, mean1);
  report.reduced_delta = reduce_delta(report.delta, report.significant);
  report.decomposition_r =
      decompose(restrict_to(mean2, std::span<const Stack>(report.significant)),
                restrict_to(mean1, std::span<const Stack>(report.significant)));

  report.stacks.reserve(basis.size());
  std::size_t next_sig = 0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    StackResult row{basis.stacks[k], stats.delta[k], stats.pooled_cov(k, k), intervals[k], false, std::nullopt};
    if (next_sig < report.significant.size() && report.significant[next_sig] == row.stack) {
      row.significant = true;
      row.delta_class = classify(report.decomposition_r, row.stack);
      ++next_sig;
    }
    report.stacks.push_back(std::move(row));
  }
  return report;
}

}  // namespace fga
