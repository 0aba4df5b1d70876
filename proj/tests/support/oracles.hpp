#pragma once

// Independent reference computations. Nothing here calls into the library's
// algebra or statistics code; graphs are flattened into std::map and
// re-derived from first principles.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fgalgebra/core_model.hpp"

namespace fga::oracle {

using Map = std::map<std::string, double>;

template <Sign S>
Map to_map(const BasicGraph<S>& g) {
  Map m;
  for (std::size_t i = 0; i < g.size(); ++i) m[g.stacks()[i].str()] = g.values()[i];
  return m;
}

inline Map diff(const Map& f2, const Map& f1) {
  Map out;
  for (const auto& [k, v] : f2) out[k] += v;
  for (const auto& [k, v] : f1) out[k] -= v;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

struct Parts {
  Map appeared, grown, disappeared, shrunk;
};

// Classification by set membership, straight from the definitions.
inline Parts decompose(const Map& f2, const Map& f1) {
  Parts p;
  for (const auto& [k, d] : diff(f2, f1)) {
    bool in2 = f2.count(k) != 0;
    bool in1 = f1.count(k) != 0;
    if (d > 0) {
      (in1 ? p.grown : p.appeared)[k] = d;
    } else {
      (in2 ? p.shrunk : p.disappeared)[k] = -d;
    }
  }
  return p;
}

inline double l1(const Map& m) {
  double s = 0.0;
  for (const auto& [k, v] : m) s += std::fabs(v);
  return s;
}

// Inverse of a symmetric p x p matrix (p <= 3) by cofactors.
inline std::vector<double> cofactor_inverse(const std::vector<double>& a, std::size_t p) {
  auto at = [&](std::size_t i, std::size_t j) { return a[i * p + j]; };
  std::vector<double> inv(p * p);
  if (p == 1) {
    inv[0] = 1.0 / a[0];
  } else if (p == 2) {
    double det = at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    inv = {at(1, 1) / det, -at(0, 1) / det, -at(1, 0) / det, at(0, 0) / det};
  } else {
    std::array<double, 9> c{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        std::size_t r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
        c[i * 3 + j] = at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0);
      }
    }
    double det = at(0, 0) * c[0] + at(0, 1) * c[1] + at(0, 2) * c[2];
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) inv[i * 3 + j] = c[j * 3 + i] / det;
    }
  }
  return inv;
}

inline double quadratic_form(const std::vector<double>& m, const std::vector<double>& x) {
  std::size_t p = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) s += x[i] * m[i * p + j] * x[j];
  }
  return s;
}

// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double a0, double b0, double fa, double fm, double fb, double whole, double tol, int d) {
        double m = 0.5 * (a0 + b0);
        double lm = 0.5 * (a0 + m), rm = 0.5 * (m + b0);
        double flm = f(lm), frm = f(rm);
        double left = (m - a0) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b0 - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (d <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
        return rec(a0, m, fa, flm, fm, left, tol / 2, d - 1) + rec(m, b0, fm, frm, fb, right, tol / 2, d - 1);
      };
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, depth);
}

// F(d1, d2) density via log-gamma.
inline double f_density(double x, double d1, double d2) {
  if (x <= 0.0) return 0.0;
  double lb = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
  double l = 0.5 * d1 * std::log(d1 / d2) + (0.5 * d1 - 1.0) * std::log(x) -
             0.5 * (d1 + d2) * std::log1p(d1 * x / d2) - lb;
  return std::exp(l);
}

// P(X <= x) by integrating the density after x = u^2, which removes the
// x^(d1/2 - 1) singularity at the origin for d1 = 1.
inline double f_cdf_quadrature(double x, double d1, double d2) {
  // Limit of 2u f(u^2) at u = 0: non-zero only for d1 = 1.
  double at_zero = 0.0;
  if (d1 == 1.0) {
    double lb = std::lgamma(0.5) + std::lgamma(d2 / 2) - std::lgamma((1 + d2) / 2);
    at_zero = 2.0 * std::sqrt(1.0 / d2) / std::exp(lb);
  }
  auto g = [&](double u) { return u == 0.0 ? at_zero : 2.0 * u * f_density(u * u, d1, d2); };
  return simpson(g, 0.0, std::sqrt(x), 1e-14);
}

// Closed-form pooled two-sample t^2 for one coordinate.
inline double t_squared(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  double ma = mean(a), mb = mean(b);
  double ssa = 0.0, ssb = 0.0;
  for (double x : a) ssa += (x - ma) * (x - ma);
  for (double x : b) ssb += (x - mb) * (x - mb);
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double sp2 = (ssa + ssb) / (na + nb - 2.0);
  double t = (mb - ma) / std::sqrt(sp2 * (1.0 / na + 1.0 / nb));
  return t * t;
}

}  // namespace fga::oracle
