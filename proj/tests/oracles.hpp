// Independent reference computations for the tests. Deliberately naive: plain
// grid scans, bisection and fixed-point loops, sharing no code with the library.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int i = 0; i < 300; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Roots of x - lb tanh(x - mu) for x in the pairing search window, found by a
// uniform scan with n cells and bisection in every sign-change cell.
inline std::vector<double> pairing_roots(double lb, double mu, int n = 200000) {
  auto f = [&](double x) { return x - lb * std::tanh(x - mu); };
  double lo, hi;
  if (lb > 0) {
    lo = mu;
    hi = lb;
  } else {
    lo = 0.0;
    hi = std::min(mu, -lb);
  }
  std::vector<double> roots;
  if (!(hi > lo)) return roots;
  // Open lower end: start a hair above it.
  double x0 = lo + (hi - lo) * 1e-12;
  double f0 = f(x0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = lo + (hi - lo) * i / n;
    const double f1 = f(x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if ((f0 < 0) != (f1 < 0) && f0 != 0.0) {
      roots.push_back(bisect(f, x0, x1));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

// Root of D (1 + exp(beta D)) = 2 lm.
inline double pure_mean_field(double lm, double beta) {
  if (lm == 0.0) return 0.0;
  auto g = [&](double d) { return d * (1.0 + std::exp(beta * d)) - 2.0 * lm; };
  const double a = -2.0 * std::abs(lm), b = 2.0 * std::abs(lm);
  return bisect(g, a, b);
}

// Damped iteration of D = 2 lm {c^2 f + s^2 (1 - f)} at fixed W, with
// c^2 - s^2 = (mu + D) / W and f the Fermi factor of W - mu.
inline double mean_field_fixed_point(double w, double lb, double lm, double mu, double beta) {
  (void)lb;
  const double f = 1.0 / (1.0 + std::exp(beta * (w - mu)));
  double d = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double ratio = (mu + d) / w;
    const double c2 = 0.5 * (1 + ratio), s2 = 0.5 * (1 - ratio);
    const double next = 2.0 * lm * (c2 * f + s2 * (1 - f));
    const double upd = 0.5 * d + 0.5 * next;
    if (std::abs(upd - d) < 1e-15) return upd;
    d = upd;
  }
  return d;
}

inline std::mt19937_64 rng(unsigned long long seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(g);
}

}  // namespace oracle
