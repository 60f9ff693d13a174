#pragma once

// Straight-line reference formulas in long double, written without the
// library so derived values are checked against an independent computation.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline long double ednm(long double x, long double gt, long double gamma = 1, long double lambda = 2,
                        long double eps = 1e-6L) {
  long double err = x > gt ? x - gt : gt - x;
  long double scale = (gt < 0 ? -gt : gt) + eps;
  return gamma * std::exp(-lambda * err / scale);
}

inline std::vector<long double> advantages(const std::vector<double>& r) {
  const std::size_t g = r.size();
  long double mean = 0;
  for (double v : r) mean += v;
  mean /= g;
  long double var = 0;
  for (double v : r) var += (v - mean) * (v - mean);
  var /= g;
  std::vector<long double> out(g, 0.0L);
  if (var == 0) return out;
  const long double sd = std::sqrt(var);
  for (std::size_t i = 0; i < g; ++i) out[i] = (r[i] - mean) / sd;
  return out;
}

inline long double alpha(long double mean_acc, long double sigma = 7.2L) {
  return sigma * mean_acc * (1 - mean_acc);
}

inline long double beta_hat(long double beta, long double t_cur, long double t_max) {
  return beta * (1 + std::cos(std::numbers::pi_v<long double> * t_cur / t_max)) / 2;
}

inline long double kl(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log(static_cast<long double>(p[i]) / q[i]);
  }
  return s;
}

inline std::vector<double> softmax(const std::vector<double>& z) {
  long double m = z[0];
  for (double v : z) m = v > m ? v : m;
  long double total = 0;
  std::vector<long double> e(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) total += e[i] = std::exp(z[i] - m);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(e[i] / total);
  return out;
}

}  // namespace oracle
