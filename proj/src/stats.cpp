#include "socolab/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace socolab {

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  return std::sqrt(s2 / static_cast<double>(xs.size() - 1));
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return (n % 2 == 1) ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double trimmed_mean_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 10;
  double s = 0.0;
  for (std::size_t i = k; i < xs.size() - k; ++i) s += xs[i];
  return s / static_cast<double>(xs.size() - 2 * k);
}

SampleStats summarize(std::span<const double> xs) {
  SampleStats st;
  st.n = xs.size();
  st.mean = mean_of(xs);
  st.sd = sample_sd(xs);
  st.se = st.n > 0 ? st.sd / std::sqrt(static_cast<double>(st.n)) : 0.0;
  std::vector<double> copy(xs.begin(), xs.end());
  st.median = median_of(copy);
  st.trimmed_mean = trimmed_mean_of(std::move(copy));
  return st;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] <= 0.0 || ys[i] <= 0.0)
      throw std::domain_error("loglog_slope: data must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const double mx = mean_of(lx), my = mean_of(ly);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

}  // namespace socolab
