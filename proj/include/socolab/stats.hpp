#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace socolab {

struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation
  double se = 0.0;      // standard error of the mean
  double median = 0.0;
  double trimmed_mean = 0.0;  // 10% trimmed from each tail
};

double mean_of(std::span<const double> xs);
double sample_sd(std::span<const double> xs);
double median_of(std::vector<double> xs);         // by value: sorts a copy
double trimmed_mean_of(std::vector<double> xs);   // 10% per tail
SampleStats summarize(std::span<const double> xs);

// Least-squares slope of log(y) against log(x).  Requires positive data.
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace socolab
