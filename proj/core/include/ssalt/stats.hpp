#pragma once

namespace ssalt {

/// Closed interval [lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double value) const { return lower <= value && value <= upper; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile; returns -inf/+inf at 0 and 1.
double normal_quantile(double p);

/// z_{alpha/2} for a two-sided interval of the given confidence level.
double two_sided_z(double level);

}  // namespace ssalt
