#include "ssalt/stats.hpp"

#include "ssalt/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <limits>

namespace ssalt {

namespace {
const boost::math::normal standard_normal{};
}

double normal_cdf(double x) {
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return boost::math::cdf(standard_normal, x);
}

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("normal quantile requires p in [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(standard_normal, p);
}

double two_sided_z(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    if (level == 0.0) return 0.0;
    throw DomainError("confidence level must lie in [0, 1)");
  }
  return normal_quantile(0.5 + 0.5 * level);
}

}  // namespace ssalt
