#include "mre/special.hpp"

#include <cmath>
#include <string>

#include "mre/error.hpp"

namespace mre {

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorKind::Domain, "digamma needs a positive finite argument, got " + std::to_string(x));
  }
  // Extended precision absorbs the cancellation between the recurrence sum
  // and log(x) near the positive root.
  long double t = x;
  long double shift = 0.0L;
  // psi(x) = psi(x + 1) - 1 / x
  while (t < 10.0L) {
    shift -= 1.0L / t;
    t += 1.0L;
  }
  const long double inv = 1.0L / t;
  const long double inv2 = inv * inv;
  // B2/2, B4/4, ... : 1/12, -1/120, 1/252, -1/240, 1/132, -691/32760
  const long double series =
      inv2 * (1.0L / 12.0L -
              inv2 * (1.0L / 120.0L -
                      inv2 * (1.0L / 252.0L - inv2 * (1.0L / 240.0L - inv2 * (1.0L / 132.0L - inv2 * 691.0L / 32760.0L)))));
  return static_cast<double>(shift + std::log(t) - 0.5L * inv - series);
}

}  // namespace mre
