#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mixtime::detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = slope*x + intercept. A flat target with zero
// residual counts as a perfect fit, not an undefined one.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  LineFit f;
  if (std::abs(denom) < 1e-12 * (1.0 + dn * sxx)) {
    f.slope = 0.0;
    f.intercept = sy / dn;
  } else {
    f.slope = (dn * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / dn;
  }
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / dn;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += e * e;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  if (ss_tot < 1e-12 * (1.0 + std::abs(ybar))) {
    f.r2 = ss_res < 1e-10 ? 1.0 : 0.0;
  } else {
    f.r2 = 1.0 - ss_res / ss_tot;
  }
  return f;
}

}  // namespace mixtime::detail
