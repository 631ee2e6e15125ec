#pragma once

#include <cmath>
#include <optional>
#include <span>

namespace dirac_lab {

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // log(y) at log(x) = 0
  std::size_t points = 0;
};

/// Least-squares fit of log|y| = slope * log(x) + intercept.
/// Returns nothing when fewer than two usable points exist (x or y not
/// strictly positive, or all x equal).
inline std::optional<PowerLawFit> fit_power_law(std::span<const double> x,
                                                std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    const double ay = std::abs(y[i]);
    if (!(x[i] > 0.0) || !(ay > 0.0) || !std::isfinite(ay)) return std::nullopt;
    const double lx = std::log(x[i]);
    const double ly = std::log(ay);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 1e-300)) return std::nullopt;
  PowerLawFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  f.points = n;
  return f;
}

}  // namespace dirac_lab
