#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

namespace twinstat {

/// Wraps an angle in degrees to [-180, 180).
inline double wrap_degrees(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}

/// Circular mean of angles in degrees, result in [-180, 180).
inline double circular_mean_degrees(const std::vector<double>& degs) {
  double s = 0.0, c = 0.0;
  for (double d : degs) {
    double r = d * std::numbers::pi / 180.0;
    s += std::sin(r);
    c += std::cos(r);
  }
  return wrap_degrees(std::atan2(s, c) * 180.0 / std::numbers::pi);
}

/// Locale-independent "%.9g"-style formatting (shortest form, 9 significant
/// digits, '.' decimal separator). All text file output goes through this so
/// files are byte-stable across platforms and locales.
inline std::string format_g9(double v) {
  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%.9g", v);
  std::string s(buf, buf + n);
  for (char& ch : s)
    if (ch == ',') ch = '.';
  return s;
}

}  // namespace twinstat
