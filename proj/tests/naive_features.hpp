#pragma once

#include "bos/tracks.hpp"

#include <cmath>
#include <vector>

namespace bos::test {

// Reference statistics written as plain loops.
inline double naive_mean(const std::vector<double> &x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double naive_std(const std::vector<double> &x) {
  const double m = naive_mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline std::vector<double> naive_diff(const std::vector<double> &x) {
  std::vector<double> d;
  for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
  return d;
}

inline double naive_blink_rate(const std::vector<double> &a, double thr) {
  int peaks = 0;
  bool counted = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= thr) {
      counted = false;
      continue;
    }
    const bool interior = i > 0 && i + 1 < a.size();
    if (!counted && interior && a[i] >= a[i - 1] && a[i] >= a[i + 1]) {
      ++peaks;
      counted = true;
    }
  }
  return static_cast<double>(peaks) / static_cast<double>(a.size());
}

inline std::vector<double> naive_features(const ChannelMatrix &m, double thr) {
  auto col = [&](int c) {
    std::vector<double> v;
    for (Eigen::Index i = 0; i < m.rows(); ++i) v.push_back(m(i, c));
    return v;
  };
  std::vector<double> out;
  for (int c : {kValence, kArousal}) {
    out.push_back(naive_mean(col(c)));
    out.push_back(naive_std(col(c)));
  }
  out.push_back(naive_blink_rate(col(kAu45), thr));
  for (int c : {kGazeX, kGazeY, kHeadX, kHeadY, kHeadZ, kHeadPitch, kHeadYaw, kHeadRoll, kWristX, kWristY, kWristZ}) {
    const auto v = naive_diff(col(c));
    const auto a = naive_diff(v);
    out.insert(out.end(), {naive_mean(v), naive_std(v), naive_mean(a), naive_std(a)});
  }
  return out;
}

} // namespace bos::test
