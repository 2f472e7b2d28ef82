#include "cascade/quadrature.hpp"

#include <array>

namespace cascade::quadrature {

namespace {

void simpson(std::vector<double>& w, std::size_t first, std::size_t pairs) {
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t a = first + 2 * k;
    w[a] += 1.0 / 3.0;
    w[a + 1] += 4.0 / 3.0;
    w[a + 2] += 1.0 / 3.0;
  }
}

void three_eighths(std::vector<double>& w, std::size_t first) {
  w[first] += 3.0 / 8.0;
  w[first + 1] += 9.0 / 8.0;
  w[first + 2] += 9.0 / 8.0;
  w[first + 3] += 3.0 / 8.0;
}

}  // namespace

std::vector<double> composite_weights(std::size_t intervals) {
  if (intervals == 0) return {};
  std::vector<double> w(intervals + 1, 0.0);
  if (intervals == 1) {
    w[0] = w[1] = 0.5;
  } else if (intervals < 8) {
    if (intervals % 2 == 0) {
      simpson(w, 0, intervals / 2);
    } else {
      simpson(w, 0, (intervals - 3) / 2);
      three_eighths(w, intervals - 3);
    }
  } else {
    constexpr std::array<double, 4> edge{17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
    for (auto& x : w) x = 1.0;
    for (std::size_t k = 0; k < edge.size(); ++k) {
      w[k] = edge[k];
      w[intervals - k] = edge[k];
    }
  }
  return w;
}

void add_segment_weights(std::vector<double>& w, std::size_t begin, std::size_t end) {
  if (end <= begin) return;
  const auto seg = composite_weights(end - begin);
  for (std::size_t k = 0; k < seg.size(); ++k) w[begin + k] += seg[k];
}

}  // namespace cascade::quadrature
