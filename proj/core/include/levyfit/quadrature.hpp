#pragma once

#include <array>
#include <cstddef>

namespace levyfit::quad {

// 8-node Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 15.
inline constexpr std::array<double, 8> kGl8Nodes = {
    -0.9602898564975362316835609, -0.7966664774136267395915539,
    -0.5255324099163289858177390, -0.1834346424956498049394761,
    0.1834346424956498049394761,  0.5255324099163289858177390,
    0.7966664774136267395915539,  0.9602898564975362316835609};
inline constexpr std::array<double, 8> kGl8Weights = {
    0.1012285362903762591525314, 0.2223810344533744705443560,
    0.3137066458778872873379622, 0.3626837833783619829651504,
    0.3626837833783619829651504, 0.3137066458778872873379622,
    0.2223810344533744705443560, 0.1012285362903762591525314};

// Composite 8-node Gauss-Legendre over [a, b] with `panels` equal panels.
// Works for any return type supporting + and scalar *.
template <class F>
auto gauss_legendre8(F&& f, double a, double b, std::size_t panels = 1) {
  using R = decltype(f(a));
  R total{};
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    R panel{};
    for (std::size_t i = 0; i < kGl8Nodes.size(); ++i) {
      panel = panel + kGl8Weights[i] * f(mid + half * kGl8Nodes[i]);
    }
    total = total + half * panel;
  }
  return total;
}

}  // namespace levyfit::quad
