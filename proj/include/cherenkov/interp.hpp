#pragma once

#include <span>
#include <vector>

namespace cherenkov {

// Natural cubic spline through (x_i, y_i); x strictly ascending.
// Outside the knot range the end cubic is extrapolated.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const;
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

  private:
    std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

}  // namespace cherenkov
