#pragma once

#include <vector>

#include "semialg/poly.h"
#include "semialg/program.h"

namespace semialg {

/// Closed interval of doubles with outward rounding on every operation.
struct FloatInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

FloatInterval operator+(const FloatInterval& a, const FloatInterval& b);
FloatInterval operator*(const FloatInterval& a, const FloatInterval& b);
FloatInterval operator*(double s, const FloatInterval& a);
FloatInterval power(const FloatInterval& a, int exponent);

/// Enclosure of p over the box (one interval per universe variable).
FloatInterval evaluate_interval(const FloatPolynomial& p,
                                const std::vector<FloatInterval>& box);
FloatInterval evaluate_interval(const RatPolynomial& p,
                                const std::vector<FloatInterval>& box);

std::vector<FloatInterval> to_float_box(const Box& box);

/// Outer bounds of {v : g_j(v) <= 0 for all j} within `box`, computed by
/// branch and prune over the `split_vars` coordinates. Returns nullopt when
/// the set is proved empty. Only the split coordinates are refined.
std::optional<std::vector<FloatInterval>> bound_feasible_set(
    const std::vector<FloatPolynomial>& constraints,
    const std::vector<FloatInterval>& box, const std::vector<int>& split_vars,
    int max_boxes = 20000);

/// Widens [lo, hi] outward to short decimal endpoints (about three
/// significant digits of the width), clamped to `outer`.
Interval round_outward(double lo, double hi, const Interval& outer);

}  // namespace semialg
