#include "semialg/interval.h"

#include <algorithm>
#include <cmath>
#include <deque>

namespace semialg {

namespace {

double down(double v) { return std::nextafter(v, -INFINITY); }
double up(double v) { return std::nextafter(v, INFINITY); }

}  // namespace

FloatInterval operator+(const FloatInterval& a, const FloatInterval& b) {
  return {down(a.lo + b.lo), up(a.hi + b.hi)};
}

FloatInterval operator*(const FloatInterval& a, const FloatInterval& b) {
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {down(*std::min_element(p, p + 4)), up(*std::max_element(p, p + 4))};
}

FloatInterval operator*(double s, const FloatInterval& a) {
  const double x = s * a.lo;
  const double y = s * a.hi;
  return {down(std::min(x, y)), up(std::max(x, y))};
}

FloatInterval power(const FloatInterval& a, int exponent) {
  if (exponent == 0) return {1.0, 1.0};
  if (exponent == 1) return a;
  const double pl = std::pow(a.lo, exponent);
  const double ph = std::pow(a.hi, exponent);
  FloatInterval r;
  if (exponent % 2 == 1) {
    r = {pl, ph};
  } else if (a.lo >= 0) {
    r = {pl, ph};
  } else if (a.hi <= 0) {
    r = {ph, pl};
  } else {
    r = {0.0, std::max(pl, ph)};
  }
  // pow is not correctly rounded; widen by a few ulps.
  for (int k = 0; k < 4; ++k) {
    r.lo = r.lo == 0.0 && (exponent % 2 == 0) ? 0.0 : down(r.lo);
    r.hi = up(r.hi);
  }
  return r;
}

FloatInterval evaluate_interval(const FloatPolynomial& p,
                                const std::vector<FloatInterval>& box) {
  FloatInterval total{0.0, 0.0};
  for (const auto& [m, c] : p.terms()) {
    FloatInterval t{1.0, 1.0};
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] > 0) t = t * power(box[i], m[i]);
    }
    total = total + c * t;
  }
  return total;
}

FloatInterval evaluate_interval(const RatPolynomial& p,
                                const std::vector<FloatInterval>& box) {
  FloatInterval total{0.0, 0.0};
  for (const auto& [m, c] : p.terms()) {
    FloatInterval t{1.0, 1.0};
    for (int i = 0; i < m.size(); ++i) {
      if (m[i] > 0) t = t * power(box[i], m[i]);
    }
    // Enclose the rational coefficient itself.
    const double cd = rational_to_double(c);
    FloatInterval ci{down(cd), up(cd)};
    if (rational_from_double(cd) == c) ci = {cd, cd};
    total = total + ci * t;
  }
  return total;
}

std::vector<FloatInterval> to_float_box(const Box& box) {
  std::vector<FloatInterval> out;
  out.reserve(box.size());
  for (const auto& iv : box) {
    out.push_back({down(rational_to_double(iv.lo)), up(rational_to_double(iv.hi))});
  }
  return out;
}

std::optional<std::vector<FloatInterval>> bound_feasible_set(
    const std::vector<FloatPolynomial>& constraints,
    const std::vector<FloatInterval>& box, const std::vector<int>& split_vars,
    int max_boxes) {
  struct Item {
    std::vector<FloatInterval> box;
  };
  // Constraints prove a box empty only with a clear positive lower bound.
  auto status = [&](const std::vector<FloatInterval>& b) {
    bool inside = true;
    for (const auto& g : constraints) {
      const FloatInterval v = evaluate_interval(g, b);
      const double scale = 1e-12 * (1.0 + g.l1_norm());
      if (v.lo > scale) return -1;
      if (v.hi > 0) inside = false;
    }
    return inside ? 1 : 0;
  };
  std::deque<Item> queue{{box}};
  std::vector<std::vector<FloatInterval>> kept;
  int processed = 0;
  while (!queue.empty()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    ++processed;
    const int s = status(item.box);
    if (s < 0) continue;
    int widest = -1;
    double widest_rel = 0.0;
    for (int v : split_vars) {
      const double rel = item.box[v].width() / std::max(box[v].width(), 1e-300);
      if (rel > widest_rel) {
        widest_rel = rel;
        widest = v;
      }
    }
    const bool can_split = s == 0 && widest >= 0 && widest_rel > 1e-4 &&
                           processed + static_cast<int>(queue.size()) < max_boxes;
    if (!can_split) {
      kept.push_back(std::move(item.box));
      continue;
    }
    const double mid = item.box[widest].mid();
    Item left = item;
    Item right = std::move(item);
    left.box[widest].hi = mid;
    right.box[widest].lo = mid;
    queue.push_back(std::move(left));
    queue.push_back(std::move(right));
  }
  if (kept.empty()) return std::nullopt;
  std::vector<FloatInterval> hull = kept.front();
  for (const auto& b : kept) {
    for (int v : split_vars) {
      hull[v].lo = std::min(hull[v].lo, b[v].lo);
      hull[v].hi = std::max(hull[v].hi, b[v].hi);
    }
  }
  return hull;
}

Interval round_outward(double lo, double hi, const Interval& outer) {
  const double width = std::max(hi - lo, 1e-12);
  const double step = std::pow(10.0, std::floor(std::log10(width)) - 2);
  // step is 10^k; use an exact rational for it so the endpoints are short.
  const int k = static_cast<int>(std::lround(std::log10(step)));
  mpz_class ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(k)));
  const Rational step_q = k >= 0 ? Rational(ten) : Rational(mpz_class(1), ten);
  const double lo_steps = std::floor(lo / step) - 1;
  const double hi_steps = std::ceil(hi / step) + 1;
  Interval r{Rational(mpz_class(lo_steps)) * step_q, Rational(mpz_class(hi_steps)) * step_q};
  r.lo.canonicalize();
  r.hi.canonicalize();
  if (r.lo < outer.lo) r.lo = outer.lo;
  if (r.hi > outer.hi) r.hi = outer.hi;
  if (r.lo > r.hi) r = outer;
  return r;
}

}  // namespace semialg
