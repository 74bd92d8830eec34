// Derivative-free 1-D maximization: uniform grid scan and golden-section search.
#ifndef SEQMEAS_OPTIMIZE_HPP
#define SEQMEAS_OPTIMIZE_HPP

#include <cmath>

namespace seqmeas {

struct ScalarMaximum {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Values closer than this are treated as ties.
inline constexpr double kTieTolerance = 1e-14;

/// Scans `points` equally spaced abscissae in [lo, hi]. Ties go to the smallest x.
template <typename F>
ScalarMaximum grid_maximize(F&& f, double lo, double hi, int points) {
  ScalarMaximum best{lo, f(lo), 1, true};
  for (int i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const double v = f(x);
    if (v > best.value + kTieTolerance) best = {x, v, 0, true};
  }
  best.iterations = points;
  return best;
}

/// Golden-section search for a maximum of a unimodal f on [lo, hi]. Stops once
/// the bracket is narrower than tol, or after max_iterations (converged = false).
template <typename F>
ScalarMaximum golden_section_maximize(F&& f, double lo, double hi, double tol, int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while (b - a >= tol && it < max_iterations) {
    ++it;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarMaximum out = fc >= fd ? ScalarMaximum{c, fc} : ScalarMaximum{d, fd};
  out.iterations = it;
  out.converged = b - a < tol;
  return out;
}

}  // namespace seqmeas

#endif  // SEQMEAS_OPTIMIZE_HPP
