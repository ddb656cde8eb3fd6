#include <algorithm>
#include <cmath>

#include "rydsat/errors.hpp"
#include "rydsat/spectrum.hpp"

namespace rydsat {

void Spectrum::validate() const {
  if (x.size() != y.size()) throw Error(ErrorKind::ValidationError, "spectrum x/y length mismatch");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw Error(ErrorKind::ValidationError, "spectrum x must be strictly increasing");
}

namespace {

// Vertex of the parabola through three points; falls back to the middle
// sample when the points are collinear.
std::pair<double, double> parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                                          double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a < 0.0)) return {x1, y1};
  const double b = d01 - a * (x0 + x1);
  const double xv = std::clamp(-b / (2.0 * a), x0, x2);
  return {xv, y0 + d01 * (xv - x0) + a * (xv - x0) * (xv - x1)};
}

}  // namespace

std::vector<Peak> find_peaks(const Spectrum& spec, double min_prominence) {
  spec.validate();
  const auto& y = spec.y;
  const std::size_t n = y.size();
  std::vector<Peak> peaks;
  if (n < 3) return peaks;

  std::size_t i = 1;
  while (i + 1 < n) {
    if (y[i] > y[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && y[j + 1] == y[i]) ++j;
      if (j + 1 < n && y[j + 1] < y[i]) {
        // Prominence: drop to the lowest point before reaching higher ground on each side.
        double left_min = y[i];
        for (std::size_t k = i; k-- > 0;) {
          if (y[k] > y[i]) break;
          left_min = std::min(left_min, y[k]);
        }
        double right_min = y[i];
        for (std::size_t k = j + 1; k < n; ++k) {
          if (y[k] > y[i]) break;
          right_min = std::min(right_min, y[k]);
        }
        const double prominence = y[i] - std::max(left_min, right_min);
        if (prominence >= min_prominence) {
          Peak p;
          p.index = i;
          p.prominence = prominence;
          const auto [xv, yv] =
              parabola_vertex(spec.x[i - 1], y[i - 1], spec.x[i], y[i], spec.x[i + 1], y[i + 1]);
          p.position = xv;
          p.height = yv;
          peaks.push_back(p);
        }
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return peaks;
}

}  // namespace rydsat
