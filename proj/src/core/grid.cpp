#include "chemolab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chemolab/errors.hpp"

namespace chemolab {

double unit_sphere_measure(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n, double R) { return unit_sphere_measure(n) * std::pow(R, n) / n; }

double RadialGrid::domain_volume() const {
  double sum = 0.0;
  for (double v : volumes) sum += v;
  return sum;
}

double RadialGrid::min_width() const {
  double w = faces[1] - faces[0];
  for (int i = 1; i < M; ++i) w = std::min(w, faces[i + 1] - faces[i]);
  return w;
}

RadialGrid build_grid(int n, double R, int M, double stretch) {
  if (n < 2) throw ConfigError("build_grid: dimension n must be >= 2");
  if (!(R > 0.0)) throw ConfigError("build_grid: radius must be positive");
  if (M < 8) {
    std::ostringstream msg;
    msg << "build_grid: need at least 8 cells, got " << M;
    throw ConfigError(msg.str());
  }
  if (!(stretch >= 1.0)) throw ConfigError("build_grid: stretch must be >= 1");

  RadialGrid g;
  g.n = n;
  g.R = R;
  g.M = M;
  g.stretch = stretch;
  g.omega = unit_sphere_measure(n);

  g.faces.resize(M + 1);
  g.faces[0] = 0.0;
  if (stretch == 1.0) {
    for (int i = 1; i <= M; ++i) g.faces[i] = R * i / M;
  } else {
    // widths w0 * stretch^i summing to R
    const double w0 = R * (stretch - 1.0) / (std::pow(stretch, M) - 1.0);
    double w = w0;
    for (int i = 1; i <= M; ++i) {
      g.faces[i] = g.faces[i - 1] + w;
      w *= stretch;
    }
  }
  g.faces[M] = R;

  g.centers.resize(M);
  g.volumes.resize(M);
  for (int i = 0; i < M; ++i) {
    g.centers[i] = 0.5 * (g.faces[i] + g.faces[i + 1]);
    g.volumes[i] = g.omega * (std::pow(g.faces[i + 1], n) - std::pow(g.faces[i], n)) / n;
  }
  g.areas.resize(M + 1);
  for (int f = 0; f <= M; ++f) g.areas[f] = g.omega * std::pow(g.faces[f], n - 1);

  g.transmissibility.assign(M + 1, 0.0);
  g.center_distance.assign(M + 1, 0.0);
  for (int f = 1; f < M; ++f) {
    g.center_distance[f] = g.centers[f] - g.centers[f - 1];
    g.transmissibility[f] = g.areas[f] / g.center_distance[f];
  }
  return g;
}

}  // namespace chemolab
