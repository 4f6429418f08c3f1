#pragma once

#include <vector>

namespace chemolab {

/// Cell-centred radial grid on the ball B(0, R) in R^n.
struct RadialGrid {
  int n = 2;
  double R = 1.0;
  int M = 0;
  double stretch = 1.0;          // ratio of consecutive cell widths (1 = uniform)
  double omega = 0.0;            // surface measure of the unit sphere in R^n
  std::vector<double> faces;     // r_0 = 0 < ... < r_M = R
  std::vector<double> centers;   // cell midpoints
  std::vector<double> volumes;   // omega (r_{i+1}^n - r_i^n) / n
  std::vector<double> areas;     // omega r_f^(n-1), one per face
  // Face transmissibility area/distance between neighbouring centres;
  // entry f refers to face f (between cells f-1 and f), entries 0 and M are 0.
  std::vector<double> transmissibility;
  std::vector<double> center_distance;  // same indexing; 0 at the boundary faces

  double domain_volume() const;
  double min_width() const;
};

/// Uniform face spacing R/M by default; stretch > 1 grades cells geometrically
/// so the innermost cells are the smallest.
RadialGrid build_grid(int n, double R, int M, double stretch = 1.0);

double unit_sphere_measure(int n);
double ball_volume(int n, double R);

}  // namespace chemolab
