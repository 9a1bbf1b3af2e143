// Copyright 2026 The qpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qpath/optimizers.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace qpath {

class MonitorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Objective values on the (2k+1) x (2k+1) grid
/// center + a_i u + b_j v, a_i = extent_u * i / k, b_j = extent_v * j / k,
/// i, j in -k..k. `energies(i + k, j + k)` holds cell (i, j).
struct LandscapeScan {
  Eigen::VectorXd center;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double extent_u = 0.0;
  double extent_v = 0.0;
  int resolution = 1;
  Eigen::MatrixXd energies;

  double offset_u(int i) const { return extent_u * static_cast<double>(i) / resolution; }
  double offset_v(int j) const { return extent_v * static_cast<double>(j) / resolution; }
};

/// Principal-component view of an optimizer's parameter history.
struct TrajectoryProjection {
  Eigen::MatrixX2d coords;     // one row per iterate
  Eigen::MatrixX2d components; // columns are the principal directions
  Eigen::Vector2d explained;   // variance fractions, non-increasing
};

/// Orthonormalizes (u, v) by Gram-Schmidt; throws if they are parallel.
LandscapeScan landscape_scan(Objective& obj, const Eigen::VectorXd& center, Eigen::VectorXd u,
                             Eigen::VectorXd v, double extent_u, double extent_v, int k);

/// Scan over the first two coordinate axes.
LandscapeScan landscape_scan(Objective& obj, const Eigen::VectorXd& center, double extent, int k);

/// Constant trajectories give all-zero coordinates and zero variance.
TrajectoryProjection project_trajectory(const OptimizerTrace& trace);
TrajectoryProjection project_points(const Eigen::MatrixXd& points);

/// a,b,energy
void write_landscape_csv(std::ostream& out, const LandscapeScan& scan);
/// iter,x,y
void write_projection_csv(std::ostream& out, const TrajectoryProjection& proj);

/// Refuses to clobber an existing file unless `force`.
void export_trace(const OptimizerTrace& trace, const std::filesystem::path& dest, bool force = false);
void export_landscape(const LandscapeScan& scan, const std::filesystem::path& dest, bool force = false);
void export_projection(const TrajectoryProjection& proj, const std::filesystem::path& dest, bool force = false);

}  // namespace qpath
