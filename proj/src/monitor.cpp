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

#include "qpath/monitor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qpath {

namespace {

void write_file(const std::filesystem::path& dest, bool force, const std::string& body) {
  if (!force && std::filesystem::exists(dest))
    throw MonitorError("refusing to overwrite " + dest.string() + " (use --force)");
  std::error_code ec;
  if (dest.has_parent_path()) std::filesystem::create_directories(dest.parent_path(), ec);
  if (ec) throw MonitorError("cannot create " + dest.parent_path().string() + ": " + ec.message());
  std::ofstream out(dest, std::ios::binary | std::ios::trunc);
  if (!out) throw MonitorError("cannot write " + dest.string());
  out << body;
  if (!out) throw MonitorError("write failed for " + dest.string());
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

}  // namespace

LandscapeScan landscape_scan(Objective& obj, const Eigen::VectorXd& center, Eigen::VectorXd u,
                             Eigen::VectorXd v, double extent_u, double extent_v, int k) {
  if (k < 1) throw MonitorError("scan resolution must be at least 1");
  const auto d = center.size();
  if (u.size() != d || v.size() != d) throw MonitorError("scan directions have wrong dimension");
  const double nu = u.norm();
  if (!(nu > 0.0)) throw MonitorError("scan direction u is zero");
  u /= nu;
  const double nv = v.norm();
  v -= v.dot(u) * u;
  if (!(v.norm() > 1e-12 * std::max(1.0, nv))) throw MonitorError("scan directions are parallel");
  v /= v.norm();

  LandscapeScan scan;
  scan.center = center;
  scan.u = std::move(u);
  scan.v = std::move(v);
  scan.extent_u = extent_u;
  scan.extent_v = extent_v;
  scan.resolution = k;
  scan.energies.resize(2 * k + 1, 2 * k + 1);
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) {
      const Eigen::VectorXd x = center + scan.offset_u(i) * scan.u + scan.offset_v(j) * scan.v;
      scan.energies(i + k, j + k) = obj(x);
    }
  return scan;
}

LandscapeScan landscape_scan(Objective& obj, const Eigen::VectorXd& center, double extent, int k) {
  if (center.size() < 2) throw MonitorError("default scan plane needs at least two parameters");
  return landscape_scan(obj, center, Eigen::VectorXd::Unit(center.size(), 0),
                        Eigen::VectorXd::Unit(center.size(), 1), extent, extent, k);
}

TrajectoryProjection project_points(const Eigen::MatrixXd& points) {
  const auto t = points.rows();
  if (t < 2) throw MonitorError("trajectory projection needs at least two iterates");
  const Eigen::MatrixXd centered = points.rowwise() - points.colwise().mean();
  TrajectoryProjection proj;
  proj.coords = Eigen::MatrixX2d::Zero(t, 2);
  proj.components = Eigen::MatrixX2d::Zero(points.cols(), 2);
  proj.explained.setZero();
  const double total = centered.squaredNorm();
  if (!(total > 0.0)) return proj;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Eigen::MatrixXd& V = svd.matrixV();
  const auto keep = std::min<Eigen::Index>(2, sv.size());
  for (Eigen::Index c = 0; c < keep; ++c) {
    Eigen::VectorXd dir = V.col(c);
    // Sign convention: largest-magnitude entry positive.
    Eigen::Index arg;
    dir.cwiseAbs().maxCoeff(&arg);
    if (dir(arg) < 0.0) dir = -dir;
    proj.components.col(c) = dir;
    proj.coords.col(c) = centered * dir;
    proj.explained(c) = sv(c) * sv(c) / total;
  }
  return proj;
}

TrajectoryProjection project_trajectory(const OptimizerTrace& trace) {
  if (trace.params.size() < 2) throw MonitorError("trajectory projection needs at least two iterates");
  const auto d = trace.params.front().size();
  Eigen::MatrixXd points(static_cast<Eigen::Index>(trace.params.size()), d);
  for (std::size_t r = 0; r < trace.params.size(); ++r) points.row(static_cast<Eigen::Index>(r)) = trace.params[r].transpose();
  return project_points(points);
}

void write_landscape_csv(std::ostream& out, const LandscapeScan& scan) {
  const int k = scan.resolution;
  out << "a,b,energy\n";
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j)
      out << format_double(scan.offset_u(i)) << ',' << format_double(scan.offset_v(j)) << ','
          << format_double(scan.energies(i + k, j + k)) << '\n';
}

void write_projection_csv(std::ostream& out, const TrajectoryProjection& proj) {
  out << "iter,x,y\n";
  for (Eigen::Index r = 0; r < proj.coords.rows(); ++r)
    out << r << ',' << format_double(proj.coords(r, 0)) << ',' << format_double(proj.coords(r, 1)) << '\n';
}

void export_trace(const OptimizerTrace& trace, const std::filesystem::path& dest, bool force) {
  write_file(dest, force, render([&](std::ostream& os) { write_trace_csv(os, trace); }));
}

void export_landscape(const LandscapeScan& scan, const std::filesystem::path& dest, bool force) {
  write_file(dest, force, render([&](std::ostream& os) { write_landscape_csv(os, scan); }));
}

void export_projection(const TrajectoryProjection& proj, const std::filesystem::path& dest, bool force) {
  write_file(dest, force, render([&](std::ostream& os) { write_projection_csv(os, proj); }));
}

}  // namespace qpath
