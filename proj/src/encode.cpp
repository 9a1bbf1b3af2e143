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

#include "qpath/encode.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qpath {

namespace {

constexpr int kAbsoluteQubitCap = 24;

void check_cap(int n, int cap) {
  if (n > cap || n > kAbsoluteQubitCap)
    throw EncodingError("model has " + std::to_string(n) + " qubits, exhaustive routines capped at " +
                        std::to_string(std::min(cap, kAbsoluteQubitCap)));
}

void add_pair(Eigen::MatrixXd& q, int a, int b, double value) {
  if (a == b) q(a, a) += value;
  else q(std::min(a, b), std::max(a, b)) += value;
}

std::vector<int> non_start_nodes(int m, int start) {
  std::vector<int> out;
  for (int v = 0; v < m; ++v)
    if (v != start) out.push_back(v);
  return out;
}

// True when every exhaustive ground state of the penalised encoding decodes
// to a tour of optimal length.
bool ground_state_is_optimal(const TspInstance& t, double penalty, double optimum, int cap) {
  const Qubo q = tsp_to_qubo(t, penalty);
  const IsingModel im = qubo_to_ising(q);
  const Eigen::VectorXd e = diagonal_energies(im, cap);
  const double lo = e.minCoeff();
  const double tol = 1e-9 * std::max(1.0, std::abs(lo));
  for (Eigen::Index z = 0; z < e.size(); ++z) {
    if (e(z) > lo + tol) continue;
    const auto tour = decode_index(static_cast<BasisIndex>(z), q.m, q.start);
    if (!tour) return false;
    if (closed_length(t.distances, tour->order) > optimum + 1e-9 * std::max(1.0, optimum)) return false;
  }
  return true;
}

}  // namespace

double Qubo::energy(BasisIndex index) const {
  Eigen::VectorXd x(nvars());
  for (int k = 0; k < nvars(); ++k) x(k) = static_cast<double>((index >> k) & 1U);
  return energy(x);
}

void EncodingConfig::validate() const {
  if (!(lambda > 1.0)) throw EncodingError("lambda must exceed 1");
  if (!(calibration > 0.0 && calibration <= 1.0)) throw EncodingError("calibration must lie in (0, 1]");
  if (!(bbox_factor > 0.0)) throw EncodingError("bbox_factor must be positive");
  if (qubit_cap < 0 || qubit_cap > kAbsoluteQubitCap)
    throw EncodingError("qubit_cap must lie in [0, " + std::to_string(kAbsoluteQubitCap) + "]");
}

std::string to_string(PenaltyStrategy s) {
  return s == PenaltyStrategy::ExactMinSearch ? "exact-min-search" : "bounding-box";
}

std::string to_string(ScalingStrategy s) {
  switch (s) {
    case ScalingStrategy::ExactWidth: return "exact-width";
    case ScalingStrategy::GershgorinBound: return "gershgorin-bound";
    case ScalingStrategy::None: return "none";
  }
  return "none";
}

PenaltyStrategy parse_penalty_strategy(const std::string& s) {
  if (s == "exact-min-search") return PenaltyStrategy::ExactMinSearch;
  if (s == "bounding-box") return PenaltyStrategy::BoundingBox;
  throw EncodingError("unknown penalty strategy '" + s + "'");
}

ScalingStrategy parse_scaling_strategy(const std::string& s) {
  if (s == "exact-width") return ScalingStrategy::ExactWidth;
  if (s == "gershgorin-bound") return ScalingStrategy::GershgorinBound;
  if (s == "none") return ScalingStrategy::None;
  throw EncodingError("unknown scaling strategy '" + s + "'");
}

Qubo tsp_to_qubo(const TspInstance& t, double penalty) {
  const int m = t.size();
  if (m < 2) throw EncodingError("TSP encoding needs at least 2 nodes");
  if (!(penalty > 0.0)) throw EncodingError("penalty must be positive");
  const int k = m - 1;
  const auto nodes = non_start_nodes(m, t.start);
  const auto& d = t.distances;

  Qubo q;
  q.m = m;
  q.start = t.start;
  q.penalty = penalty;
  q.coeffs = Eigen::MatrixXd::Zero(k * k, k * k);
  auto idx = [&](int v, int pos) { return q.var_index(v, pos); };

  // Edges from the start into position 1 and from position k back home.
  for (int v = 1; v <= k; ++v) {
    add_pair(q.coeffs, idx(v, 1), idx(v, 1), d(t.start, nodes[v - 1]));
    add_pair(q.coeffs, idx(v, k), idx(v, k), d(nodes[v - 1], t.start));
  }
  for (int pos = 1; pos < k; ++pos)
    for (int u = 1; u <= k; ++u)
      for (int v = 1; v <= k; ++v)
        if (u != v) add_pair(q.coeffs, idx(u, pos), idx(v, pos + 1), d(nodes[u - 1], nodes[v - 1]));

  // P (1 - sum x)^2 = P (1 - sum x + 2 sum_{a<b} x_a x_b) per one-hot group.
  auto one_hot = [&](auto var_of) {
    q.offset += penalty;
    for (int a = 1; a <= k; ++a) {
      add_pair(q.coeffs, var_of(a), var_of(a), -penalty);
      for (int b = a + 1; b <= k; ++b) add_pair(q.coeffs, var_of(a), var_of(b), 2.0 * penalty);
    }
  };
  for (int pos = 1; pos <= k; ++pos) one_hot([&](int v) { return idx(v, pos); });
  for (int v = 1; v <= k; ++v) one_hot([&](int pos) { return idx(v, pos); });
  return q;
}

IsingModel qubo_to_ising(const Qubo& q) {
  const int n = q.nvars();
  IsingModel im;
  im.n = n;
  im.h = Eigen::VectorXd::Zero(n);
  im.offset = q.offset;
  im.penalty = q.penalty;
  for (int i = 0; i < n; ++i) {
    const double qii = q.coeffs(i, i);
    im.offset += qii / 2.0;
    im.h(i) -= qii / 2.0;
    for (int j = i + 1; j < n; ++j) {
      const double qij = q.coeffs(i, j);
      if (qij == 0.0) continue;
      im.offset += qij / 4.0;
      im.h(i) -= qij / 4.0;
      im.h(j) -= qij / 4.0;
      im.J.push_back({i, j, qij / 4.0});
    }
  }
  return im;
}

double ising_energy(const IsingModel& im, BasisIndex index) {
  if (im.n < 64 && index >> im.n) throw EncodingError("basis index out of range");
  auto spin = [index](int k) { return ((index >> k) & 1U) ? -1.0 : 1.0; };
  double e = im.offset;
  for (int i = 0; i < im.n; ++i) e += im.h(i) * spin(i);
  for (const auto& c : im.J) e += c.value * spin(c.i) * spin(c.j);
  return e;
}

Eigen::VectorXd diagonal_energies(const IsingModel& im, int qubit_cap) {
  check_cap(im.n, qubit_cap);
  const Eigen::Index dim = Eigen::Index{1} << im.n;
  Eigen::VectorXd e(dim);
  for (Eigen::Index z = 0; z < dim; ++z) e(z) = ising_energy(im, static_cast<BasisIndex>(z));
  return e;
}

double find_min_penalty(const TspInstance& t, const EncodingConfig& cfg) {
  const int m = t.size();
  if (m < 2) throw EncodingError("TSP encoding needs at least 2 nodes");
  check_cap((m - 1) * (m - 1), cfg.qubit_cap);
  const double max_d = t.distances.maxCoeff();
  if (!(max_d > 0.0)) throw EncodingError("all distances are zero; penalty search is undefined");
  const double optimum = solve_tsp_exact(t).length;

  double hi = m * max_d;
  double lo = 0.0;
  if (!ground_state_is_optimal(t, hi, optimum, cfg.qubit_cap))
    throw EncodingError("penalty search bracket failure: upper end infeasible");
  const double tol = 1e-3 * hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    // mid == 0 cannot be encoded; the all-zero state always wins there.
    if (mid > 0.0 && ground_state_is_optimal(t, mid, optimum, cfg.qubit_cap)) hi = mid;
    else lo = mid;
  }
  return hi;
}

double penalty_from_bbox(const TspInstance& t, const EncodingConfig& cfg) {
  double side = 0.0;
  if (t.has_coords()) {
    Point lo = Point::Constant(std::numeric_limits<double>::infinity());
    Point hi = -lo;
    int count = 0;
    for (int v = 0; v < t.size(); ++v) {
      if (v == t.start) continue;
      lo = lo.cwiseMin(t.coords[v]);
      hi = hi.cwiseMax(t.coords[v]);
      ++count;
    }
    if (count > 0) side = (hi - lo).maxCoeff();
  }
  if (!(side > 0.0)) side = t.distances.size() > 0 ? t.distances.maxCoeff() : 0.0;
  return cfg.bbox_factor * side;
}

double select_penalty(const TspInstance& t, const EncodingConfig& cfg) {
  if (cfg.penalty_strategy == PenaltyStrategy::ExactMinSearch) return cfg.lambda * find_min_penalty(t, cfg);
  return penalty_from_bbox(t, cfg);
}

double exact_spectral_width(const IsingModel& im, int qubit_cap) {
  const Eigen::VectorXd e = diagonal_energies(im, qubit_cap);
  return e.maxCoeff() - e.minCoeff();
}

double bound_spectral_width(const IsingModel& im) {
  double sum = im.h.cwiseAbs().sum();
  for (const auto& c : im.J) sum += std::abs(c.value);
  return 2.0 * sum;
}

IsingModel scale_ising(const IsingModel& im, const EncodingConfig& cfg) {
  if (cfg.scaling_strategy == ScalingStrategy::None) return im;
  const double width = cfg.scaling_strategy == ScalingStrategy::ExactWidth
                           ? exact_spectral_width(im, cfg.qubit_cap)
                           : cfg.calibration * bound_spectral_width(im);
  if (!(width > 0.0)) throw EncodingError("constant Hamiltonian: nothing to scale");
  const double s = 2.0 * im.n / width;
  IsingModel out = im;
  out.h *= s;
  for (auto& c : out.J) c.value *= s;
  out.offset *= s;
  out.scale = im.scale * s;
  return out;
}

std::optional<Tour> decode_bits(const std::vector<std::uint8_t>& bits, int m, int start) {
  if (m < 1) return std::nullopt;
  const int k = m - 1;
  if (static_cast<int>(bits.size()) != k * k) return std::nullopt;
  const auto nodes = non_start_nodes(m, start);
  std::vector<int> at_position(k, -1);
  std::vector<int> per_node(k, 0);
  for (int v = 0; v < k; ++v) {
    for (int pos = 0; pos < k; ++pos) {
      if (!bits[v * k + pos]) continue;
      if (at_position[pos] >= 0 || per_node[v]++ > 0) return std::nullopt;
      at_position[pos] = v;
    }
  }
  Tour tour{{start}};
  for (int pos = 0; pos < k; ++pos) {
    if (at_position[pos] < 0) return std::nullopt;
    tour.order.push_back(nodes[at_position[pos]]);
  }
  return tour;
}

std::vector<std::uint8_t> bits_of(BasisIndex index, int nbits) {
  std::vector<std::uint8_t> bits(nbits);
  for (int k = 0; k < nbits; ++k) bits[k] = static_cast<std::uint8_t>((index >> k) & 1U);
  return bits;
}

std::optional<Tour> decode_index(BasisIndex index, int m, int start) {
  if (m < 1) return std::nullopt;
  return decode_bits(bits_of(index, (m - 1) * (m - 1)), m, start);
}

std::string ising_to_json(const IsingModel& im) {
  nlohmann::json doc;
  doc["n"] = im.n;
  doc["h"] = std::vector<double>(im.h.data(), im.h.data() + im.h.size());
  nlohmann::json couplings = nlohmann::json::array();
  for (const auto& c : im.J) couplings.push_back({{"i", c.i}, {"j", c.j}, {"value", c.value}});
  doc["J"] = std::move(couplings);
  doc["offset"] = im.offset;
  doc["scale"] = im.scale;
  doc["penalty"] = im.penalty;
  return doc.dump(2);
}

}  // namespace qpath
