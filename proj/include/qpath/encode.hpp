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

#include "qpath/instances.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpath {

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Basis-index convention used everywhere: bit k of a basis index is qubit k
/// (and QUBO variable k); a set bit is x = 1, spin z = -1.
using BasisIndex = std::uint64_t;

/// Penalised one-hot TSP encoding. Node v in 1..m-1 is the v-th non-start
/// node; x(v, t) says it is visited at position t in 1..m-1 (the start sits
/// at position 0). Variable index is (v-1)*(m-1) + (t-1).
struct Qubo {
  int m = 0;
  int start = 0;
  Eigen::MatrixXd coeffs;  // upper triangular; energy = x^T Q x + offset
  double offset = 0.0;
  double penalty = 0.0;

  int nvars() const { return static_cast<int>(coeffs.rows()); }
  int var_index(int v, int t) const { return (v - 1) * (m - 1) + (t - 1); }
  double energy(const Eigen::VectorXd& x) const { return x.dot(coeffs * x) + offset; }
  double energy(BasisIndex index) const;
};

struct Coupling {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct IsingModel {
  int n = 0;
  Eigen::VectorXd h;
  std::vector<Coupling> J;  // i < j, sorted, nonzero
  double offset = 0.0;
  double scale = 1.0;
  double penalty = 0.0;
};

enum class PenaltyStrategy { ExactMinSearch, BoundingBox };
enum class ScalingStrategy { ExactWidth, GershgorinBound, None };

struct EncodingConfig {
  PenaltyStrategy penalty_strategy = PenaltyStrategy::ExactMinSearch;
  double lambda = 1.2;
  double bbox_factor = 1.0;
  ScalingStrategy scaling_strategy = ScalingStrategy::ExactWidth;
  double calibration = 0.5;
  int qubit_cap = 20;

  void validate() const;
};

std::string to_string(PenaltyStrategy s);
std::string to_string(ScalingStrategy s);
PenaltyStrategy parse_penalty_strategy(const std::string& s);
ScalingStrategy parse_scaling_strategy(const std::string& s);

Qubo tsp_to_qubo(const TspInstance& t, double penalty);

/// Substitutes x = (1 - z) / 2; energies agree state by state.
IsingModel qubo_to_ising(const Qubo& q);

double ising_energy(const IsingModel& im, BasisIndex index);

/// All 2^n diagonal energies. Throws above `qubit_cap`.
Eigen::VectorXd diagonal_energies(const IsingModel& im, int qubit_cap = 20);

double find_min_penalty(const TspInstance& t, const EncodingConfig& cfg);
double penalty_from_bbox(const TspInstance& t, const EncodingConfig& cfg);

/// lambda * P_min or the bounding-box rule, per cfg.penalty_strategy.
double select_penalty(const TspInstance& t, const EncodingConfig& cfg);

double exact_spectral_width(const IsingModel& im, int qubit_cap = 20);

/// 2 * (sum |h| + sum |J|), a row-sum bound on the diagonal spectrum's extent.
double bound_spectral_width(const IsingModel& im);

/// Rescales so the spectral width lines up with the X mixer's 2n.
IsingModel scale_ising(const IsingModel& im, const EncodingConfig& cfg);

/// Reads the one-hot assignment; nullopt unless every position and every
/// node is assigned exactly once. Tour labels are local TSP indices.
std::optional<Tour> decode_bits(const std::vector<std::uint8_t>& bits, int m, int start = 0);
std::optional<Tour> decode_index(BasisIndex index, int m, int start = 0);

std::vector<std::uint8_t> bits_of(BasisIndex index, int nbits);

/// {n, h[], J[{i,j,value}], offset, scale, penalty}
std::string ising_to_json(const IsingModel& im);

}  // namespace qpath
