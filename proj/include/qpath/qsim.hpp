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

// Statevector simulation of QAOA for diagonal cost Hamiltonians with the
// standard X mixer. Basis index bit k is qubit k throughout.

#include "qpath/ansatz.hpp"
#include "qpath/encode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace qpath {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using StateVectorT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using EnergyTableT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using StateVector = StateVectorT<double>;
using EnergyTable = EnergyTableT<double>;

/// Angles laid out as [gamma_0 .. gamma_{p-1}, beta_0 .. beta_{p-1}].
using ParameterVector = Eigen::VectorXd;

constexpr int kSimulatorQubitCap = 24;

inline int qubit_count(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw SimulationError("dimension is not a power of two");
  return n;
}

template <typename Scalar = double>
EnergyTableT<Scalar> energy_table(const IsingModel& im, int qubit_cap = 20) {
  return diagonal_energies(im, qubit_cap).cast<Scalar>();
}

/// |+>^n
template <typename Scalar = double>
StateVectorT<Scalar> initial_state(int n, int qubit_cap = 20) {
  if (n < 1 || n > std::min(qubit_cap, kSimulatorQubitCap))
    throw SimulationError("qubit count " + std::to_string(n) + " outside [1, " +
                          std::to_string(std::min(qubit_cap, kSimulatorQubitCap)) + "]");
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Scalar amp = Scalar(1) / std::sqrt(static_cast<Scalar>(dim));
  return StateVectorT<Scalar>::Constant(dim, std::complex<Scalar>(amp, 0));
}

/// a_z <- a_z exp(-i gamma E_z)
template <typename Scalar>
void apply_cost_phase(StateVectorT<Scalar>& state, const EnergyTableT<Scalar>& energies, Scalar gamma) {
  if (state.size() != energies.size()) throw SimulationError("state and energy table sizes differ");
  for (Eigen::Index z = 0; z < state.size(); ++z) state(z) *= std::polar(Scalar(1), -gamma * energies(z));
}

/// exp(-i beta X) on every qubit.
template <typename Scalar>
void apply_mixer(StateVectorT<Scalar>& state, Scalar beta) {
  const int n = qubit_count(state.size());
  const Scalar c = std::cos(beta);
  const std::complex<Scalar> mis(0, -std::sin(beta));
  const Eigen::Index dim = state.size();
  for (int q = 0; q < n; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index z = 0; z < dim; ++z) {
      if (z & bit) continue;
      const auto a0 = state(z);
      const auto a1 = state(z | bit);
      state(z) = c * a0 + mis * a1;
      state(z | bit) = mis * a0 + c * a1;
    }
  }
}

template <typename Scalar>
StateVectorT<Scalar> qaoa_state(const EnergyTableT<Scalar>& energies, int p, const ParameterVector& params) {
  if (params.size() != 2 * p) throw SimulationError("expected " + std::to_string(2 * p) + " parameters");
  StateVectorT<Scalar> state = initial_state<Scalar>(qubit_count(energies.size()), kSimulatorQubitCap);
  for (int layer = 0; layer < p; ++layer) {
    apply_cost_phase<Scalar>(state, energies, static_cast<Scalar>(params(layer)));
    apply_mixer<Scalar>(state, static_cast<Scalar>(params(p + layer)));
  }
  return state;
}

inline StateVector qaoa_state(const QaoaAnsatz& a, const ParameterVector& params, int qubit_cap = 20) {
  return qaoa_state<double>(energy_table<double>(a.ising, qubit_cap), a.p, params);
}

/// sum_z |a_z|^2 E_z
template <typename Scalar>
Scalar expectation(const StateVectorT<Scalar>& state, const EnergyTableT<Scalar>& energies) {
  if (state.size() != energies.size()) throw SimulationError("state and energy table sizes differ");
  return state.cwiseAbs2().dot(energies);
}

using Counts = std::map<BasisIndex, int>;

/// Multinomial draw from |a_z|^2 by inverse-CDF lookup; a fixed seed gives
/// fixed counts.
template <typename Scalar>
Counts sample(const StateVectorT<Scalar>& state, int shots, std::uint64_t seed) {
  if (shots < 1) throw SimulationError("shots must be positive");
  const Eigen::Index dim = state.size();
  std::vector<double> cdf(dim);
  double acc = 0.0;
  for (Eigen::Index z = 0; z < dim; ++z) {
    acc += static_cast<double>(std::norm(state(z)));
    cdf[z] = acc;
  }
  std::mt19937_64 rng(seed);
  // Top 53 bits of the generator as a uniform draw on [0, acc).
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc; };
  Counts counts;
  for (int s = 0; s < shots; ++s) {
    const double u = uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
      --it;
      while (it != cdf.begin() && *it == *(it - 1)) --it;
    }
    auto z = static_cast<BasisIndex>(it - cdf.begin());
    ++counts[z];
  }
  return counts;
}

/// Probability mass on basis states accepted by `is_feasible`.
template <typename Scalar>
Scalar feasible_probability(const StateVectorT<Scalar>& state, const std::function<bool(BasisIndex)>& is_feasible) {
  Scalar total(0);
  for (Eigen::Index z = 0; z < state.size(); ++z)
    if (is_feasible(static_cast<BasisIndex>(z))) total += std::norm(state(z));
  return total;
}

}  // namespace qpath
