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

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpath {

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { Adam, NelderMead, Umda, QuasiNewton };
enum class Termination { Converged, MaxIter, Timeout };

std::string to_string(Method m);
std::string to_string(Termination t);
Method parse_method(const std::string& s);

/// Counts every call, gradient probes included.
class Objective {
 public:
  using Function = std::function<double(const Eigen::VectorXd&)>;

  Objective(int dimension, Function f) : dimension_(dimension), f_(std::move(f)) {}

  double operator()(const Eigen::VectorXd& x) {
    if (x.size() != dimension_) throw OptimizerError("objective called with wrong dimension");
    ++evaluations_;
    return f_(x);
  }

  int dimension() const { return dimension_; }
  long evaluations() const { return evaluations_; }
  void reset_count() { evaluations_ = 0; }

 private:
  int dimension_;
  Function f_;
  long evaluations_ = 0;
};

struct AdamKnobs {
  double step = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double fd_step = 1e-3;
};

struct NelderMeadKnobs {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.1;
};

struct UmdaKnobs {
  int population = 40;
  double elite_fraction = 0.25;
  double variance_floor = 1e-6;
  double initial_sigma = 0.5;
};

struct QuasiNewtonKnobs {
  double fd_step = 1e-3;
  double first_step = 0.25;  // longest step before any curvature is known
  double armijo = 1e-4;
  int max_backtracks = 30;
};

struct OptimizerConfig {
  Method method = Method::QuasiNewton;
  int max_iter = 500;
  long max_evals = 20000;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  double timeout_seconds = 0.0;  // 0 disables the wall-clock limit
  AdamKnobs adam;
  NelderMeadKnobs nelder_mead;
  UmdaKnobs umda;
  QuasiNewtonKnobs quasi_newton;

  void validate() const;
};

/// History of one run. Row k of every vector is accepted iterate k; row 0 is
/// the starting point (best vertex of the initial simplex for Nelder-Mead).
struct OptimizerTrace {
  Method method = Method::QuasiNewton;
  std::vector<Eigen::VectorXd> params;
  std::vector<double> energies;
  std::vector<double> best;
  std::vector<long> eval_counts;
  long total_evals = 0;
  Termination reason = Termination::MaxIter;
  double wall_seconds = 0.0;
  Eigen::VectorXd best_params;
  double best_energy = 0.0;

  std::size_t size() const { return energies.size(); }
};

enum class InitStrategy { LinearRamp, UniformRandom };

Eigen::VectorXd init_params(int p, InitStrategy strategy, std::uint64_t seed = 0);

OptimizerTrace minimize(Objective& obj, const Eigen::VectorXd& x0, const OptimizerConfig& cfg);

/// Nominal objective calls per iteration. For Nelder-Mead this is the
/// amortized upper bound 2 (shrink steps excepted); for quasi-Newton it
/// assumes the first line-search trial is accepted.
double evaluation_cost(Method method, int dimension, const OptimizerConfig& cfg = {});

/// iter,eval_count,energy,best_energy,param_0..param_{d-1}
void write_trace_csv(std::ostream& out, const OptimizerTrace& trace);

/// Shortest round-trip decimal form, used by every tabular export.
std::string format_double(double v);

}  // namespace qpath
