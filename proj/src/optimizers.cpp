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

#include "qpath/optimizers.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace qpath {

namespace {

using Clock = std::chrono::steady_clock;
using Vec = Eigen::VectorXd;

// Shared bookkeeping: iterate recording, stopping rules and budget checks.
class Run {
 public:
  Run(Objective& obj, const OptimizerConfig& cfg)
      : obj_(obj), cfg_(cfg), start_evals_(obj.evaluations()), started_(Clock::now()) {
    trace_.method = cfg.method;
  }

  long used() const { return obj_.evaluations() - start_evals_; }

  void record(const Vec& x, double energy) {
    const double prev = trace_.best.empty() ? energy : trace_.best.back();
    if (trace_.best.empty() || energy < prev) {
      trace_.best_params = x;
      trace_.best_energy = energy;
    }
    trace_.params.push_back(x);
    trace_.energies.push_back(energy);
    trace_.best.push_back(std::min(prev, energy));
    trace_.eval_counts.push_back(used());
  }

  int iterations() const { return static_cast<int>(trace_.energies.size()) - 1; }

  // Called after each completed iteration; false once the run must end.
  // `next_cost` is the nominal price of the following iteration.
  bool keep_going(double next_cost) {
    const int it = iterations();
    if (it >= 10 && trace_.best[it - 10] - trace_.best[it] <= cfg_.tolerance)
      return stop(Termination::Converged);
    if (it >= cfg_.max_iter) return stop(Termination::MaxIter);
    if (static_cast<double>(used()) + next_cost > static_cast<double>(cfg_.max_evals))
      return stop(Termination::Timeout);
    if (cfg_.timeout_seconds > 0.0 &&
        std::chrono::duration<double>(Clock::now() - started_).count() > cfg_.timeout_seconds)
      return stop(Termination::Timeout);
    return true;
  }

  bool stop(Termination reason) {
    trace_.reason = reason;
    return false;
  }

  OptimizerTrace finish() {
    trace_.total_evals = used();
    trace_.wall_seconds = std::chrono::duration<double>(Clock::now() - started_).count();
    return std::move(trace_);
  }

 private:
  Objective& obj_;
  const OptimizerConfig& cfg_;
  long start_evals_;
  Clock::time_point started_;
  OptimizerTrace trace_;
};

Vec central_gradient(Objective& obj, const Vec& x, double h) {
  Vec g(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = obj(probe);
    probe(i) = x(i) - h;
    const double down = obj(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

OptimizerTrace run_adam(Objective& obj, const Vec& x0, const OptimizerConfig& cfg) {
  const auto& k = cfg.adam;
  const int d = obj.dimension();
  const double cost = evaluation_cost(Method::Adam, d, cfg);
  Run run(obj, cfg);
  Vec x = x0;
  run.record(x, obj(x));
  Vec m = Vec::Zero(d), v = Vec::Zero(d);
  for (int t = 1; run.keep_going(cost); ++t) {
    const Vec g = central_gradient(obj, x, k.fd_step);
    m = k.beta1 * m + (1.0 - k.beta1) * g;
    v = k.beta2 * v + (1.0 - k.beta2) * g.cwiseAbs2();
    const Vec m_hat = m / (1.0 - std::pow(k.beta1, t));
    const Vec v_hat = v / (1.0 - std::pow(k.beta2, t));
    x -= (k.step * m_hat.array() / (v_hat.array().sqrt() + k.epsilon)).matrix();
    run.record(x, obj(x));
  }
  return run.finish();
}

OptimizerTrace run_nelder_mead(Objective& obj, const Vec& x0, const OptimizerConfig& cfg) {
  const auto& k = cfg.nelder_mead;
  const int d = obj.dimension();
  Run run(obj, cfg);
  std::vector<Vec> simplex{x0};
  for (int i = 0; i < d; ++i) {
    Vec v = x0;
    v(i) += k.initial_step;
    simplex.push_back(std::move(v));
  }
  std::vector<double> f;
  for (const auto& v : simplex) f.push_back(obj(v));
  std::vector<int> order(d + 1);

  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::vector<Vec> s;
    std::vector<double> fs;
    for (int i : order) {
      s.push_back(simplex[i]);
      fs.push_back(f[i]);
    }
    simplex = std::move(s);
    f = std::move(fs);
  };
  sort_simplex();
  run.record(simplex[0], f[0]);

  while (run.keep_going(evaluation_cost(Method::NelderMead, d, cfg))) {
    Vec centroid = Vec::Zero(d);
    for (int i = 0; i < d; ++i) centroid += simplex[i];
    centroid /= d;
    const Vec& worst = simplex[d];
    const Vec xr = centroid + k.reflection * (centroid - worst);
    const double fr = obj(xr);
    bool shrink = false;
    if (fr < f[0]) {
      const Vec xe = centroid + k.expansion * (xr - centroid);
      const double fe = obj(xe);
      if (fe < fr) simplex[d] = xe, f[d] = fe;
      else simplex[d] = xr, f[d] = fr;
    } else if (fr < f[d - 1]) {
      simplex[d] = xr;
      f[d] = fr;
    } else if (fr < f[d]) {
      const Vec xc = centroid + k.contraction * (xr - centroid);
      const double fc = obj(xc);
      if (fc <= fr) simplex[d] = xc, f[d] = fc;
      else shrink = true;
    } else {
      const Vec xc = centroid + k.contraction * (worst - centroid);
      const double fc = obj(xc);
      if (fc < f[d]) simplex[d] = xc, f[d] = fc;
      else shrink = true;
    }
    if (shrink) {
      for (int i = 1; i <= d; ++i) {
        simplex[i] = simplex[0] + k.shrink * (simplex[i] - simplex[0]);
        f[i] = obj(simplex[i]);
      }
    }
    sort_simplex();
    run.record(simplex[0], f[0]);
  }
  return run.finish();
}

OptimizerTrace run_umda(Objective& obj, const Vec& x0, const OptimizerConfig& cfg) {
  const auto& k = cfg.umda;
  const int d = obj.dimension();
  const int elites = std::max(1, static_cast<int>(std::ceil(k.elite_fraction * k.population)));
  Run run(obj, cfg);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec mean = x0;
  Vec sigma = Vec::Constant(d, k.initial_sigma);
  run.record(x0, obj(x0));

  std::vector<Vec> pop(k.population);
  std::vector<double> f(k.population);
  std::vector<int> order(k.population);
  while (run.keep_going(k.population)) {
    for (int i = 0; i < k.population; ++i) {
      pop[i].resize(d);
      for (int j = 0; j < d; ++j) pop[i](j) = mean(j) + sigma(j) * normal(rng);
      f[i] = obj(pop[i]);
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    mean.setZero();
    for (int e = 0; e < elites; ++e) mean += pop[order[e]];
    mean /= elites;
    Vec var = Vec::Zero(d);
    for (int e = 0; e < elites; ++e) var += (pop[order[e]] - mean).cwiseAbs2();
    var /= elites;
    sigma = var.cwiseSqrt().cwiseMax(std::sqrt(k.variance_floor));
    run.record(pop[order[0]], f[order[0]]);
  }
  return run.finish();
}

// BFGS on the inverse Hessian with central-difference gradients and an
// Armijo backtracking line search.
OptimizerTrace run_quasi_newton(Objective& obj, const Vec& x0, const OptimizerConfig& cfg) {
  const auto& k = cfg.quasi_newton;
  const int d = obj.dimension();
  const double cost = evaluation_cost(Method::QuasiNewton, d, cfg);
  Run run(obj, cfg);
  Vec x = x0;
  double fx = obj(x);
  run.record(x, fx);
  Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(d, d);
  bool first = true;
  Vec g;
  bool have_g = false;
  while (run.keep_going(cost)) {
    if (!have_g) g = central_gradient(obj, x, k.fd_step);
    Vec dir = -inv_h * g;
    double slope = g.dot(dir);
    bool unscaled = first;
    if (!(slope < 0.0)) {
      inv_h.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
      unscaled = true;
    }
    if (slope == 0.0) {
      run.stop(Termination::Converged);
      break;
    }
    // Until curvature information exists, the identity metric says nothing
    // about step length; cap it instead of trusting |g|.
    double alpha = unscaled ? std::min(1.0, k.first_step / dir.norm()) : 1.0;
    Vec xn = x + alpha * dir;
    double fn = obj(xn);
    int tries = 0;
    while (fn > fx + k.armijo * alpha * slope && tries < k.max_backtracks) {
      alpha *= 0.5;
      xn = x + alpha * dir;
      fn = obj(xn);
      ++tries;
    }
    if (fn > fx + k.armijo * alpha * slope) {
      // No acceptable step along a descent direction: stationary to fd accuracy.
      run.stop(Termination::Converged);
      break;
    }
    const Vec gn = central_gradient(obj, xn, k.fd_step);
    const Vec s = xn - x;
    const Vec y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      if (first) {
        inv_h.setIdentity();
        inv_h *= sy / y.squaredNorm();
        first = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
      inv_h = (I - rho * s * y.transpose()) * inv_h * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    x = xn;
    fx = fn;
    g = gn;
    have_g = true;
    run.record(x, fx);
  }
  return run.finish();
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Adam: return "adam";
    case Method::NelderMead: return "nelder-mead";
    case Method::Umda: return "umda";
    case Method::QuasiNewton: return "quasi-newton";
  }
  return "";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIter: return "max-iter";
    case Termination::Timeout: return "timeout";
  }
  return "";
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::Adam, Method::NelderMead, Method::Umda, Method::QuasiNewton})
    if (to_string(m) == s) return m;
  throw OptimizerError("unknown optimizer '" + s + "'");
}

void OptimizerConfig::validate() const {
  if (max_iter <= 0 || max_evals <= 0) throw OptimizerError("optimizer budget must be positive");
  if (!(tolerance > 0.0)) throw OptimizerError("tolerance must be positive");
  if (timeout_seconds < 0.0) throw OptimizerError("timeout must be nonnegative");
  if (!(adam.step > 0.0 && adam.fd_step > 0.0 && adam.epsilon > 0.0) || !(adam.beta1 > 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 > 0.0 && adam.beta2 < 1.0))
    throw OptimizerError("invalid adam settings");
  if (!(nelder_mead.reflection > 0.0 && nelder_mead.expansion > 1.0 && nelder_mead.contraction > 0.0 &&
        nelder_mead.contraction < 1.0 && nelder_mead.shrink > 0.0 && nelder_mead.shrink < 1.0 &&
        nelder_mead.initial_step > 0.0))
    throw OptimizerError("invalid nelder-mead settings");
  if (umda.population < 2 || !(umda.elite_fraction > 0.0 && umda.elite_fraction < 1.0) ||
      !(umda.variance_floor > 0.0) || !(umda.initial_sigma > 0.0))
    throw OptimizerError("invalid umda settings");
  if (!(quasi_newton.fd_step > 0.0 && quasi_newton.first_step > 0.0 && quasi_newton.armijo > 0.0 &&
        quasi_newton.armijo < 1.0) ||
      quasi_newton.max_backtracks < 0)
    throw OptimizerError("invalid quasi-newton settings");
}

Eigen::VectorXd init_params(int p, InitStrategy strategy, std::uint64_t seed) {
  if (p < 1) throw OptimizerError("layer count must be at least 1");
  Eigen::VectorXd x(2 * p);
  if (strategy == InitStrategy::LinearRamp) {
    for (int k = 0; k < p; ++k) {
      const double frac = static_cast<double>(k + 1) / p;
      x(k) = frac * 0.5;
      x(p + k) = (1.0 - frac) * 0.5;
    }
    return x;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gamma(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> beta(0.0, std::numbers::pi / 2.0);
  for (int k = 0; k < p; ++k) x(k) = gamma(rng);
  for (int k = 0; k < p; ++k) x(p + k) = beta(rng);
  return x;
}

OptimizerTrace minimize(Objective& obj, const Eigen::VectorXd& x0, const OptimizerConfig& cfg) {
  cfg.validate();
  if (x0.size() != obj.dimension()) throw OptimizerError("starting point has wrong dimension");
  if (x0.size() == 0) throw OptimizerError("nothing to optimize: zero-dimensional parameter space");
  switch (cfg.method) {
    case Method::Adam: return run_adam(obj, x0, cfg);
    case Method::NelderMead: return run_nelder_mead(obj, x0, cfg);
    case Method::Umda: return run_umda(obj, x0, cfg);
    case Method::QuasiNewton: return run_quasi_newton(obj, x0, cfg);
  }
  throw OptimizerError("unknown method");
}

double evaluation_cost(Method method, int dimension, const OptimizerConfig& cfg) {
  switch (method) {
    case Method::Adam:
    case Method::QuasiNewton: return 2.0 * dimension + 1.0;
    case Method::NelderMead: return 2.0;
    case Method::Umda: return static_cast<double>(cfg.umda.population);
  }
  return 0.0;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace) {
  const auto d = trace.params.empty() ? 0 : trace.params.front().size();
  out << "iter,eval_count,energy,best_energy";
  for (Eigen::Index i = 0; i < d; ++i) out << ",param_" << i;
  out << '\n';
  for (std::size_t it = 0; it < trace.size(); ++it) {
    out << it << ',' << trace.eval_counts[it] << ',' << format_double(trace.energies[it]) << ','
        << format_double(trace.best[it]);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(trace.params[it](i));
    out << '\n';
  }
}

}  // namespace qpath
