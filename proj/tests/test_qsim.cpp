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

#include "qpath/qsim.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <numbers>

using namespace qpath;
using testing::CVector;

namespace {

CVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector s(Eigen::Index{1} << n);
  for (Eigen::Index z = 0; z < s.size(); ++z) s(z) = {g(rng), g(rng)};
  return s / s.norm();
}

Eigen::VectorXd random_table(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd e(Eigen::Index{1} << n);
  for (Eigen::Index z = 0; z < e.size(); ++z) e(z) = 3.0 * g(rng);
  return e;
}

// Agreement up to a global phase: |<a|b>| = 1.
double phase_free_distance(const CVector& a, const CVector& b) { return 1.0 - std::abs(a.dot(b)); }

}  // namespace

TEST_CASE("initial state") {
  const auto one = initial_state(1);
  CHECK(one(0).real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(one(1).real() == doctest::Approx(std::sqrt(0.5)));
  const auto three = initial_state(3);
  CHECK(three.size() == 8);
  for (Eigen::Index z = 0; z < 8; ++z) CHECK(three(z) == three(0));
  CHECK(std::abs(three.norm() - 1.0) < 1e-12);
  CHECK(std::abs(initial_state(20).squaredNorm() - 1.0) < 1e-10);
  CHECK_THROWS_AS(initial_state(0), SimulationError);
  CHECK_THROWS_AS(initial_state(21), SimulationError);
  CHECK_NOTHROW(initial_state(21, 24));
}

TEST_CASE("cost phase") {
  std::mt19937_64 rng(1);
  const auto e = random_table(3, rng);
  const CVector s = random_state(3, rng);

  CVector id = s;
  apply_cost_phase(id, Eigen::VectorXd(e), 0.0);
  CHECK((id - s).norm() == 0.0);

  CVector glob = s;
  apply_cost_phase(glob, Eigen::VectorXd(Eigen::VectorXd::Constant(8, 2.5)), 1.3);
  CHECK((glob.cwiseAbs2() - s.cwiseAbs2()).norm() < 1e-14);
  CHECK(phase_free_distance(glob, s) < 1e-14);

  CVector got = s;
  apply_cost_phase(got, Eigen::VectorXd(e), 0.7);
  const CVector want = testing::dense_cost_unitary(e, 0.7) * s;
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(got.norm() - 1.0) < 1e-12);

  CVector bad = initial_state(2);
  CHECK_THROWS_AS(apply_cost_phase(bad, Eigen::VectorXd(e), 0.1), SimulationError);
}

TEST_CASE("mixer") {
  std::mt19937_64 rng(2);
  const CVector s = random_state(4, rng);

  CVector id = s;
  apply_mixer(id, 0.0);
  CHECK((id - s).norm() == 0.0);

  CVector zero = CVector::Zero(8);
  zero(0) = 1.0;
  apply_mixer(zero, std::numbers::pi / 2);
  CHECK(std::abs(std::abs(zero(7)) - 1.0) < 1e-14);
  CHECK(zero.head(7).norm() < 1e-14);

  CVector got = s;
  apply_mixer(got, 0.3);
  const CVector kron = testing::kron_mixer_unitary(4, 0.3) * s;
  const CVector eig = testing::dense_mixer_unitary(4, 0.3) * s;
  CHECK((got - kron).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((got - eig).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("qaoa_state") {
  std::mt19937_64 rng(3);
  const auto e = random_table(3, rng);
  const auto p0 = qaoa_state<double>(e, 0, Eigen::VectorXd(0));
  CHECK((p0 - initial_state(3)).norm() == 0.0);

  Eigen::VectorXd params(4);
  params << 0.4, -1.1, 0.9, 0.25;
  const auto got = qaoa_state<double>(e, 2, params);
  const CVector want = testing::dense_qaoa_state(e, 3, 2, params);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(qaoa_state<double>(e, 2, Eigen::VectorXd(3)), SimulationError);
}

TEST_CASE("single qubit closed form <Z> = sin 2g sin 2b") {
  QaoaAnsatz a;
  a.ising.n = 1;
  a.ising.h = Eigen::VectorXd::Constant(1, 1.0);
  a.p = 1;
  const auto table = energy_table(a.ising);
  Eigen::VectorXd params(2);
  params << std::numbers::pi / 4, std::numbers::pi / 4;
  CHECK(expectation(qaoa_state(a, params), table) == doctest::Approx(1.0).epsilon(1e-14));

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    params << angle(rng), angle(rng);
    const double want = std::sin(2 * params(0)) * std::sin(2 * params(1));
    CHECK(std::abs(expectation(qaoa_state(a, params), table) - want) < 1e-12);
  }
}

TEST_CASE("expectation") {
  std::mt19937_64 rng(5);
  const auto e = random_table(4, rng);
  CHECK(expectation(initial_state(4), e) == doctest::Approx(e.mean()).epsilon(1e-14));

  CVector basis = CVector::Zero(16);
  basis(11) = std::complex<double>(0, 1);
  CHECK(expectation(basis, e) == doctest::Approx(e(11)).epsilon(1e-15));

  const auto s = random_state(4, rng);
  double sum = 0.0;
  for (Eigen::Index z = 0; z < 16; ++z) sum += std::norm(s(z)) * e(z);
  CHECK(std::abs(expectation(s, e) - sum) < 1e-12);
}

TEST_CASE("sampling") {
  CVector basis = CVector::Zero(8);
  basis(5) = 1.0;
  const auto one = sample(basis, 100, 9);
  REQUIRE(one.size() == 1);
  CHECK(one.at(5) == 100);

  std::mt19937_64 rng(6);
  const auto s = random_state(5, rng);
  CHECK(sample(s, 1000, 42) == sample(s, 1000, 42));

  const int shots = 100000;
  const auto uniform = sample(initial_state(2), shots, 7);
  int total = 0;
  const double sigma = std::sqrt(shots * 0.25 * 0.75);
  for (BasisIndex z = 0; z < 4; ++z) {
    CHECK(std::abs(uniform.at(z) - shots / 4.0) < 5 * sigma);
    total += uniform.at(z);
  }
  CHECK(total == shots);
  CHECK_THROWS_AS(sample(basis, 0, 1), SimulationError);

  // Tail of zero-probability states is never drawn.
  CVector head = CVector::Zero(8);
  head(0) = head(1) = std::sqrt(0.5);
  for (const auto& [z, c] : sample(head, 5000, 3)) CHECK(z < 2);
}

TEST_CASE("feasible probability") {
  auto feasible = [](BasisIndex z) { return decode_index(z, 3).has_value(); };
  CHECK(feasible_probability(initial_state(4), feasible) == doctest::Approx(0.125).epsilon(1e-14));
  CVector basis = CVector::Zero(16);
  basis(0b1001) = 1.0;
  CHECK(feasible_probability(basis, feasible) == 1.0);
  basis.setZero();
  basis(0b0011) = 1.0;
  CHECK(feasible_probability(basis, feasible) == 0.0);
}

TEST_CASE("norm survives deep circuits") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int n = 1; n <= 12; n += 1) {
    const auto e = random_table(n, rng);
    CVector s = initial_state(n);
    for (int layer = 0; layer < 50; ++layer) {
      apply_cost_phase(s, e, angle(rng));
      apply_mixer(s, angle(rng));
      REQUIRE(std::abs(s.squaredNorm() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("expectation never drops below the ground energy") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 6;
    const int p = 1 + trial % 4;
    const auto e = random_table(n, rng);
    Eigen::VectorXd params(2 * p);
    for (Eigen::Index i = 0; i < params.size(); ++i) params(i) = angle(rng);
    const double v = expectation(qaoa_state<double>(e, p, params), e);
    CHECK(v >= e.minCoeff() - 1e-12);
    CHECK(v <= e.maxCoeff() + 1e-12);
  }
}

TEST_CASE("central differences agree with a Richardson estimate") {
  std::mt19937_64 rng(9);
  const auto e = random_table(4, rng);
  Eigen::VectorXd params(4);
  params << 0.3, -0.7, 0.5, 0.2;
  auto f = [&](const Eigen::VectorXd& x) { return expectation(qaoa_state<double>(e, 2, x), e); };
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    auto diff = [&](double h) {
      Eigen::VectorXd a = params, b = params;
      a(k) += h;
      b(k) -= h;
      return (f(a) - f(b)) / (2 * h);
    };
    const double coarse = diff(1e-3);
    const double richardson = (4.0 * diff(5e-4) - diff(1e-3)) / 3.0;
    CHECK(std::abs(coarse - richardson) < 1e-4 * std::max(1.0, std::abs(richardson)));
  }
}

TEST_CASE("single precision tracks double precision") {
  std::mt19937_64 rng(10);
  const auto e = random_table(5, rng);
  Eigen::VectorXd params(4);
  params << 0.2, 0.4, -0.3, 0.6;
  const auto d = qaoa_state<double>(e, 2, params);
  const auto f = qaoa_state<float>(Eigen::VectorXf(e.cast<float>()), 2, params);
  CHECK((d - f.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-4);
}
