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

#include "test_support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <bit>

using namespace qpath;

namespace {

// Penalised one-hot objective written straight from its definition, one
// position pair at a time. Node k (1-based) is the k-th non-start local index.
double one_hot_energy(const TspInstance& t, double penalty, BasisIndex index) {
  const int m = t.size();
  const int k = m - 1;
  std::vector<int> others;
  for (int v = 0; v < m; ++v)
    if (v != t.start) others.push_back(v);
  auto x = [&](int node, int pos) -> double {  // node, pos in 0..k-1
    return static_cast<double>((index >> (node * k + pos)) & 1U);
  };
  double e = 0.0;
  for (int a = 0; a < k; ++a) {
    e += t.distances(t.start, others[a]) * x(a, 0);
    e += t.distances(others[a], t.start) * x(a, k - 1);
    for (int b = 0; b < k; ++b)
      for (int pos = 0; pos + 1 < k; ++pos) e += t.distances(others[a], others[b]) * x(a, pos) * x(b, pos + 1);
  }
  for (int pos = 0; pos < k; ++pos) {
    double s = 0.0;
    for (int a = 0; a < k; ++a) s += x(a, pos);
    e += penalty * (1.0 - s) * (1.0 - s);
  }
  for (int a = 0; a < k; ++a) {
    double s = 0.0;
    for (int pos = 0; pos < k; ++pos) s += x(a, pos);
    e += penalty * (1.0 - s) * (1.0 - s);
  }
  return e;
}

// Spin-sum evaluation, z = 1 - 2b.
double spin_energy(const IsingModel& im, BasisIndex index) {
  auto z = [&](int q) { return 1.0 - 2.0 * static_cast<double>((index >> q) & 1U); };
  double e = im.offset;
  for (int q = 0; q < im.n; ++q) e += im.h(q) * z(q);
  for (const auto& c : im.J) e += c.value * z(c.i) * z(c.j);
  return e;
}

// Every one-hot basis index of an m-node TSP, with the tour it encodes.
std::vector<std::pair<BasisIndex, std::vector<int>>> feasible_states(int m) {
  const int k = m - 1;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<BasisIndex, std::vector<int>>> out;
  do {
    BasisIndex idx = 0;
    std::vector<int> tour{0};
    for (int pos = 0; pos < k; ++pos) {
      idx |= BasisIndex{1} << (perm[pos] * k + pos);
      tour.push_back(perm[pos] + 1);
    }
    out.emplace_back(idx, tour);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Bisection mirroring the documented search, with feasibility judged by
// exhaustive evaluation of one_hot_energy.
double oracle_min_penalty(const TspInstance& t) {
  const int m = t.size();
  const int n = (m - 1) * (m - 1);
  const double optimum = testing::brute_force_tsp(t);
  auto ok = [&](double p) {
    std::vector<double> e(std::size_t{1} << n);
    for (BasisIndex z = 0; z < e.size(); ++z) e[z] = one_hot_energy(t, p, z);
    const double best = *std::min_element(e.begin(), e.end());
    std::vector<BasisIndex> argmins;
    for (BasisIndex z = 0; z < e.size(); ++z)
      if (e[z] - best <= 1e-9 * std::max(1.0, std::abs(best))) argmins.push_back(z);
    for (auto z : argmins) {
      bool feasible = false;
      for (const auto& [idx, tour] : feasible_states(m))
        if (idx == z) feasible = std::abs(testing::summed_length(t.distances, tour) - optimum) < 1e-9;
      if (!feasible) return false;
    }
    return true;
  };
  double hi = m * t.distances.maxCoeff();
  double lo = 0.0;
  REQUIRE(ok(hi));
  const double tol = 1e-3 * hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

IsingModel model(std::vector<double> h, std::vector<Coupling> j, double offset = 0.0) {
  IsingModel im;
  im.n = static_cast<int>(h.size());
  im.h = Eigen::Map<Eigen::VectorXd>(h.data(), im.n);
  im.J = std::move(j);
  im.offset = offset;
  return im;
}

IsingModel random_model(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  IsingModel im;
  im.n = n;
  im.h.resize(n);
  for (int q = 0; q < n; ++q) im.h(q) = g(rng);
  std::bernoulli_distribution keep(0.5);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (keep(rng)) im.J.push_back({i, j, g(rng)});
  im.offset = g(rng);
  return im;
}

Qubo raw_qubo(const Eigen::MatrixXd& upper, double offset) {
  Qubo q;
  q.coeffs = upper;
  q.offset = offset;
  return q;
}

}  // namespace

TEST_CASE("variable count is (m-1)^2") {
  CHECK(tsp_to_qubo(testing::random_tsp(4, 1), 1.0).nvars() == 9);
  CHECK(tsp_to_qubo(testing::random_tsp(3, 1), 1.0).nvars() == 4);
  CHECK(tsp_to_qubo(testing::random_tsp(2, 1), 1.0).nvars() == 1);
  CHECK_THROWS_AS(tsp_to_qubo(testing::random_tsp(1, 1), 1.0), EncodingError);
  CHECK_THROWS_AS(tsp_to_qubo(testing::random_tsp(3, 1), 0.0), EncodingError);
}

TEST_CASE("equilateral triangle at P=10: minimum 3 at the two feasible states") {
  const auto q = tsp_to_qubo(testing::equilateral_triangle(), 10.0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<BasisIndex> argmins;
  for (BasisIndex z = 0; z < 16; ++z) {
    const double e = testing::qubo_energy_loops(q.coeffs, q.offset, z);
    if (e < best - 1e-12) {
      best = e;
      argmins = {z};
    } else if (std::abs(e - best) < 1e-12) {
      argmins.push_back(z);
    }
  }
  CHECK(best == doctest::Approx(3.0));
  // bits 0 and 3 -> x(1,1), x(2,2); bits 1 and 2 -> x(1,2), x(2,1)
  CHECK(argmins == std::vector<BasisIndex>{0b0110, 0b1001});
}

TEST_CASE("QUBO matches the one-hot objective on every assignment") {
  for (int m = 2; m <= 5; ++m) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto t = testing::random_tsp(m, 40 + seed);
      t.start = static_cast<int>(seed % m);
      const double p = 3.0 + static_cast<double>(seed);
      const auto q = tsp_to_qubo(t, p);
      for (BasisIndex z = 0; z < (BasisIndex{1} << q.nvars()); ++z) {
        const double ref = one_hot_energy(t, p, z);
        CHECK(testing::qubo_energy_loops(q.coeffs, q.offset, z) == doctest::Approx(ref).epsilon(1e-12));
        CHECK(q.energy(z) == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("feasible assignments cost exactly the tour length (m <= 5)") {
  for (int m = 2; m <= 5; ++m) {
    const auto t = testing::random_tsp(m, 77 + m);
    const auto q = tsp_to_qubo(t, 12.5);
    for (const auto& [idx, tour] : feasible_states(m)) {
      CHECK(std::abs(q.energy(idx) - testing::summed_length(t.distances, tour)) < 1e-9);
      const auto decoded = decode_index(idx, m);
      REQUIRE(decoded.has_value());
      CHECK(decoded->order == tour);
    }
  }
}

TEST_CASE("qubo_to_ising hand examples") {
  Eigen::MatrixXd one(1, 1);
  one << 2;
  const auto a = qubo_to_ising(raw_qubo(one, 0.0));
  REQUIRE(a.n == 1);
  CHECK(a.h(0) == -1.0);
  CHECK(a.offset == 1.0);
  CHECK(a.J.empty());
  CHECK(ising_energy(a, 0) == 0.0);
  CHECK(ising_energy(a, 1) == 2.0);

  const auto zero = qubo_to_ising(raw_qubo(Eigen::MatrixXd::Zero(3, 3), 4.5));
  CHECK(zero.h.isZero());
  CHECK(zero.J.empty());
  CHECK(zero.offset == 4.5);

  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(2, 2);
  cross(0, 1) = 4;
  const auto c = qubo_to_ising(raw_qubo(cross, 0.0));
  REQUIRE(c.J.size() == 1);
  CHECK(c.J[0].i == 0);
  CHECK(c.J[0].j == 1);
  CHECK(c.J[0].value == 1.0);
  CHECK(c.h(0) == -1.0);
  CHECK(c.h(1) == -1.0);
  CHECK(c.offset == 1.0);
  for (BasisIndex z = 0; z < 4; ++z) CHECK(ising_energy(c, z) == (z == 3 ? 4.0 : 0.0));
}

TEST_CASE("conversion identity on random QUBOs up to 12 variables") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 12; ++n) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) q(i, j) = g(rng);
    const double offset = g(rng);
    const auto im = qubo_to_ising(raw_qubo(q, offset));
    const auto energies = diagonal_energies(im);
    for (BasisIndex z = 0; z < (BasisIndex{1} << n); ++z)
      CHECK(energies(static_cast<Eigen::Index>(z)) ==
            doctest::Approx(testing::qubo_energy_loops(q, offset, z)).epsilon(1e-12));
  }
}

TEST_CASE("ising_energy") {
  const auto im = model({-1.0}, {}, 1.0);
  CHECK(ising_energy(im, 0) == 0.0);
  CHECK(ising_energy(im, 1) == 2.0);
  CHECK_THROWS_AS(ising_energy(im, 2), EncodingError);

  std::mt19937_64 rng(8);
  const auto r = random_model(8, rng);
  for (BasisIndex z = 0; z < 256; ++z)
    CHECK(ising_energy(r, z) == doctest::Approx(spin_energy(r, z)).epsilon(1e-12));

  // Second route: random 8-variable QUBO, compare against the polynomial.
  std::normal_distribution<double> g;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = i; j < 8; ++j) q(i, j) = g(rng);
  const auto viaq = qubo_to_ising(raw_qubo(q, 0.25));
  for (BasisIndex z = 0; z < 256; ++z)
    CHECK(ising_energy(viaq, z) == doctest::Approx(testing::qubo_energy_loops(q, 0.25, z)).epsilon(1e-12));
}

TEST_CASE("find_min_penalty agrees with an independent bisection") {
  const auto tri = testing::equilateral_triangle();
  const EncodingConfig cfg;
  const double pmin = find_min_penalty(tri, cfg);
  const double oracle = oracle_min_penalty(tri);
  CHECK(std::abs(pmin - oracle) <= 1e-3 * 3.0);

  const auto im = qubo_to_ising(tsp_to_qubo(tri, 1.2 * pmin));
  const auto e = diagonal_energies(im);
  Eigen::Index arg = 0;
  e.minCoeff(&arg);
  const auto tour = decode_index(static_cast<BasisIndex>(arg), 3);
  REQUIRE(tour.has_value());
  CHECK(tour_length(tri, *tour) == doctest::Approx(3.0));

  for (std::uint64_t seed : {5u, 6u}) {
    const auto t = testing::random_tsp(4, seed);
    CHECK(std::abs(find_min_penalty(t, cfg) - oracle_min_penalty(t)) <= 1e-3 * 4.0 * t.distances.maxCoeff());
  }
}

TEST_CASE("P_min scales with the distances") {
  const EncodingConfig cfg;
  for (int m : {3, 4}) {
    const auto t = testing::random_tsp(m, 300 + m);
    auto big = t;
    big.distances *= 10.0;
    const double p = find_min_penalty(t, cfg);
    const double p10 = find_min_penalty(big, cfg);
    const double tol = 1e-3 * m * big.distances.maxCoeff();
    CHECK(std::abs(p10 - 10.0 * p) <= tol);
  }
}

TEST_CASE("P_min stays within a 2x band for m = 3, 4, 5 in the same box") {
  // Empirical property on one fixed point set; nested prefixes share the box.
  const auto five = testing::random_tsp(5, 11);
  std::vector<double> values;
  for (int m = 3; m <= 5; ++m) {
    std::vector<int> nodes(m);
    std::iota(nodes.begin(), nodes.end(), 0);
    TspInstance t;
    t.distances = five.distances.topLeftCorner(m, m);
    t.origin_labels = nodes;
    values.push_back(find_min_penalty(t, EncodingConfig{}));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  MESSAGE("P_min for m=3,4,5: " << values[0] << ", " << values[1] << ", " << values[2]);
  CHECK(*hi <= 2.0 * *lo);
}

TEST_CASE("ground state at 1.2 P_min is an optimal tour (m = 3, 4)") {
  for (int m : {3, 4}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto t = testing::random_tsp(m, 900 + seed);
      const double p = 1.2 * find_min_penalty(t, EncodingConfig{});
      const auto e = diagonal_energies(qubo_to_ising(tsp_to_qubo(t, p)));
      Eigen::Index arg = 0;
      e.minCoeff(&arg);
      const auto tour = decode_index(static_cast<BasisIndex>(arg), m);
      REQUIRE(tour.has_value());
      CHECK(tour_length(t, *tour) == doctest::Approx(solve_tsp_exact(t).length).epsilon(1e-12));
    }
  }
}

TEST_CASE("find_min_penalty errors") {
  CHECK_THROWS_AS(find_min_penalty(make_tsp(Eigen::MatrixXd::Zero(3, 3)), EncodingConfig{}), EncodingError);
  EncodingConfig small;
  small.qubit_cap = 8;
  CHECK_THROWS_AS(find_min_penalty(testing::random_tsp(4, 1), small), EncodingError);
}

TEST_CASE("bounding-box penalty") {
  EncodingConfig cfg;
  TspInstance t;
  t.coords = {{5, 2}, {0, 0}, {10, 4}, {3, 1}};
  t.distances = euclidean_distances(t.coords);
  CHECK(penalty_from_bbox(t, cfg) == 10.0);

  TspInstance pair;
  pair.coords = {{0, 0}, {3, 4}};
  pair.distances = euclidean_distances(pair.coords);
  CHECK(penalty_from_bbox(pair, cfg) == 5.0);

  cfg.bbox_factor = 2.0;
  TspInstance sq;
  sq.coords = {{1, 1}, {0, 0}, {3, 3}, {0, 3}};
  sq.distances = euclidean_distances(sq.coords);
  CHECK(penalty_from_bbox(sq, cfg) == 6.0);

  // No coordinates: the largest distance stands in for the side length.
  DistanceMatrix d(3, 3);
  d << 0, 2, 7, 2, 0, 4, 7, 4, 0;
  cfg.bbox_factor = 1.0;
  CHECK(penalty_from_bbox(make_tsp(d), cfg) == 7.0);
}

TEST_CASE("spectral widths") {
  const auto single = model({1.0}, {});
  CHECK(exact_spectral_width(single) == 2.0);
  CHECK(bound_spectral_width(single) == 2.0);

  const auto pair = model({1.0, 1.0}, {{0, 1, 1.0}});
  const auto e = diagonal_energies(pair);
  CHECK(e(0) == 3.0);
  CHECK(e(1) == -1.0);
  CHECK(e(2) == -1.0);
  CHECK(e(3) == -1.0);
  CHECK(exact_spectral_width(pair) == 4.0);
  CHECK(bound_spectral_width(pair) == 6.0);

  const auto zero = model({0.0, 0.0}, {});
  CHECK(exact_spectral_width(zero) == 0.0);
  CHECK(bound_spectral_width(zero) == 0.0);
  CHECK_THROWS_AS(scale_ising(zero, EncodingConfig{}), EncodingError);

  CHECK_THROWS_AS(exact_spectral_width(model(std::vector<double>(6, 1.0), {}), 5), EncodingError);
}

TEST_CASE("bound dominates the exact width (n <= 12)") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto im = random_model(1 + trial % 12, rng);
    const double exact = exact_spectral_width(im);
    CHECK(exact >= 0.0);
    CHECK(bound_spectral_width(im) >= exact - 1e-12);
  }
}

TEST_CASE("scale_ising") {
  EncodingConfig cfg;
  const auto single = scale_ising(model({1.0}, {}), cfg);
  CHECK(single.scale == 1.0);
  CHECK(single.h(0) == 1.0);

  const auto t = testing::random_tsp(4, 21);
  const auto im = qubo_to_ising(tsp_to_qubo(t, select_penalty(t, cfg)));
  REQUIRE(im.n == 9);
  const auto scaled = scale_ising(im, cfg);
  CHECK(std::abs(exact_spectral_width(scaled) - 18.0) < 1e-9);

  cfg.scaling_strategy = ScalingStrategy::GershgorinBound;
  cfg.calibration = 1.0;
  const auto gs = scale_ising(im, cfg);
  CHECK(exact_spectral_width(gs) <= 18.0 + 1e-9);
  CHECK(gs.scale == doctest::Approx(18.0 / bound_spectral_width(im)).epsilon(1e-15));

  cfg.scaling_strategy = ScalingStrategy::None;
  const auto none = scale_ising(im, cfg);
  CHECK(none.scale == 1.0);
  CHECK(none.h == im.h);
}

TEST_CASE("scaling multiplies every energy and keeps the argmin") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto im = random_model(2 + trial % 9, rng);
    const auto scaled = scale_ising(im, EncodingConfig{});
    const auto before = diagonal_energies(im);
    const auto after = diagonal_energies(scaled);
    for (Eigen::Index z = 0; z < before.size(); ++z)
      CHECK(after(z) == doctest::Approx(scaled.scale * before(z)).epsilon(1e-12));
    Eigen::Index a = 0, b = 0;
    before.minCoeff(&a);
    after.minCoeff(&b);
    CHECK(a == b);
  }
}

TEST_CASE("decode") {
  CHECK(decode_bits({1, 0, 0, 1}, 3)->order == std::vector<int>{0, 1, 2});
  CHECK(decode_bits({0, 1, 1, 0}, 3)->order == std::vector<int>{0, 2, 1});
  CHECK_FALSE(decode_bits({1, 1, 0, 0}, 3).has_value());
  CHECK_FALSE(decode_bits({0, 0, 0, 0}, 3).has_value());
  CHECK_FALSE(decode_bits({1, 0, 1, 0}, 3).has_value());
  CHECK(bits_of(0b1001, 4) == std::vector<std::uint8_t>{1, 0, 0, 1});
  // start elsewhere: non-start nodes are 0 and 2
  CHECK(decode_bits({1, 0, 0, 1}, 3, 1)->order == std::vector<int>{1, 0, 2});
}

TEST_CASE("distinct feasible states differ in at least four bits") {
  for (int m = 3; m <= 6; ++m) {
    const auto states = feasible_states(m);
    int closest = 1 << 20;
    for (std::size_t a = 0; a < states.size(); ++a)
      for (std::size_t b = a + 1; b < states.size(); ++b)
        closest = std::min(closest, std::popcount(states[a].first ^ states[b].first));
    CHECK(closest == 4);
  }
}

TEST_CASE("strategy names and config validation") {
  for (auto s : {PenaltyStrategy::ExactMinSearch, PenaltyStrategy::BoundingBox})
    CHECK(parse_penalty_strategy(to_string(s)) == s);
  for (auto s : {ScalingStrategy::ExactWidth, ScalingStrategy::GershgorinBound, ScalingStrategy::None})
    CHECK(parse_scaling_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_penalty_strategy("nope"), EncodingError);

  EncodingConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lambda = 1.0;
  CHECK_THROWS_AS(cfg.validate(), EncodingError);
  cfg = {};
  cfg.calibration = 0.0;
  CHECK_THROWS_AS(cfg.validate(), EncodingError);
  cfg = {};
  cfg.qubit_cap = 25;
  CHECK_THROWS_AS(cfg.validate(), EncodingError);
}

TEST_CASE("ising_to_json") {
  auto im = model({0.5, -1.0}, {{0, 1, 2.0}}, 3.0);
  im.penalty = 7.0;
  const auto doc = nlohmann::json::parse(ising_to_json(im));
  CHECK(doc["n"] == 2);
  CHECK(doc["h"] == nlohmann::json::array({0.5, -1.0}));
  CHECK(doc["J"][0]["value"] == 2.0);
  CHECK(doc["offset"] == 3.0);
  CHECK(doc["scale"] == 1.0);
  CHECK(doc["penalty"] == 7.0);
}
