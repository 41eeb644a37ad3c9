#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "semisic/operator.hpp"
#include "semisic/qubit.hpp"

using namespace semisic;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kParseError;
}

double povm_distance(const Povm& a, const Povm& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, oracle::max_abs(a[i] - b[i]));
  return m;
}

Povm conjugate(const Povm& p, const Operator& v) {
  Povm q{p.dim, {}};
  for (const auto& e : p.elements) q.elements.push_back(v * e * v.adjoint());
  return q;
}

}  // namespace

TEST_CASE("family point at b = 2/25") {
  const auto pt = family_point(2.0 / 25);
  CHECK(pt.r == doctest::Approx(1 / std::numbers::sqrt2).epsilon(1e-14));
  CHECK(std::cos(pt.theta) == doctest::Approx(1 / (2 * std::numbers::sqrt2)).epsilon(1e-14));
  CHECK(pt.params.a_minus == doctest::Approx(0.4));
}

TEST_CASE("family point at the SIC endpoint") {
  const auto pt = family_point(1.0 / 12);
  CHECK(pt.r == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(pt.theta == doctest::Approx(std::numbers::pi / 3).epsilon(1e-12));
}

TEST_CASE("family point range") {
  CHECK(code_of([] { family_point(1.0 / 16); }) == ErrorCode::kBOutOfFamilyRange);
  CHECK(code_of([] { family_point(0.05); }) == ErrorCode::kBOutOfFamilyRange);
  CHECK(code_of([] { family_point(0.0834); }) == ErrorCode::kBOutOfFamilyRange);
  try {
    family_point(0.0625);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("b must exceed 1/16") != std::string::npos);
  }
}

TEST_CASE("construct reproduces the b = 2/25 matrices") {
  const auto p = construct(2.0 / 25);
  CHECK(povm_distance(p, oracle::povm_2_25()) < 1e-12);
  const double traces[4] = {0.4, 0.4, 0.6, 0.6};
  for (int x = 0; x < 4; ++x) CHECK(std::abs(p[x].trace().real() - traces[x]) < 1e-12);
}

TEST_CASE("construct at the SIC endpoint") {
  const auto p = construct(1.0 / 12);
  for (int x = 0; x < 4; ++x) {
    CHECK(std::abs(p[x].trace().real() - 0.5) < 1e-12);
    for (int y = 0; y < 4; ++y)
      if (x != y) CHECK(std::abs(hs_inner(p[x], p[y]) - 1.0 / 12) < 1e-12);
  }
  CHECK(verify(p).classification == Classification::kSic);
}

TEST_CASE("construct at b = 0.07 round-trips through verify") {
  const auto r = verify(construct(0.07));
  CHECK(r.passed());
  CHECK(r.fitted_b == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("family coverage and overlap certificate") {
  for (int i = 1; i <= 200; ++i) {
    const double b = kQubitBMin + (kQubitBMax - kQubitBMin) * i / 200.0;
    const auto pt = family_point(b);
    const auto p = construct(pt);
    const auto r = verify(p);
    CHECK(r.classification == (i == 200 ? Classification::kSic : Classification::kStrictSemiSic));
    CHECK(r.max_violation < 1e-10);
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        if (x != y) CHECK(std::abs(hs_inner(p[x], p[y]) - b) < 1e-12);
    const double am = pt.params.a_minus, ap = pt.params.a_plus;
    CHECK(std::abs(p[0].trace().real() - am) < 1e-12);
    CHECK(std::abs(p[1].trace().real() - am) < 1e-12);
    CHECK(std::abs(p[2].trace().real() - ap) < 1e-12);
    CHECK(std::abs(p[3].trace().real() - ap) < 1e-12);
  }
}

TEST_CASE("r and theta decrease strictly across the family") {
  double prev_r = 2, prev_theta = 4;
  for (int i = 1; i <= 200; ++i) {
    const auto pt = family_point(kQubitBMin + (kQubitBMax - kQubitBMin) * i / 200.0);
    CHECK(pt.r < prev_r);
    CHECK(pt.theta < prev_theta);
    CHECK(pt.theta >= std::numbers::pi / 3 - 1e-12);
    CHECK(pt.theta < std::numbers::pi / 2);
    prev_r = pt.r;
    prev_theta = pt.theta;
  }
}

TEST_CASE("canonicalize an already canonical POVM") {
  const auto c = canonicalize(construct(2.0 / 25));
  CHECK((c.u - Operator::Identity(2, 2)).norm() < 1e-12);
  CHECK(c.b == doctest::Approx(2.0 / 25).epsilon(1e-12));
  CHECK(c.permutation == std::array<int, 4>{0, 1, 2, 3});
  CHECK(c.residual < 1e-12);
}

TEST_CASE("canonicalize recovers b after random unitary conjugation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double b = 0.0626 + 0.0207 * trial / 49.0;
    const auto ref = construct(b);
    const Operator v = oracle::random_unitary(2, rng);
    const auto c = canonicalize(conjugate(ref, v));
    CHECK(std::abs(c.b - b) < 1e-6);
    CHECK(povm_distance(c.canonical, ref) < 1e-9);
    const auto moved = conjugate(ref, v);
    for (int x = 0; x < 4; ++x)
      CHECK(oracle::max_abs(c.u.adjoint() * c.canonical[x] * c.u - moved[c.permutation[x]]) < 1e-9);
  }
}

TEST_CASE("canonicalize with reversed element order") {
  auto p = construct(2.0 / 25);
  std::reverse(p.elements.begin(), p.elements.end());
  const auto c = canonicalize(p);
  CHECK(povm_distance(c.canonical, construct(2.0 / 25)) < 1e-12);
  CHECK(c.permutation == std::array<int, 4>{3, 2, 1, 0});
}

TEST_CASE("canonicalize is idempotent") {
  std::mt19937_64 rng(9);
  for (double b : {0.07, 0.08, 1.0 / 12}) {
    const auto once = canonicalize(conjugate(construct(b), oracle::random_unitary(2, rng)));
    const auto twice = canonicalize(once.canonical);
    CHECK((twice.u - Operator::Identity(2, 2)).norm() < 1e-9);
    CHECK(povm_distance(twice.canonical, once.canonical) < 1e-9);
    CHECK(twice.permutation == std::array<int, 4>{0, 1, 2, 3});
  }
}

TEST_CASE("canonicalize the tetrahedron SIC") {
  const auto c = canonicalize(oracle::tetrahedron());
  CHECK(c.b == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(povm_distance(c.canonical, construct(1.0 / 12)) < 1e-9);
}

TEST_CASE("canonicalize rejects non semi-SICs") {
  auto p = oracle::povm_2_25();
  p.elements[0](0, 0) += 1e-3;
  CHECK(code_of([&] { canonicalize(p); }) == ErrorCode::kNotQubitSemiSic);
  CHECK(code_of([] { canonicalize(oracle::povm_from_vectors(oracle::hesse_sic_vectors())); }) ==
        ErrorCode::kNotQubitSemiSic);
}
