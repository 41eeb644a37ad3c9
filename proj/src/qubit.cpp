#include "semisic/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>

#include "semisic/operator.hpp"

namespace semisic {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Dominant eigenvector of a rank-one PSD operator.
Ket leading_vector(const Operator& e, const Tolerances& tol) {
  const auto eig = eig_hermitian(e, tol);
  return eig.vectors.col(eig.vectors.cols() - 1);
}

struct Candidate {
  Canonicalization result;
  double distance_from_identity = 0;
};

std::optional<Candidate> try_candidate(const Povm& povm, int lead, int second, int rest_a, int rest_b,
                                       const QubitFamilyPoint& point, const Tolerances& tol) {
  const Ket u1 = leading_vector(povm[lead], tol);
  Ket u2(2);
  u2 << -std::conj(u1(1)), std::conj(u1(0));

  const Ket w = leading_vector(povm[second], tol);
  const Complex c1 = u1.dot(w);
  const Complex c2 = u2.dot(w);
  if (std::abs(c2) < 1e-12 || std::abs(c1) < 1e-12) return std::nullopt;
  const Complex phase = (c1 / std::abs(c1)) / (c2 / std::abs(c2));

  Operator u(2, 2);
  u.row(0) = u1.adjoint();
  u.row(1) = phase * u2.adjoint();
  const Complex tr = u.trace();
  if (std::abs(tr) > 1e-12) u *= std::conj(tr) / std::abs(tr);

  auto conj_by_u = [&](int x) -> Operator { return u * povm[x] * u.adjoint(); };

  // psi_3 carries |1> amplitude -sqrt(2/3) e^{+i theta}, i.e. negative imaginary part.
  auto phase_sign = [&](int x) {
    Ket v = leading_vector(conj_by_u(x), tol);
    if (std::abs(v(0)) > 0) v *= std::conj(v(0)) / std::abs(v(0));
    return v(1).imag();
  };
  const double sa = phase_sign(rest_a);
  const double sb = phase_sign(rest_b);
  if ((sa < 0) == (sb < 0)) return std::nullopt;
  const int third = sa < 0 ? rest_a : rest_b;
  const int fourth = sa < 0 ? rest_b : rest_a;

  Candidate c;
  c.result.u = u;
  c.result.b = point.b;
  c.result.permutation = {lead, second, third, fourth};
  c.result.canonical.dim = 2;
  const Povm reference = construct(point);
  for (int x = 0; x < 4; ++x) {
    c.result.canonical.elements.push_back(conj_by_u(c.result.permutation[x]));
    c.result.residual = std::max(
        c.result.residual, (c.result.canonical[x] - reference[x]).cwiseAbs().maxCoeff());
  }
  c.distance_from_identity = (u - Operator::Identity(2, 2)).norm();
  return c;
}

}  // namespace

QubitFamilyPoint family_point(double b) {
  if (!(b > kQubitBMin)) {
    throw Error(ErrorCode::kBOutOfFamilyRange,
                "b must exceed 1/16 (b = " + fmt(b) + " makes E_1 = E_2 and E_3 = E_4)");
  }
  if (!(b <= kQubitBMax)) {
    throw Error(ErrorCode::kBOutOfFamilyRange,
                "b must not exceed 1/12 (b = " + fmt(b) + " gives complex traces)");
  }
  QubitFamilyPoint p;
  p.b = b;
  p.params = make_params(2, b, 2);
  const double root = std::sqrt(std::max(0.0, 1 - 12 * b));
  p.r = 2 * std::sqrt(b) / (1 - root);
  const double cos_theta = std::sqrt(std::max(0.0, 1 - 8 * b - root)) / (4 * std::sqrt(b));
  p.theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
  return p;
}

std::array<Ket, 4> family_kets(const QubitFamilyPoint& point) {
  const Complex e_pos = std::polar(1.0, point.theta);
  const Complex e_neg = std::conj(e_pos);
  const double s = 1 / std::numbers::sqrt3;
  const double t = std::sqrt(2.0 / 3.0);
  std::array<Ket, 4> kets;
  for (auto& k : kets) k.resize(2);
  kets[0] << 1, 0;
  kets[1] << point.r, std::sqrt(std::max(0.0, 1 - point.r * point.r));
  kets[2] << s, -t * e_pos;
  kets[3] << s, -t * e_neg;
  return kets;
}

Povm construct(const QubitFamilyPoint& point) {
  const auto kets = family_kets(point);
  const double am = point.params.a_minus;
  const double ap = point.params.a_plus;
  Povm povm{2, {}};
  povm.elements.reserve(4);
  // outer() would reject the tiny normalization drift of r; the kets are unit by construction.
  for (int x = 0; x < 4; ++x) {
    povm.elements.push_back((x < 2 ? am : ap) * kets[x] * kets[x].adjoint());
  }
  return povm;
}

Povm construct(double b) { return construct(family_point(b)); }

Canonicalization canonicalize(const Povm& povm, const Tolerances& tol) {
  if (povm.dim != 2) throw Error(ErrorCode::kNotQubitSemiSic, "canonicalize: dimension must be 2");
  const auto report = verify(povm, tol);
  if (!report.passed()) {
    throw Error(ErrorCode::kNotQubitSemiSic, std::string("canonicalize: POVM verifies as ") +
                                                 to_string(report.classification));
  }
  double b = report.fitted_b;
  if (b > kQubitBMax && b - kQubitBMax <= std::max(tol.tol_overlap, report.max_violation)) b = kQubitBMax;
  const auto point = family_point(b);

  std::array<int, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return povm[x].trace().real() < povm[y].trace().real();
  });

  std::vector<std::pair<int, int>> leads;
  if (report.classification == Classification::kStrictSemiSic) {
    leads = {{order[0], order[1]}, {order[1], order[0]}};
  } else {
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        if (x != y) leads.emplace_back(x, y);
  }

  std::optional<Candidate> best;
  for (const auto& [lead, second] : leads) {
    std::array<int, 2> rest{};
    int n = 0;
    for (int x = 0; x < 4; ++x)
      if (x != lead && x != second) rest[n++] = x;
    auto c = try_candidate(povm, lead, second, rest[0], rest[1], point, tol);
    if (!c) continue;
    if (!best) {
      best = std::move(c);
      continue;
    }
    const double delta = c->distance_from_identity - best->distance_from_identity;
    if (delta < -1e-9 || (std::abs(delta) <= 1e-9 && c->result.permutation < best->result.permutation)) {
      best = std::move(c);
    }
  }

  const double accept = 1e4 * std::max(tol.tol_overlap, report.max_violation);
  if (!best || best->result.residual > accept) {
    throw Error(ErrorCode::kNotQubitSemiSic,
                "canonicalize: no unitary maps the POVM onto the family member at b = " + fmt(b));
  }
  return std::move(best->result);
}

}  // namespace semisic
