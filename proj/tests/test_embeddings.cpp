#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "gcme/embeddings.hpp"

using namespace gcme;
using gcme::algebra::so3_basis;

namespace {

template <class M>
double max_norm(const Field<M>& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, double(f[i].norm()));
  return m;
}

template <class M>
double max_diff(const Field<M>& a, const Field<M>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, double((a[i] - b[i]).norm()));
  return m;
}

template <class M>
double max_const_diff(const Field<M>& f, const M& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, double((f[i] - v).norm()));
  return m;
}

template <class M>
bool bitwise_equal(const Field<M>& a, const Field<M>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(M)) == 0;
}

template <class M>
std::array<Field<M>, 3> matrices_of(const ConnectionField& conn, const MatrixBuilder<M>& b) {
  auto v = connection_matrices(conn, b);
  return {std::move(v[0]), std::move(v[1]), std::move(v[2])};
}

}  // namespace

TEST_CASE("zero Higgs field reproduces the plain residuals bit for bit") {
  const Grid g(3, 0.2, {6, 6, 6});
  const auto scenario = make_scenario("random-smooth", {{"seed", "11"}});
  const auto [a, b, c] = matrices_of(sample_connection(*scenario, g), MatrixBuilder<Mat3>{+1});
  const Field<Mat3> phi0(g, Mat3::Zero());

  const auto y = ymhb_residual(a, b, c, phi0);
  const auto r = residual_2p1(a, b, c);
  for (int k = 0; k < 3; ++k)
    CHECK(bitwise_equal(y[std::size_t(k)], r[std::size_t(k)]));
}

TEST_CASE("constant Higgs and connection reduce to structure constants") {
  const Grid g(3, 0.2, {5, 5, 5});
  const Mat3 f1 = so3_basis(1), f2 = so3_basis(2), f3 = so3_basis(3);
  const Field<Mat3> zero(g, Mat3::Zero());
  const Field<Mat3> phi(g, f1);

  SECTION("Phi = F1, C = F2: only the first residual survives") {
    const auto y = ymhb_residual(zero, zero, Field<Mat3>(g, f2), phi);
    CHECK(max_const_diff(y[0], f3) <= 1e-15);
    CHECK(max_norm(y[1]) <= 1e-15);
    CHECK(max_norm(y[2]) <= 1e-15);
  }

  SECTION("constant Phi over a zero connection leaves nothing") {
    const auto y = ymhb_residual(zero, zero, zero, phi);
    for (const auto& f : y) CHECK(max_norm(f) == 0.0);
  }
}

TEST_CASE("covariant derivative degenerates as documented") {
  const Grid g(3, 0.2, {6, 6, 6});
  const MatrixBuilder<Mat3> b3{+1};
  const Field<Mat3> phi = sample_higgs(b3, g, 3);
  const Field<Mat3> zero(g, Mat3::Zero());

  SECTION("zero connection gives the plain derivative") {
    const Field<Mat3> d = covariant_derivative(phi, zero, Axis::Y);
    CHECK(max_diff(d, partial_derivative(phi, Axis::Y)) == 0.0);
  }

  SECTION("constant data gives the bare bracket") {
    const Mat3 f1 = so3_basis(1), f2 = so3_basis(2);
    const Field<Mat3> d =
        covariant_derivative(Field<Mat3>(g, f2), Field<Mat3>(g, f1), Axis::T);
    CHECK(max_const_diff(d, algebra::commutator(f1, f2)) <= 1e-15);
  }
}

TEST_CASE("covariant derivative annihilates transported constants") {
  // Phi = g Phi0 g^-1 over the pure-gauge path is covariantly constant for
  // the negated connection; the defect is pure stencil truncation.
  const Grid g(3, 0.05, {9, 9, 9});
  const Mat3 f1 = so3_basis(1), f2 = so3_basis(2), f3 = so3_basis(3);
  const auto pg = make_pure_gauge<Mat3>({f1, f2, f3}, g);
  const Mat3 phi0 = algebra::so3_from_coeffs(CoeffTriple(0.4, -0.3, 0.2));

  Field<Mat3> phi(g, Mat3::Zero());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = Mat3(pg.g[i] * phi0 * pg.g[i].transpose());

  const Axis axes[3] = {Axis::X, Axis::Y, Axis::T};
  for (int s = 0; s < 3; ++s) {
    Field<Mat3> neg(g, Mat3::Zero());
    for (std::size_t i = 0; i < neg.size(); ++i)
      neg[i] = Mat3(-pg.conn[std::size_t(s)][i]);
    CHECK(max_norm(covariant_derivative(phi, neg, axes[s])) <= 5e-3);
  }
}

TEST_CASE("Higgs pencils reduce to the flat pair at zero Higgs") {
  const Grid g(3, 0.2, {6, 6, 6});
  const auto scenario = make_scenario("random-smooth", {{"seed", "13"}});
  const auto [a, b, c] = matrices_of(sample_connection(*scenario, g), MatrixBuilder<Mat3>{+1});

  const auto with_phi = ymhb_pencils(a, b, c, Field<Mat3>(g, Mat3::Zero()));
  const auto plain = gcme_pencils(a, b, c);
  CHECK(max_diff(with_phi.first.pot0, plain.first.pot0) == 0.0);
  CHECK(max_diff(with_phi.first.pot1, plain.first.pot1) == 0.0);
  CHECK(max_diff(with_phi.second.pot0, plain.second.pot0) == 0.0);
  CHECK(max_diff(with_phi.second.pot1, plain.second.pot1) == 0.0);
  for (int ai = 0; ai < 3; ++ai) {
    CHECK(with_phi.first.dir[std::size_t(ai)].c0 == plain.first.dir[std::size_t(ai)].c0);
    CHECK(with_phi.second.dir[std::size_t(ai)].c1 == plain.second.dir[std::size_t(ai)].c1);
  }
}

TEST_CASE("Higgs pencil coefficients land on the sign-adjusted residuals") {
  const Grid g(3, 0.2, {6, 6, 6});
  const auto scenario = make_scenario("random-smooth", {{"seed", "13"}});
  const ConnectionField conn = sample_connection(*scenario, g);

  SECTION("3x3 representation") {
    const MatrixBuilder<Mat3> b3{+1};
    const auto [a, b, c] = matrices_of(conn, b3);
    const Field<Mat3> phi = sample_higgs(b3, g, 21, 0.8);
    const auto pair = ymhb_pencils(a, b, c, phi);
    const auto mapped = ymhb_coeffs_to_residuals(pencil_commutator_coeffs(pair.first, pair.second));
    const auto target = ymhb_pencil_targets(a, b, c, phi);
    for (int k = 0; k < 3; ++k)
      CHECK(max_diff(mapped[std::size_t(k)], target[std::size_t(k)]) <= 1e-12);
  }

  SECTION("2x2 representation") {
    const MatrixBuilder<Mat2c> b2{};
    const auto [a, b, c] = matrices_of(conn, b2);
    const Field<Mat2c> phi = sample_higgs(b2, g, 21, 0.8);
    const auto pair = ymhb_pencils(a, b, c, phi);
    const auto mapped = ymhb_coeffs_to_residuals(pencil_commutator_coeffs(pair.first, pair.second));
    const auto target = ymhb_pencil_targets(a, b, c, phi);
    for (int k = 0; k < 3; ++k)
      CHECK(max_diff(mapped[std::size_t(k)], target[std::size_t(k)]) <= 1e-12);
  }
}

TEST_CASE("reduction potentials follow the ansatz") {
  const Grid g(3, 0.2, {5, 5, 5});
  const Mat3 f1 = so3_basis(1), f2 = so3_basis(2);
  const Field<Mat3> zero(g, Mat3::Zero());
  const Complex i(0.0, 1.0);

  SECTION("time potential pair is the conjugate multiple of C") {
    const auto p = sdym_potentials(zero, zero, Field<Mat3>(g, f1));
    const Mat3c f1c = f1.cast<Complex>();
    CHECK(max_const_diff(p.a_alpha, Mat3c(-i * f1c)) == 0.0);
    CHECK(max_const_diff(p.a_alpha_bar, Mat3c(i * f1c)) == 0.0);
    CHECK(max_norm(p.a_beta) == 0.0);
  }

  SECTION("space potential pair combines A and B conjugately") {
    const auto p = sdym_potentials(Field<Mat3>(g, f1), Field<Mat3>(g, f2), zero);
    const Mat3c expect = f1.cast<Complex>() - i * f2.cast<Complex>();
    CHECK(max_const_diff(p.a_beta, expect) == 0.0);
    double worst = 0.0;
    for (std::size_t p_i = 0; p_i < p.a_beta.size(); ++p_i)
      worst = std::max(worst,
                       double((p.a_beta_bar[p_i] - p.a_beta[p_i].conjugate()).norm()));
    CHECK(worst == 0.0);
  }

  SECTION("zero connection gives zero potentials") {
    const auto p = sdym_potentials(zero, zero, zero);
    CHECK(max_norm(p.a_alpha) == 0.0);
    CHECK(max_norm(p.a_beta_bar) == 0.0);
  }
}

TEST_CASE("sdym curvature is antisymmetric and the time pair commutes") {
  const Grid g(3, 0.15, {6, 6, 6});
  const auto scenario = make_scenario("random-smooth", {{"seed", "17"}});
  const auto [a, b, c] = matrices_of(sample_connection(*scenario, g), MatrixBuilder<Mat3>{+1});
  const auto p = sdym_potentials(a, b, c);

  const auto f_ab = sdym_curvature(p, SdymDirection::kAlpha, SdymDirection::kBeta);
  const auto f_ba = sdym_curvature(p, SdymDirection::kBeta, SdymDirection::kAlpha);
  double worst = 0.0;
  for (std::size_t i = 0; i < f_ab.size(); ++i)
    worst = std::max(worst, double((f_ab[i] + f_ba[i]).norm()));
  CHECK(worst == 0.0);

  const auto f_aabar = sdym_curvature(p, SdymDirection::kAlpha, SdymDirection::kAlphaBar);
  CHECK(max_norm(f_aabar) == 0.0);

  CHECK_THROWS_AS(sdym_curvature(p, SdymDirection::kBeta, SdymDirection::kBeta), DomainError);
}

TEST_CASE("constant crossed connection collapses to the bracket term") {
  const Grid g(3, 0.2, {5, 5, 5});
  const Mat3 f1 = so3_basis(1), f2 = so3_basis(2), f3 = so3_basis(3);
  const Field<Mat3> zero(g, Mat3::Zero());
  const auto p = sdym_potentials(Field<Mat3>(g, f1), Field<Mat3>(g, f2), zero);

  const auto f_bbbar = sdym_curvature(p, SdymDirection::kBeta, SdymDirection::kBetaBar);
  const Complex i(0.0, 1.0);
  CHECK(max_const_diff(f_bbbar, Mat3c(-2.0 * i * f3.cast<Complex>())) <= 1e-15);

  const auto report =
      sdym_reduction_check(Field<Mat3>(g, f1), Field<Mat3>(g, f2), zero);
  CHECK(report.worst() <= 1e-14);
}

TEST_CASE("reduction identities hold on random fields in both representations") {
  const Grid g(3, 0.15, {6, 6, 6});
  const auto scenario = make_scenario("random-smooth", {{"seed", "19"}});
  const ConnectionField conn = sample_connection(*scenario, g);

  const auto [a3, b3, c3] = matrices_of(conn, MatrixBuilder<Mat3>{+1});
  const auto report3 = sdym_reduction_check(a3, b3, c3);
  CHECK(report3.worst() <= 1e-12);

  const auto [a2, b2, c2] = matrices_of(conn, MatrixBuilder<Mat2c>{});
  const auto report2 = sdym_reduction_check(a2, b2, c2);
  CHECK(report2.worst() <= 1e-12);

  SECTION("conjugate derivative map breaks the identities") {
    const auto wrong = sdym_reduction_check(a3, b3, c3, SdymMap::kAlphaPlusIT);
    CHECK(wrong.worst() > 0.01);
  }

  SECTION("flat connection keeps them at roundoff too") {
    const auto flat_scenario = make_scenario(
        "pure-gauge", {{"gen_x", "(1,0,0)"}, {"gen_y", "(0,1,0)"}, {"gen_t", "(0,0,1)"}});
    const auto [fa, fb, fc] =
        matrices_of(sample_connection(*flat_scenario, g), MatrixBuilder<Mat3>{+1});
    CHECK(sdym_reduction_check(fa, fb, fc).worst() <= 1e-12);
  }
}

TEST_CASE("reduction gate names the failing identity") {
  SdymReductionReport bad;
  bad.f_abar_bbar = 1.0;
  CHECK_THROWS_WITH(require_reduction(bad, 1e-6),
                    Catch::Matchers::ContainsSubstring("F_abar_bbar"));
  SdymReductionReport good;
  CHECK_NOTHROW(require_reduction(good, 1e-6));
}

TEST_CASE("constant conjugation moves through every residual map") {
  const Grid g(3, 0.2, {5, 5, 5});
  const auto scenario = make_scenario("random-smooth", {{"seed", "29"}});
  const MatrixBuilder<Mat3> b3{+1};
  const auto [a, b, c] = matrices_of(sample_connection(*scenario, g), b3);
  const Field<Mat3> phi = sample_higgs(b3, g, 31, 0.5);

  const Mat3 g0 = algebra::expm(algebra::so3_from_coeffs(CoeffTriple(0.3, -0.2, 0.5)));
  auto conjugated = [&](const Field<Mat3>& f) {
    Field<Mat3> out(g, Mat3::Zero());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = Mat3(g0 * f[i] * g0.transpose());
    return out;
  };

  const auto y = ymhb_residual(a, b, c, phi);
  const auto yc = ymhb_residual(conjugated(a), conjugated(b), conjugated(c), conjugated(phi));
  for (int k = 0; k < 3; ++k) {
    CHECK(max_diff(yc[std::size_t(k)], conjugated(y[std::size_t(k)])) <= 1e-12);
    const NormSet n = field_norms(y[std::size_t(k)]);
    const NormSet nc = field_norms(yc[std::size_t(k)]);
    CHECK(std::abs(n.max - nc.max) <= 1e-12);
    CHECK(std::abs(n.l2 - nc.l2) <= 1e-12);
  }
}
