#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "gcme/fields.hpp"

using namespace gcme;

namespace {

std::array<double, 3> at(double x, double y, double t) { return {x, y, t}; }

double max_coeff_diff(const Field<CoeffTriple>& a, const Field<CoeffTriple>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST_CASE("grid validates shape and exposes axis slots") {
  CHECK_THROWS_AS(Grid(4, 0.1, {8, 8, 8}), DomainError);
  CHECK_THROWS_AS(Grid(2, 0.0, {8, 8, 8}), DomainError);
  CHECK_THROWS_AS(Grid(2, -0.1, {8, 8, 8}), DomainError);
  CHECK_THROWS_AS(Grid(3, 0.1, {8, 8, 4}), DomainError);

  const Grid g2(2, 0.5, {5, 7, 1}, {1.0, 2.0, 0.0});
  CHECK(g2.size() == 35);
  CHECK(g2.slot_of(Axis::X) == 0);
  CHECK(g2.slot_of(Axis::T) == 1);
  CHECK(g2.slot_of(Axis::Y) == -1);
  CHECK(g2.axis_of(1) == Axis::T);
  CHECK_FALSE(g2.has_axis(Axis::Y));

  const Grid g3(3, 0.25, {5, 6, 7});
  CHECK(g3.size() == 210);
  CHECK(g3.slot_of(Axis::Y) == 1);
  CHECK(g3.axis_of(2) == Axis::T);
}

TEST_CASE("grid flatten and unflatten are inverse and match iteration order") {
  const Grid g(3, 0.1, {5, 6, 7});
  std::size_t expected = 0;
  bool order_ok = true;
  g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    if (flat != expected++) order_ok = false;
    if (g.flatten(idx) != flat) order_ok = false;
    if (g.unflatten(flat) != idx) order_ok = false;
  });
  CHECK(order_ok);
  CHECK(expected == g.size());
}

TEST_CASE("grid positions use axis labels with y frozen at zero in 1+1") {
  const Grid g(2, 0.5, {5, 5, 1}, {1.0, 3.0, 0.0});
  const auto p = g.position({2, 4, 0});
  CHECK(p[static_cast<int>(Axis::X)] == 2.0);
  CHECK(p[static_cast<int>(Axis::Y)] == 0.0);
  CHECK(p[static_cast<int>(Axis::T)] == 5.0);

  CHECK_FALSE(g.interior({0, 2, 0}));
  CHECK_FALSE(g.interior({2, 4, 0}));
  CHECK(g.interior({2, 2, 0}));
}

TEST_CASE("expressions evaluate and differentiate exactly") {
  const Expr e = Expr::parse("sin(x)cos(t)");
  const auto p = at(0.3, 0.0, 0.7);
  CHECK(e.eval(p) == Catch::Approx(std::sin(0.3) * std::cos(0.7)).epsilon(1e-15));

  const Expr ex = e.derivative(Axis::X);
  const Expr et = e.derivative(Axis::T);
  CHECK(ex.eval(p) == Catch::Approx(std::cos(0.3) * std::cos(0.7)).epsilon(1e-15));
  CHECK(et.eval(p) == Catch::Approx(-std::sin(0.3) * std::sin(0.7)).epsilon(1e-15));

  const Expr q = Expr::parse("2*x^2 - 0.5*t + exp(2x)");
  CHECK(q.eval(p) ==
        Catch::Approx(2 * 0.09 - 0.35 + std::exp(0.6)).epsilon(1e-15));
  CHECK(q.derivative(Axis::X).eval(p) ==
        Catch::Approx(4 * 0.3 + 2 * std::exp(0.6)).epsilon(1e-15));
  CHECK(q.derivative(Axis::T).eval(p) == Catch::Approx(-0.5).epsilon(1e-15));
  CHECK(q.derivative(Axis::X).derivative(Axis::X).eval(p) ==
        Catch::Approx(4 + 4 * std::exp(0.6)).epsilon(1e-15));
  CHECK(q.derivative(Axis::Y).eval(p) == 0.0);

  CHECK(e.uses_axis(Axis::X));
  CHECK(e.uses_axis(Axis::T));
  CHECK_FALSE(e.uses_axis(Axis::Y));

  CHECK(Expr::parse("sin(2.5x)").derivative(Axis::X).eval(at(0.2, 0, 0)) ==
        Catch::Approx(2.5 * std::cos(0.5)).epsilon(1e-15));
}

TEST_CASE("expression parser rejects malformed input") {
  CHECK_THROWS_AS(Expr::parse("sin(q)"), ConfigError);
  CHECK_THROWS_AS(Expr::parse("sin(x"), ConfigError);
  CHECK_THROWS_AS(Expr::parse("x^-2"), ConfigError);
  CHECK_THROWS_AS(Expr::parse("x^1.5"), ConfigError);
  CHECK_THROWS_AS(Expr::parse("1 +"), ConfigError);
  CHECK_THROWS_AS(Expr::parse("foo(x)"), ConfigError);
  CHECK_THROWS_AS(Expr::parse(""), ConfigError);
  CHECK_THROWS_AS(Expr::parse("sin(x))"), ConfigError);
}

TEST_CASE("zero and constants scenarios") {
  const auto zero = make_scenario("zero", {});
  CHECK(zero->analytically_flat());
  CHECK(zero->coeff(Axis::T, at(0.4, 0.1, 0.9)).norm() == 0.0);

  const auto cs = make_scenario("constants", {{"k", "1"}, {"w3", "0.7"}});
  CHECK_FALSE(cs->analytically_flat());
  const CoeffTriple cx = cs->coeff(Axis::X, at(0.2, 0.0, 0.5));
  const CoeffTriple ct = cs->coeff(Axis::T, at(0.2, 0.0, 0.5));
  CHECK(cx[0] == 1.0);
  CHECK(cx[1] == 0.0);
  CHECK(cx[2] == 0.0);
  CHECK(ct[0] == 0.7);
  CHECK(cs->coeff_derivative(Axis::X, Axis::T, at(0.2, 0.0, 0.5)).norm() == 0.0);

  const auto with_m = make_scenario("constants", {{"m2", "0.5"}});
  CHECK_THROWS_AS(with_m->check_dim(2), ConfigError);
  CHECK_NOTHROW(with_m->check_dim(3));
  // Pattern order stores (m3, m2, m1) on the y axis.
  CHECK(with_m->coeff(Axis::Y, at(0, 0, 0))[1] == 0.5);
}

TEST_CASE("abelian scenario is the gradient of theta in one pattern component") {
  const auto sc = make_scenario("abelian", {{"theta", "sin(x)cos(t)"}});
  CHECK(sc->analytically_flat());
  const auto p = at(0.4, 0.0, 1.1);
  const CoeffTriple k = sc->coeff(Axis::X, p);
  const CoeffTriple w = sc->coeff(Axis::T, p);
  CHECK(k[0] == Catch::Approx(std::cos(0.4) * std::cos(1.1)).epsilon(1e-14));
  CHECK(k[1] == 0.0);
  CHECK(k[2] == 0.0);
  CHECK(w[0] == Catch::Approx(-std::sin(0.4) * std::sin(1.1)).epsilon(1e-14));
  CHECK(sc->coeff_derivative(Axis::X, Axis::T, p)[0] ==
        Catch::Approx(-std::cos(0.4) * std::sin(1.1)).epsilon(1e-14));

  const auto with_y = make_scenario("abelian", {{"theta", "sin(y)"}});
  CHECK_THROWS_AS(with_y->check_dim(2), ConfigError);
  CHECK_NOTHROW(with_y->check_dim(3));
}

TEST_CASE("pure-gauge scenario: constant x coefficient, conjugation orbit in t") {
  const auto sc = make_scenario(
      "pure-gauge", {{"gen_x", "1,0,0"}, {"gen_t", "0,0,1"}});
  CHECK(sc->analytically_flat());
  CHECK_NOTHROW(sc->check_dim(2));
  CHECK_THROWS_AS(sc->check_dim(3), ConfigError);

  for (double x : {0.0, 0.3, 1.2}) {
    const auto p = at(x, 0.0, 0.8);
    const CoeffTriple u = sc->coeff(Axis::X, p);
    CHECK((u - CoeffTriple(1, 0, 0)).norm() == 0.0);
    // Conjugation by expm(x X1) rotates coefficient space about the first
    // axis, so the t coefficient traces (0, -sin x, cos x).
    const CoeffTriple w = sc->coeff(Axis::T, p);
    CHECK(w[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(w[1] == Catch::Approx(-std::sin(x)).margin(1e-14));
    CHECK(w[2] == Catch::Approx(std::cos(x)).margin(1e-14));
  }

  // Commuting generators collapse the orbit to a constant.
  const auto ab = make_scenario(
      "pure-gauge", {{"gen_x", "1,0,0"}, {"gen_t", "2,0,0"}});
  const CoeffTriple w0 = ab->coeff(Axis::T, at(0.0, 0.0, 0.0));
  const CoeffTriple w1 = ab->coeff(Axis::T, at(0.9, 0.0, 0.4));
  CHECK((w0 - CoeffTriple(2, 0, 0)).norm() <= 1e-15);
  CHECK((w1 - w0).norm() <= 1e-15);

  CHECK_THROWS_AS(make_scenario("pure-gauge", {{"gen_x", "1,0,0"}}), ConfigError);
}

TEST_CASE("pure-gauge closed-form derivatives match finite differences") {
  const auto sc = make_scenario(
      "pure-gauge",
      {{"gen_x", "(0.8,0.1,-0.3)"}, {"gen_y", "(0.2,0.5,0.1)"}, {"gen_t", "(-0.4,0.3,0.6)"}});
  const Grid g(3, 0.02, {9, 9, 9}, {0.3, -0.2, 0.1});
  const ConnectionField conn = sample_connection(*sc, g);
  const ConnectionDerivatives der = sample_derivatives(*sc, g);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int w = 0; w < 3; ++w) {
      const Field<CoeffTriple> fd =
          partial_derivative(conn.axes[static_cast<std::size_t>(a)], g.axis_of(w));
      const Field<CoeffTriple>& exact = der.d[static_cast<std::size_t>(a)][static_cast<std::size_t>(w)];
      g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
        if (!g.interior(idx)) return;
        worst = std::max(worst, (fd[flat] - exact[flat]).norm());
      });
    }
  // Second-order stencil on fields with O(1) third derivatives at h = 0.02.
  CHECK(worst < 5e-4);
}

TEST_CASE("random smooth fields are reproducible and closed under derivatives") {
  const Grid g(2, 0.125, {9, 9, 1});
  const RandomSmoothScenario a(42, 1.0, 2);
  const RandomSmoothScenario b(42, 1.0, 2);
  const RandomSmoothScenario c(43, 1.0, 2);

  const ConnectionField fa = sample_connection(a, g);
  const ConnectionField fb = sample_connection(b, g);
  const ConnectionField fc = sample_connection(c, g);
  for (int s = 0; s < 2; ++s) {
    bool identical = true;
    for (std::size_t i = 0; i < fa.axes[s].size(); ++i)
      for (int q = 0; q < 3; ++q)
        if (fa.axes[s][i][q] != fb.axes[s][i][q]) identical = false;
    CHECK(identical);
  }
  CHECK(max_coeff_diff(fa.axes[0], fc.axes[0]) > 1e-3);

  const RandomSmoothScenario quiet(7, 0.0, 2);
  CHECK(quiet.coeff(Axis::X, at(0.3, 0.0, 0.6)).norm() == 0.0);

  // Closed-form derivative against a tight central difference.
  const auto p = at(0.37, 0.0, 0.61);
  const double h = 1e-5;
  for (Axis wrt : {Axis::X, Axis::T}) {
    auto lo = p, hi = p;
    lo[static_cast<int>(wrt)] -= h;
    hi[static_cast<int>(wrt)] += h;
    const CoeffTriple fd = (a.coeff(Axis::T, hi) - a.coeff(Axis::T, lo)) / (2 * h);
    const CoeffTriple ex = a.coeff_derivative(Axis::T, wrt, p);
    CHECK((fd - ex).norm() < 1e-6);
  }

  CHECK_THROWS_AS(RandomSmoothScenario(1, -1.0, 2), DomainError);
  CHECK_THROWS_AS(RandomSmoothScenario(1, 1.0, 9), DomainError);
}

TEST_CASE("scenario registry rejects unknown names and parameters") {
  CHECK_THROWS_AS(make_scenario("frobnicate", {}), ConfigError);
  CHECK_THROWS_AS(make_scenario("zero", {{"k", "1"}}), ConfigError);
  CHECK_THROWS_AS(make_scenario("constants", {{"q", "1"}}), ConfigError);
  CHECK_THROWS_AS(make_scenario("constants", {{"k", "1"}, {"k", "2"}}), ConfigError);
  CHECK_THROWS_AS(make_scenario("constants", {{"k", "abc"}}), ConfigError);
  CHECK_THROWS_AS(make_scenario("random-smooth", {{"seed", "-3"}}), ConfigError);
  CHECK_THROWS_AS(make_scenario("random-smooth", {{"bandwidth", "2.5"}}), ConfigError);
}

TEST_CASE("scenario spec strings parse the compact call form") {
  const auto cs = make_scenario_from_spec("constants(k=1, w3=0.7)");
  CHECK(cs->name() == "constants");
  CHECK(cs->coeff(Axis::T, at(0, 0, 0))[0] == 0.7);

  const auto pg = make_scenario_from_spec("pure-gauge(gen_x=(1,0,0), gen_t=(0,0,1))");
  CHECK(pg->name() == "pure-gauge");
  CHECK(pg->coeff(Axis::X, at(0, 0, 0))[0] == 1.0);

  CHECK(make_scenario_from_spec("  zero ")->name() == "zero");
  CHECK(make_scenario_from_spec("abelian")->params()[0].second == "sin(x)cos(t)");

  CHECK_THROWS_AS(make_scenario_from_spec("constants(k=1"), ConfigError);
  CHECK_THROWS_AS(make_scenario_from_spec("constants(k)"), ConfigError);
  CHECK_THROWS_AS(make_scenario_from_spec("constants(k=1,,w3=2)"), ConfigError);
  CHECK_THROWS_AS(make_scenario_from_spec(""), ConfigError);

  const auto echoed = scenario_description(*cs);
  CHECK(echoed.rfind("constants(", 0) == 0);
  CHECK(echoed.find("w3=") != std::string::npos);
}

TEST_CASE("partial derivative annihilates constants") {
  const Grid g(2, 0.1, {7, 7, 1});
  const Field<double> exact_const(g, 2.0);
  const Field<double> dx = partial_derivative(exact_const, Axis::X);
  for (std::size_t i = 0; i < dx.size(); ++i) CHECK(dx[i] == 0.0);

  const Field<double> awkward(g, 0.7);
  const Field<double> dt = partial_derivative(awkward, Axis::T);
  for (std::size_t i = 0; i < dt.size(); ++i) CHECK(std::abs(dt[i]) <= 1e-14);
}

TEST_CASE("partial derivative is exact on quadratics including boundaries") {
  const Grid g(2, 0.1, {11, 6, 1}, {0.0, 0.0, 0.0});
  const Field<double> f = make_field<double>(g, [](const std::array<int, 3>&,
                                                   const std::array<double, 3>& p) {
    const double x = p[static_cast<int>(Axis::X)];
    return x * x;
  });
  const Field<double> dfdx = partial_derivative(f, Axis::X);
  double worst = 0.0;
  g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    const double x = g.coord(0, idx[0]);
    worst = std::max(worst, std::abs(dfdx[flat] - 2.0 * x));
  });
  CHECK(worst <= 1e-13);
}

TEST_CASE("partial derivative converges at second order on sin") {
  auto max_err = [](double h, int n) {
    const Grid g(2, h, {n, 5, 1});
    const Field<double> f = make_field<double>(g, [](const std::array<int, 3>&,
                                                     const std::array<double, 3>& p) {
      return std::sin(p[static_cast<int>(Axis::X)]);
    });
    const Field<double> d = partial_derivative(f, Axis::X);
    double worst = 0.0;
    g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
      worst = std::max(worst, std::abs(d[flat] - std::cos(g.coord(0, idx[0]))));
    });
    return worst;
  };
  const double e1 = max_err(0.04, 26);
  const double e2 = max_err(0.02, 51);
  const double order = std::log2(e1 / e2);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("partial derivative rejects axes missing from the grid") {
  const Grid g(2, 0.1, {6, 6, 1});
  const Field<double> f(g, 1.0);
  CHECK_THROWS_AS(partial_derivative(f, Axis::Y), DomainError);
}

TEST_CASE("sampled connections carry finite triples on the grid axes only") {
  const Grid g2(2, 0.2, {6, 6, 1});
  ConnectionField cf(g2);
  CHECK(cf.axes.size() == 2);
  CHECK_THROWS_AS(cf.axis(Axis::Y), DomainError);
  CHECK_NOTHROW(cf.axis(Axis::T));
  CHECK_THROWS_AS(ConnectionField(g2, Rep::kSo3, 0), DomainError);

  const auto sc = make_scenario("abelian", {{"theta", "sin(y)"}});
  CHECK_THROWS_AS(sample_connection(*sc, g2), ConfigError);
}

TEST_CASE("make_pure_gauge produces the group path and its exact connection") {
  using namespace gcme::algebra;
  const Grid g(2, 0.25, {6, 6, 1});
  const Mat3 x1 = so3_basis(1);
  const Mat3 x2 = so3_basis(3);

  CHECK_THROWS_AS(make_pure_gauge<Mat3>({x1}, g), DomainError);

  const auto pg = make_pure_gauge<Mat3>({x1, x2}, g);
  // Group element at the origin is the identity; elsewhere it stays in the
  // group to roundoff.
  CHECK((pg.g.at({0, 0, 0}) - Mat3::Identity()).norm() <= 1e-15);
  g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    (void)idx;
    CHECK(group_defect(pg.g[flat]) <= 1e-13);
  });

  // Slot 0 connection is the constant first generator.
  g.for_each([&](const std::array<int, 3>&, std::size_t flat) {
    CHECK((pg.conn[0][flat] - x1).norm() <= 1e-14);
  });

  // The t-axis connection is the conjugated generator; its coefficients
  // match the scenario that computes the same orbit.
  const auto sc = make_scenario(
      "pure-gauge", {{"gen_x", "1,0,0"}, {"gen_t", "0,0,1"}});
  const ConnectionField coeffs = sample_connection(*sc, g);
  const MatrixBuilder<Mat3> build{+1};
  g.for_each([&](const std::array<int, 3>&, std::size_t flat) {
    const CoeffTriple got = build.extract(pg.conn[1][flat]);
    CHECK((got - coeffs.axes[1][flat]).norm() <= 1e-13);
  });
}

TEST_CASE("make_pure_gauge su2 path matches the so3 coefficients") {
  using namespace gcme::algebra;
  const Grid g(2, 0.2, {5, 5, 1});
  const std::vector<Mat2c> gens = {su2_basis(1), su2_basis(3)};
  const auto pg = make_pure_gauge<Mat2c>(gens, g);
  const auto pg3 = make_pure_gauge<Mat3>(
      std::vector<Mat3>{so3_basis(1), so3_basis(3)}, g);
  const MatrixBuilder<Mat2c> b2{Su2Prefactor::kIOver2};
  const MatrixBuilder<Mat3> b3{+1};
  double worst = 0.0;
  g.for_each([&](const std::array<int, 3>&, std::size_t flat) {
    for (int s = 0; s < 2; ++s)
      worst = std::max(worst, (b2.extract(pg.conn[s][flat]) -
                               b3.extract(pg3.conn[s][flat]))
                                  .norm());
  });
  CHECK(worst <= 1e-13);
}

TEST_CASE("connection CSV uses coordinate-then-named-coefficient columns") {
  const Grid g(2, 0.5, {5, 5, 1});
  const ConnectionField cf =
      sample_connection("constants(k=1, w3=0.7)", g);
  std::ostringstream os;
  write_connection_csv(os, cf);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == "x,t,k,sigma,tau,w1,w2,w3");
  REQUIRE(std::getline(is, line));
  const std::string want = "0,0,1,0,0,0,0," + format_double(0.7);
  CHECK(line == want);
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 25);

  const Grid g3(3, 0.5, {5, 5, 5});
  const ConnectionField cf3 = sample_connection("constants(m1=0.3)", g3);
  std::ostringstream os3;
  write_connection_csv(os3, cf3);
  std::istringstream is3(os3.str());
  REQUIRE(std::getline(is3, line));
  CHECK(line == "x,y,t,k,sigma,tau,m1,m2,m3,w1,w2,w3");
  REQUIRE(std::getline(is3, line));
  CHECK(line == "0,0,0,0,0,0," + format_double(0.3) + ",0,0,0,0,0");
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.5, 0.7, 1.0 / 3.0, -2.25e-7, 12345.6789}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}
