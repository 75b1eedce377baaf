#pragma once

// Resolves the sign and prefactor choices numerically. Every combination in
// a small finite choice space is scored against four oracles: the su(2) to
// so(3) residual equivalence, the pencil-coefficient to residual map, the
// dressed linear system defect, and the SDYM/Higgs reduction identities.
// Exactly one combination must survive; none raises a failure with the full
// deviation table, several raise an ambiguity listing the survivors.

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gcme/algebra.hpp"
#include "gcme/core.hpp"
#include "gcme/curvature.hpp"
#include "gcme/embeddings.hpp"
#include "gcme/fields.hpp"
#include "gcme/grid.hpp"
#include "gcme/lax.hpp"
#include "gcme/scenarios.hpp"
#include "gcme/sign_convention.hpp"

namespace gcme {

struct ChoiceSpace {
  std::vector<algebra::Su2Prefactor> prefactors = {algebra::Su2Prefactor::kIOver2,
                                                   algebra::Su2Prefactor::kOneOver2i};
  std::vector<PencilBracket> brackets = {PencilBracket::kFlipped, PencilBracket::kDirect};
  std::vector<int> epsilons = {-1, +1};
  std::vector<SdymMap> maps = {SdymMap::kAlphaMinusIT, SdymMap::kAlphaPlusIT};

  static ChoiceSpace documented_default() {
    ChoiceSpace s;
    s.prefactors = {algebra::Su2Prefactor::kIOver2};
    s.brackets = {PencilBracket::kFlipped};
    s.epsilons = {-1};
    s.maps = {SdymMap::kAlphaMinusIT};
    return s;
  }
};

struct CalibrationTolerances {
  double equivalence = 1e-10;
  double pencil = 1e-10;
  double reduction = 1e-10;
  double dressing_scale = 2.0;  // dressing defect budget is this times h^2
};

struct CalibrationSetup {
  Grid oracle_grid = Grid(3, 0.1, {7, 7, 7});
  Grid dressing_grid = Grid(2, 0.05, {9, 9, 1});
  std::vector<std::string> scenarios = {
      "pure-gauge(gen_x=(0.8,0.1,-0.3),gen_y=(0.2,0.5,-0.1),gen_t=(-0.4,0.3,0.6))",
      "random-smooth(seed=5,amplitude=0.8,bandwidth=2)"};
  std::uint64_t higgs_seed = 101;
  double higgs_amplitude = 0.8;
  int higgs_bandwidth = 2;
  CalibrationTolerances tol;
};

struct CalibrationEntry {
  SignConvention convention;
  double equivalence = 0.0;
  double pencil = 0.0;
  double dressing = 0.0;
  double reduction = 0.0;
  bool pass = false;
};

struct CalibrationResult {
  SignConvention resolved;
  std::vector<CalibrationEntry> entries;  // fixed enumeration order
  double dressing_tolerance = 0.0;
};

namespace detail {

inline int prefactor_slot(algebra::Su2Prefactor p) {
  return p == algebra::Su2Prefactor::kIOver2 ? 0 : 1;
}
inline int bracket_slot(PencilBracket b) { return b == PencilBracket::kFlipped ? 0 : 1; }
inline int epsilon_slot(int eps) { return eps == -1 ? 0 : 1; }
inline int map_slot(SdymMap m) { return m == SdymMap::kAlphaMinusIT ? 0 : 1; }

template <class A, class B>
double max_triple_gap(const A& x, const B& y) {
  double worst = 0.0;
  for (int e = 0; e < 3; ++e)
    for (std::size_t i = 0; i < x[static_cast<std::size_t>(e)].size(); ++i)
      worst = std::max(worst, (x[static_cast<std::size_t>(e)][i] -
                               y[static_cast<std::size_t>(e)][i])
                                  .norm());
  return worst;
}

inline Mat3 diag3(double a, double b, double c) {
  Mat3 m = Mat3::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

/// Worst deviation per oracle, indexed by the choice that oracle can see.
struct OracleTable {
  std::array<double, 2> equivalence = {0.0, 0.0};  // by prefactor
  std::array<double, 2> pencil = {0.0, 0.0};       // by bracket
  std::array<double, 2> dressing = {0.0, 0.0};     // by epsilon
  std::array<double, 2> sdym = {0.0, 0.0};         // by map
  std::array<double, 2> higgs = {0.0, 0.0};        // by bracket
};

inline OracleTable run_oracles(const CalibrationSetup& setup) {
  OracleTable table;

  // Dressed linear system on a fixed flat rig; only the exponent sign can
  // make the printed defect small.
  {
    const Grid& dg = setup.dressing_grid;
    std::vector<Mat3> gens = {algebra::so3_from_coeffs(CoeffTriple(0.7, -0.4, 0.2), +1),
                              algebra::so3_from_coeffs(CoeffTriple(-0.3, 0.5, 0.6), +1)};
    if (dg.dim() == 3)
      gens.insert(gens.begin() + 1,
                  algebra::so3_from_coeffs(CoeffTriple(0.2, 0.4, -0.3), +1));
    const auto pg = make_pure_gauge<Mat3>(gens, dg);

    DressingSpec<Mat3> spec;
    spec.i_x = diag3(0.4, -0.1, -0.3);
    spec.i_t = diag3(-0.2, 0.5, -0.3);
    if (dg.dim() == 3) spec.i_y = diag3(0.1, -0.4, 0.2);
    for (const int eps : {-1, +1}) {
      spec.epsilon = eps;
      const Field<Mat3> psi = dress(pg.g, spec);
      double worst = 0.0;
      for (int s = 0; s < dg.dim(); ++s) {
        const Axis axis = dg.axis_of(s);
        worst = std::max(
            worst, field_norms(dressing_residual(psi, pg.conn[static_cast<std::size_t>(s)],
                                                 spec.exponent(axis), axis))
                       .max);
      }
      table.dressing[static_cast<std::size_t>(epsilon_slot(eps))] = worst;
    }
  }

  const MatrixBuilder<Mat3> build{+1};
  for (const std::string& spec : setup.scenarios) {
    const auto scenario = make_scenario_from_spec(spec);
    const ConnectionField conn = sample_connection(*scenario, setup.oracle_grid);

    for (const auto p :
         {algebra::Su2Prefactor::kIOver2, algebra::Su2Prefactor::kOneOver2i}) {
      auto& dst = table.equivalence[static_cast<std::size_t>(prefactor_slot(p))];
      dst = std::max(dst, equivalence_su2_so3(conn, p).deviation);
    }

    const auto mats = connection_matrices(conn, build);
    const auto pencils = gcme_pencils(conn, build);
    const auto mapped =
        coeffs_to_gcme(pencil_commutator_coeffs(pencils.first, pencils.second));
    for (const auto b : {PencilBracket::kFlipped, PencilBracket::kDirect}) {
      auto& dst = table.pencil[static_cast<std::size_t>(bracket_slot(b))];
      dst = std::max(dst, max_triple_gap(mapped, pencil_target_residuals(conn, build, b)));
    }

    const Field<Mat3> phi = sample_higgs(build, setup.oracle_grid, setup.higgs_seed,
                                         setup.higgs_amplitude, setup.higgs_bandwidth);
    const auto ypencils = ymhb_pencils(mats[0], mats[1], mats[2], phi);
    const auto ymapped = ymhb_coeffs_to_residuals(
        pencil_commutator_coeffs(ypencils.first, ypencils.second));
    table.higgs[0] = std::max(
        table.higgs[0],
        max_triple_gap(ymapped, ymhb_pencil_targets(mats[0], mats[1], mats[2], phi)));
    table.higgs[1] = std::max(
        table.higgs[1], max_triple_gap(ymapped, ymhb_residual(mats[0], mats[1], mats[2], phi)));

    for (const auto m : {SdymMap::kAlphaMinusIT, SdymMap::kAlphaPlusIT}) {
      auto& dst = table.sdym[static_cast<std::size_t>(map_slot(m))];
      dst = std::max(dst, sdym_reduction_check(mats[0], mats[1], mats[2], m).worst());
    }
  }
  return table;
}

inline std::string entry_line(const CalibrationEntry& e) {
  std::ostringstream os;
  os << "  " << e.convention.description() << ": equivalence=" << format_double(e.equivalence)
     << " pencil=" << format_double(e.pencil) << " dressing=" << format_double(e.dressing)
     << " reduction=" << format_double(e.reduction) << (e.pass ? " (pass)" : " (fail)");
  return os.str();
}

}  // namespace detail

inline CalibrationResult calibrate(const ChoiceSpace& space, const CalibrationSetup& setup) {
  if (space.prefactors.empty() || space.brackets.empty() || space.epsilons.empty() ||
      space.maps.empty())
    throw ConfigError("calibrate: empty choice space");
  for (const int eps : space.epsilons)
    if (eps != -1 && eps != +1)
      throw ConfigError("calibrate: dressing epsilon must be +1 or -1");
  const std::size_t combos = space.prefactors.size() * space.brackets.size() *
                             space.epsilons.size() * space.maps.size();
  if (combos > 64) throw ConfigError("calibrate: choice space exceeds 64 combinations");
  if (setup.scenarios.empty()) throw ConfigError("calibrate: no oracle scenarios");

  const detail::OracleTable table = detail::run_oracles(setup);
  const double dressing_tol =
      setup.tol.dressing_scale * setup.dressing_grid.spacing() * setup.dressing_grid.spacing();

  CalibrationResult result;
  result.dressing_tolerance = dressing_tol;
  for (const auto p : space.prefactors)
    for (const auto b : space.brackets)
      for (const int eps : space.epsilons)
        for (const auto m : space.maps) {
          SignConvention c;
          c.su2_prefactor = p;
          c.pencil_bracket = b;
          c.dressing_epsilon = eps;
          c.sdym_map = m;
          bool seen = false;  // repeated listings collapse to the first
          for (const auto& e : result.entries) seen |= e.convention.same_choices(c);
          if (seen) continue;

          CalibrationEntry e;
          e.convention = c;
          const auto pi = static_cast<std::size_t>(detail::prefactor_slot(p));
          const auto bi = static_cast<std::size_t>(detail::bracket_slot(b));
          const auto ei = static_cast<std::size_t>(detail::epsilon_slot(eps));
          const auto mi = static_cast<std::size_t>(detail::map_slot(m));
          e.equivalence = table.equivalence[pi];
          e.pencil = table.pencil[bi];
          e.dressing = table.dressing[ei];
          e.reduction = std::max(table.sdym[mi], table.higgs[bi]);
          e.pass = e.equivalence <= setup.tol.equivalence && e.pencil <= setup.tol.pencil &&
                   e.dressing <= dressing_tol && e.reduction <= setup.tol.reduction;
          result.entries.push_back(e);
        }

  std::vector<const CalibrationEntry*> passers;
  for (const auto& e : result.entries)
    if (e.pass) passers.push_back(&e);

  if (passers.empty()) {
    std::ostringstream os;
    os << "calibrate: no sign combination passes the oracles\n";
    for (const auto& e : result.entries) os << detail::entry_line(e) << "\n";
    throw CalibrationFailure(os.str());
  }
  if (passers.size() > 1) {
    std::ostringstream os;
    os << "calibrate: " << passers.size()
       << " sign combinations pass the oracles; add a non-flat oracle scenario\n";
    for (const auto* e : passers) os << detail::entry_line(*e) << "\n";
    throw CalibrationAmbiguity(os.str());
  }

  result.resolved = passers.front()->convention;
  result.resolved.run_id = convention_run_id(result.resolved.description());
  return result;
}

inline CalibrationResult calibrate() { return calibrate(ChoiceSpace{}, CalibrationSetup{}); }

}  // namespace gcme
