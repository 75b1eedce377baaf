#pragma once

// Command layer shared by the gcme executable and the test suite.  Each
// command is a pure function from RunConfig to a JSON report plus an exit
// code; execute() adds the timestamp block and writes the report file, so
// everything below it is deterministic for a fixed config and seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcme/calibration.hpp"
#include "gcme/config.hpp"
#include "gcme/curvature.hpp"
#include "gcme/embeddings.hpp"
#include "gcme/fields.hpp"
#include "gcme/lax.hpp"
#include "gcme/transport.hpp"

namespace gcme {

using Json = nlohmann::ordered_json;

// Exit codes reported by the executable.
inline constexpr int kExitPass = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTolerance = 3;
inline constexpr int kExitAmbiguous = 4;

struct ToleranceProfile {
  std::string name = "default";
  double flat = 1e-10;           // residual max for analytically flat fields
  double identity = 1e-10;       // algebraic identity deviations
  double sweep = 1e-12;          // lambda sweep vs coefficient interpolation
  double drift = 1e-12;          // transported frame orthogonality drift
  double flat_defect = 1e-8;     // holonomy defect around flat plaquettes
  double plaquette_rel = 0.15;   // relative gap, extrapolated defect vs residual
  double order_band = 0.8;       // allowed |order - 2| for the defect
  double radius_rel = 0.005;     // relative radius error for reconstructed circles
};

inline ToleranceProfile tolerance_profile(const std::string& name) {
  ToleranceProfile p;
  if (name == "default") return p;
  if (name == "strict") {
    p.name = "strict";
    p.flat = 1e-12;
    return p;
  }
  throw ConfigError("unknown tolerance profile '" + name + "' (expected default or strict)");
}

inline Json norms_json(const NormSet& n) {
  return Json{{"max", n.max},
              {"l2", n.l2},
              {"interiorMax", n.interior_max},
              {"interiorL2", n.interior_l2}};
}

inline Json convention_json(const SignConvention& c) {
  return Json{{"su2Prefactor", algebra::su2_prefactor_name(c.su2_prefactor)},
              {"pencilBracket", pencil_bracket_name(c.pencil_bracket)},
              {"dressingEpsilon", c.dressing_epsilon},
              {"sdymMap", sdym_map_name(c.sdym_map)},
              {"runId", c.run_id}};
}

inline SignConvention convention_from_json(const Json& j, const std::string& origin) {
  const auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("convention '" + origin + "': " + why);
  };
  if (!j.is_object()) throw fail("expected a JSON object");
  SignConvention c;
  try {
    c.su2_prefactor = parse_su2_prefactor(j.at("su2Prefactor").get<std::string>());
    c.pencil_bracket = parse_pencil_bracket(j.at("pencilBracket").get<std::string>());
    const int eps = j.at("dressingEpsilon").get<int>();
    if (eps != 1 && eps != -1) throw fail("dressingEpsilon must be +1 or -1");
    c.dressing_epsilon = eps;
    c.sdym_map = parse_sdym_map(j.at("sdymMap").get<std::string>());
    c.run_id = j.value("runId", std::string{});
  } catch (const Json::exception& e) {
    throw fail(e.what());
  } catch (const DomainError& e) {
    throw fail(e.what());
  }
  // run_id is provenance, not an input: a stale or hand-edited id still loads
  // and the identity checks decide whether the choices themselves hold up.
  return c;
}

inline SignConvention load_convention(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read convention file '" + path + "'");
  Json j;
  try {
    is >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("convention '" + path + "': " + e.what());
  }
  return convention_from_json(j, path);
}

inline void save_convention(const SignConvention& c, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write convention file '" + path + "'");
  Json j = Json{{"schemaVersion", 1}};
  const Json fields = convention_json(c);
  for (const auto& [key, value] : fields.items()) j[key] = value;
  os << j.dump(2) << "\n";
}

struct RunResult {
  int exit_code = kExitPass;
  Json report;
};

namespace detail {

// Accumulates named pass/fail rows; a command passes when every row does.
struct CheckTable {
  Json rows = Json::array();
  bool all_pass = true;

  void add(const std::string& name, double value, double tolerance) {
    const bool ok = value <= tolerance;
    rows.push_back(Json{{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", ok}});
    all_pass = all_pass && ok;
  }

  void add_flag(const std::string& name, bool ok) {
    rows.push_back(Json{{"name", name}, {"pass", ok}});
    all_pass = all_pass && ok;
  }
};

inline SignConvention resolve_convention(const RunConfig& cfg) {
  if (!cfg.convention_path.empty()) return load_convention(cfg.convention_path);
  SignConvention c;
  c.run_id = convention_run_id(c.description());
  return c;
}

inline Json grid_json(const Grid& g) {
  Json count = Json::array();
  Json origin = Json::array();
  for (int s = 0; s < 3; ++s) {
    count.push_back(g.count(s));
    origin.push_back(g.origin(s));
  }
  return Json{{"dim", g.dim()}, {"h", g.spacing()}, {"count", count}, {"origin", origin}};
}

inline Json scenario_json(const RunConfig& cfg, const Scenario& sc) {
  Json params = Json::object();
  for (const auto& [key, value] : sc.params()) params[key] = value;
  return Json{{"spec", cfg.scenario},
              {"name", sc.name()},
              {"params", params},
              {"seed", sc.seed()},
              {"rep", rep_name(cfg.rep)},
              {"beta", cfg.beta}};
}

inline Json base_report(const std::string& command, const RunConfig& cfg, const Scenario& sc,
                        const Grid& grid, const SignConvention& conv,
                        const ToleranceProfile& prof) {
  Json r;
  r["schemaVersion"] = 1;
  r["command"] = command;
  r["grid"] = grid_json(grid);
  r["scenario"] = scenario_json(cfg, sc);
  r["convention"] = convention_json(conv);
  r["toleranceProfile"] = prof.name;
  return r;
}

template <class M>
bool fields_bit_identical(const Field<M>& a, const Field<M>& b) {
  if (a.data().size() != b.data().size()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(M)) == 0;
}

inline void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "'");
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

struct PlaneSpec {
  Axis a = Axis::X;
  Axis b = Axis::Y;
  int residual_index = 0;  // index into the residual list for this plane
};

inline PlaneSpec parse_plane(const std::string& plane, int dim) {
  if (dim == 2) {
    if (plane == "xt") return {Axis::X, Axis::T, 0};
    throw ConfigError("plane '" + plane + "' is not available on a 1+1 grid (use xt)");
  }
  if (plane == "xy") return {Axis::X, Axis::Y, 0};
  if (plane == "xt") return {Axis::X, Axis::T, 1};
  if (plane == "yt") return {Axis::Y, Axis::T, 2};
  throw ConfigError("unknown plane '" + plane + "' (expected xy, xt, or yt)");
}

struct TransportNumbers {
  double defect = 0.0;
  double defect_half = 0.0;
  double drift = 0.0;
  double residual = 0.0;
};

template <class M, class Build>
TransportNumbers transport_study(const Scenario& sc, const RunConfig& cfg, const Grid& grid,
                                 const Build& build, const PlaneSpec& plane) {
  const TransportOptions opt{cfg.substeps, cfg.reproject};
  const auto loop_defect = [&](const Grid& g, const std::array<int, 3>& corner, double& drift) {
    const ConnectionField conn = sample_connection(sc, g, cfg.rep, cfg.beta);
    const auto mats = connection_matrices(conn, build);
    GridPath loop;
    loop.start = corner;
    loop.then(plane.a, 1).then(plane.b, 1).then(plane.a, -1).then(plane.b, -1);
    const auto r = propagate(mats, loop, opt);
    drift = r.drift;
    return (r.end - M::Identity()).norm();
  };

  TransportNumbers out;
  // Storage slots: (x, t) on 1+1 grids, (x, y, t) on 2+1 grids.
  std::array<int, 3> corner = {cfg.corner[0], cfg.corner[1], 0};
  if (grid.dim() == 3) corner[2] = cfg.corner[2];
  out.defect = loop_defect(grid, corner, out.drift);

  // Second pass at half spacing over the same physical box; the corner lands
  // on the doubled index, and the extrapolated defect/h^2 is compared against
  // the curvature residual at that same point.
  std::array<int, 3> fine_count = {1, 1, 1};
  std::array<double, 3> origin = {grid.origin(0), grid.origin(1), grid.origin(2)};
  for (int s = 0; s < 3; ++s)
    if (grid.count(s) > 1) fine_count[static_cast<std::size_t>(s)] = 2 * grid.count(s) - 1;
  const Grid fine(grid.dim(), grid.spacing() / 2.0, fine_count, origin);
  std::array<int, 3> fine_corner = {2 * corner[0], 2 * corner[1], 2 * corner[2]};
  double drift_half = 0.0;
  out.defect_half = loop_defect(fine, fine_corner, drift_half);

  const ConnectionField fine_conn = sample_connection(sc, fine, cfg.rep, cfg.beta);
  std::optional<ConnectionDerivatives> exact;
  if (cfg.exact_derivatives) exact = sample_derivatives(sc, fine);
  const auto residuals = gcme_residuals<M>(fine_conn, build, exact ? &*exact : nullptr);
  const std::size_t idx = grid.dim() == 2 ? 0 : static_cast<std::size_t>(plane.residual_index);
  out.residual = residuals[idx].at(fine_corner).norm();
  return out;
}

inline std::string iso_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace detail

inline RunResult run_check(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  const auto scenario = make_scenario_from_spec(cfg.scenario);
  const SignConvention conv = detail::resolve_convention(cfg);
  const ToleranceProfile prof = tolerance_profile(cfg.tolerance_profile);

  const ConnectionField conn = sample_connection(*scenario, grid, cfg.rep, cfg.beta);
  std::optional<ConnectionDerivatives> exact;
  if (cfg.exact_derivatives) exact = sample_derivatives(*scenario, grid);
  const ConnectionDerivatives* ex = exact ? &*exact : nullptr;

  Json report = detail::base_report("check", cfg, *scenario, grid, conv, prof);
  Json residuals = Json::object();
  detail::CheckTable checks;
  double worst_flat = 0.0;
  const auto add_entry = [&](const std::string& label, const NormSet& n) {
    residuals[label] = norms_json(n);
    worst_flat = std::max(worst_flat, n.interior_max);
  };

  const MatrixBuilder<Mat3> build3{cfg.beta};
  if (grid.dim() == 2) {
    const auto res3 = gcme_residuals<Mat3>(conn, build3, ex);
    add_entry("7", field_norms(res3[0]));
    // The three scalar equations sit inside the matrix residual; pattern
    // order (c1, c2, c3) carries (r1, r3, r2).
    std::array<Field<double>, 3> comp = {Field<double>(grid, 0.0), Field<double>(grid, 0.0),
                                         Field<double>(grid, 0.0)};
    for (std::size_t i = 0; i < res3[0].data().size(); ++i) {
      const CoeffTriple c = build3.extract(res3[0].data()[i]);
      comp[0].data()[i] = c[0];
      comp[1].data()[i] = c[2];
      comp[2].data()[i] = c[1];
    }
    add_entry("8a", field_norms(comp[0]));
    add_entry("8b", field_norms(comp[1]));
    add_entry("8c", field_norms(comp[2]));
    if (cfg.beta == 1) {
      const auto res2 = gcme_residuals<Mat2c>(conn, MatrixBuilder<Mat2c>{conv.su2_prefactor}, ex);
      add_entry("11", field_norms(res2[0]));
    }
  } else {
    const auto res3 = gcme_residuals<Mat3>(conn, build3, ex);
    add_entry("13a", field_norms(res3[0]));
    add_entry("13b", field_norms(res3[1]));
    add_entry("13c", field_norms(res3[2]));
  }
  if (cfg.beta == 1) {
    const EquivalenceResult eq = equivalence_su2_so3(conn, conv.su2_prefactor, ex);
    checks.add("representation_equivalence", eq.deviation, prof.identity);
  }
  if (scenario->analytically_flat()) checks.add("flat_residual", worst_flat, prof.flat);

  report["results"] = Json{{"residuals", residuals}};
  report["checks"] = checks.rows;
  report["pass"] = checks.all_pass;
  return {checks.all_pass ? kExitPass : kExitTolerance, report};
}

inline RunResult run_lax(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  if (grid.dim() != 3) throw ConfigError("lax: the operator pencils need a 2+1 grid (dim = 3)");
  const auto scenario = make_scenario_from_spec(cfg.scenario);
  const SignConvention conv = detail::resolve_convention(cfg);
  const ToleranceProfile prof = tolerance_profile(cfg.tolerance_profile);

  const ConnectionField conn = sample_connection(*scenario, grid, cfg.rep, cfg.beta);
  std::optional<ConnectionDerivatives> exact;
  if (cfg.exact_derivatives) exact = sample_derivatives(*scenario, grid);
  const ConnectionDerivatives* ex = exact ? &*exact : nullptr;

  if (cfg.lambdas.size() != 3)
    throw ConfigError("lax: the lambda sweep needs exactly three values");
  const std::array<double, 3> lambdas = {cfg.lambdas[0], cfg.lambdas[1], cfg.lambdas[2]};

  const MatrixBuilder<Mat3> build{cfg.beta};
  const auto pencils = gcme_pencils(conn, build, ex);
  const auto coeffs = pencil_commutator_coeffs(pencils.first, pencils.second);
  const auto swept = sweep_commutator_coeffs(pencils.first, pencils.second, lambdas);
  const double sweep_dev = detail::max_triple_gap(coeffs, swept);
  const auto mapped = coeffs_to_gcme(coeffs);
  const auto targets = pencil_target_residuals(conn, build, conv.pencil_bracket, ex);
  const double map_dev = detail::max_triple_gap(mapped, targets);

  Json report = detail::base_report("lax", cfg, *scenario, grid, conv, prof);
  Json coeff_norms = Json::object();
  coeff_norms["lambda0"] = norms_json(field_norms(coeffs[0]));
  coeff_norms["lambda1"] = norms_json(field_norms(coeffs[1]));
  coeff_norms["lambda2"] = norms_json(field_norms(coeffs[2]));
  report["results"] = Json{{"coefficients", coeff_norms},
                           {"lambdas", cfg.lambdas},
                           {"mapDeviation", map_dev},
                           {"sweepDeviation", sweep_dev}};
  detail::CheckTable checks;
  checks.add("coefficient_map", map_dev, prof.identity);
  checks.add("lambda_sweep", sweep_dev, prof.sweep);
  report["checks"] = checks.rows;
  report["pass"] = checks.all_pass;
  return {checks.all_pass ? kExitPass : kExitTolerance, report};
}

inline RunResult run_embed_ymhb(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  if (grid.dim() != 3) throw ConfigError("embed-ymhb: needs a 2+1 grid (dim = 3)");
  const auto scenario = make_scenario_from_spec(cfg.scenario);
  const SignConvention conv = detail::resolve_convention(cfg);
  const ToleranceProfile prof = tolerance_profile(cfg.tolerance_profile);

  const ConnectionField conn = sample_connection(*scenario, grid, cfg.rep, cfg.beta);
  const MatrixBuilder<Mat3> build{cfg.beta};
  const auto mats = connection_matrices(conn, build);
  const Field<Mat3> phi =
      sample_higgs(build, grid, cfg.higgs_seed, cfg.higgs_amplitude, cfg.higgs_bandwidth);

  const auto direct = ymhb_residual(mats[0], mats[1], mats[2], phi);
  const auto pencils = ymhb_pencils(mats[0], mats[1], mats[2], phi);
  const auto coeffs = pencil_commutator_coeffs(pencils.first, pencils.second);
  const auto mapped = ymhb_coeffs_to_residuals(coeffs);
  const auto targets = conv.pencil_bracket == PencilBracket::kFlipped
                           ? ymhb_pencil_targets(mats[0], mats[1], mats[2], phi)
                           : direct;
  const double map_dev = detail::max_triple_gap(mapped, targets);

  const Field<Mat3> phi0(grid, Mat3::Zero());
  const auto with_zero = ymhb_residual(mats[0], mats[1], mats[2], phi0);
  const auto curvature_only = residual_2p1(mats[0], mats[1], mats[2]);
  bool bit_identical = true;
  for (std::size_t k = 0; k < 3; ++k)
    bit_identical = bit_identical && detail::fields_bit_identical(with_zero[k], curvature_only[k]);

  Json report = detail::base_report("embed-ymhb", cfg, *scenario, grid, conv, prof);
  Json res = Json::object();
  res["y1"] = norms_json(field_norms(direct[0]));
  res["y2"] = norms_json(field_norms(direct[1]));
  res["y3"] = norms_json(field_norms(direct[2]));
  report["results"] = Json{{"residuals", res},
                           {"higgsSeed", cfg.higgs_seed},
                           {"mapDeviation", map_dev},
                           {"phiZeroBitIdentical", bit_identical}};
  detail::CheckTable checks;
  checks.add("coefficient_map", map_dev, prof.identity);
  checks.add_flag("phi_zero_bit_identical", bit_identical);
  report["checks"] = checks.rows;
  report["pass"] = checks.all_pass;
  return {checks.all_pass ? kExitPass : kExitTolerance, report};
}

inline RunResult run_embed_sdym(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  if (grid.dim() != 3) throw ConfigError("embed-sdym: needs a 2+1 grid (dim = 3)");
  const auto scenario = make_scenario_from_spec(cfg.scenario);
  const SignConvention conv = detail::resolve_convention(cfg);
  const ToleranceProfile prof = tolerance_profile(cfg.tolerance_profile);

  const ConnectionField conn = sample_connection(*scenario, grid, cfg.rep, cfg.beta);
  const auto reduction = [&](const auto& build) {
    const auto mats = connection_matrices(conn, build);
    return sdym_reduction_check(mats[0], mats[1], mats[2], conv.sdym_map);
  };
  const SdymReductionReport sdym = cfg.rep == Rep::kSu2
                                       ? reduction(MatrixBuilder<Mat2c>{conv.su2_prefactor})
                                       : reduction(MatrixBuilder<Mat3>{cfg.beta});

  const double tol =
      scenario->analytically_flat() ? std::min(prof.flat, prof.identity) : prof.identity;
  Json report = detail::base_report("embed-sdym", cfg, *scenario, grid, conv, prof);
  report["results"] = Json{{"F_ab", sdym.f_ab}, {"F_abar_bbar", sdym.f_abar_bbar},
                           {"F_trace", sdym.f_trace}};
  detail::CheckTable checks;
  checks.add("F_ab", sdym.f_ab, tol);
  checks.add("F_abar_bbar", sdym.f_abar_bbar, tol);
  checks.add("F_trace", sdym.f_trace, tol);
  report["checks"] = checks.rows;
  report["pass"] = checks.all_pass;
  return {checks.all_pass ? kExitPass : kExitTolerance, report};
}

inline RunResult run_transport(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  const auto scenario = make_scenario_from_spec(cfg.scenario);
  const SignConvention conv = detail::resolve_convention(cfg);
  const ToleranceProfile prof = tolerance_profile(cfg.tolerance_profile);
  const detail::PlaneSpec plane = detail::parse_plane(cfg.plane, grid.dim());

  const detail::TransportNumbers num =
      cfg.rep == Rep::kSu2
          ? detail::transport_study<Mat2c>(*scenario, cfg, grid,
                                           MatrixBuilder<Mat2c>{conv.su2_prefactor}, plane)
          : detail::transport_study<Mat3>(*scenario, cfg, grid, MatrixBuilder<Mat3>{cfg.beta},
                                          plane);

  const double h = grid.spacing();
  const double q = num.defect / (h * h);
  const double q_half = num.defect_half / (h * h / 4.0);
  const double q_extrap = 2.0 * q_half - q;
  const double order = std::log2(num.defect / num.defect_half);

  Json report = detail::base_report("transport", cfg, *scenario, grid, conv, prof);
  report["results"] = Json{{"plane", cfg.plane},
                           {"corner", cfg.corner},
                           {"defect", num.defect},
                           {"defectHalf", num.defect_half},
                           {"defectPerH2", q},
                           {"defectPerH2Extrapolated", q_extrap},
                           {"residualNorm", num.residual},
                           {"order", order},
                           {"drift", num.drift},
                           {"substeps", cfg.substeps},
                           {"reproject", cfg.reproject}};
  detail::CheckTable checks;
  if (scenario->analytically_flat()) {
    checks.add("flat_defect", num.defect, prof.flat_defect);
  } else {
    checks.add("plaquette_consistency", std::abs(q_extrap - num.residual) / num.residual,
               prof.plaquette_rel);
    checks.add("defect_order", std::abs(order - 2.0), prof.order_band);
  }
  if (cfg.reproject) checks.add("frame_drift", num.drift, prof.drift);
  report["checks"] = checks.rows;
  report["pass"] = checks.all_pass;
  return {checks.all_pass ? kExitPass : kExitTolerance, report};
}

inline RunResult run_reconstruct(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  if (grid.dim() != 2) throw ConfigError("reconstruct: needs a 1+1 grid (dim = 2)");
  if (cfg.rep != Rep::kSo3 || cfg.beta != 1)
    throw ConfigError("reconstruct: the moving frame needs rep = so3 with beta = +1");
  const auto scenario = make_scenario_from_spec(cfg.scenario);
  const SignConvention conv = detail::resolve_convention(cfg);
  const ToleranceProfile prof = tolerance_profile(cfg.tolerance_profile);

  const ConnectionField conn = sample_connection(*scenario, grid, cfg.rep, cfg.beta);
  const auto mats = connection_matrices(conn, MatrixBuilder<Mat3>{1});
  const TransportOptions opt{cfg.substeps, cfg.reproject};

  CurveFamily family;
  double worst_drift = 0.0;
  double worst_radius = 0.0;
  const int nx = grid.count(0);
  const int nt = grid.count(1);  // t occupies slot 1 on a 1+1 grid
  for (int ti = 0; ti < nt; ++ti) {
    const GridPath path = GridPath::line({0, ti, 0}, Axis::X, nx - 1);
    const auto states = propagate_states(mats, path, opt);
    for (const auto& g : states) worst_drift = std::max(worst_drift, algebra::group_defect(g));
    const auto curve = reconstruct_curve(tangent_rows(states), grid.spacing(), cfg.sqrt_e);
    if (cfg.expected_radius) {
      for (const auto& p : curve) {
        const double dist = (p - Vec3(cfg.expected_center[0], cfg.expected_center[1],
                                      cfg.expected_center[2]))
                                .norm();
        worst_radius =
            std::max(worst_radius, std::abs(dist - *cfg.expected_radius) / *cfg.expected_radius);
      }
    }
    family.t_values.push_back(grid.coord(1, ti));
    family.curves.push_back(curve);
  }

  detail::ensure_out_dir(cfg);
  const std::string csv_path = detail::out_path(cfg, "curves.csv");
  const std::string obj_path = detail::out_path(cfg, "curves.obj");
  {
    std::ofstream os(csv_path);
    if (!os) throw ConfigError("cannot write '" + csv_path + "'");
    write_curves_csv(os, family);
  }
  {
    std::ofstream os(obj_path);
    if (!os) throw ConfigError("cannot write '" + obj_path + "'");
    write_curves_obj(os, family);
  }

  Json report = detail::base_report("reconstruct", cfg, *scenario, grid, conv, prof);
  Json results = Json{{"slices", nt},
                      {"pointsPerSlice", nx},
                      {"maxDrift", worst_drift},
                      {"csv", "curves.csv"},
                      {"obj", "curves.obj"}};
  detail::CheckTable checks;
  if (cfg.expected_radius) {
    results["radiusError"] = worst_radius;
    checks.add("radius_error", worst_radius, prof.radius_rel);
  }
  if (cfg.reproject) checks.add("frame_drift", worst_drift, prof.drift);
  report["results"] = results;
  report["checks"] = checks.rows;
  report["pass"] = checks.all_pass;
  return {checks.all_pass ? kExitPass : kExitTolerance, report};
}

inline RunResult run_gen(const RunConfig& cfg) {
  const Grid grid = cfg.make_grid();
  const auto scenario = make_scenario_from_spec(cfg.scenario);
  const SignConvention conv = detail::resolve_convention(cfg);
  const ToleranceProfile prof = tolerance_profile(cfg.tolerance_profile);

  const ConnectionField conn = sample_connection(*scenario, grid, cfg.rep, cfg.beta);
  detail::ensure_out_dir(cfg);
  const std::string csv_path = detail::out_path(cfg, "connection.csv");
  std::ofstream os(csv_path);
  if (!os) throw ConfigError("cannot write '" + csv_path + "'");
  write_connection_csv(os, conn);

  Json report = detail::base_report("gen", cfg, *scenario, grid, conv, prof);
  report["results"] = Json{{"csv", "connection.csv"}, {"points", grid.size()}};
  report["checks"] = Json::array();
  report["pass"] = true;
  return {kExitPass, report};
}

inline RunResult run_calibrate(const RunConfig& cfg) {
  CalibrationSetup setup;
  if (!cfg.oracles.empty()) {
    setup.scenarios.clear();
    for (const auto& spec : detail::split(cfg.oracles, ';')) {
      const std::string t = detail::trimmed(spec);
      if (!t.empty()) setup.scenarios.push_back(t);
    }
    if (setup.scenarios.empty())
      throw ConfigError("calibrate: oracles override does not name any scenario");
  }

  Json report;
  report["schemaVersion"] = 1;
  report["command"] = "calibrate";
  report["oracles"] = setup.scenarios;
  const auto finish = [&](int code) { return RunResult{code, report}; };
  try {
    const CalibrationResult res = calibrate(ChoiceSpace{}, setup);
    Json table = Json::array();
    for (const auto& e : res.entries) {
      table.push_back(Json{{"convention", e.convention.description()},
                           {"equivalence", e.equivalence},
                           {"pencil", e.pencil},
                           {"dressing", e.dressing},
                           {"reduction", e.reduction},
                           {"pass", e.pass}});
    }
    report["convention"] = convention_json(res.resolved);
    report["results"] =
        Json{{"table", table}, {"dressingTolerance", res.dressing_tolerance}};
    report["pass"] = true;
    detail::ensure_out_dir(cfg);
    const std::string path = cfg.convention_path.empty()
                                 ? detail::out_path(cfg, "convention.json")
                                 : cfg.convention_path;
    save_convention(res.resolved, path);
    report["conventionPath"] = path;
    return finish(kExitPass);
  } catch (const CalibrationAmbiguity& e) {
    report["results"] = Json{{"error", e.what()}};
    report["pass"] = false;
    return finish(kExitAmbiguous);
  } catch (const CalibrationFailure& e) {
    report["results"] = Json{{"error", e.what()}};
    report["pass"] = false;
    return finish(kExitTolerance);
  }
}

inline RunResult run_command(const std::string& command, const RunConfig& cfg) {
  if (command == "check") return run_check(cfg);
  if (command == "lax") return run_lax(cfg);
  if (command == "embed-ymhb") return run_embed_ymhb(cfg);
  if (command == "embed-sdym") return run_embed_sdym(cfg);
  if (command == "transport") return run_transport(cfg);
  if (command == "reconstruct") return run_reconstruct(cfg);
  if (command == "calibrate") return run_calibrate(cfg);
  if (command == "gen") return run_gen(cfg);
  throw ConfigError("unknown command '" + command + "'");
}

// Runs a command, stamps the report with the generation time, and writes it
// to <out>/<command>-report.json.  The timestamp block is the only part of
// the report that differs between repeated runs of the same config.
inline int execute(const std::string& command, const RunConfig& cfg) {
  RunResult r = run_command(command, cfg);
  r.report["meta"] = Json{{"generatedAt", detail::iso_now()}};
  detail::ensure_out_dir(cfg);
  const std::string path = detail::out_path(cfg, command + "-report.json");
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write report '" + path + "'");
  os << r.report.dump(2) << "\n";
  return r.exit_code;
}

}  // namespace gcme
