// End-to-end gate: one line per criterion, nonzero exit when any fails.
// argv[1] is the path to the command-line binary (used by the determinism
// criterion); without it that criterion fails rather than being skipped.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "gcme/cli.hpp"

using namespace gcme;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void gate(int idx, const char* what, bool ok, const std::string& detail) {
  std::printf("%s %d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, what, detail.c_str());
  if (!ok) ++failures;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const std::string kPureGauge3d =
    "pure-gauge(gen_x=(0.8,0.1,-0.3),gen_y=(0.2,0.5,-0.1),gen_t=(-0.4,0.3,0.6))";

std::string smooth_spec(int seed) {
  return "random-smooth(seed=" + std::to_string(seed) + ",amplitude=0.8,bandwidth=2)";
}

template <class F>
void criterion(int idx, const char* what, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    gate(idx, what, false, std::string("exception: ") + e.what());
  }
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string report_sans_meta(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("missing report '" + path + "'");
  Json j;
  is >> j;
  j.erase("meta");
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const MatrixBuilder<Mat3> build3{+1};

  // One calibration pass fixes every sign choice used below.
  SignConvention conv;
  std::string cal_detail = "calibration failed";
  try {
    const CalibrationResult cal = calibrate();
    conv = cal.resolved;
    cal_detail = conv.run_id;
  } catch (const std::exception& e) {
    cal_detail = std::string("calibration exception: ") + e.what();
  }

  criterion(1, "pure gauge connection is flat on the 32^3 grid", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(3, 0.1, {32, 32, 32});
    const auto sc = make_scenario_from_spec(kPureGauge3d);
    const ConnectionField conn = sample_connection(*sc, g);
    const ConnectionDerivatives ex = sample_derivatives(*sc, g);
    const auto res = gcme_residuals(conn, build3, &ex);
    double worst = 0.0;
    for (const auto& r : res) worst = std::max(worst, field_norms(r).interior_max);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    gate(1, "pure gauge connection is flat on the 32^3 grid",
         worst <= 1e-12 && secs <= 60.0,
         "worst interior max " + num(worst) + ", " + num(secs) + "s");
  });

  // Shared sweep over the 20 random smooth connections.
  double worst_equiv = 0.0;
  int control_hits = 0;
  double worst_map = 0.0;
  double worst_sweep = 0.0;
  double worst_sdym = 0.0;
  std::string sweep_error;
  try {
    const auto control = conv.su2_prefactor == algebra::Su2Prefactor::kIOver2
                             ? algebra::Su2Prefactor::kOneOver2i
                             : algebra::Su2Prefactor::kIOver2;
    for (int seed = 1; seed <= 20; ++seed) {
      const Grid g(3, 0.1, {16, 16, 16});
      const auto sc = make_scenario_from_spec(smooth_spec(seed));
      const ConnectionField conn = sample_connection(*sc, g);
      const ConnectionDerivatives ex = sample_derivatives(*sc, g);

      worst_equiv =
          std::max(worst_equiv, equivalence_su2_so3(conn, conv.su2_prefactor, &ex).deviation);
      if (equivalence_su2_so3(conn, control, &ex).deviation >= 0.01) ++control_hits;

      const auto pencils = gcme_pencils(conn, build3, &ex);
      const auto coeffs = pencil_commutator_coeffs(pencils.first, pencils.second);
      const auto mapped = coeffs_to_gcme(coeffs);
      const auto targets = pencil_target_residuals(conn, build3, conv.pencil_bracket, &ex);
      worst_map = std::max(worst_map, detail::max_triple_gap(mapped, targets));
      const auto swept =
          sweep_commutator_coeffs(pencils.first, pencils.second, {0.0, 1.0, -1.0});
      worst_sweep = std::max(worst_sweep, detail::max_triple_gap(coeffs, swept));

      const auto mats = connection_matrices(conn, build3);
      worst_sdym = std::max(
          worst_sdym, sdym_reduction_check(mats[0], mats[1], mats[2], conv.sdym_map).worst());
    }
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  const auto swept_gate = [&](int idx, const char* what, bool ok, const std::string& detail) {
    if (sweep_error.empty())
      gate(idx, what, ok, detail);
    else
      gate(idx, what, false, "exception: " + sweep_error);
  };

  swept_gate(2, "unitary and rotation residuals agree across 20 random fields",
             worst_equiv <= 1e-10 && control_hits >= 19,
             "worst deviation " + num(worst_equiv) + ", control caught " +
                 std::to_string(control_hits) + "/20");

  swept_gate(3, "pencil commutator coefficients rebuild the negated-field residuals",
             worst_map <= 1e-10 && worst_sweep <= 1e-12,
             "worst map gap " + num(worst_map) + ", worst sweep gap " + num(worst_sweep));

  criterion(4, "Higgs system specializes and maps back through its pencil", [&] {
    const Grid g(3, 0.1, {16, 16, 16});
    const auto sc = make_scenario_from_spec(smooth_spec(7));
    const ConnectionField conn = sample_connection(*sc, g);
    const auto mats = connection_matrices(conn, build3);
    const Field<Mat3> phi = sample_higgs(build3, g, 101, 0.8, 2);

    const auto pencils = ymhb_pencils(mats[0], mats[1], mats[2], phi);
    const auto coeffs = pencil_commutator_coeffs(pencils.first, pencils.second);
    const auto mapped = ymhb_coeffs_to_residuals(coeffs);
    const auto targets = conv.pencil_bracket == PencilBracket::kFlipped
                             ? ymhb_pencil_targets(mats[0], mats[1], mats[2], phi)
                             : ymhb_residual(mats[0], mats[1], mats[2], phi);
    const double gap = detail::max_triple_gap(mapped, targets);

    const Field<Mat3> phi0(g, Mat3::Zero());
    const auto with_zero = ymhb_residual(mats[0], mats[1], mats[2], phi0);
    const auto curvature_only = residual_2p1(mats[0], mats[1], mats[2]);
    bool bits = true;
    for (std::size_t k = 0; k < 3; ++k)
      bits = bits && detail::fields_bit_identical(with_zero[k], curvature_only[k]);

    gate(4, "Higgs system specializes and maps back through its pencil",
         bits && gap <= 1e-10,
         std::string("zero-field residuals ") + (bits ? "bit-identical" : "DIFFER") +
             ", map gap " + num(gap));
  });

  criterion(5, "self-dual reduction identities hold", [&] {
    double worst_flat = 0.0;
    for (const std::string& spec : {std::string("zero"), kPureGauge3d}) {
      const Grid g(3, 0.1, {16, 16, 16});
      const auto sc = make_scenario_from_spec(spec);
      const auto mats = connection_matrices(sample_connection(*sc, g), build3);
      worst_flat = std::max(
          worst_flat, sdym_reduction_check(mats[0], mats[1], mats[2], conv.sdym_map).worst());
    }
    const bool ok = sweep_error.empty() && worst_sdym <= 1e-10 && worst_flat <= 1e-12;
    if (sweep_error.empty())
      gate(5, "self-dual reduction identities hold", ok,
           "worst random " + num(worst_sdym) + ", worst flat " + num(worst_flat));
    else
      gate(5, "self-dual reduction identities hold", false, "exception: " + sweep_error);
  });

  criterion(6, "plaquette defect tracks the curvature residual", [&] {
    const auto defect_at = [&](const std::string& spec, double h) {
      const Grid g(3, h, {5, 5, 5});
      const auto sc = make_scenario_from_spec(spec);
      const auto mats = connection_matrices(sample_connection(*sc, g), build3);
      GridPath loop;
      loop.start = {1, 1, 1};
      loop.then(Axis::X, 1).then(Axis::Y, 1).then(Axis::X, -1).then(Axis::Y, -1);
      return (propagate(mats, loop, {}).end - Mat3::Identity()).norm();
    };
    const std::string spec = "constants(k=1,m2=1)";
    const double d16 = defect_at(spec, 1.0 / 16.0);
    const double d32 = defect_at(spec, 1.0 / 32.0);
    const double d64 = defect_at(spec, 1.0 / 64.0);

    const Grid gref(3, 1.0 / 64.0, {5, 5, 5});
    const auto scref = make_scenario_from_spec(spec);
    const auto mref = connection_matrices(sample_connection(*scref, gref), build3);
    const double ref = residual_2p1(mref[0], mref[1], mref[2])[0].at({1, 1, 1}).norm();

    const double q = 2.0 * d64 * 64.0 * 64.0 - d32 * 32.0 * 32.0;
    const double rel = std::abs(q - ref) / ref;
    const double order_a = std::log2(d16 / d32);
    const double order_b = std::log2(d32 / d64);
    const bool orders_ok =
        std::abs(order_a - 2.0) <= 0.8 && std::abs(order_b - 2.0) <= 0.8;

    const double flat = defect_at(kPureGauge3d, 1.0 / 64.0);

    gate(6, "plaquette defect tracks the curvature residual",
         rel <= 0.15 && orders_ok && flat <= 1e-8,
         "rel gap " + num(rel) + ", orders " + num(order_a) + "/" + num(order_b) +
             ", flat defect " + num(flat));
  });

  criterion(7, "finite differences converge at second order in 1+1", [&] {
    double worst_low = 2.0, worst_high = 2.0;
    for (const int seed : {3, 4}) {
      std::array<double, 3> err{};
      std::array<double, 3> hs{};
      const std::array<int, 3> counts = {16, 32, 64};
      for (std::size_t i = 0; i < 3; ++i) {
        const double h = 1.5 / (counts[i] - 1);
        const Grid g(2, h, {counts[i], counts[i], 1});
        const auto sc = make_scenario_from_spec(smooth_spec(seed));
        const ConnectionField conn = sample_connection(*sc, g);
        const ConnectionDerivatives ex = sample_derivatives(*sc, g);
        const auto fd = gcme_residuals(conn, build3, nullptr);
        const auto exact = gcme_residuals(conn, build3, &ex);
        Field<Mat3> diff(g, Mat3::Zero());
        for (std::size_t p = 0; p < diff.size(); ++p) diff[p] = fd[0][p] - exact[0][p];
        err[i] = field_norms(diff).interior_max;
        hs[i] = h;
      }
      for (std::size_t i = 0; i + 1 < 3; ++i) {
        const double order = std::log(err[i] / err[i + 1]) / std::log(hs[i] / hs[i + 1]);
        worst_low = std::min(worst_low, order);
        worst_high = std::max(worst_high, order);
      }
    }
    gate(7, "finite differences converge at second order in 1+1",
         worst_low >= 1.8 && worst_high <= 2.2,
         "orders in [" + num(worst_low) + ", " + num(worst_high) + "]");
  });

  criterion(8, "constant curvature frame reconstructs a circle", [&] {
    const double h = 1.0 / 128.0;
    const Grid g(2, h, {805, 5, 1});
    const auto sc = make_scenario_from_spec("constants(k=1)");
    const auto mats = connection_matrices(sample_connection(*sc, g), build3);
    const auto states =
        propagate_states(mats, GridPath::line({0, 0, 0}, Axis::X, 804), {});
    const auto curve = reconstruct_curve(tangent_rows(states), h, 1.0);
    double worst = 0.0;
    for (const auto& p : curve)
      worst = std::max(worst, std::abs((p - Vec3(0.0, 1.0, 0.0)).norm() - 1.0));
    gate(8, "constant curvature frame reconstructs a circle", worst <= 0.005,
         "radius error " + num(worst) + " at spacing 1/128");
  });

  criterion(9, "repeated command runs write identical reports", [&] {
    if (cli.empty()) {
      gate(9, "repeated command runs write identical reports", false,
           "no binary path given");
      return;
    }
    const fs::path base = fs::temp_directory_path() / "gcme_accept";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string ini = (base / "run.ini").string();
    {
      std::ofstream os(ini);
      os << "[grid]\ndim = 3\nh = 0.1\nnx = 7\nny = 7\nnt = 7\n\n"
            "[scenario]\nspec = random-smooth(seed=12,amplitude=0.7,bandwidth=2)\n";
    }
    bool ok = true;
    std::string why;
    for (const std::string cmd : {"check", "lax", "embed-sdym"}) {
      const std::string a = (base / (cmd + "-a")).string();
      const std::string b = (base / (cmd + "-b")).string();
      const int ra = run_cli(cli, cmd + " --config " + ini + " --out " + a);
      const int rb = run_cli(cli, cmd + " --config " + ini + " --out " + b);
      if (ra != 0 || rb != 0) {
        ok = false;
        why = cmd + " exited " + std::to_string(ra) + "/" + std::to_string(rb);
        break;
      }
      const std::string da = report_sans_meta(a + "/" + cmd + "-report.json");
      const std::string db = report_sans_meta(b + "/" + cmd + "-report.json");
      if (da != db) {
        ok = false;
        why = cmd + " reports differ";
        break;
      }
    }
    gate(9, "repeated command runs write identical reports", ok,
         ok ? "check, lax, embed-sdym byte-stable" : why);
  });

  std::printf("%s: %d criterion%s failed (calibration %s)\n",
              failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", failures,
              failures == 1 ? "" : "s", cal_detail.c_str());
  return failures == 0 ? 0 : 1;
}
