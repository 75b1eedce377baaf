#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gcme/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Zero-curvature checks, spectral pencils, and frame transport "
               "for surface connection fields"};

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string profile;
  std::string lambdas;
  bool no_reproject = false;

  app.add_option("command", command,
                 "check | lax | embed-ymhb | embed-sdym | transport | reconstruct | "
                 "calibrate | gen")
      ->required()
      ->check(CLI::IsMember({"check", "lax", "embed-ymhb", "embed-sdym", "transport",
                             "reconstruct", "calibrate", "gen"}));
  app.add_option("--config", config_path, "INI config file ([grid], [scenario], [run])");
  app.add_option("--out", out_dir, "Directory for the report and any artifacts");
  app.add_option("--tolerance-profile", profile, "default or strict")
      ->check(CLI::IsMember({"default", "strict"}));
  app.add_option("--lambda", lambdas, "Comma-separated spectral values for the sweep");
  app.add_flag("--no-reproject", no_reproject,
               "Keep raw transported frames instead of reprojecting onto the group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gcme::kExitConfig;
  }

  try {
    gcme::RunConfig cfg;
    if (!config_path.empty()) cfg = gcme::load_run_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!profile.empty()) cfg.tolerance_profile = profile;
    if (!lambdas.empty()) cfg.lambdas = gcme::parse_number_list(lambdas, "--lambda");
    if (no_reproject) cfg.reproject = false;

    const int code = gcme::execute(command, cfg);
    const std::string report = command + "-report.json";
    if (code == gcme::kExitPass)
      std::cout << command << ": pass (" << cfg.out_dir << "/" << report << ")\n";
    else
      std::cout << command << ": FAIL, exit " << code << " (" << cfg.out_dir << "/"
                << report << ")\n";
    return code;
  } catch (const gcme::CalibrationAmbiguity& e) {
    std::cerr << e.what() << "\n";
    return gcme::kExitAmbiguous;
  } catch (const gcme::CalibrationFailure& e) {
    std::cerr << e.what() << "\n";
    return gcme::kExitTolerance;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gcme::kExitConfig;
  }
}
