#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "riccibound/model.hpp"
#include "riccibound/report.hpp"
#include "riccibound/scenario.hpp"

namespace {

// exit codes: 0 all-pass, 1 any-fail, 2 config error, 3 numeric failure
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int do_verify(const std::string& config, long long seed_override,
              double tol_override, const std::string& out_override,
              int jobs) {
  rb::Scenario sc;
  try {
    sc = rb::load_scenario(config);
  } catch (const rb::ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rb::ModelUnknown& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (seed_override >= 0) sc.seed = static_cast<uint64_t>(seed_override);
  if (tol_override > 0) sc.tolerance = tol_override;
  if (!out_override.empty()) sc.out_dir = out_override;
  if (jobs > 0) {
#ifdef _OPENMP
    omp_set_num_threads(jobs);
#endif
  }

  rb::Report rep;
  auto t0 = std::chrono::steady_clock::now();
  try {
    rep = rb::run_scenario(sc);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure in scenario '" << sc.name
              << "': " << e.what() << "\n";
    return kExitNumeric;
  }
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::filesystem::create_directories(sc.out_dir);
  auto base = std::filesystem::path(sc.out_dir) / sc.name;
  {
    std::ofstream js(base.string() + ".report.json");
    rb::write_report_json(rep, js);
  }
  {
    std::ofstream cs(base.string() + ".margins.csv");
    rb::write_margin_csv(rep, cs);
  }
  {
    // timing sidecar, separate from the deterministic report by contract
    std::ofstream ts(base.string() + ".timing.json");
    ts << "{\n  \"wall_time_seconds\": " << rep.wall_time_seconds << "\n}\n";
  }
  std::cout << "certificates: " << rep.certificates.size()
            << "  failures: " << rep.fail_count()
            << "  worst margin: " << rep.worst_margin() << "\n"
            << "report: " << base.string() << ".report.json\n";
  return rep.all_pass() ? kExitPass : kExitFail;
}

int do_list_models() {
  for (const auto& spec : rb::catalog()) {
    rb::Model m(spec);
    std::cout << m.name() << "  dim=" << spec.dim
              << "  lambda=" << spec.lambda << "  K=" << spec.K
              << "  alpha=" << spec.alpha << "\n";
  }
  return kExitPass;
}

int do_plot(const std::string& report_path, const std::string& kind,
            const std::string& out_override) {
  std::ifstream in(report_path);
  if (!in) {
    std::cerr << "config error: cannot open report: " << report_path << "\n";
    return kExitConfig;
  }
  rb::Report rep;
  try {
    rep = rb::read_report_json(in);
  } catch (const std::exception& e) {
    std::cerr << "config error: malformed report: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    if (out_override.empty()) {
      rb::write_plot_csv(rep, kind, std::cout);
    } else {
      std::filesystem::create_directories(out_override);
      auto p = std::filesystem::path(out_override) / (kind + ".csv");
      std::ofstream out(p);
      rb::write_plot_csv(rep, kind, out);
      std::cout << "plot data: " << p.string() << "\n";
    }
  } catch (const rb::UnknownKind& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certificate runner for the volume-comparison toolkit"};
  app.require_subcommand(1);

  long long seed = -1;
  double tolerance = -1.0;
  std::string out_dir;
  int jobs = 0;
  app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--tolerance", tolerance, "override the pass tolerance");
  app.add_option("--out", out_dir, "output directory override");
  app.add_option("--jobs", jobs, "worker thread count");

  std::string config;
  auto* verify = app.add_subcommand("verify", "run a scenario config");
  verify->add_option("config", config, "scenario config file")->required();

  app.add_subcommand("list-models", "print the model catalog");

  std::string report_path, kind;
  auto* plot = app.add_subcommand("plot", "emit plot CSV for one kind");
  plot->add_option("report", report_path, "report JSON path")->required();
  plot->add_option("kind", kind, "certificate kind")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("verify"))
    return do_verify(config, seed, tolerance, out_dir, jobs);
  if (app.got_subcommand("list-models")) return do_list_models();
  return do_plot(report_path, kind, out_dir);
}
