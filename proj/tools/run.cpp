#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "kerrcat/csv.hpp"
#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/kernels.hpp"
#include "kerrcat/parallel.hpp"

namespace kerrcat::cli {

namespace {

constexpr int kManifestVersion = 1;

json load_config(const std::string& path, const std::string& command) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (j.is_object() && j.contains("manifest_version")) {
    if (!j.contains("command") || !j.contains("config")) throw ConfigError(path + ": manifest lacks command or config");
    if (j["command"] != command)
      throw ConfigError(path + ": manifest was written by '" + j["command"].get<std::string>() + "', not '" + command + "'");
    return j["config"];
  }
  return j;
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  os << content;
}

std::string convergence_csv(const std::vector<double>& base, const std::vector<double>& big, double& worst) {
  std::ostringstream os;
  os << "index,value,value_enlarged,relative_change\n";
  worst = 0.0;
  const std::size_t n = std::min(base.size(), big.size());
  // entries at rounding level of the largest value are compared against that floor
  double floor = 1e-300;
  for (std::size_t i = 0; i < n; ++i) floor = std::max(floor, 1e-9 * std::abs(base[i]));
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max({std::abs(base[i]), std::abs(big[i]), floor});
    const double rel = std::abs(base[i] - big[i]) / scale;
    worst = std::max(worst, rel);
    os << i << ',' << fmt(base[i]) << ',' << fmt(big[i]) << ',' << fmt(rel) << '\n';
  }
  if (base.size() != big.size()) worst = INFINITY;
  return os.str();
}

int execute(const std::string& command, const std::string& config_path, const std::string& out_dir,
            int threads_flag, bool check) {
  const json cfg = load_config(config_path, command);
  json resolved = json::object();
  Section root(&cfg, &resolved, "");
  const long threads_cfg = root.integer("threads", static_cast<long>(default_threads()));
  if (threads_cfg < 1) throw ConfigError("threads: must be >= 1");
  Context ctx;
  ctx.threads = threads_flag > 0 ? static_cast<unsigned>(threads_flag) : static_cast<unsigned>(threads_cfg);

  const Command cmd = find_command(command);
  CommandResult res = cmd(root, ctx);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  json manifest = json::object();
  manifest["manifest_version"] = kManifestVersion;
  manifest["command"] = command;
  manifest["config"] = resolved;
  manifest["threads"] = ctx.threads;
  manifest["isa"] = kernels::isa_name(kernels::active_isa());
  manifest["units"] = "energies and rates in K, times in 1/K";
  manifest["truncation_rule"] =
      "fock_dim 0 selects ceil(n + 10 sqrt(n) + 10) Fock levels with n = alpha^2 + Delta / 2K";
  const Tolerances tol;
  manifest["tolerances"] = {{"hermitian", tol.hermitian},   {"trace", tol.trace},
                            {"psd_floor", tol.psd_floor},   {"degeneracy", tol.degeneracy},
                            {"parity", tol.parity},         {"convergence", tol.convergence}};
  manifest["determinism"] =
      "No random numbers are drawn. Identical configs give byte-identical CSV files (%.12e) for any thread "
      "count; rows are ordered by grid index.";
  json outputs = json::array();
  for (const auto& f : res.files) {
    write_file(dir, f.name, f.content);
    outputs.push_back(f.name);
  }
  manifest["skipped"] = res.skipped;

  if (check && res.failure.empty()) {
    json scratch = json::object();
    Section again(&cfg, &scratch, "");
    again.integer("threads", 1);
    Context big = ctx;
    big.enlarged = true;
    const CommandResult enlarged = cmd(again, big);
    double worst = 0.0;
    write_file(dir, "convergence.csv", convergence_csv(res.primary, enlarged.primary, worst));
    outputs.push_back("convergence.csv");
    manifest["convergence"] = {{"enlargement", "1.25x Fock truncation"},
                               {"max_relative_change", worst},
                               {"tolerance", tol.convergence},
                               {"converged", worst <= tol.convergence},
                               {"failure", enlarged.failure}};
  }
  manifest["outputs"] = outputs;
  if (!res.failure.empty()) manifest["failure"] = res.failure;
  write_file(dir, "manifest.json", manifest.dump(2) + "\n");

  if (!res.failure.empty()) {
    std::cerr << "kerrcat: numerical failure at " << res.failure << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Simulation toolkit for detuned Kerr cat qubits."};
  std::string config_path, out_dir = ".";
  int threads = 0;
  bool check = false;
  app.add_option("--config", config_path, "JSON config or a manifest.json from an earlier run");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_flag("--check-convergence", check, "Rerun at 1.25x truncation and report relative changes");
  app.require_subcommand(1);
  for (const auto& name : command_names()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return execute(command, config_path, out_dir, threads, check);
  } catch (const ConfigError& e) {
    std::cerr << "kerrcat: config error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "kerrcat: invalid parameter: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kerrcat: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace kerrcat::cli
