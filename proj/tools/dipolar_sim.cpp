// dipolar_sim: command-line front end.
//
//   dipolar_sim gsm --config run.yaml --out results/
//   dipolar_sim preset fig3 --set dtwa.n_traj=2000 --threads 4
//   dipolar_sim dump-couplings --config run.yaml
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 unknown preset.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dipolar/config_yaml.hpp"
#include "dipolar/dipolar.hpp"
#include "dipolar/io.hpp"
#include "dipolar/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnknownPreset = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "YAML run configuration");
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--threads", f.threads, "worker threads (fallback: DIPOLAR_SIM_THREADS)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out_dir, "output directory (overrides output_dir)");
  cmd->add_option("--set", f.overrides, "override a config key, e.g. --set dtwa.n_traj=2000")->take_all();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw dipolar::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::optional<int> env_threads() {
  const char* v = std::getenv("DIPOLAR_SIM_THREADS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw dipolar::ConfigError("DIPOLAR_SIM_THREADS must be a positive integer");
  return static_cast<int>(n);
}

void apply_flags(std::vector<dipolar::RunConfig>& runs, const CommonFlags& f) {
  const std::optional<int> threads = f.threads ? f.threads : env_threads();
  for (auto& r : runs) {
    if (f.seed) r.seed = *f.seed;
    if (threads) r.threads = *threads;
    if (!f.out_dir.empty()) r.output_dir = f.out_dir;
  }
}

int execute(const std::vector<dipolar::RunConfig>& runs) {
  for (const auto& cfg : runs) {
    std::cerr << "running " << cfg.name << " (" << dipolar::solver_name(cfg.solver) << ")\n";
    const dipolar::RunResult res = dipolar::run(cfg);
    const auto csv = dipolar::write_outputs(res, cfg.output_dir);
    std::cerr << "  wrote " << csv.string() << " (" << res.rows.size() << " rows, " << res.wall_seconds << " s)\n";
    if (res.diagnostics.contains("warning")) std::cerr << "  warning: " << res.diagnostics["warning"] << '\n';
    if (res.diagnostics.contains("positivity_warning") && res.diagnostics["positivity_warning"].get<bool>()) {
      std::cerr << "  warning: density matrix eigenvalue below tolerance (min "
                << res.diagnostics["min_eigenvalue"] << ")\n";
    }
  }
  return 0;
}

void dump_couplings(const dipolar::RunConfig& c, std::ostream& os) {
  using namespace dipolar;
  const ArrayGeometry geom = c.geometry.periodic ? run_detail::grid_of(c).geometry()
                                                 : build_lattice(c.geometry.dim, c.geometry.n, c.geometry.spacing);
  const DipoleCouplings dc(geom, PolarizationBasis(c.drive.theta));
  os << "# Delta^{ij}_{qq'} and Gamma^{ij}_{qq'} in units of Gamma; positions in units of lambda\n";
  os << "i,j,q,qp,delta_re,delta_im,gamma_re,gamma_im\n";
  char buf[200];
  for (std::size_t i = 0; i < dc.size(); ++i) {
    for (std::size_t j = 0; j < dc.size(); ++j) {
      for (int q = -1; q <= 1; ++q) {
        for (int qp = -1; qp <= 1; ++qp) {
          const Complex d = dc.delta(i, j, q, qp);
          const Complex g = dc.gamma(i, j, q, qp);
          std::snprintf(buf, sizeof buf, "%zu,%zu,%d,%d,%.12g,%.12g,%.12g,%.12g\n", i, j, q, qp, d.real(), d.imag(),
                        g.real(), g.imag());
          os << buf;
        }
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven-dissipative dynamics of dipolar multilevel atom arrays"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dipolar::kVersion));

  CommonFlags flags;
  std::vector<std::pair<std::string, CLI::App*>> solver_cmds;
  std::size_t n_traj = 0;
  std::vector<std::string> modes;
  for (const char* name : {"ed", "gsm", "xy", "swa", "dtwa", "cumulant"}) {
    CLI::App* cmd = app.add_subcommand(name, std::string("run the ") + name + " solver on --config");
    add_common(cmd, flags);
    if (std::string(name) == "dtwa") {
      cmd->add_option("--n-traj", n_traj, "number of trajectories")->check(CLI::PositiveNumber);
      cmd->add_option("--mode", modes, "k mode nx:nz (repeatable; default all)");
    }
    solver_cmds.emplace_back(name, cmd);
  }
  std::string preset_name;
  CLI::App* preset_cmd = app.add_subcommand("preset", "run a frozen experiment preset");
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  add_common(preset_cmd, flags);
  CLI::App* list_cmd = app.add_subcommand("list-presets", "print preset names");
  CLI::App* dump_cmd = app.add_subcommand("dump-couplings", "print the coupling tables for --config geometry");
  add_common(dump_cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& [name, text] : dipolar::preset_texts()) std::cout << name << '\n';
      return 0;
    }
    if (preset_cmd->parsed()) {
      std::string text = "preset: " + preset_name + "\n";
      if (!flags.config_path.empty()) text += read_file(flags.config_path);
      auto runs = dipolar::parse_config(text, flags.overrides);
      apply_flags(runs, flags);
      return execute(runs);
    }
    if (flags.config_path.empty()) throw dipolar::ConfigError("--config is required for this subcommand");
    if (dump_cmd->parsed()) {
      auto runs = dipolar::parse_config(read_file(flags.config_path), flags.overrides);
      apply_flags(runs, flags);
      dump_couplings(runs.front(), std::cout);
      return 0;
    }
    for (const auto& [name, cmd] : solver_cmds) {
      if (!cmd->parsed()) continue;
      std::vector<std::string> ov = flags.overrides;
      ov.push_back(std::string("solver=") + name);
      if (n_traj > 0) ov.push_back("dtwa.n_traj=" + std::to_string(n_traj));
      if (!modes.empty()) {
        std::string seq = "[";
        for (std::size_t i = 0; i < modes.size(); ++i) {
          const auto colon = modes[i].find(':');
          if (colon == std::string::npos) throw dipolar::ConfigError("--mode expects nx:nz, got '" + modes[i] + "'");
          seq += (i ? ", [" : "[") + modes[i].substr(0, colon) + ", " + modes[i].substr(colon + 1) + "]";
        }
        ov.push_back("dtwa.modes=" + seq + "]");
      }
      auto runs = dipolar::parse_config(read_file(flags.config_path), ov);
      apply_flags(runs, flags);
      return execute(runs);
    }
  } catch (const dipolar::UnknownPreset& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnknownPreset;
  } catch (const dipolar::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dipolar::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dipolar::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
