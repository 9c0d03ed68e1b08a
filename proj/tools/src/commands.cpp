#include "gfkchain/cli/commands.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfkchain/chain_transfer.hpp"
#include "gfkchain/cli/config.hpp"
#include "gfkchain/cli/io.hpp"
#include "gfkchain/cli/report.hpp"
#include "gfkchain/errors.hpp"

namespace gfkchain::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool out_given = false;
  std::optional<int> threads;
  std::string manifest_path;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const chain::ChainConfig& config, const std::vector<std::string>& outputs) {
  json files = json::array();
  for (const auto& o : outputs) files.push_back((out_dir / o).string());
  const json manifest{
      {"artifact", kArtifactName},
      {"version", kArtifactVersion},
      {"command", command},
      {"config", config_to_json(config)},
      {"base_seed", config.base_seed},
      {"timestamp", utc_timestamp()},
      {"out_dir", out_dir.string()},
      {"outputs", files},
  };
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string structure_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "structure_%03d", index);
  return buf;
}

void generate_chain(const chain::ChainConfig& config, const fs::path& out_dir, std::ostream& out) {
  config.validate_sampling();
  write_manifest(out_dir, "generate-chain", config,
                 {"chain.csv", "chain_damaged.csv", "structures/"});

  const chain::Chain ch = chain::build_chain(config);
  const auto domains = chain::sample_trial(ch, config, config.base_seed);

  std::string header = "index,t";
  for (int m = 1; m <= config.n_modes; ++m) header += ",f" + std::to_string(m);
  std::string healthy = header + "\n";
  std::string damaged = header + "\n";
  out << "index,t,first_hz,last_hz\n";
  for (int i = 0; i < ch.size(); ++i) {
    const auto& sig = ch.signatures[i];
    const std::string prefix = std::to_string(i) + "," + format_number(ch.positions[i]);
    healthy += prefix;
    damaged += prefix;
    std::string table = "mode,healthy_hz,damaged_hz\n";
    for (Eigen::Index m = 0; m < sig.healthy.size(); ++m) {
      healthy += "," + format_number(sig.healthy(m));
      damaged += "," + format_number(sig.damaged(m));
      table += std::to_string(m + 1) + "," + format_number(sig.healthy(m)) + "," +
               format_number(sig.damaged(m)) + "\n";
    }
    healthy += "\n";
    damaged += "\n";

    const auto& ds = domains[i];
    std::string data = "condition,label_visible";
    for (int m = 1; m <= ds.dimension(); ++m) data += ",f" + std::to_string(m);
    data += "\n";
    for (int r = 0; r < ds.n_samples(); ++r) {
      data += ds.condition_labels[r] == sim::Condition::healthy ? "healthy" : "damaged";
      data += ds.label_visible[r] ? ",1" : ",0";
      for (int m = 0; m < ds.dimension(); ++m) data += "," + format_number(ds.features(r, m));
      data += "\n";
    }
    const fs::path dir = out_dir / "structures" / structure_name(i);
    write_text(dir / "frequencies.csv", table);
    write_text(dir / "dataset.csv", data);

    out << prefix << "," << format_number(sig.healthy(0)) << ","
        << format_number(sig.healthy(sig.healthy.size() - 1)) << "\n";
  }
  write_text(out_dir / "chain.csv", healthy);
  write_text(out_dir / "chain_damaged.csv", damaged);
}

void run_experiment(const chain::ChainConfig& config, const fs::path& out_dir, std::ostream& out,
                    std::ostream& err) {
  config.validate();
  write_manifest(out_dir, "run-experiment", config,
                 {"results.csv", "summary.csv", "cells.csv", "comparisons.csv", "failures.csv"});
  const auto result = chain::run_experiment(config);
  write_text(out_dir / "results.csv", results_csv(result));
  const std::string summary = summary_csv(result);
  write_text(out_dir / "summary.csv", summary);
  write_text(out_dir / "cells.csv", cells_csv(result));
  write_text(out_dir / "comparisons.csv", comparisons_csv(result));
  write_text(out_dir / "failures.csv", failures_csv(result));
  out << summary;
  int failed = 0;
  for (const auto& r : result.trials) failed += r.failed ? 1 : 0;
  if (failed > 0) {
    err << "warning: " << failed << " trial records failed, see " << (out_dir / "failures.csv").string()
        << "\n";
  }
}

void report(const fs::path& results_path, const fs::path& svg_path, std::ostream& out) {
  std::string text;
  try {
    text = read_text(results_path);
  } catch (const IoError& e) {
    throw UserError(std::string("cannot read results: ") + e.what());
  }
  const auto series = trend_from_results(parse_results_csv(text));
  write_text(svg_path, render_svg(series));
  out << "wrote " << svg_path.string() << "\n";
}

chain::ChainConfig resolve_config(const GlobalOptions& g) {
  chain::ChainConfig config;
  if (!g.config_path.empty()) config = load_config(g.config_path);
  if (g.seed) config.base_seed = *g.seed;
  if (g.threads) config.threads = *g.threads;
  return config;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chained geodesic-flow-kernel transfer of damage labels between structures",
               "gfkchain"};
  app.set_version_flag("--version", kArtifactVersion);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config; missing keys take defaults");
  app.add_option("--seed", g.seed, "Override base_seed");
  auto* out_opt = app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads for trials (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--from-manifest", g.manifest_path, "Rerun the command recorded in a manifest");

  auto* gen = app.add_subcommand("generate-chain", "Write the chain's frequency tables and datasets");
  std::optional<int> n_structures;
  gen->add_option("--n-structures", n_structures, "Override n_structures")->check(CLI::Range(2, 100000));

  auto* exp = app.add_subcommand("run-experiment", "Run direct and chained transfer trials");
  std::optional<int> n_trials;
  exp->add_option("--n-trials", n_trials, "Override n_trials")->check(CLI::PositiveNumber);

  auto* rep = app.add_subcommand("report", "Plot mean accuracy against intermediate count as SVG");
  std::string results_path;
  std::string svg_path;
  rep->add_option("results_csv", results_path, "Per-trial results CSV")->required();
  rep->add_option("--svg", svg_path, "Output SVG (default: <out>/report.svg)");

  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUser;
  }
  g.out_given = out_opt->count() > 0;

  std::string command;
  chain::ChainConfig config;
  if (!g.manifest_path.empty()) {
    const json manifest = load_manifest(g.manifest_path);
    command = manifest.at("command").get<std::string>();
    config = config_from_json(manifest.at("config"));
    if (g.seed) config.base_seed = *g.seed;
    if (g.threads) config.threads = *g.threads;
    if (!g.out_given && manifest.contains("out_dir")) g.out_dir = manifest.at("out_dir").get<std::string>();
    if ((gen->parsed() && command != "generate-chain") || (exp->parsed() && command != "run-experiment") ||
        rep->parsed()) {
      throw UserError("manifest records command '" + command + "'");
    }
  } else {
    if (gen->parsed()) command = "generate-chain";
    if (exp->parsed()) command = "run-experiment";
    if (rep->parsed()) command = "report";
    if (command.empty()) {
      err << app.help();
      throw UserError("no command given");
    }
    config = resolve_config(g);
    if (n_structures) config.n_structures = *n_structures;
    if (n_trials) config.n_trials = *n_trials;
  }

  const fs::path out_dir = g.out_dir;
  if (command == "generate-chain") {
    generate_chain(config, out_dir, out);
  } else if (command == "run-experiment") {
    run_experiment(config, out_dir, out, err);
  } else if (command == "report") {
    report(results_path, svg_path.empty() ? out_dir / "report.svg" : fs::path(svg_path), out);
  } else {
    throw UserError("unknown command '" + command + "' in manifest");
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(argc, argv, out, err);
  } catch (const UserError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const gfkchain::Error& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gfkchain::cli
