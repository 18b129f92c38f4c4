#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "shapegeo/dataset.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

shapegeo::Mode to_mode(const std::string& s) {
  return s == "old" ? shapegeo::Mode::old : shapegeo::Mode::young;
}

void write_out(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw shapegeo::Error("cannot open output file '" + out_path + "'");
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical inference on geodesics of planar shape spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("shapegeo ") + kVersion);

  std::string data_path;
  std::string config_path;
  std::string out_path;
  std::string sim_out = "sim_out";
  std::string test_name = "geodesics";
  std::string which = "geodesics";
  std::string group_a;
  std::string group_b;
  std::string mode_a = "young";
  std::string mode_b = "young";
  std::uint64_t seed = 0;
  double pca_threshold = 0.95;
  int restarts = 3;

  CLI::App* ingest_cmd =
      app.add_subcommand("ingest-check", "Parse a landmark CSV and print the parse report");
  ingest_cmd->add_option("data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", out_path, "Write the JSON report to a file instead of stdout");

  CLI::App* test_cmd = app.add_subcommand("test", "Run a two-group hypothesis test");
  test_cmd->add_option("data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);
  test_cmd->add_option("--test", test_name, "Statistic family")
      ->check(CLI::IsMember({"geodesics", "means", "directions"}))
      ->capture_default_str();
  test_cmd->add_option("--group-a", group_a, "First group label")->required();
  test_cmd->add_option("--group-b", group_b, "Second group label")->required();
  test_cmd->add_option("--mode-a", mode_a, "Descriptor mode for group A")
      ->check(CLI::IsMember({"young", "old"}))
      ->capture_default_str();
  test_cmd->add_option("--mode-b", mode_b, "Descriptor mode for group B")
      ->check(CLI::IsMember({"young", "old"}))
      ->capture_default_str();
  test_cmd->add_option("--seed", seed, "Seed for the GPC restarts")->capture_default_str();
  test_cmd->add_option("--pca-threshold", pca_threshold, "Variance fraction kept by the PCA")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  test_cmd->add_option("--restarts", restarts, "GPC multistart count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  test_cmd->add_option("--out", out_path, "Write the JSON result to a file instead of stdout");

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Run the Monte Carlo studies described by a config file");
  sim_cmd->add_option("config", config_path, "key = value config file")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim_out, "Output directory")->capture_default_str();
  CLI::Option* sim_seed_opt = sim_cmd->add_option("--seed", seed, "Override the config seed");

  CLI::App* plot_cmd =
      app.add_subcommand("plot-data", "Emit the dominating tangent coordinates per descriptor");
  plot_cmd->add_option("data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--which", which, "Descriptor family")
      ->check(CLI::IsMember({"geodesics", "means", "directions"}))
      ->capture_default_str();
  plot_cmd->add_option("--seed", seed, "Seed for the GPC restarts")->capture_default_str();
  plot_cmd->add_option("--pca-threshold", pca_threshold, "Variance fraction kept by the PCA")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  plot_cmd->add_option("--restarts", restarts, "GPC multistart count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  plot_cmd->add_option("--out", out_path, "Write the CSV to a file instead of stdout");

  CLI::App* version_cmd = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ingest_cmd->parsed()) {
      const shapegeo::Dataset ds = shapegeo::ingest(data_path);
      std::size_t observations = 0;
      std::map<std::string, int> groups;
      for (const auto& s : ds.series) {
        observations += s.observations.size();
        ++groups[s.group];
      }
      nlohmann::json j;
      j["source"] = ds.source;
      j["k"] = ds.k;
      j["series"] = ds.series.size();
      j["observations"] = observations;
      j["groups"] = groups;
      j["rows_read"] = ds.report.rows_read;
      j["rows_dropped"] = ds.report.rows_dropped;
      j["series_dropped"] = ds.report.series_dropped;
      j["warnings"] = ds.report.warnings;
      write_out(j.dump(2), out_path);
    } else if (test_cmd->parsed()) {
      shapegeo::TestOptions opts;
      opts.pca_threshold = pca_threshold;
      opts.gpc.restarts = restarts;
      opts.gpc.seed = seed;
      const shapegeo::Dataset ds = shapegeo::ingest(data_path);
      const nlohmann::json j = shapegeo::run_test(ds, test_name, group_a, group_b,
                                                  to_mode(mode_a), to_mode(mode_b), opts);
      write_out(j.dump(2), out_path);
    } else if (sim_cmd->parsed()) {
      shapegeo::SimConfig cfg = shapegeo::parse_sim_config(config_path);
      if (sim_seed_opt->count() > 0) cfg.seed = seed;
      const nlohmann::json summary = shapegeo::run_simulation(cfg, sim_out);
      write_out(summary.dump(2), "");
    } else if (plot_cmd->parsed()) {
      shapegeo::TestOptions opts;
      opts.pca_threshold = pca_threshold;
      opts.gpc.restarts = restarts;
      opts.gpc.seed = seed;
      const shapegeo::Dataset ds = shapegeo::ingest(data_path);
      write_out(shapegeo::emit_tangent_plot_data(ds, which, opts), out_path);
    } else if (version_cmd->parsed()) {
      std::cout << "shapegeo " << kVersion << '\n';
    }
  } catch (const shapegeo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const shapegeo::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
