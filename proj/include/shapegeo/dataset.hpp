#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "shapegeo/monte_carlo.hpp"

namespace shapegeo {

struct ParseReport {
  int rows_read = 0;
  int rows_dropped = 0;
  int series_dropped = 0;
  std::vector<std::string> warnings;
};

struct Dataset {
  std::vector<GrowthSeries> series;
  int k = 0;
  std::string source;
  ParseReport report;
};

// CSV schema: leaf_id,group,t,x1,y1,...,xk,yk.  Rows are grouped by leaf_id
// into time-sorted series; degenerate rows and short series are dropped with
// warnings in the report.
Dataset ingest(const std::string& path);

// Serialize a dataset back to the ingest CSV schema (raw landmarks are gone,
// so pre-shape coordinates are written padded with a zero mean landmark).
std::string export_csv(const Dataset& ds);

std::vector<GrowthSeries> select_group(const Dataset& ds, const std::string& group);

nlohmann::json run_test(const Dataset& ds, const std::string& test,
                        const std::string& group_a, const std::string& group_b,
                        Mode mode_a, Mode mode_b, const TestOptions& opts);

// key = value simulation configuration; `seed` is mandatory.
SimConfig parse_sim_config(const std::string& path);

// Writes robustness.csv, consistency_mean_geodesic.csv, consistency_gpc.csv
// and summary.json into out_dir; returns the summary.
nlohmann::json run_simulation(const SimConfig& cfg, const std::string& out_dir);

// CSV of the first two dominating chart coordinates per descriptor, one row
// per (series, mode), for the requested statistic family.
std::string emit_tangent_plot_data(const Dataset& ds, const std::string& which,
                                   const TestOptions& opts);

}  // namespace shapegeo
