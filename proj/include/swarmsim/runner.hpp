#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmsim/config.hpp"
#include "swarmsim/engine.hpp"
#include "swarmsim/metrics.hpp"

namespace swarmsim::cli {

/// One experiment cell: the scenario axes that vary across a sweep.
struct Cell {
  std::string strategy;
  int nodes = 0;
  int queue = 0;  // 0 = per-device catalog value
  std::string env;
  std::uint64_t seed = 0;
};

std::string cell_name(const Cell& cell);
ScenarioConfig cell_config(ScenarioConfig base, const Cell& cell);

struct CellResult {
  Cell cell;
  metrics::Summary summary;
  sim::EngineStats stats;
};

struct ArtifactOptions {
  std::string out_dir;  // empty disables artifact output
  bool log_messages = false;
  bool dump_pheromones = false;
  double timeseries_bucket_s = 60.0;
};

/// Runs one cell and writes its manifest, time series and optional logs.
CellResult execute_cell(const ScenarioConfig& base, const Cell& cell,
                        const ArtifactOptions& opts);

/// Cells in canonical order (strategy, nodes, queue, env, seed).
std::vector<Cell> expand_matrix(const std::vector<std::string>& strategies,
                                const std::vector<int>& node_counts,
                                const std::vector<int>& queues,
                                const std::vector<std::string>& envs,
                                const std::vector<std::uint64_t>& seeds);

/// Executes cells (possibly in parallel); the result order is the canonical
/// cell order regardless of scheduling.
std::vector<CellResult> run_cells(const ScenarioConfig& base, const std::vector<Cell>& cells,
                                  const ArtifactOptions& opts, int jobs);

std::string summary_csv_header();
std::string summary_csv_row(const CellResult& r);
std::string counts_csv_header();
std::string counts_csv_row(const CellResult& r);

/// Text table in the summary-report layout: rows grouped by strategy and
/// node count (averaged over seeds) per environment/queue section, with the
/// best value per metric and node count starred. Lower is better for ST,
/// HPH, AM and MPR; higher for HMR and GR; LD targets three quarters of the
/// queue capacity.
std::string render_table(const std::vector<CellResult>& rows, const ScenarioConfig& base);

int cli_main(const std::vector<std::string>& args);

}  // namespace swarmsim::cli
