#pragma once

// Batch commands behind the CLI and the C API. Each command writes its files
// into an output directory and returns a manifest describing them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksrobin/blowup.hpp"
#include "ksrobin/config.hpp"
#include "ksrobin/regime.hpp"
#include "ksrobin/solver.hpp"

namespace ksr {

struct OutputManifest {
  std::string run_id;
  std::vector<std::string> paths; ///< every emitted file except manifest.json itself
  std::string config_echo;
  std::string status;  ///< termination kind (per variant/cell joined for compare/sweep)
  std::string summary; ///< one line per run
  std::string manifest_path;
};

/// Environment variable holding the sweep worker count.
inline constexpr const char* workers_env = "KSROBIN_WORKERS";

/// KSROBIN_WORKERS if set (positive integer, otherwise ValidationError),
/// else the available hardware parallelism (at least 1).
std::size_t worker_count();

/// `a b` header then `t value` rows. Rejects an empty series.
void write_timeseries_dat(const std::vector<std::pair<double, double>>& series,
                          const std::string& path);

/// `# x_min x_max y_min y_max resolution` header, then one comma-separated
/// row per pixel row; NaN outside the disk.
void write_snapshot_csv(const Image2D& image, const std::string& path);

/// Tab-separated table of every record of a trajectory.
void write_diagnostics_tsv(const Trajectory& trajectory, const std::string& path);

/// The optional override replaces output.dir.
OutputManifest cmd_run(const std::string& config_path,
                       const std::optional<std::string>& out_dir = std::nullopt);
OutputManifest cmd_compare(const std::string& config_path,
                           const std::optional<std::string>& out_dir = std::nullopt);
OutputManifest cmd_sweep(const std::string& config_path,
                         const std::optional<std::string>& out_dir = std::nullopt);

struct ClassifyRequest {
  std::optional<double> chi, h, alpha, tau, a, b, c;
  std::optional<double> trace_c;
  /// Geometry used when the trace constant has to be estimated.
  int n{2};
  double radius{1.0};
  std::size_t cells{1024};
};

struct ClassifyResult {
  RegimeVerdict verdict;
  TraceConstantEstimate trace;
  std::string text; ///< human-readable report
};

/// Missing required parameters are reported together, by option name.
ClassifyResult cmd_classify(const ClassifyRequest& request);

} // namespace ksr
