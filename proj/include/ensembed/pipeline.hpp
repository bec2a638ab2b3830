#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ensembed/deepwalk.hpp"
#include "ensembed/graph.hpp"
#include "ensembed/types.hpp"

namespace ensembed {

/// Full experiment description: which graph, which views, which ranks.
struct PipelineConfig {
  std::string graph_path;
  std::string labels_path;
  std::vector<int> view_dims = {10, 20, 30, 40, 50, 60, 100, 200, 1000};
  WalkParams walks;
  SgnsParams sgns;  // dim is per-view; the field here is ignored
  int rank_min = 2;
  int rank_max = 20;
  int rank_step = 1;
  int kmeans_k = 0;  // 0 = number of distinct ground-truth labels
  int kmeans_restarts = 20;
  int kmeans_max_iters = 300;
  std::uint64_t master_seed = 42;
  std::string output_dir = "out";

  void validate() const;
  std::vector<int> ranks() const;  // the inclusive sweep, step applied
};

/// Parse the flat key-value config format: `key = value` lines, '#'
/// comments, lists comma-separated. Unknown keys are errors.
PipelineConfig parse_config(const std::string& path);
PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& context);

/// Canonical one-line-per-key rendering (fixed key order); config_hash is
/// the FNV-1a hash of this text.
std::string config_canonical_text(const PipelineConfig& config);
std::uint64_t config_hash(const PipelineConfig& config);

struct ViewScore {
  int dim = 0;
  IntVector labels;
  double accuracy = 0.0;
  double nmi = 0.0;
};

struct RankRow {
  int rank = 0;
  std::optional<double> accuracy;  // empty when the rank is infeasible
  std::optional<double> nmi;
  int views_used = 0;
  std::vector<int> dropped_dims;
};

struct SweepReport {
  std::vector<RankRow> ranks;
  std::vector<ViewScore> single_views;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

/// All configured views of one graph, trained from seeds derived from the
/// master seed (stage tags "walks" and "sgns").
std::vector<EmbeddingView> build_views(const PipelineConfig& config,
                                       const Graph& g);

/// K-means + scoring of every raw view against the ground truth.
std::vector<ViewScore> run_single_views(const PipelineConfig& config);

/// The full experiment: per rank in the sweep, drop views narrower than the
/// rank, fit the coupled factorization on the rest, cluster the shared
/// embedding and score it; plus the single-view baselines. Writes nothing.
SweepReport run_ensemble_sweep(const PipelineConfig& config);

/// Write rank_sweep.csv, method_comparison.csv and run_meta.txt into
/// output_dir ('.' decimals, '\n' line ends, header rows).
void emit_reports(const SweepReport& report, const std::string& output_dir);

/// Parsers for the emitted CSVs (exact round-trip of the report rows).
std::vector<RankRow> parse_rank_sweep_csv(const std::string& path);

struct ComparisonRow {
  std::string method;
  int dim_or_rank = 0;
  double accuracy = 0.0;
  double nmi = 0.0;
};
std::vector<ComparisonRow> parse_method_comparison_csv(
    const std::string& path);

} // namespace ensembed
