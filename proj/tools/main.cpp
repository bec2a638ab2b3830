#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ensembed/graph.hpp"
#include "ensembed/io.hpp"
#include "ensembed/metrics.hpp"
#include "ensembed/parafac2.hpp"
#include "ensembed/pipeline.hpp"
#include "ensembed/rng.hpp"

namespace {

ensembed::PipelineConfig load_config(const std::string& path,
                                     const std::optional<std::uint64_t>& seed,
                                     const std::string& out) {
  auto config = ensembed::parse_config(path);
  if (seed) config.master_seed = *seed;
  if (!out.empty()) config.output_dir = out;
  return config;
}

// Node count implied by a label file: highest node id + 1.
int infer_num_nodes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  int max_node = -1;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const char* ptr = line.data();
    const char* end = ptr + line.size();
    while (ptr != end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    if (ptr == end) continue;
    int node = 0;
    const auto result = std::from_chars(ptr, end, node);
    if (result.ec != std::errc{})
      throw std::runtime_error("bad node id in " + path + ": " + line);
    if (node > max_node) max_node = node;
  }
  if (max_node < 0) throw std::runtime_error("no labels in " + path);
  return max_node + 1;
}

int run_views(const ensembed::PipelineConfig& config) {
  const ensembed::Graph g = ensembed::load_edge_list(config.graph_path);
  const auto views = ensembed::build_views(config, g);
  std::vector<ensembed::Matrix> matrices;
  matrices.reserve(views.size());
  for (const auto& view : views) matrices.push_back(view.matrix);
  const auto files = ensembed::dump_views(config.output_dir, matrices);
  std::cout << "wrote " << files.size() << " views to " << config.output_dir
            << "\n";
  return 0;
}

int run_fit(const ensembed::PipelineConfig& config,
            const std::string& views_dir, int rank) {
  const auto views = ensembed::load_views(views_dir);
  ensembed::FitOptions opts;
  opts.seed = ensembed::derive_seed(config.master_seed, "parafac2",
                                    static_cast<std::uint64_t>(rank));
  const auto fit = ensembed::parafac2_fit(views, rank, opts);
  std::filesystem::create_directories(config.output_dir);
  const auto path = std::filesystem::path(config.output_dir) /
                    ("model_r" + std::to_string(rank) + ".txt");
  ensembed::dump_model(path.string(), fit.model);
  std::cout << "rank " << rank << ": objective "
            << ensembed::format_double(fit.trace.back()) << " after "
            << fit.trace.size() - 1 << " sweeps, model in " << path.string()
            << "\n";
  return 0;
}

int run_sweep(const ensembed::PipelineConfig& config) {
  const auto report = ensembed::run_ensemble_sweep(config);
  ensembed::emit_reports(report, config.output_dir);
  std::cout << "wrote rank_sweep.csv, method_comparison.csv, run_meta.txt to "
            << config.output_dir << "\n";
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& truth_path) {
  const int n = infer_num_nodes(truth_path);
  const ensembed::IntVector truth = ensembed::load_labels(truth_path, n);
  const ensembed::IntVector pred = ensembed::load_labels(pred_path, n);
  const auto report = ensembed::make_cluster_report(pred, truth);
  std::cout << "accuracy = " << ensembed::format_double(report.accuracy)
            << "\n"
            << "nmi = " << ensembed::format_double(report.nmi) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"ensemble node embeddings: views, coupled fit, evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "experiment config");
    if (config_required) c->required();
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--out", out, "output directory override");
  };

  auto* views = app.add_subcommand("views", "train and dump embedding views");
  add_common(views, true);

  auto* fit = app.add_subcommand("fit", "fit one rank from dumped views");
  add_common(fit, true);
  std::string views_dir;
  int rank = 0;
  fit->add_option("--views", views_dir, "directory with dumped views")
      ->required();
  fit->add_option("--rank", rank, "factorization rank")->required();

  auto* sweep = app.add_subcommand("sweep", "full rank sweep experiment");
  add_common(sweep, true);

  auto* eval = app.add_subcommand("eval", "score predicted labels");
  std::string pred_path;
  std::string truth_path;
  eval->add_option("--pred", pred_path, "predicted label file")->required();
  eval->add_option("--truth", truth_path, "ground-truth label file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (views->parsed())
      return run_views(load_config(config_path, seed, out));
    if (fit->parsed())
      return run_fit(load_config(config_path, seed, out), views_dir, rank);
    if (sweep->parsed()) return run_sweep(load_config(config_path, seed, out));
    if (eval->parsed()) return run_eval(pred_path, truth_path);
  } catch (const std::exception& e) {
    std::cerr << "ensembed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
