#include "ensembed/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ensembed/io.hpp"
#include "ensembed/kmeans.hpp"
#include "ensembed/metrics.hpp"
#include "ensembed/parafac2.hpp"
#include "ensembed/rng.hpp"

namespace ensembed {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::string& what) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end)
    throw std::runtime_error("bad value for " + what + ": '" +
                             std::string(text) + "'");
  return value;
}

std::vector<int> parse_int_list(std::string_view text,
                                const std::string& what) {
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item =
        trim(text.substr(0, comma == std::string_view::npos ? text.size()
                                                            : comma));
    if (item.empty())
      throw std::runtime_error("empty element in list for " + what);
    out.push_back(parse_number<int>(item, what));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  if (out.empty()) throw std::runtime_error("empty list for " + what);
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string hex64(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

} // namespace

void PipelineConfig::validate() const {
  if (graph_path.empty()) throw std::invalid_argument("config: graph not set");
  if (labels_path.empty())
    throw std::invalid_argument("config: labels not set");
  if (view_dims.empty()) throw std::invalid_argument("config: dims is empty");
  for (int d : view_dims)
    if (d < 1) throw std::invalid_argument("config: dims entries must be >= 1");
  walks.validate();
  sgns.validate();
  if (rank_min < 1) throw std::invalid_argument("config: rank_min must be >= 1");
  if (rank_max < rank_min)
    throw std::invalid_argument("config: rank_max must be >= rank_min");
  if (rank_step < 1)
    throw std::invalid_argument("config: rank_step must be >= 1");
  if (kmeans_k < 0) throw std::invalid_argument("config: kmeans_k must be >= 0");
  if (kmeans_restarts < 1)
    throw std::invalid_argument("config: kmeans_restarts must be >= 1");
  if (kmeans_max_iters < 1)
    throw std::invalid_argument("config: kmeans max_iters must be >= 1");
  if (output_dir.empty()) throw std::invalid_argument("config: out not set");
}

std::vector<int> PipelineConfig::ranks() const {
  std::vector<int> out;
  for (int r = rank_min; r <= rank_max; r += rank_step) out.push_back(r);
  return out;
}

PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& context) {
  PipelineConfig config;
  std::set<std::string> seen;
  std::string_view rest = text;
  int line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto newline = rest.find('\n');
    std::string_view line =
        rest.substr(0, newline == std::string_view::npos ? rest.size()
                                                         : newline);
    rest = newline == std::string_view::npos ? std::string_view{}
                                             : rest.substr(newline + 1);
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const auto where = context + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos)
      throw std::runtime_error(where + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error(where + ": empty key");
    if (value.empty())
      throw std::runtime_error(where + ": empty value for " + key);
    if (!seen.insert(key).second)
      throw std::runtime_error(where + ": duplicate key " + key);

    if (key == "graph") {
      config.graph_path = std::string(value);
    } else if (key == "labels") {
      config.labels_path = std::string(value);
    } else if (key == "dims") {
      config.view_dims = parse_int_list(value, key);
    } else if (key == "walks_per_node") {
      config.walks.walks_per_node = parse_number<int>(value, key);
    } else if (key == "walk_length") {
      config.walks.walk_length = parse_number<int>(value, key);
    } else if (key == "window") {
      config.walks.window = parse_number<int>(value, key);
    } else if (key == "negatives") {
      config.sgns.negatives = parse_number<int>(value, key);
    } else if (key == "epochs") {
      config.sgns.epochs = parse_number<int>(value, key);
    } else if (key == "lr_initial") {
      config.sgns.initial_lr = parse_number<double>(value, key);
    } else if (key == "lr_final") {
      config.sgns.final_lr = parse_number<double>(value, key);
    } else if (key == "rank_min") {
      config.rank_min = parse_number<int>(value, key);
    } else if (key == "rank_max") {
      config.rank_max = parse_number<int>(value, key);
    } else if (key == "rank_step") {
      config.rank_step = parse_number<int>(value, key);
    } else if (key == "kmeans_k") {
      config.kmeans_k = parse_number<int>(value, key);
    } else if (key == "kmeans_restarts") {
      config.kmeans_restarts = parse_number<int>(value, key);
    } else if (key == "seed") {
      config.master_seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "out") {
      config.output_dir = std::string(value);
    } else {
      throw std::runtime_error(where + ": unknown key " + key);
    }
  }
  config.validate();
  return config;
}

PipelineConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_text(text, path);
}

std::string config_canonical_text(const PipelineConfig& config) {
  std::string out;
  const auto line = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  line("graph", config.graph_path);
  line("labels", config.labels_path);
  line("dims", join_ints(config.view_dims));
  line("walks_per_node", std::to_string(config.walks.walks_per_node));
  line("walk_length", std::to_string(config.walks.walk_length));
  line("window", std::to_string(config.walks.window));
  line("negatives", std::to_string(config.sgns.negatives));
  line("epochs", std::to_string(config.sgns.epochs));
  line("lr_initial", format_double(config.sgns.initial_lr));
  line("lr_final", format_double(config.sgns.final_lr));
  line("rank_min", std::to_string(config.rank_min));
  line("rank_max", std::to_string(config.rank_max));
  line("rank_step", std::to_string(config.rank_step));
  line("kmeans_k", std::to_string(config.kmeans_k));
  line("kmeans_restarts", std::to_string(config.kmeans_restarts));
  line("seed", std::to_string(config.master_seed));
  line("out", config.output_dir);
  return out;
}

std::uint64_t config_hash(const PipelineConfig& config) {
  return fnv1a64(config_canonical_text(config));
}

namespace {

struct Experiment {
  Graph graph;
  IntVector truth;
  int k = 0;
};

Experiment load_experiment(const PipelineConfig& config) {
  Graph g = load_edge_list(config.graph_path);
  IntVector truth = load_labels(config.labels_path, g.num_nodes());
  const int classes = truth.size() > 0 ? truth.maxCoeff() + 1 : 0;
  const int k = config.kmeans_k > 0 ? config.kmeans_k : classes;
  if (k < 1) throw std::runtime_error("cannot infer k: no labels");
  return Experiment{std::move(g), std::move(truth), k};
}

std::vector<ViewScore> score_views(const PipelineConfig& config,
                                   const IntVector& truth, int k,
                                   const std::vector<EmbeddingView>& views) {
  std::vector<ViewScore> out;
  out.reserve(views.size());
  for (std::size_t m = 0; m < views.size(); ++m) {
    KmeansParams params;
    params.k = k;
    params.restarts = config.kmeans_restarts;
    params.max_iters = config.kmeans_max_iters;
    params.seed = derive_seed(config.master_seed, "kmeans_view",
                              static_cast<std::uint64_t>(m));
    const IntVector labels = kmeans(views[m].matrix, params);
    const ClusterReport report = make_cluster_report(labels, truth);
    out.push_back(
        ViewScore{views[m].dim, labels, report.accuracy, report.nmi});
  }
  return out;
}

} // namespace

std::vector<EmbeddingView> build_views(const PipelineConfig& config,
                                       const Graph& g) {
  WalkParams walks = config.walks;
  walks.seed = derive_seed(config.master_seed, "walks", 0);
  SgnsParams sgns = config.sgns;
  sgns.seed = derive_seed(config.master_seed, "sgns", 0);
  return make_views(g, config.view_dims, walks, sgns);
}

std::vector<ViewScore> run_single_views(const PipelineConfig& config) {
  config.validate();
  const Experiment ex = load_experiment(config);
  const auto views = build_views(config, ex.graph);
  return score_views(config, ex.truth, ex.k, views);
}

SweepReport run_ensemble_sweep(const PipelineConfig& config) {
  config.validate();
  const Experiment ex = load_experiment(config);
  const auto views = build_views(config, ex.graph);

  SweepReport report;
  report.seed = config.master_seed;
  report.config_hash = ensembed::config_hash(config);
  report.single_views = score_views(config, ex.truth, ex.k, views);

  const int n = ex.graph.num_nodes();
  for (int rank : config.ranks()) {
    RankRow row;
    row.rank = rank;
    ViewSet<Real> subset;
    for (const auto& view : views) {
      if (view.dim >= rank)
        subset.push_back(view.matrix);
      else
        row.dropped_dims.push_back(view.dim);
    }
    row.views_used = static_cast<int>(subset.size());
    // A rank wider than every view, or than the node set, cannot be fit;
    // the row stays in the sweep with empty scores.
    if (!subset.empty() && rank <= n) {
      FitOptions opts;
      opts.seed = derive_seed(config.master_seed, "parafac2",
                              static_cast<std::uint64_t>(rank));
      const auto fit = parafac2_fit(subset, rank, opts);
      const Matrix embedding = extract_embedding(fit.model);
      KmeansParams params;
      params.k = ex.k;
      params.restarts = config.kmeans_restarts;
      params.max_iters = config.kmeans_max_iters;
      params.seed = derive_seed(config.master_seed, "kmeans_ensemble",
                                static_cast<std::uint64_t>(rank));
      const IntVector labels = kmeans(embedding, params);
      const ClusterReport scored = make_cluster_report(labels, ex.truth);
      row.accuracy = scored.accuracy;
      row.nmi = scored.nmi;
    }
    report.ranks.push_back(std::move(row));
  }
  return report;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace

void emit_reports(const SweepReport& report, const std::string& output_dir) {
  const std::filesystem::path dir(output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create " + dir.string() + ": " +
                             ec.message());

  {
    const auto path = dir / "rank_sweep.csv";
    auto out = open_out(path);
    out << "rank,accuracy,nmi,views_used\n";
    for (const auto& row : report.ranks) {
      out << row.rank << ',';
      if (row.accuracy) out << format_double(*row.accuracy);
      out << ',';
      if (row.nmi) out << format_double(*row.nmi);
      out << ',' << row.views_used << '\n';
    }
    finish_out(out, path);
  }

  {
    const auto path = dir / "method_comparison.csv";
    auto out = open_out(path);
    out << "method,dim_or_rank,accuracy,nmi\n";
    for (const auto& view : report.single_views)
      out << "deepwalk," << view.dim << ',' << format_double(view.accuracy)
          << ',' << format_double(view.nmi) << '\n';
    for (const auto& row : report.ranks) {
      if (!row.accuracy) continue;
      out << "ensemble," << row.rank << ',' << format_double(*row.accuracy)
          << ',' << format_double(*row.nmi) << '\n';
    }
    finish_out(out, path);
  }

  {
    const auto path = dir / "run_meta.txt";
    auto out = open_out(path);
    out << "seed = " << report.seed << '\n';
    out << "config_hash = " << hex64(report.config_hash) << '\n';
    for (const auto& row : report.ranks) {
      if (row.dropped_dims.empty()) continue;
      out << "dropped_r" << row.rank << " = " << join_ints(row.dropped_dims)
          << '\n';
    }
    finish_out(out, path);
  }
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

} // namespace

std::vector<RankRow> parse_rank_sweep_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "rank,accuracy,nmi,views_used")
    throw std::runtime_error("bad rank sweep header in " + path);
  std::vector<RankRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    if (fields.size() != 4)
      throw std::runtime_error("bad rank sweep row in " + path + ": " +
                               lines[i]);
    RankRow row;
    row.rank = parse_number<int>(fields[0], "rank");
    if (!fields[1].empty())
      row.accuracy = parse_number<double>(fields[1], "accuracy");
    if (!fields[2].empty())
      row.nmi = parse_number<double>(fields[2], "nmi");
    row.views_used = parse_number<int>(fields[3], "views_used");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ComparisonRow> parse_method_comparison_csv(
    const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "method,dim_or_rank,accuracy,nmi")
    throw std::runtime_error("bad comparison header in " + path);
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_csv(lines[i]);
    if (fields.size() != 4)
      throw std::runtime_error("bad comparison row in " + path + ": " +
                               lines[i]);
    ComparisonRow row;
    row.method = fields[0];
    row.dim_or_rank = parse_number<int>(fields[1], "dim_or_rank");
    row.accuracy = parse_number<double>(fields[2], "accuracy");
    row.nmi = parse_number<double>(fields[3], "nmi");
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace ensembed
