#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "ensembed/pipeline.hpp"
#include "ensembed/types.hpp"

#include "test_util.hpp"

using namespace ensembed;

namespace {

// Two triangles joined by a single bridge edge; communities = triangles.
const char* kTinyGraph =
    "N 6\n"
    "0 1\n0 2\n1 2\n"
    "3 4\n3 5\n4 5\n"
    "2 3\n";
const char* kTinyLabels = "0 0\n1 0\n2 0\n3 1\n4 1\n5 1\n";

PipelineConfig tiny_config(const testutil::TempDir& tmp) {
  const auto graph = testutil::write_file(tmp, "g.txt", kTinyGraph);
  const auto labels = testutil::write_file(tmp, "l.txt", kTinyLabels);
  PipelineConfig config;
  config.graph_path = graph;
  config.labels_path = labels;
  config.view_dims = {2, 3};
  config.walks.walks_per_node = 4;
  config.walks.walk_length = 10;
  config.walks.window = 3;
  config.sgns.negatives = 3;
  config.sgns.epochs = 2;
  config.rank_min = 2;
  config.rank_max = 4;
  config.kmeans_restarts = 4;
  config.master_seed = 7;
  config.output_dir = tmp.file("out");
  return config;
}

} // namespace

TEST_CASE("config text parses every key") {
  const std::string text =
      "# experiment\n"
      "graph = g.txt\n"
      "labels = l.txt\n"
      "dims = 4, 8,16\n"
      "walks_per_node = 3\n"
      "walk_length = 20\n"
      "window = 4\n"
      "negatives = 7\n"
      "epochs = 2\n"
      "lr_initial = 0.05\n"
      "lr_final = 0.001\n"
      "rank_min = 3\n"
      "rank_max = 9\n"
      "rank_step = 2\n"
      "kmeans_k = 5\n"
      "kmeans_restarts = 11\n"
      "seed = 99\n"
      "out = results\n";
  const PipelineConfig config = parse_config_text(text, "inline");
  CHECK(config.graph_path == "g.txt");
  CHECK(config.labels_path == "l.txt");
  CHECK(config.view_dims == std::vector<int>{4, 8, 16});
  CHECK(config.walks.walks_per_node == 3);
  CHECK(config.walks.walk_length == 20);
  CHECK(config.walks.window == 4);
  CHECK(config.sgns.negatives == 7);
  CHECK(config.sgns.epochs == 2);
  CHECK(config.sgns.initial_lr == 0.05);
  CHECK(config.sgns.final_lr == 0.001);
  CHECK(config.rank_min == 3);
  CHECK(config.rank_max == 9);
  CHECK(config.rank_step == 2);
  CHECK(config.kmeans_k == 5);
  CHECK(config.kmeans_restarts == 11);
  CHECK(config.master_seed == 99);
  CHECK(config.output_dir == "results");
  CHECK(config.ranks() == std::vector<int>{3, 5, 7, 9});
}

TEST_CASE("config defaults are the documented experiment") {
  const PipelineConfig config =
      parse_config_text("graph = g\nlabels = l\n", "inline");
  CHECK(config.view_dims ==
        std::vector<int>{10, 20, 30, 40, 50, 60, 100, 200, 1000});
  CHECK(config.walks.walks_per_node == 10);
  CHECK(config.walks.walk_length == 40);
  CHECK(config.walks.window == 5);
  CHECK(config.sgns.negatives == 5);
  CHECK(config.sgns.epochs == 5);
  CHECK(config.sgns.initial_lr == 0.025);
  CHECK(config.sgns.final_lr == 0.0001);
  CHECK(config.rank_min == 2);
  CHECK(config.rank_max == 20);
  CHECK(config.rank_step == 1);
  CHECK(config.kmeans_k == 0);
  CHECK(config.kmeans_restarts == 20);
  CHECK(config.master_seed == 42);
  CHECK(config.output_dir == "out");
}

TEST_CASE("config parsing rejects malformed input") {
  CHECK_THROWS_WITH_AS(
      parse_config_text("graph = g\nlabels = l\nwat = 1\n", "inline"),
      doctest::Contains("unknown key"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_config_text("graph = g\ngraph = h\nlabels = l\n", "inline"),
      doctest::Contains("duplicate"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_config_text("graph = g\nlabels = l\nseed = abc\n", "inline"),
      doctest::Contains("seed"), std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("graph = g\nlabels = l\nno_equals\n",
                                    "inline"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("labels = l\n", "inline"),
                  std::invalid_argument);  // graph missing
  CHECK_THROWS_AS(
      parse_config_text("graph = g\nlabels = l\ndims = 4,,8\n", "inline"),
      std::runtime_error);
  CHECK_THROWS_AS(
      parse_config_text("graph = g\nlabels = l\nrank_min = 9\nrank_max = 3\n",
                        "inline"),
      std::invalid_argument);
}

TEST_CASE("canonical text round-trips and drives the hash") {
  testutil::TempDir tmp;
  const PipelineConfig config = tiny_config(tmp);
  const PipelineConfig reparsed =
      parse_config_text(config_canonical_text(config), "canon");
  CHECK(config_canonical_text(reparsed) == config_canonical_text(config));
  CHECK(config_hash(reparsed) == config_hash(config));

  PipelineConfig changed = config;
  changed.master_seed += 1;
  CHECK(config_hash(changed) != config_hash(config));
}

TEST_CASE("sweep covers feasible ranks and marks the rest") {
  testutil::TempDir tmp;
  const PipelineConfig config = tiny_config(tmp);
  const SweepReport report = run_ensemble_sweep(config);

  CHECK(report.seed == config.master_seed);
  CHECK(report.config_hash == config_hash(config));
  REQUIRE(report.single_views.size() == 2);
  CHECK(report.single_views[0].dim == 2);
  CHECK(report.single_views[1].dim == 3);
  for (const auto& view : report.single_views) {
    CHECK(view.labels.size() == 6);
    CHECK(view.accuracy >= 0.5);  // never below chance on a 2-class split
    CHECK(view.nmi >= 0.0);
  }

  REQUIRE(report.ranks.size() == 3);
  CHECK(report.ranks[0].rank == 2);
  CHECK(report.ranks[0].views_used == 2);
  CHECK(report.ranks[0].dropped_dims.empty());
  REQUIRE(report.ranks[0].accuracy.has_value());

  CHECK(report.ranks[1].rank == 3);
  CHECK(report.ranks[1].views_used == 1);
  CHECK(report.ranks[1].dropped_dims == std::vector<int>{2});
  CHECK(report.ranks[1].accuracy.has_value());

  CHECK(report.ranks[2].rank == 4);
  CHECK(report.ranks[2].views_used == 0);
  CHECK_FALSE(report.ranks[2].accuracy.has_value());
  CHECK_FALSE(report.ranks[2].nmi.has_value());
}

TEST_CASE("single-view baselines match between entry points") {
  testutil::TempDir tmp;
  const PipelineConfig config = tiny_config(tmp);
  const auto standalone = run_single_views(config);
  const auto report = run_ensemble_sweep(config);
  REQUIRE(standalone.size() == report.single_views.size());
  for (std::size_t m = 0; m < standalone.size(); ++m) {
    CHECK(standalone[m].dim == report.single_views[m].dim);
    CHECK(standalone[m].accuracy == report.single_views[m].accuracy);
    CHECK(standalone[m].nmi == report.single_views[m].nmi);
    CHECK(standalone[m].labels == report.single_views[m].labels);
  }
}

TEST_CASE("reports round-trip through their csv files") {
  testutil::TempDir tmp;
  const PipelineConfig config = tiny_config(tmp);
  const SweepReport report = run_ensemble_sweep(config);
  emit_reports(report, config.output_dir);

  const auto rows =
      parse_rank_sweep_csv(config.output_dir + "/rank_sweep.csv");
  REQUIRE(rows.size() == report.ranks.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].rank == report.ranks[i].rank);
    CHECK(rows[i].views_used == report.ranks[i].views_used);
    CHECK(rows[i].accuracy.has_value() ==
          report.ranks[i].accuracy.has_value());
    if (rows[i].accuracy)
      CHECK(*rows[i].accuracy == *report.ranks[i].accuracy);
    if (rows[i].nmi) CHECK(*rows[i].nmi == *report.ranks[i].nmi);
  }

  const auto comparison = parse_method_comparison_csv(
      config.output_dir + "/method_comparison.csv");
  REQUIRE(comparison.size() == 4);  // 2 views + 2 feasible ranks
  CHECK(comparison[0].method == "deepwalk");
  CHECK(comparison[0].dim_or_rank == 2);
  CHECK(comparison[0].accuracy == report.single_views[0].accuracy);
  CHECK(comparison[1].method == "deepwalk");
  CHECK(comparison[2].method == "ensemble");
  CHECK(comparison[2].dim_or_rank == 2);
  CHECK(comparison[3].method == "ensemble");
  CHECK(comparison[3].dim_or_rank == 3);
  CHECK(comparison[3].accuracy == *report.ranks[1].accuracy);

  const auto meta = testutil::read_file(config.output_dir + "/run_meta.txt");
  CHECK(meta.find("seed = 7") != std::string::npos);
  CHECK(meta.find("config_hash = ") != std::string::npos);
  CHECK(meta.find("dropped_r3 = 2") != std::string::npos);
}

TEST_CASE("report files are byte-identical across repeated runs") {
  testutil::TempDir tmp;
  PipelineConfig config = tiny_config(tmp);

  const SweepReport first = run_ensemble_sweep(config);
  emit_reports(first, tmp.file("a"));
  const SweepReport second = run_ensemble_sweep(config);
  emit_reports(second, tmp.file("b"));

  for (const char* name :
       {"rank_sweep.csv", "method_comparison.csv", "run_meta.txt"}) {
    const auto a = testutil::read_file(tmp.file("a") + "/" + name);
    const auto b = testutil::read_file(tmp.file("b") + "/" + name);
    CHECK(a == b);
    CHECK(!a.empty());
  }
}

TEST_CASE("csv parsers reject foreign files") {
  testutil::TempDir tmp;
  const auto bad = testutil::write_file(tmp, "bad.csv", "nope\n1,2\n");
  CHECK_THROWS_AS(parse_rank_sweep_csv(bad), std::runtime_error);
  CHECK_THROWS_AS(parse_method_comparison_csv(bad), std::runtime_error);
}
