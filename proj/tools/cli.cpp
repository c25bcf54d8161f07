/** Copyright 2026 The mlvc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlvc/apps.hpp"
#include "mlvc/csr_graph.hpp"
#include "mlvc/edge_list.hpp"
#include "mlvc/engine.hpp"
#include "mlvc/error.hpp"
#include "mlvc/report.hpp"
#include "mlvc/shard_baseline.hpp"

namespace mlvc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConvertArgs {
  std::string input;
  std::string out;
  bool undirected = false;
  std::uint64_t memory_budget = std::uint64_t{1} << 30;
  double sort_fraction = 0.75;
  std::size_t page_size = kDefaultPageSize;
};

struct RunArgs {
  std::string graph;
  std::string work;
  std::string report;
  std::string csv;
  apps::AppOptions app;
  EngineConfig engine;
  bool no_combine = false;
  // compare only
  std::size_t shards = 0;
  std::string shard_dir;
};

void add_engine_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--graph", a.graph, "Converted graph directory")->required();
  cmd->add_option("--app", a.app.name, "bfs, pagerank, flp, gc, mis, rw or kcore")
      ->required();
  cmd->add_option("--work", a.work, "Scratch directory (default <graph>/work)");
  cmd->add_option("--source", a.app.source, "BFS source vertex (dense id)");
  cmd->add_option("--alpha", a.app.alpha, "PageRank damping");
  cmd->add_option("--threshold", a.app.threshold, "PageRank activation threshold");
  cmd->add_option("--seed", a.app.seed, "Seed for gc, mis and rw");
  cmd->add_option("--stride", a.app.stride, "Random-walk source stride (0 = n/100)");
  cmd->add_option("--steps", a.app.steps, "Random-walk step budget");
  cmd->add_option("--k", a.app.k, "K-core threshold");

  auto& e = a.engine;
  cmd->add_option("--memory-budget", e.memory_budget, "Bytes");
  cmd->add_option("--sort-fraction", e.sort_fraction);
  cmd->add_option("--multilog-fraction", e.multilog_fraction);
  cmd->add_option("--edgelog-fraction", e.edgelog_fraction);
  cmd->add_option("--max-supersteps", e.max_supersteps);
  cmd->add_flag("--edge-log,!--no-edge-log", e.edge_log, "Edge-log optimizer");
  cmd->add_flag("--presort", e.presort, "Sort log pages before flushing");
  cmd->add_flag("--no-combine", a.no_combine, "Deliver every message individually");
  cmd->add_flag("--parallel", e.parallel, "Process vertices on worker threads");
  cmd->add_option("--threads", e.threads);
  cmd->add_option("--history", e.history_depth, "Supersteps of activity history");
  cmd->add_option("--inefficiency-threshold", e.inefficiency_threshold);
  cmd->add_option("--merge-threshold", e.merge_threshold);
}

json app_params(const RunArgs& a) {
  const auto& o = a.app;
  if (o.name == "bfs") return {{"source", o.source}};
  if (o.name == "pagerank" || o.name == "pr") {
    return {{"alpha", o.alpha}, {"threshold", o.threshold}};
  }
  if (o.name == "gc" || o.name == "mis") return {{"seed", o.seed}};
  if (o.name == "rw") {
    return {{"seed", o.seed}, {"stride", o.stride}, {"steps", o.steps}};
  }
  if (o.name == "kcore") return {{"k", o.k}};
  return json::object();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw IoError("cannot write '" + path + "'");
}

struct Executed {
  GraphMeta meta;
  RunResult result;
  std::string summary;
  std::string params;
};

Executed execute(RunArgs& a, bool record_active_sets) {
  a.engine.work_dir = a.work.empty() ? fs::path(a.graph) / "work" : fs::path(a.work);
  a.engine.combine = !a.no_combine;
  a.engine.record_active_sets = record_active_sets;
  Engine engine(a.graph, a.engine);
  auto program = apps::make_app(a.app, engine.meta().num_vertices);
  Executed ex;
  ex.meta = engine.meta();
  ex.result = engine.run(*program);
  ex.summary = program->summary_json(ex.result.states, ex.result.num_vertices);
  ex.params = app_params(a).dump();
  return ex;
}

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  auto parsed = read_edge_list_file(a.input, a.undirected);
  const auto sort_budget = static_cast<std::uint64_t>(
      static_cast<double>(a.memory_budget) * a.sort_fraction);
  auto graph = CsrGraph::create(a.out, parsed.graph, a.page_size, 16,
                                sort_budget, parsed.content_hash);
  std::ofstream map(fs::path(a.out) / "mapping.txt");
  map << "# dense original\n";
  for (std::size_t i = 0; i < parsed.original_ids.size(); ++i) {
    map << i << ' ' << parsed.original_ids[i] << '\n';
  }
  if (!map) throw IoError("cannot write mapping file in '" + a.out + "'");
  const auto& m = graph.meta();
  json j = {{"num_vertices", m.num_vertices},
            {"num_edges", m.num_edges},
            {"num_intervals", m.num_intervals()},
            {"dataset_hash", m.dataset_hash},
            {"total_pages", graph.total_pages()}};
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_run(RunArgs& a, std::ostream& out) {
  auto ex = execute(a, false);
  auto report = RunReport::from(a.app.name, ex.params, a.engine, ex.meta,
                                ex.result, ex.summary);
  auto text = to_json(report);
  if (a.report.empty()) {
    out << text;
  } else {
    write_file(a.report, text);
  }
  if (!a.csv.empty()) write_file(a.csv, stats_csv(ex.result.supersteps));
  return kExitOk;
}

int cmd_compare(RunArgs& a, std::ostream& out) {
  auto ex = execute(a, true);
  CsrGraph graph = CsrGraph::open(a.graph);
  const std::size_t shards = a.shards ? a.shards : ex.meta.num_intervals();
  const fs::path dir = a.shard_dir.empty() ? a.engine.work_dir / "shards"
                                           : fs::path(a.shard_dir);
  fs::remove_all(dir);
  auto set = build_shards(load_edges(graph), shards, dir, ex.meta.page_size);
  auto rows = compare_pages(ex.result, set);
  auto text = compare_json(a.app.name, ex.meta, set, rows);
  if (a.report.empty()) {
    out << text;
  } else {
    write_file(a.report, text);
  }
  return kExitOk;
}

int cmd_stats(const std::string& dir, std::ostream& out) {
  CsrGraph graph = CsrGraph::open(dir);
  const auto& m = graph.meta();
  json intervals = json::array();
  for (IntervalId k = 0; k < graph.num_intervals(); ++k) {
    const auto& p = graph.partition(k);
    intervals.push_back({{"interval", k},
                         {"first_vertex", m.interval_begin(k)},
                         {"vertices", m.interval_size(k)},
                         {"edges", p.edge_count()},
                         {"in_degree_sum", m.interval_in_degree.at(k)},
                         {"pages", p.total_pages()}});
  }
  json j = {{"num_vertices", m.num_vertices},
            {"num_edges", m.num_edges},
            {"page_size", m.page_size},
            {"value_width", m.value_width},
            {"record_size", m.record_size},
            {"sort_budget", m.sort_budget},
            {"dataset_hash", m.dataset_hash},
            {"total_pages", graph.total_pages()},
            {"intervals", intervals}};
  out << j.dump(2) << "\n";
  return kExitOk;
}

void print_error(std::ostream& err, std::string_view kind, const std::string& msg) {
  json j = {{"error", {{"kind", kind}, {"message", msg}}}};
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Out-of-core vertex-centric graph engine", "mlvc"};
  app.require_subcommand(1);

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "Edge list to partitioned CSR");
  convert->add_option("--input", conv.input, "Edge-list text file")->required();
  convert->add_option("--out", conv.out, "Output graph directory")->required();
  convert->add_flag("--undirected", conv.undirected, "Store both directions");
  convert->add_option("--memory-budget", conv.memory_budget, "Bytes");
  convert->add_option("--sort-fraction", conv.sort_fraction);
  convert->add_option("--page-size", conv.page_size);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an application");
  add_engine_flags(run, run_args);
  run->add_option("--report", run_args.report, "Write the JSON report here");
  run->add_option("--csv", run_args.csv, "Write per-superstep stats as CSV");

  RunArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "Shard vs CSR page counts");
  add_engine_flags(compare, cmp_args);
  compare->add_option("--shards", cmp_args.shards, "Shard count (default: intervals)");
  compare->add_option("--shard-dir", cmp_args.shard_dir);
  compare->add_option("--report", cmp_args.report, "Write the JSON table here");

  std::string stats_dir;
  auto* stats = app.add_subcommand("stats", "Describe a converted graph");
  stats->add_option("--graph", stats_dir)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (convert->parsed()) return cmd_convert(conv, out);
    if (run->parsed()) return cmd_run(run_args, out);
    if (compare->parsed()) return cmd_compare(cmp_args, out);
    if (stats->parsed()) return cmd_stats(stats_dir, out);
  } catch (const Error& e) {
    print_error(err, to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::kUsage ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mlvc::cli
