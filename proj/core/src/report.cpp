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

#include "mlvc/report.hpp"

#include <sstream>

#include <json.hpp>

#include "mlvc/error.hpp"

namespace mlvc {

using nlohmann::json;

namespace {

json pages(const PageCounts& p) {
  return {{"read", p.read}, {"written", p.written}};
}

json stats_json(const SuperstepStats& s) {
  return {{"superstep", s.superstep},
          {"active_vertices", s.active_vertices},
          {"absorbed_vertices", s.absorbed_vertices},
          {"active_edges", s.active_edges},
          {"messages_delivered", s.messages_delivered},
          {"messages_sent", s.messages_sent},
          {"dropped_messages", s.dropped_messages},
          {"plans", s.plans},
          {"pages",
           {{"csr", pages(s.csr)},
            {"colidx_read", s.colidx_pages_read},
            {"log", pages(s.log)},
            {"edgelog", pages(s.edgelog)},
            {"state", pages(s.state)}}},
          {"memory",
           {{"sort_resident_peak_bytes", s.sort_resident_peak_bytes},
            {"multilog_resident_peak_bytes", s.multilog_resident_peak_bytes},
            {"multilog_pages_evicted", s.multilog_pages_evicted},
            {"edgelog_bytes", s.edgelog_bytes}}},
          {"edgelog",
           {{"entries", s.edgelog_entries},
            {"served", s.edgelog_served},
            {"accessed_colidx_pages", s.accessed_colidx_pages},
            {"inefficient_pages", s.inefficient_pages},
            {"predicted_active", s.predicted_active},
            {"prediction_hits", s.prediction_hits},
            {"prediction_accuracy", s.prediction_accuracy}}},
          {"structural",
           {{"ops", s.structural_ops},
            {"merges", s.merges},
            {"missing_deletions", s.missing_deletions},
            {"ops_to_deleted", s.ops_to_deleted}}}};
}

json config_json(const EngineConfig& c) {
  return {{"memory_budget", c.memory_budget},
          {"sort_fraction", c.sort_fraction},
          {"multilog_fraction", c.multilog_fraction},
          {"edgelog_fraction", c.edgelog_fraction},
          {"max_supersteps", c.max_supersteps},
          {"edge_log", c.edge_log},
          {"presort", c.presort},
          {"combine", c.combine},
          {"parallel", c.parallel},
          {"threads", c.threads},
          {"history_depth", c.history_depth},
          {"inefficiency_threshold", c.inefficiency_threshold},
          {"merge_threshold", c.merge_threshold}};
}

json parse_object(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ContractViolation(std::string(what) + " is not valid JSON: " + e.what());
  }
}

}  // namespace

RunReport RunReport::from(std::string app, std::string app_params_json,
                          const EngineConfig& config, const GraphMeta& graph,
                          const RunResult& result, std::string summary_json) {
  RunReport r;
  r.app = std::move(app);
  r.app_params_json = std::move(app_params_json);
  r.config = config;
  r.graph = graph;
  r.supersteps = result.supersteps;
  r.summary_json = std::move(summary_json);
  r.final_merges = result.final_merges;
  r.init_state = result.init_state;
  return r;
}

std::string to_json(const RunReport& r) {
  json steps = json::array();
  SuperstepStats tot;
  for (const auto& s : r.supersteps) {
    steps.push_back(stats_json(s));
    tot.active_vertices += s.active_vertices;
    tot.messages_sent += s.messages_sent;
    tot.csr.read += s.csr.read;
    tot.csr.written += s.csr.written;
    tot.colidx_pages_read += s.colidx_pages_read;
    tot.log.read += s.log.read;
    tot.log.written += s.log.written;
    tot.edgelog.read += s.edgelog.read;
    tot.edgelog.written += s.edgelog.written;
    tot.state.read += s.state.read;
    tot.state.written += s.state.written;
    tot.structural_ops += s.structural_ops;
    tot.merges += s.merges;
  }
  json j;
  j["app"] = r.app;
  j["app_params"] = parse_object(r.app_params_json, "app parameters");
  j["config"] = config_json(r.config);
  j["graph"] = {{"num_vertices", r.graph.num_vertices},
                {"num_edges", r.graph.num_edges},
                {"num_intervals", r.graph.num_intervals()},
                {"page_size", r.graph.page_size},
                {"dataset_hash", r.graph.dataset_hash}};
  j["supersteps"] = steps;
  j["totals"] = {{"supersteps", r.supersteps.size()},
                 {"active_vertex_steps", tot.active_vertices},
                 {"messages_sent", tot.messages_sent},
                 {"pages",
                  {{"csr", pages(tot.csr)},
                   {"colidx_read", tot.colidx_pages_read},
                   {"log", pages(tot.log)},
                   {"edgelog", pages(tot.edgelog)},
                   {"state", pages(tot.state)},
                   {"init_state", pages(r.init_state)}}},
                 {"structural_ops", tot.structural_ops},
                 {"merges", tot.merges + r.final_merges}};
  j["summary"] = parse_object(r.summary_json, "app summary");
  return j.dump(2) + "\n";
}

std::string stats_csv(const std::vector<SuperstepStats>& stats) {
  std::ostringstream out;
  out << "superstep,active_vertices,absorbed_vertices,active_edges,"
         "messages_delivered,messages_sent,csr_pages_read,colidx_pages_read,"
         "log_pages_read,log_pages_written,edgelog_pages_read,"
         "edgelog_pages_written,state_pages_read,state_pages_written,"
         "sort_resident_peak_bytes,multilog_resident_peak_bytes,edgelog_bytes,"
         "inefficient_pages,accessed_colidx_pages,prediction_accuracy,"
         "structural_ops,merges,runtime_seconds\n";
  for (const auto& s : stats) {
    out << s.superstep << ',' << s.active_vertices << ',' << s.absorbed_vertices
        << ',' << s.active_edges << ',' << s.messages_delivered << ','
        << s.messages_sent << ',' << s.csr.read << ',' << s.colidx_pages_read
        << ',' << s.log.read << ',' << s.log.written << ',' << s.edgelog.read
        << ',' << s.edgelog.written << ',' << s.state.read << ','
        << s.state.written << ',' << s.sort_resident_peak_bytes << ','
        << s.multilog_resident_peak_bytes << ',' << s.edgelog_bytes << ','
        << s.inefficient_pages << ',' << s.accessed_colidx_pages << ','
        << s.prediction_accuracy << ',' << s.structural_ops << ',' << s.merges
        << ',' << s.runtime_seconds << '\n';
  }
  return out.str();
}

std::vector<CompareRow> compare_pages(const RunResult& result,
                                      const ShardSet& shards) {
  if (result.active_sets.size() != result.supersteps.size()) {
    throw ContractViolation("run did not record its active sets");
  }
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < result.supersteps.size(); ++i) {
    const auto& s = result.supersteps[i];
    if (s.active_vertices == 0) continue;
    CompareRow row;
    row.superstep = s.superstep;
    row.active_vertices = s.active_vertices;
    row.active_fraction = result.num_vertices == 0
                              ? 0.0
                              : static_cast<double>(s.active_vertices) /
                                    static_cast<double>(result.num_vertices);
    row.shard_pages = superstep_page_cost(shards, result.active_sets[i]);
    row.engine_pages = s.csr.read + s.edgelog.read;
    row.log_pages = s.log.read + s.log.written;
    if (row.engine_pages > 0) {
      row.ratio = static_cast<double>(row.shard_pages) /
                  static_cast<double>(row.engine_pages);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string compare_json(const std::string& app, const GraphMeta& graph,
                         const ShardSet& shards,
                         const std::vector<CompareRow>& rows) {
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"superstep", r.superstep},
                     {"active_vertices", r.active_vertices},
                     {"active_fraction", r.active_fraction},
                     {"shard_pages", r.shard_pages},
                     {"engine_pages", r.engine_pages},
                     {"log_pages", r.log_pages},
                     {"ratio", r.ratio ? json(*r.ratio) : json(nullptr)}});
  }
  json shard_pages = json::array();
  for (auto p : shards.pages) shard_pages.push_back(p);
  json j = {{"app", app},
            {"graph",
             {{"num_vertices", graph.num_vertices},
              {"num_edges", graph.num_edges},
              {"dataset_hash", graph.dataset_hash}}},
            {"shards",
             {{"count", shards.num_shards()},
              {"pages", shard_pages},
              {"total_pages", shards.total_pages()}}},
            {"supersteps", table}};
  return j.dump(2) + "\n";
}

}  // namespace mlvc
