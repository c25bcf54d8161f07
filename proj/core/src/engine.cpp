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

#include "mlvc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include "mlvc/error.hpp"
#include "mlvc/sortgroup.hpp"

namespace mlvc {

namespace fs = std::filesystem;

std::uint64_t EngineConfig::sort_budget() const {
  return static_cast<std::uint64_t>(static_cast<double>(memory_budget) * sort_fraction);
}
std::uint64_t EngineConfig::multilog_budget() const {
  return static_cast<std::uint64_t>(static_cast<double>(memory_budget) *
                                    multilog_fraction);
}
std::uint64_t EngineConfig::edgelog_budget() const {
  return static_cast<std::uint64_t>(static_cast<double>(memory_budget) *
                                    edgelog_fraction);
}

void EngineConfig::validate() const {
  auto frac = [](double f, const char* name) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw ConfigError(std::string(name) + " must be in (0, 1]");
    }
  };
  frac(sort_fraction, "sort fraction");
  frac(multilog_fraction, "multi-log fraction");
  if (!(edgelog_fraction >= 0.0 && edgelog_fraction <= 1.0)) {
    throw ConfigError("edge-log fraction must be in [0, 1]");
  }
  if (sort_fraction + multilog_fraction + edgelog_fraction > 1.0 + 1e-12) {
    throw ConfigError("memory splits add up to more than the budget");
  }
  if (memory_budget == 0) throw ConfigError("memory budget must be positive");
  if (history_depth == 0) throw ConfigError("history depth must be >= 1");
  if (!(inefficiency_threshold > 0.0 && inefficiency_threshold <= 1.0)) {
    throw ConfigError("inefficiency threshold must be in (0, 1]");
  }
  if (merge_threshold == 0) throw ConfigError("merge threshold must be >= 1");
  if (work_dir.empty()) throw ConfigError("work directory is required");
}

namespace {

PageCounts diff(const IoCounters& now, const PageCounts& before) {
  return {now.pages_read.load() - before.read,
          now.pages_written.load() - before.written};
}

PageCounts snap(const IoCounters& c) {
  return {c.pages_read.load(), c.pages_written.load()};
}

// One vertex picked for processing, with its inbox (possibly empty).
struct Item {
  VertexId v;
  Inbox inbox;
};

}  // namespace

struct Engine::Run {
  const EngineConfig& cfg;
  const VertexProgram& prog;
  CsrGraph graph;
  const GraphMeta& meta;
  std::uint64_t n;
  std::size_t payload_width;
  std::size_t record_width;
  bool use_combine;

  IoCounters csr_io, log_io, el_io, state_io;
  fs::path log_dir, state_dir, el_dir, merged_dir;
  std::unique_ptr<MultiLog> mlog;
  std::vector<SealedLog> sealed;
  std::unique_ptr<StateStore> states;
  std::unique_ptr<StateStore> edge_states;
  StructuralBuffer structural;
  std::uint64_t merge_gen = 0;

  Bitset deleted;
  Bitset forced;
  Bitset active_now;
  ActivityHistory history;
  Bitset predicted_now;  // predicted by the previous superstep
  Bitset predicted_next;
  PageUsageStats usage;
  std::unique_ptr<EdgeLogWriter> writer;
  std::optional<EdgeLogReader> reader;

  std::mutex mu;  // deleted, active_now, usage, log candidates, cur
  std::map<IntervalId, std::vector<AdjacencyView>> log_candidates;
  SuperstepStats cur;

  Run(const EngineConfig& c, const VertexProgram& p, const fs::path& graph_dir)
      : cfg(c),
        prog(p),
        graph(CsrGraph::open(graph_dir, &csr_io)),
        meta(graph.meta()),
        n(meta.num_vertices),
        payload_width(p.payload_width()),
        record_width(record_width_for(p.payload_width())),
        use_combine(c.combine && p.has_combine()),
        structural(meta.num_intervals()),
        deleted(meta.num_vertices),
        forced(meta.num_vertices),
        active_now(meta.num_vertices),
        history(meta.num_vertices, c.history_depth),
        predicted_now(meta.num_vertices),
        predicted_next(meta.num_vertices),
        usage(meta.page_size) {}

  VertexId first(IntervalId k) const { return meta.interval_begin(k); }

  void check_payload(std::span<const std::byte> payload) const {
    if (payload.size() != payload_width) {
      throw ContractViolation(prog.name() + ": payload of " +
                              std::to_string(payload.size()) +
                              " bytes, expected " +
                              std::to_string(payload_width));
    }
  }

  void send(VertexId from, VertexId dest, std::span<const std::byte> payload,
            std::uint64_t superstep) {
    check_payload(payload);
    if (dest >= n) {
      throw ContractViolation(prog.name() + ": vertex " + std::to_string(from) +
                              " sent to invalid vertex " + std::to_string(dest) +
                              " in superstep " + std::to_string(superstep));
    }
    mlog->send_update({dest, from, payload});
  }

  void setup() {
    const fs::path& w = cfg.work_dir;
    log_dir = w / "logs";
    state_dir = w / "state";
    el_dir = w / "edgelog";
    merged_dir = w / "merged";
    for (const auto& d : {log_dir, state_dir, el_dir, merged_dir}) {
      fs::remove_all(d);
      fs::create_directories(d);
    }
    const std::size_t ni = meta.num_intervals();
    const std::uint64_t pages = cfg.multilog_budget() / meta.page_size;
    if (pages < ni) {
      throw ConfigError("multi-log budget holds " + std::to_string(pages) +
                        " pages but the graph has " + std::to_string(ni) +
                        " intervals");
    }
    MultiLogConfig mc;
    mc.dir = log_dir;
    mc.page_size = meta.page_size;
    mc.payload_width = payload_width;
    mc.buffer_budget = cfg.multilog_budget();
    mc.presort = cfg.presort;
    mlog = std::make_unique<MultiLog>(meta.interval_bounds, mc, &log_io);

    std::vector<std::uint64_t> slots(ni);
    for (IntervalId k = 0; k < ni; ++k) slots[k] = meta.interval_size(k);
    states = std::make_unique<StateStore>(state_dir, "state", slots,
                                          prog.state_width(), meta.page_size,
                                          &state_io);
    if (prog.edge_state_width() > 0) {
      std::vector<std::uint64_t> eslots(ni);
      for (IntervalId k = 0; k < ni; ++k) eslots[k] = graph.partition(k).edge_count();
      edge_states = std::make_unique<StateStore>(state_dir, "edge", eslots,
                                                 prog.edge_state_width(),
                                                 meta.page_size, &state_io);
    }
  }

  class InitCtx final : public InitContext {
   public:
    InitCtx(Run& r, VertexId v, std::span<std::byte> state)
        : r_(r), v_(v), state_(state) {}
    VertexId vertex() const override { return v_; }
    std::uint64_t num_vertices() const override { return r_.n; }
    std::span<std::byte> state() override { return state_; }
    void activate() override { r_.forced.set(v_); }
    void send_update(VertexId dest, std::span<const std::byte> payload) override {
      r_.send(v_, dest, payload, 0);
    }

   private:
    Run& r_;
    VertexId v_;
    std::span<std::byte> state_;
  };

  void initialize() {
    const std::size_t sw = prog.state_width();
    std::vector<std::byte> buf;
    for (IntervalId k = 0; k < meta.num_intervals(); ++k) {
      const VertexId b = first(k);
      const std::uint64_t cnt = meta.interval_size(k);
      buf.assign(cnt * sw, std::byte{0});
      for (std::uint64_t i = 0; i < cnt; ++i) {
        InitCtx ctx(*this, static_cast<VertexId>(b + i),
                    std::span(buf).subspan(i * sw, sw));
        prog.init(ctx);
      }
      states->write_range(k, 0, cnt, buf);
      states->release(k);
    }
    sealed.resize(meta.num_intervals());
    for (IntervalId k = 0; k < meta.num_intervals(); ++k) {
      sealed[k] = mlog->seal_superstep(k, 0);
    }
  }

  class ProcessCtx final : public VertexContext {
   public:
    ProcessCtx(Run& r, std::uint64_t superstep, const AdjacencyView& adj,
               std::span<std::byte> state, std::span<std::byte> edge_state)
        : r_(r), s_(superstep), adj_(adj), state_(state), edge_state_(edge_state) {}

    VertexId vertex() const override { return adj_.vertex; }
    std::uint64_t superstep() const override { return s_; }
    std::uint64_t num_vertices() const override { return r_.n; }
    const AdjacencyView& adjacency() const override { return adj_; }
    std::span<std::byte> state() override { return state_; }
    std::span<std::byte> edge_state() override { return edge_state_; }
    void send_update(VertexId dest, std::span<const std::byte> payload) override {
      r_.send(adj_.vertex, dest, payload, s_);
      ++sent;
    }
    void deactivate() override {}
    void add_edge(VertexId src, VertexId dst, float value) override {
      op({StructuralOpKind::kAddEdge, src, dst, value});
    }
    void delete_edge(VertexId src, VertexId dst) override {
      op({StructuralOpKind::kDeleteEdge, src, dst, 0.0f});
    }
    void delete_vertex() override {
      op({StructuralOpKind::kDeleteVertex, adj_.vertex, adj_.vertex, 0.0f});
    }

    std::uint64_t sent = 0;
    std::uint64_t ops = 0;
    std::uint64_t ops_to_deleted = 0;
    bool touched_structure = false;

   private:
    void op(const StructuralOp& o) {
      if (r_.prog.edge_state_width() > 0) {
        throw ContractViolation(r_.prog.name() +
                                ": structural updates are not supported with "
                                "per-edge state (vertex " +
                                std::to_string(adj_.vertex) + ", superstep " +
                                std::to_string(s_) + ")");
      }
      if (o.src >= r_.n || o.dst >= r_.n) {
        throw AddressingError(r_.prog.name() + ": structural update on invalid "
                              "vertex from vertex " +
                              std::to_string(adj_.vertex));
      }
      {
        std::lock_guard lock(r_.mu);
        if (r_.deleted.test(o.src)) {
          ++ops_to_deleted;
          return;
        }
        if (o.kind == StructuralOpKind::kDeleteVertex) r_.deleted.set(o.src);
      }
      const IntervalId k = r_.meta.interval_of(o.src);
      r_.structural.add(k, o);
      if (r_.writer) r_.writer->invalidate(o.src);
      if (r_.reader) r_.reader->invalidate(o.src);
      if (o.src == adj_.vertex) touched_structure = true;
      ++ops;
    }

    Run& r_;
    std::uint64_t s_;
    const AdjacencyView& adj_;
    std::span<std::byte> state_;
    std::span<std::byte> edge_state_;
  };

  struct Tally {
    std::uint64_t sent = 0;
    std::uint64_t ops = 0;
    std::uint64_t ops_to_deleted = 0;
    std::uint64_t edges = 0;
  };

  void process_one(IntervalId k, std::uint64_t superstep, const Item& item,
                   AdjacencyView& adj, Tally& t) {
    const VertexId v = item.v;
    const std::size_t sw = prog.state_width();
    const std::size_t ew = prog.edge_state_width();
    const std::uint64_t base_deg = adj.out_neighbors.size();

    bool keep_for_log = cfg.edge_log && history.recorded() > 0 &&
                        history.predict_active(v);
    AdjacencyView base;
    if (keep_for_log) base = adj;

    {
      std::lock_guard lock(mu);
      usage.add_range(k, adj.csr_begin * sizeof(VertexId),
                      base_deg * sizeof(VertexId));
    }

    auto pending = structural.ops_for(k, v);
    if (!pending.empty()) {
      apply_ops(adj.out_neighbors,
                meta.value_width != 0 ? &adj.edge_values : nullptr, pending);
    }

    std::vector<std::byte> state(sw), before(sw);
    states->read(k, v - first(k), state);
    before = state;
    std::vector<std::byte> es, es_before;
    if (ew > 0) {
      es.resize(base_deg * ew);
      edge_states->read_range(k, adj.csr_begin, base_deg, es);
      es_before = es;
    }

    ProcessCtx ctx(*this, superstep, adj, state, es);
    prog.process(ctx, item.inbox);

    if (state != before) states->write(k, v - first(k), state);
    if (ew > 0 && es != es_before) {
      edge_states->write_range(k, adj.csr_begin, base_deg, es);
    }
    t.sent += ctx.sent;
    t.ops += ctx.ops;
    t.ops_to_deleted += ctx.ops_to_deleted;
    t.edges += adj.out_neighbors.size();

    std::lock_guard lock(mu);
    active_now.set(v);
    if (keep_for_log && !ctx.touched_structure && !deleted.test(v)) {
      log_candidates[k].push_back(std::move(base));
    }
  }

  void process_interval(IntervalId k, std::uint64_t superstep,
                        std::span<const Item> items) {
    if (items.empty()) return;
    std::vector<VertexId> vids;
    vids.reserve(items.size());
    for (const auto& it : items) vids.push_back(it.v);
    std::uint64_t served = 0;
    auto adj = fetch_adjacency(vids, reader ? &*reader : nullptr,
                               graph.partition(k), &served);

    Tally total;
    unsigned threads = cfg.parallel
                           ? (cfg.threads ? cfg.threads
                                          : std::max(1u, std::thread::hardware_concurrency()))
                           : 1u;
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, std::max<std::size_t>(1, items.size() / 64)));
    if (threads <= 1) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        process_one(k, superstep, items[i], adj[i], total);
      }
    } else {
      std::vector<Tally> tallies(threads);
      std::vector<std::exception_ptr> errors(threads);
      std::vector<std::thread> pool;
      const std::size_t chunk = (items.size() + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(items.size(), b + chunk);
            for (std::size_t i = b; i < e; ++i) {
              process_one(k, superstep, items[i], adj[i], tallies[t]);
            }
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      for (const auto& t : tallies) {
        total.sent += t.sent;
        total.ops += t.ops;
        total.ops_to_deleted += t.ops_to_deleted;
        total.edges += t.edges;
      }
    }
    cur.active_vertices += items.size();
    cur.active_edges += total.edges;
    cur.messages_sent += total.sent;
    cur.structural_ops += total.ops;
    cur.ops_to_deleted += total.ops_to_deleted;
    cur.edgelog_served += served;
  }

  void process_sorted(const SortedLog& sl, DestRange range,
                      std::span<const IntervalId> intervals,
                      std::uint64_t superstep) {
    std::vector<Item> items;
    items.reserve(sl.groups.size());
    const std::size_t sw = prog.state_width();
    std::vector<std::byte> state(sw), before(sw);
    std::vector<Item> from_log;
    for (const Group& g : sl.groups) {
      Inbox inbox(&sl.records, g.begin, g.end);
      if (deleted.test(g.dest)) {
        cur.dropped_messages += inbox.size();
        continue;
      }
      if (prog.activates(inbox)) {
        from_log.push_back({g.dest, inbox});
      } else {
        const IntervalId k = meta.interval_of(g.dest);
        states->read(k, g.dest - first(k), state);
        before = state;
        prog.absorb(g.dest, state, inbox);
        if (state != before) states->write(k, g.dest - first(k), state);
        ++cur.absorbed_vertices;
      }
    }
    if (superstep == 0) {
      std::size_t li = 0;
      for (VertexId v = range.begin; v < range.end; ++v) {
        while (li < from_log.size() && from_log[li].v < v) items.push_back(from_log[li++]);
        if (li < from_log.size() && from_log[li].v == v) {
          items.push_back(from_log[li++]);
        } else if (forced.test(v) && !deleted.test(v)) {
          items.push_back({v, Inbox{}});
        }
      }
      while (li < from_log.size()) items.push_back(from_log[li++]);
    } else {
      items = std::move(from_log);
    }

    std::size_t pos = 0;
    for (IntervalId k : intervals) {
      const VertexId end = meta.interval_end(k);
      std::size_t stop = pos;
      while (stop < items.size() && items[stop].v < end) ++stop;
      process_interval(k, superstep,
                       std::span<const Item>(items).subspan(pos, stop - pos));
      pos = stop;
    }
  }

  void finish_interval(IntervalId k) {
    states->release(k);
    if (edge_states) edge_states->release(k);
    if (!writer) return;
    std::vector<AdjacencyView> cands;
    {
      std::lock_guard lock(mu);
      auto it = log_candidates.find(k);
      if (it == log_candidates.end()) return;
      cands = std::move(it->second);
      log_candidates.erase(it);
    }
    std::sort(cands.begin(), cands.end(),
              [](const AdjacencyView& a, const AdjacencyView& b) {
                return a.vertex < b.vertex;
              });
    for (const auto& adj : cands) {
      maybe_log_edges(adj, k, history, usage, cfg.inefficiency_threshold, *writer);
    }
  }

  void merge_interval(IntervalId k) {
    auto ops = structural.take(k);
    if (ops.empty()) return;
    OpApplyResult applied;
    auto stem = CsrPartition::stem_for(k) + ".m" + std::to_string(merge_gen++);
    auto merged = merge_structural_updates(graph.partition(k), ops, n,
                                           merged_dir, stem, &applied, &csr_io);
    graph.replace_partition(k, std::move(merged));
    if (reader) reader->invalidate_range(meta.interval_begin(k), meta.interval_end(k));
    cur.missing_deletions += applied.missing_deletions;
    ++cur.merges;
  }

  std::uint64_t colidx_reads() const {
    std::uint64_t r = 0;
    for (IntervalId k = 0; k < graph.num_intervals(); ++k) {
      r += graph.partition(k).colidx_store().pages_read();
    }
    return r;
  }

  SuperstepStats superstep(std::uint64_t S) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    cur = SuperstepStats{};
    cur.superstep = S;
    const PageCounts csr0 = snap(csr_io), log0 = snap(log_io), el0 = snap(el_io),
                     st0 = snap(state_io);
    const std::uint64_t col0 = colidx_reads();
    const std::uint64_t evicted0 = mlog->pages_evicted();
    mlog->reset_peak();
    active_now.clear();
    usage.clear();
    predicted_next = history.predicted();
    if (cfg.edge_log && history.recorded() > 0) {
      writer = std::make_unique<EdgeLogWriter>(
          el_dir / ("el." + std::to_string(S + 1)), meta.page_size,
          cfg.edgelog_budget(), meta.value_width != 0, &el_io);
    } else {
      writer.reset();
    }

    const std::size_t ni = meta.num_intervals();
    std::vector<std::uint64_t> counts(ni);
    for (IntervalId k = 0; k < ni; ++k) {
      counts[k] = sealed[k].message_count;
      if (counts[k] == 0 && S == 0) {
        for (VertexId v = meta.interval_begin(k); v < meta.interval_end(k); ++v) {
          if (forced.test(v)) {
            counts[k] = 1;
            break;
          }
        }
      }
    }
    const std::uint64_t budget = cfg.sort_budget();
    const CombineFn combine = [this](std::span<std::byte> acc,
                                     std::span<const std::byte> in) {
      prog.combine(acc, in);
    };
    for (const FusePlan& plan : plan_fusion(counts, record_width, budget)) {
      ++cur.plans;
      const DestRange whole{meta.interval_begin(plan.intervals.front()),
                            meta.interval_end(plan.intervals.back())};
      std::vector<DestRange> ranges;
      if (plan.passes > 1) {
        ranges = plan_dest_buckets(sealed[plan.intervals.front()], whole,
                                   meta.page_size, record_width, budget, &log_io);
      } else {
        ranges.push_back(whole);
      }
      for (const DestRange& r : ranges) {
        RecordBuffer rb = load_log(plan, sealed, meta.page_size, record_width,
                                   &log_io, plan.passes > 1 ? &r : nullptr);
        cur.messages_delivered += rb.size();
        cur.sort_resident_peak_bytes =
            std::max<std::uint64_t>(cur.sort_resident_peak_bytes, rb.byte_size());
        SortedLog sl = sort_n_group(std::move(rb), r);
        if (use_combine) sl = apply_combine(sl, combine);
        process_sorted(sl, r, plan.intervals, S);
      }
      for (IntervalId k : plan.intervals) finish_interval(k);
    }

    cur.multilog_resident_peak_bytes = mlog->peak_resident_bytes();
    cur.multilog_pages_evicted = mlog->pages_evicted() - evicted0;
    cur.accessed_colidx_pages = usage.accessed_pages();
    cur.inefficient_pages = usage.inefficient_pages(cfg.inefficiency_threshold);

    for (IntervalId k = 0; k < ni; ++k) {
      discard_log(sealed[k]);
      sealed[k] = mlog->seal_superstep(k, S + 1);
    }

    if (reader) {
      reader->discard();
      reader.reset();
    }
    if (writer) {
      cur.edgelog_bytes = writer->bytes_logged();
      cur.edgelog_entries = writer->entries();
      reader.emplace(writer->finish());
      writer.reset();
    }

    cur.colidx_pages_read = colidx_reads() - col0;
    for (IntervalId k = 0; k < ni; ++k) {
      if (structural.pending(k) >= cfg.merge_threshold) merge_interval(k);
    }

    if (S > 0) {
      cur.prediction_hits = predicted_now.count_and(active_now);
    }
    cur.prediction_accuracy =
        cur.active_vertices == 0
            ? 0.0
            : static_cast<double>(cur.prediction_hits) /
                  static_cast<double>(cur.active_vertices);
    predicted_now = predicted_next;
    cur.predicted_active = cfg.edge_log ? predicted_next.count() : 0;
    history.record(active_now);
    forced.clear();

    cur.csr = diff(csr_io, csr0);
    cur.log = diff(log_io, log0);
    cur.edgelog = diff(el_io, el0);
    cur.state = diff(state_io, st0);
    cur.runtime_seconds =
        std::chrono::duration<double>(clock::now() - t0).count();
    return cur;
  }

  bool pending_work(std::uint64_t S) const {
    if (S == 0 && forced.count() > 0) return true;
    for (const auto& s : sealed) {
      if (s.message_count > 0) return true;
    }
    return false;
  }
};

Engine::Engine(const fs::path& graph_dir, EngineConfig config)
    : config_(std::move(config)), graph_dir_(graph_dir) {
  config_.validate();
  meta_ = GraphMeta::load(graph_dir_ / "meta.json");
}

Engine::~Engine() = default;

const GraphMeta& Engine::meta() const noexcept { return meta_; }

RunResult Engine::run(const VertexProgram& program) {
  if (program.payload_width() == 0) {
    throw ContractViolation(program.name() + ": payload width must be positive");
  }
  Run r(config_, program, graph_dir_);
  r.setup();
  const PageCounts init0 = snap(r.state_io);
  r.initialize();

  RunResult out;
  out.init_state = diff(r.state_io, init0);
  for (std::uint64_t S = 0; S < config_.max_supersteps && r.pending_work(S); ++S) {
    out.supersteps.push_back(r.superstep(S));
    if (config_.record_active_sets) out.active_sets.push_back(r.active_now);
  }
  for (IntervalId k = 0; k < r.meta.num_intervals(); ++k) {
    if (r.structural.pending(k) > 0) {
      r.merge_interval(k);
      ++out.final_merges;
    }
  }
  for (IntervalId k = 0; k < r.meta.num_intervals(); ++k) discard_log(r.sealed[k]);
  if (r.reader) r.reader->discard();

  out.num_vertices = r.n;
  out.state_width = program.state_width();
  out.deleted = r.deleted;
  out.states.reserve(r.n * out.state_width);
  for (IntervalId k = 0; k < r.meta.num_intervals(); ++k) {
    r.states->release(k);
    auto part = r.states->read_interval(k);
    out.states.insert(out.states.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace mlvc
