#include "wansync/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <memory>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "wansync/transport.hpp"

namespace wansync {

std::optional<Stage> stage_from_string(const std::string& s) {
  if (s == "lite") return Stage::Lite;
  if (s == "std") return Stage::Std;
  if (s == "pro") return Stage::Pro;
  return std::nullopt;
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Lite: return "lite";
    case Stage::Std: return "std";
    case Stage::Pro: return "pro";
  }
  return "?";
}

double RunResult::mean_completion() const {
  if (iterations.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& it : iterations) sum += it.completion();
  return sum / static_cast<double>(iterations.size());
}

namespace {

// Deterministic uniform doubles independent of library distributions.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

struct Event {
  double time;
  std::uint64_t seq;
  bool progress;  // participates in deadlock detection
  std::function<void()> fn;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct ChunkSend {
  Chunk chunk;
  std::uint32_t epoch = 0;
  std::uint64_t contributors = 0;  // data sources folded into this aggregate
};

// One chunk traversing one route; hop indexes into path.
struct Transit {
  ChunkSend payload;
  MessageMeta meta;
  std::vector<NodeId> path;
  std::size_t hop = 0;
  NodeId queue_owner = 0;  // sender whose queue occupancy this transit holds
  NodeId queue_dest = 0;
  bool queue_is_aux = false;
  std::uint32_t queue_index = 0;
};

struct ActiveFlow {
  double remaining;
  std::function<void(double)> on_complete;
};

struct DirLink {
  LinkId link = 0;
  NodeId from = 0, to = 0;
  std::vector<std::pair<std::uint64_t, ActiveFlow>> flows;  // (flow id, state), insertion order
  double last_advance = 0.0;
  double busy_accum = 0.0;
  std::uint64_t generation = 0;
};

struct PathQueue {
  std::vector<NodeId> path;
  bool is_aux = false;
  std::uint32_t index = 0;
  std::deque<ChunkSend> waiting;
  std::uint32_t occupancy = 0;
  bool first_hop_busy = false;
};

struct DestQueues {
  PathQueue primary;
  std::vector<PathQueue> aux;
};

struct AggKey {
  std::uint32_t epoch = 0, tensor = 0, chunk = 0;
  auto operator<=>(const AggKey&) const = default;
};

struct AggState {
  std::uint32_t have = 0, need = 0;
  std::uint64_t contributors = 0;
  std::vector<NodeId> seen_children;
  bool own_deposited = false;
};

struct CachedDelivery {
  Transit transit;
};

struct NodeState {
  NodeId id = 0;
  std::uint32_t epoch = 0;
  TrpPhase phase = TrpPhase::Idle;
  PolicyStore policies;
  std::vector<CachedDelivery> cache;
  std::map<AggKey, AggState> agg;
  std::map<NodeId, DestQueues> out;
  std::uint32_t out_epoch = 0;
  std::map<NodeId, std::deque<ProbeSample>> probes;  // keyed by sending neighbor
  double agg_busy_until = 0.0;
  double learned_offset = 0.0;
};

// Derived per formulated epoch, identical at every node.
struct EpochInfo {
  std::shared_ptr<const PolicyBundle> bundle;
  std::vector<Chunk> chunks;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> chunk_at;  // (tensor, index)
  std::map<NodeId, std::vector<std::vector<NodeId>>> children;              // per root
  std::map<NodeId, std::vector<std::uint32_t>> subtree;                     // per root
};

class Sim {
 public:
  Sim(const Scenario& sc, const SimOptions& opt)
      : sc_(sc), opt_(opt), g_(sc.graph), rng_(opt.seed) {}

  RunResult run();

 private:
  // --- engine ---
  void at(double t, bool progress, std::function<void()> fn) {
    if (t < now_) throw SimulationError("event scheduled in the past");
    if (progress) ++pending_progress_;
    events_.push(Event{t, next_seq_++, progress, std::move(fn)});
  }

  void trace(const std::string& line) {
    if (opt_.trace) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.9f", now_);
      (*opt_.trace) << buf << " " << line << "\n";
    }
  }

  // --- clocks ---
  double raw_clock(NodeId v, double t) const {
    return t + sc_.clock_offset[v] + sc_.clock_skew[v] * t;
  }
  double corrected_now(NodeId v) const {
    double raw = raw_clock(v, now_);
    return raw - nodes_[v].learned_offset;
  }

  // --- links ---
  std::size_t dir_id(NodeId from, LinkId link) const {
    return 2 * link + (g_.link(link).a == from ? 0 : 1);
  }
  double capacity(const DirLink& dl, double t) const { return g_.throughput_at(dl.link, t); }

  void advance_link(DirLink& dl) {
    double elapsed = now_ - dl.last_advance;
    if (elapsed > 0) {
      if (!dl.flows.empty()) {
        double share = capacity(dl, dl.last_advance) / static_cast<double>(dl.flows.size());
        for (auto& [id, f] : dl.flows) f.remaining = std::max(0.0, f.remaining - share * elapsed);
        dl.busy_accum += elapsed;
      }
      dl.last_advance = now_;
    }
  }

  void reschedule_link(DirLink& dl) {
    ++dl.generation;
    if (dl.flows.empty()) return;
    double share = capacity(dl, now_) / static_cast<double>(dl.flows.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < dl.flows.size(); ++i)
      if (dl.flows[i].second.remaining < dl.flows[best].second.remaining) best = i;
    double t_done = now_ + dl.flows[best].second.remaining / share;
    std::uint64_t flow_id = dl.flows[best].first;
    std::uint64_t gen = dl.generation;
    std::size_t dli = (&dl - links_.data());
    at(t_done, true, [this, dli, gen, flow_id] { complete_flow(dli, gen, flow_id); });
  }

  void complete_flow(std::size_t dli, std::uint64_t gen, std::uint64_t flow_id) {
    DirLink& dl = links_[dli];
    if (gen != dl.generation) return;  // superseded by a later recompute
    advance_link(dl);
    auto it = std::find_if(dl.flows.begin(), dl.flows.end(),
                           [&](const auto& p) { return p.first == flow_id; });
    if (it == dl.flows.end()) return;
    auto done = std::move(it->second.on_complete);
    dl.flows.erase(it);
    reschedule_link(dl);
    done(now_);
  }

  void add_flow(std::size_t dli, double size, std::function<void(double)> on_complete) {
    DirLink& dl = links_[dli];
    advance_link(dl);
    dl.flows.push_back({next_flow_id_++, ActiveFlow{size, std::move(on_complete)}});
    reschedule_link(dl);
  }

  void rate_boundary(std::size_t dli) {
    DirLink& dl = links_[dli];
    advance_link(dl);
    reschedule_link(dl);
  }

  // --- policy formulation ---
  std::shared_ptr<const PolicyBundle> formulate(const DelayView& view, std::uint32_t epoch) {
    auto b = std::make_shared<PolicyBundle>();
    b->epoch = epoch;
    if (opt_.fixed_plan) {
      b->plan = *opt_.fixed_plan;
      b->plan.epoch = epoch;
    } else {
      b->plan = build_plan(g_, view, fixed_roots_, sc_.params.num_root_servers, epoch);
    }
    if (aux_enabled_) b->aux = search_aux_paths(g_, view, sc_.params.max_aux_paths);
    bundles_[epoch] = b;
    result_.plans[epoch] = b->plan;
    epoch_info(epoch);
    trace("policy epoch=" + std::to_string(epoch));
    return b;
  }

  const EpochInfo& epoch_info(std::uint32_t epoch) {
    auto it = infos_.find(epoch);
    if (it != infos_.end()) return it->second;
    EpochInfo info;
    info.bundle = bundles_.at(epoch);
    info.chunks = make_chunks(sc_.tensors, sc_.params.chunk_size, info.bundle->plan.shares);
    for (std::size_t i = 0; i < info.chunks.size(); ++i)
      info.chunk_at[{info.chunks[i].tensor_id, info.chunks[i].chunk_index}] = i;
    for (const auto& [r, tree] : info.bundle->plan.trees) {
      auto ch = children_of(tree);
      std::vector<std::uint32_t> sz(g_.node_count(), 1);
      // Accumulate subtree sizes bottom-up over a depth-ordered walk.
      std::vector<NodeId> order{tree.root};
      for (std::size_t i = 0; i < order.size(); ++i)
        for (NodeId c : ch[order[i]]) order.push_back(c);
      for (auto itv = order.rbegin(); itv != order.rend(); ++itv)
        for (NodeId c : ch[*itv]) sz[*itv] += sz[c];
      info.children[r] = std::move(ch);
      info.subtree[r] = std::move(sz);
    }
    return infos_.emplace(epoch, std::move(info)).first->second;
  }

  bool estimates_changed_enough() const {
    if (scheduler_store_.size() == 0) return false;  // nothing learned yet
    if (sc_.params.update_rate <= 0) return true;
    for (const auto& [key, e] : scheduler_store_.all()) {
      auto it = store_snapshot_.find(key);
      if (it == store_snapshot_.end()) return true;
      if (std::abs(e.throughput - it->second) / it->second >= sc_.params.update_rate)
        return true;
    }
    return false;
  }

  void policy_timer() {
    if (done_) return;
    if (estimates_changed_enough()) {
      DelayView view = scheduler_store_.planning_view(g_, sc_.params.default_rate);
      formulate(view, ++latest_epoch_);
      store_snapshot_.clear();
      for (const auto& [key, e] : scheduler_store_.all()) store_snapshot_[key] = e.throughput;
    }
    at(now_ + sc_.params.update_time, false, [this] { policy_timer(); });
  }

  // --- control plane ---
  double control_jitter() {
    return opt_.faults.random_control_delay_max > 0
               ? rng_.uniform(0.0, opt_.faults.random_control_delay_max)
               : 0.0;
  }

  void node_send_trp(NodeId v) {
    nodes_[v].phase = TrpPhase::AwaitingResponse;
    std::uint32_t iter = iter_index_;
    trace("trp-request node=" + std::to_string(v));
    at(now_ + sc_.params.control_latency + control_jitter(), true,
       [this, v, iter] { scheduler_on_trp(v, iter); });
  }

  void scheduler_on_trp(NodeId v, std::uint32_t iter) {
    // The epoch answered for an iteration is pinned by its first request
    // so every node of one iteration pushes under one policy.
    if (pinned_iter_ != iter) {
      pinned_iter_ = iter;
      pinned_epoch_ = latest_epoch_;
    }
    if (opt_.faults.drop_trp_responses_for && *opt_.faults.drop_trp_responses_for == v) {
      trace("trp-response-dropped node=" + std::to_string(v));
      return;
    }
    double delay = sc_.params.control_latency + control_jitter();
    if (v < opt_.faults.trp_response_extra_delay.size())
      delay += opt_.faults.trp_response_extra_delay[v];
    std::uint32_t epoch = pinned_epoch_;
    at(now_ + delay, true, [this, v, epoch] { node_on_trp_response(v, epoch); });
  }

  void node_on_trp_response(NodeId v, std::uint32_t epoch) {
    NodeState& node = nodes_[v];
    node.epoch = epoch;
    node.policies.adopt(bundles_.at(epoch));
    node.phase = TrpPhase::UpToDate;
    if (node.out_epoch != epoch) {
      node.out.clear();
      node.out_epoch = epoch;
    }
    trace("adopt node=" + std::to_string(v) + " epoch=" + std::to_string(epoch));
    // Case 2: data that arrived ahead of the local epoch drains first,
    // in arrival order.
    auto cached = std::move(node.cache);
    node.cache.clear();
    for (auto& cd : cached) deliver_terminal(v, cd.transit);
    push_own_chunks(v);
  }

  void push_own_chunks(NodeId v) {
    const EpochInfo& info = epoch_info(nodes_[v].epoch);
    trace("push node=" + std::to_string(v) + " chunks=" + std::to_string(info.chunks.size()));
    for (const Chunk& c : info.chunks) deposit_own(v, c);
  }

  // --- aggregation ---
  std::uint32_t need_for(NodeId v, const Chunk& c, const EpochInfo& info) const {
    return static_cast<std::uint32_t>(info.children.at(c.owner_root)[v].size()) + 1;
  }

  void deposit_own(NodeId v, const Chunk& c) {
    const EpochInfo& info = epoch_info(nodes_[v].epoch);
    AggKey key{nodes_[v].epoch, c.tensor_id, c.chunk_index};
    AggState& st = nodes_[v].agg[key];
    if (st.need == 0) st.need = need_for(v, c, info);
    if (st.own_deposited) {
      ++result_.duplicate_deposits;
      return;
    }
    st.own_deposited = true;
    ++st.have;
    st.contributors += 1;
    if (st.have == st.need) aggregate_ready(v, key, c);
  }

  void deposit_child(NodeId v, const Transit& tr) {
    const EpochInfo& info = epoch_info(tr.payload.epoch);
    const Chunk& c = info.chunks[info.chunk_at.at({tr.meta.tensor_id, tr.meta.chunk_index})];
    AggKey key{tr.payload.epoch, c.tensor_id, c.chunk_index};
    AggState& st = nodes_[v].agg[key];
    if (st.need == 0) st.need = need_for(v, c, info);
    NodeId child = tr.meta.sender;
    if (std::find(st.seen_children.begin(), st.seen_children.end(), child) !=
        st.seen_children.end()) {
      ++result_.duplicate_deposits;
      return;
    }
    st.seen_children.push_back(child);
    ++st.have;
    st.contributors += tr.payload.contributors;
    if (st.have == st.need) aggregate_ready(v, key, c);
  }

  void aggregate_ready(NodeId v, AggKey key, Chunk c) {
    // Cost scales with fan-in: reducing m inputs touches m buffers.
    double cost = sc_.params.aggregation_cost * nodes_[v].agg.at(key).need;
    if (cost > 0) {
      // One serial aggregation unit per node; it overlaps transmissions.
      double start = std::max(now_, nodes_[v].agg_busy_until);
      nodes_[v].agg_busy_until = start + cost;
      at(start + cost, true, [this, v, key, c] { aggregation_done(v, key, c); });
    } else {
      aggregation_done(v, key, c);
    }
  }

  void aggregation_done(NodeId v, AggKey key, const Chunk& c) {
    AggState st = nodes_[v].agg.at(key);
    nodes_[v].agg.erase(key);
    const EpochInfo& info = epoch_info(key.epoch);
    if (v == c.owner_root) {
      if (st.contributors != g_.node_count()) ++result_.conservation_failures;
      trace("chunk-complete root=" + std::to_string(v) + " tensor=" +
            std::to_string(c.tensor_id) + " index=" + std::to_string(c.chunk_index));
      --remaining_;
      if (remaining_ == 0) end_iteration();
      return;
    }
    NodeId parent = info.bundle->plan.trees.at(c.owner_root).parent[v];
    enqueue_chunk(v, parent, ChunkSend{c, key.epoch, st.contributors});
  }

  // --- sending ---
  DestQueues& ensure_queues(NodeId v, NodeId dest) {
    NodeState& node = nodes_[v];
    auto it = node.out.find(dest);
    if (it != node.out.end()) return it->second;
    DestQueues q;
    q.primary.path = {v, dest};
    q.primary.is_aux = false;
    if (aux_enabled_) {
      const auto& bundle = *bundles_.at(node.epoch);
      std::uint32_t idx = 0;
      for (const auto& p : bundle.aux.paths(v, dest)) {
        if (p.size() == 2) continue;  // the direct link is the primary route
        PathQueue aq;
        aq.path = p;
        aq.is_aux = true;
        aq.index = idx++;
        q.aux.push_back(std::move(aq));
      }
    }
    return node.out.emplace(dest, std::move(q)).first->second;
  }

  void enqueue_chunk(NodeId v, NodeId dest, ChunkSend cs) {
    DestQueues& q = ensure_queues(v, dest);
    SendQueues occ;
    occ.primary.occupancy = q.primary.occupancy;
    for (const auto& aq : q.aux) occ.aux.push_back({{}, aq.occupancy});
    PathChoice choice = pick_path(occ, sc_.params.primary_busy_bound,
                                  sc_.params.auxiliary_queue_length, sc_.params.busy_rule);
    PathQueue& pq = choice.is_aux ? q.aux[choice.aux_index] : q.primary;
    if (choice.is_aux) ++iter_chunks_via_aux_;
    ++pq.occupancy;
    pq.waiting.push_back(std::move(cs));
    try_dispatch(v, dest, pq);
  }

  void try_dispatch(NodeId v, NodeId dest, PathQueue& pq) {
    if (pq.first_hop_busy || pq.waiting.empty()) return;
    ChunkSend cs = std::move(pq.waiting.front());
    pq.waiting.pop_front();
    pq.first_hop_busy = true;

    Transit tr;
    tr.meta.epoch = cs.epoch;
    tr.meta.is_aux = pq.is_aux;
    if (pq.is_aux) tr.meta.path = pq.path;
    tr.meta.sender = v;
    tr.meta.tensor_id = cs.chunk.tensor_id;
    tr.meta.chunk_index = cs.chunk.chunk_index;
    tr.meta.chunk_size = cs.chunk.size;
    tr.payload = std::move(cs);
    tr.path = pq.path;
    tr.hop = 0;
    tr.queue_owner = v;
    tr.queue_dest = dest;
    tr.queue_is_aux = pq.is_aux;
    tr.queue_index = pq.index;
    start_hop(std::move(tr));
  }

  void start_hop(Transit tr) {
    NodeId from = tr.path[tr.hop];
    NodeId to = tr.path[tr.hop + 1];
    auto link = g_.find_link(from, to);
    if (!link) throw SimulationError("route uses a missing overlay link");
    tr.meta.send_ts = corrected_now(from);
    trace("transfer-start from=" + std::to_string(from) + " to=" + std::to_string(to) +
          " tensor=" + std::to_string(tr.meta.tensor_id) + " index=" +
          std::to_string(tr.meta.chunk_index) + (tr.meta.is_aux ? " aux" : ""));
    std::size_t dli = dir_id(from, *link);
    double size = static_cast<double>(tr.payload.chunk.size);
    auto shared = std::make_shared<Transit>(std::move(tr));
    add_flow(dli, size, [this, shared, dli](double t_complete) {
      (void)t_complete;
      on_hop_transferred(std::move(*shared), dli);
    });
  }

  void on_hop_transferred(Transit tr, std::size_t dli) {
    const DirLink& dl = links_[dli];
    // The first hop of a queue frees its sender for the next chunk as
    // soon as the wire is clear; delivery still waits for propagation.
    if (tr.hop == 0) {
      PathQueue& pq = queue_of(tr);
      pq.first_hop_busy = false;
      try_dispatch(tr.queue_owner, tr.queue_dest, pq);
    }
    const LinkSpec& spec = g_.link(dl.link);
    double delay = spec.latency;
    if (spec.loss_rate > 0) {
      // Loss shows up as retransmission time, not as an actual drop.
      int retries = 0;
      while (retries < 64 && rng_.uniform() < spec.loss_rate) ++retries;
      delay += static_cast<double>(retries) * 2.0 * spec.latency;
    }
    NodeId to = tr.path[tr.hop + 1];
    at(now_ + delay, true, [this, tr = std::move(tr), to]() mutable { on_delivery(to, std::move(tr)); });
  }

  PathQueue& queue_of(const Transit& tr) {
    DestQueues& q = nodes_[tr.queue_owner].out.at(tr.queue_dest);
    return tr.queue_is_aux ? q.aux[tr.queue_index] : q.primary;
  }

  void on_delivery(NodeId u, Transit tr) {
    NodeId from = tr.path[tr.hop];
    record_probe(from, u, tr);
    trace("delivery at=" + std::to_string(u) + " from=" + std::to_string(from) + " tensor=" +
          std::to_string(tr.meta.tensor_id) + " index=" + std::to_string(tr.meta.chunk_index));

    bool terminal = tr.hop + 2 == tr.path.size();
    if (terminal) {
      queue_of(tr).occupancy--;
      deliver_terminal(u, tr);
      return;
    }
    // Auxiliary relay: forward-only along the recorded path, regardless
    // of the relay's own policy state.
    ReceiveAction action = classify_receive(nodes_[u].epoch, u, tr.meta);
    if (action.kind != ReceiveKind::Forward)
      throw SimulationError("relay classified as non-forward");
    ++tr.hop;
    start_hop(std::move(tr));
  }

  void deliver_terminal(NodeId u, Transit& tr) {
    ReceiveAction action = classify_receive(nodes_[u].epoch, u, tr.meta);
    if (action.kind == ReceiveKind::Cache) {
      trace("cache at=" + std::to_string(u) + " epoch=" + std::to_string(tr.meta.epoch));
      nodes_[u].cache.push_back(CachedDelivery{tr});
      return;
    }
    deposit_child(u, tr);
  }

  void record_probe(NodeId from, NodeId to, const Transit& tr) {
    ProbeSample s;
    s.from = from;
    s.to = to;
    s.send_ts = tr.meta.send_ts;
    s.recv_ts = corrected_now(to);
    s.size = tr.payload.chunk.size;
    auto& buf = nodes_[to].probes[from];
    buf.push_back(s);
    std::size_t cap = static_cast<std::size_t>(sc_.params.probe_chunk_num) * 4 + 4;
    while (buf.size() > cap) buf.pop_front();
    if (!awareness_enabled_) return;
    std::uint32_t anomalies = 0;
    auto est = estimate_throughput(buf, sc_.params.probe_chunk_size, sc_.params.probe_chunk_num,
                                   &anomalies);
    result_.probe_anomalies += anomalies;
    if (est) {
      est->updated_at = now_;
      LinkEstimate e = *est;
      at(now_ + sc_.params.control_latency, true, [this, e] { scheduler_store_.merge(e); });
    }
  }

  // --- iteration lifecycle ---
  void start_iteration(std::uint32_t i) {
    iter_index_ = i;
    iter_start_ = now_;
    iter_chunks_via_aux_ = 0;
    iteration_active_ = true;
    remaining_ = total_chunks_;
    for (auto& dl : links_) {
      advance_link(dl);
      iter_busy_start_[2 * dl.link + (g_.link(dl.link).a == dl.from ? 0 : 1)] = dl.busy_accum;
    }
    trace("iteration-start index=" + std::to_string(i));
    for (NodeId v = 0; v < g_.node_count(); ++v) node_send_trp(v);
  }

  void end_iteration() {
    iteration_active_ = false;
    IterationMetrics m;
    m.index = iter_index_;
    m.epoch = pinned_epoch_;
    m.start = iter_start_;
    m.end = now_;
    m.chunks_total = total_chunks_;
    m.chunks_via_aux = iter_chunks_via_aux_;
    m.link_utilization.assign(2 * g_.links().size(), 0.0);
    double dur = m.end - m.start;
    double util_sum = 0.0;
    for (auto& dl : links_) {
      advance_link(dl);
      std::size_t idx = 2 * dl.link + (g_.link(dl.link).a == dl.from ? 0 : 1);
      if (dur > 0) m.link_utilization[idx] = (dl.busy_accum - iter_busy_start_[idx]) / dur;
      util_sum += m.link_utilization[idx];
    }
    if (!m.link_utilization.empty())
      m.mean_utilization = util_sum / static_cast<double>(m.link_utilization.size());

    double err_sum = 0.0;
    std::size_t err_n = 0;
    for (const auto& [key, e] : scheduler_store_.all()) {
      auto link = g_.find_link(key.first, key.second);
      if (!link) continue;
      double truth = g_.throughput_at(*link, now_);
      err_sum += std::abs(e.throughput - truth) / truth;
      ++err_n;
    }
    if (err_n > 0) m.mean_estimate_error = err_sum / static_cast<double>(err_n);

    result_.iterations.push_back(std::move(m));
    trace("iteration-end index=" + std::to_string(iter_index_));

    // Barrier reached: per-iteration buffers must have drained.
    for (auto& node : nodes_) {
      if (!node.agg.empty() || !node.cache.empty()) ++result_.conservation_failures;
      node.policies.gc(node.epoch);
      node.phase = TrpPhase::Idle;
    }

    if (iter_index_ + 1 < opt_.horizon) {
      std::uint32_t next = iter_index_ + 1;
      at(now_ + sc_.params.compute_time, true, [this, next] { start_iteration(next); });
    } else {
      done_ = true;
    }
  }

  void dump_deadlock() {
    std::ostringstream out;
    out << "deadlock at t=" << now_ << " iteration=" << iter_index_
        << " remaining=" << remaining_ << "\n";
    for (const auto& node : nodes_) {
      out << "  node " << node.id << " epoch=" << node.epoch << " phase="
          << (node.phase == TrpPhase::Idle
                  ? "idle"
                  : node.phase == TrpPhase::AwaitingResponse ? "awaiting-response"
                                                             : "up-to-date")
          << " cached=" << node.cache.size() << " pending_aggregations=" << node.agg.size()
          << "\n";
    }
    result_.deadlock = true;
    result_.diagnostic = out.str();
  }

  const Scenario& sc_;
  const SimOptions& opt_;
  const OverlayGraph& g_;
  Rng rng_;

  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_flow_id_ = 0;
  std::int64_t pending_progress_ = 0;
  bool done_ = false;

  std::vector<DirLink> links_;
  std::vector<NodeState> nodes_;
  std::vector<double> iter_busy_start_;

  bool awareness_enabled_ = false;
  bool aux_enabled_ = false;

  // scheduler
  LinkStateStore scheduler_store_;
  std::map<std::pair<NodeId, NodeId>, double> store_snapshot_;
  std::uint32_t latest_epoch_ = 0;
  std::map<std::uint32_t, std::shared_ptr<const PolicyBundle>> bundles_;
  std::map<std::uint32_t, EpochInfo> infos_;
  std::vector<NodeId> fixed_roots_;
  std::uint32_t pinned_iter_ = 0xffffffff;
  std::uint32_t pinned_epoch_ = 0;

  // iteration state
  std::uint32_t iter_index_ = 0;
  double iter_start_ = 0.0;
  bool iteration_active_ = false;
  std::uint64_t total_chunks_ = 0;
  std::uint64_t remaining_ = 0;
  std::uint64_t iter_chunks_via_aux_ = 0;

  RunResult result_;
};

RunResult Sim::run() {
  if (opt_.horizon == 0) throw SimulationError("horizon must be >= 1");
  if (sc_.tensors.empty()) throw SimulationError("scenario declares no tensors");

  awareness_enabled_ = opt_.stage != Stage::Lite && sc_.params.enable_awareness;
  aux_enabled_ = opt_.stage == Stage::Pro && sc_.params.enable_aux_path;

  const std::uint32_t n = g_.node_count();
  nodes_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    nodes_[v].id = v;
    // Offset learned from one request/response exchange with the
    // scheduler clock; symmetric control latency cancels exactly.
    double delta = sc_.params.control_latency;
    double t1 = raw_clock(v, 0.0);
    double t2 = delta, t3 = delta;
    double t4 = raw_clock(v, 2.0 * delta);
    nodes_[v].learned_offset = -(((t2 - t1) + (t3 - t4)) / 2.0);
  }

  links_.resize(2 * g_.links().size());
  iter_busy_start_.assign(2 * g_.links().size(), 0.0);
  for (LinkId id = 0; id < g_.links().size(); ++id) {
    const LinkSpec& l = g_.link(id);
    links_[2 * id] = DirLink{id, l.a, l.b, {}, 0.0, 0.0, 0};
    links_[2 * id + 1] = DirLink{id, l.b, l.a, {}, 0.0, 0.0, 0};
    for (const RatePoint& p : l.rate_schedule) {
      if (p.start_time > 0) {
        at(p.start_time, false, [this, id] { rate_boundary(2 * id); });
        at(p.start_time, false, [this, id] { rate_boundary(2 * id + 1); });
      }
    }
  }

  {
    std::uint64_t count = 0;
    for (const auto& t : sc_.tensors) count += split_tensor(t.size, sc_.params.chunk_size).size();
    total_chunks_ = count;
  }

  // Epoch 1 plans from the declared time-zero rates; later epochs plan
  // from reported estimates only.
  DelayView t0 = DelayView::at_time(g_, 0.0);
  latest_epoch_ = 1;
  auto first = formulate(t0, 1);
  fixed_roots_ = first->plan.roots.roots;

  if (awareness_enabled_ && !opt_.fixed_plan)
    at(sc_.params.update_time, false, [this] { policy_timer(); });

  start_iteration(0);

  while (!events_.empty() && !done_ && !result_.deadlock) {
    Event ev = events_.top();
    events_.pop();
    now_ = ev.time;
    if (ev.progress) --pending_progress_;
    ev.fn();
    if (iteration_active_ && remaining_ > 0 && pending_progress_ == 0) dump_deadlock();
  }
  if (!done_ && !result_.deadlock) dump_deadlock();

  result_.final_epoch = latest_epoch_;
  result_.final_estimates = scheduler_store_;
  return result_;
}

}  // namespace

RunResult simulate(const Scenario& scenario, const SimOptions& options) {
  return Sim(scenario, options).run();
}

}  // namespace wansync
