#include "wansync/awareness.hpp"

#include <algorithm>

namespace wansync {

std::optional<LinkEstimate> estimate_throughput(const std::deque<ProbeSample>& samples,
                                                std::uint64_t min_size,
                                                std::uint32_t window,
                                                std::uint32_t* anomalies) {
  if (window == 0) throw std::invalid_argument("window must be >= 1");
  std::vector<double> rates;
  rates.reserve(window);
  // Newest first so the window covers the most recent qualifying chunks.
  for (auto it = samples.rbegin(); it != samples.rend() && rates.size() < window; ++it) {
    if (min_size > 0 && it->size < min_size) continue;
    double delay = it->recv_ts - it->send_ts;
    if (delay <= 0) {
      if (anomalies) ++(*anomalies);
      continue;
    }
    rates.push_back(static_cast<double>(it->size) / delay);
  }
  if (rates.size() < window) return std::nullopt;

  double sum = 0.0;
  for (double r : rates) sum += r;
  LinkEstimate e;
  if (!samples.empty()) {
    e.from = samples.back().from;
    e.to = samples.back().to;
    e.updated_at = samples.back().recv_ts;
  }
  e.throughput = sum / static_cast<double>(rates.size());
  e.samples = window;
  return e;
}

ClockModel ClockModel::zeros(std::uint32_t nodes) {
  ClockModel m;
  m.offset.assign(nodes, 0.0);
  m.skew.assign(nodes, 0.0);
  return m;
}

double ClockModel::correct(double ts, NodeId node) const {
  return ts - offset.at(node) - skew.at(node) * ts;
}

double estimate_roundtrip(std::uint64_t size, double send_ts, double echo_recv_ts) {
  double rt = echo_recv_ts - send_ts;
  if (rt <= 0) throw std::invalid_argument("non-positive round trip");
  return static_cast<double>(size) / (rt / 2.0);
}

void LinkStateStore::merge(const LinkEstimate& e) {
  auto key = std::make_pair(e.from, e.to);
  auto it = table_.find(key);
  if (it == table_.end() || e.updated_at >= it->second.updated_at)
    table_[key] = e;
}

void LinkStateStore::merge_all(const std::vector<LinkEstimate>& es) {
  for (const auto& e : es) merge(e);
}

std::optional<LinkEstimate> LinkStateStore::get(NodeId from, NodeId to) const {
  auto it = table_.find({from, to});
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

double LinkStateStore::undirected_rate(NodeId a, NodeId b, double default_rate) const {
  auto fwd = get(a, b);
  auto rev = get(b, a);
  if (fwd && rev) return std::min(fwd->throughput, rev->throughput);
  if (fwd) return fwd->throughput;
  if (rev) return rev->throughput;
  return default_rate;
}

DelayView LinkStateStore::planning_view(const OverlayGraph& g, double default_rate) const {
  std::vector<double> rates(g.links().size());
  for (LinkId id = 0; id < rates.size(); ++id) {
    const LinkSpec& l = g.link(id);
    rates[id] = undirected_rate(l.a, l.b, default_rate);
  }
  return DelayView::from_rates(rates);
}

}  // namespace wansync
