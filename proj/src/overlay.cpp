#include "wansync/overlay.hpp"

#include <algorithm>
#include <queue>

namespace wansync {

double rate_at(const std::vector<RatePoint>& schedule, double t) {
  if (schedule.empty()) throw std::invalid_argument("empty rate schedule");
  // Last segment with start_time <= t; schedule starts at 0.
  const RatePoint* cur = &schedule.front();
  for (const auto& p : schedule) {
    if (p.start_time <= t)
      cur = &p;
    else
      break;
  }
  return cur->rate;
}

OverlayGraph::OverlayGraph(std::uint32_t node_count, std::vector<LinkSpec> links)
    : node_count_(node_count), links_(std::move(links)) {
  if (node_count_ == 0) throw std::invalid_argument("graph needs at least one node");
  adj_.resize(node_count_);
  for (LinkId id = 0; id < links_.size(); ++id) {
    const LinkSpec& l = links_[id];
    if (l.a == l.b) throw std::invalid_argument("self-loop link");
    if (l.a >= node_count_ || l.b >= node_count_)
      throw std::invalid_argument("link endpoint out of range");
    if (l.latency < 0) throw std::invalid_argument("negative latency");
    if (l.loss_rate < 0 || l.loss_rate >= 1)
      throw std::invalid_argument("loss rate outside [0,1)");
    if (l.rate_schedule.empty() || l.rate_schedule.front().start_time != 0)
      throw std::invalid_argument("rate schedule must start at time 0");
    double prev = -1;
    for (const auto& p : l.rate_schedule) {
      if (p.rate <= 0) throw std::invalid_argument("non-positive link rate");
      if (p.start_time <= prev)
        throw std::invalid_argument("rate schedule times must be strictly increasing");
      prev = p.start_time;
    }
    if (find_link(l.a, l.b)) throw std::invalid_argument("duplicate link");
    adj_[l.a].push_back({l.b, id});
    adj_[l.b].push_back({l.a, id});
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

const std::vector<std::pair<NodeId, LinkId>>& OverlayGraph::neighbors(NodeId v) const {
  return adj_.at(v);
}

std::optional<LinkId> OverlayGraph::find_link(NodeId a, NodeId b) const {
  if (a >= node_count_) return std::nullopt;
  for (const auto& [nb, id] : adj_[a])
    if (nb == b) return id;
  return std::nullopt;
}

double OverlayGraph::throughput_at(LinkId id, double t) const {
  return rate_at(link(id).rate_schedule, t);
}

double OverlayGraph::throughput_at(NodeId a, NodeId b, double t) const {
  auto id = find_link(a, b);
  if (!id) throw std::invalid_argument("no link between nodes");
  return throughput_at(*id, t);
}

bool OverlayGraph::is_connected() const {
  if (node_count_ == 0) return false;
  std::vector<char> seen(node_count_, 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  std::uint32_t reached = 1;
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    for (const auto& [nb, id] : adj_[v]) {
      (void)id;
      if (!seen[nb]) {
        seen[nb] = 1;
        ++reached;
        q.push(nb);
      }
    }
  }
  return reached == node_count_;
}

DelayView DelayView::at_time(const OverlayGraph& g, double t) {
  std::vector<double> w(g.links().size());
  for (LinkId id = 0; id < w.size(); ++id) w[id] = 1.0 / g.throughput_at(id, t);
  DelayView v;
  v.weights_ = std::move(w);
  return v;
}

DelayView DelayView::from_weights(std::vector<double> weights) {
  for (double w : weights)
    if (w <= 0) throw std::invalid_argument("non-positive link weight");
  DelayView v;
  v.weights_ = std::move(weights);
  return v;
}

DelayView DelayView::from_rates(const std::vector<double>& rates) {
  std::vector<double> w(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] <= 0) throw std::invalid_argument("non-positive link rate");
    w[i] = 1.0 / rates[i];
  }
  return from_weights(std::move(w));
}

}  // namespace wansync
