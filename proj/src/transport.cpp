#include "wansync/transport.hpp"

#include <algorithm>
#include <cmath>

namespace wansync {

std::vector<std::uint64_t> split_tensor(std::uint64_t tensor_size, std::uint64_t chunk_size) {
  if (tensor_size == 0) throw std::invalid_argument("empty tensor");
  if (chunk_size == 0) throw std::invalid_argument("chunk size must be >= 1");
  std::vector<std::uint64_t> out;
  std::uint64_t full = tensor_size / chunk_size;
  out.assign(full, chunk_size);
  if (std::uint64_t rest = tensor_size % chunk_size) out.push_back(rest);
  return out;
}

std::map<NodeId, std::uint64_t> apportion_counts(std::uint64_t total,
                                                 const std::map<NodeId, double>& shares) {
  if (shares.empty()) throw std::invalid_argument("no shares");
  double sum = 0.0;
  for (const auto& [r, s] : shares) {
    if (s <= 0) throw std::invalid_argument("non-positive share");
    sum += s;
  }
  std::map<NodeId, std::uint64_t> counts;
  std::vector<std::pair<double, NodeId>> rema;  // (-remainder, id) for sort
  std::uint64_t assigned = 0;
  for (const auto& [r, s] : shares) {
    double quota = static_cast<double>(total) * s / sum;
    auto base = static_cast<std::uint64_t>(std::floor(quota));
    counts[r] = base;
    assigned += base;
    rema.push_back({-(quota - static_cast<double>(base)), r});
  }
  std::sort(rema.begin(), rema.end());  // largest remainder first, then lower id
  std::size_t i = 0;
  while (assigned < total) {
    counts[rema[i % rema.size()].second] += 1;
    ++assigned;
    ++i;
  }
  return counts;
}

void assign_roots(std::vector<Chunk>& chunks, const std::map<NodeId, double>& shares) {
  auto counts = apportion_counts(chunks.size(), shares);
  std::size_t pos = 0;
  for (const auto& [r, c] : counts) {
    for (std::uint64_t k = 0; k < c; ++k) chunks[pos++].owner_root = r;
  }
}

std::vector<Chunk> make_chunks(const std::vector<TensorSpec>& tensors,
                               std::uint64_t chunk_size,
                               const std::map<NodeId, double>& shares) {
  std::vector<Chunk> chunks;
  for (std::uint32_t t = 0; t < tensors.size(); ++t) {
    auto sizes = split_tensor(tensors[t].size, chunk_size);
    for (std::uint32_t i = 0; i < sizes.size(); ++i)
      chunks.push_back(Chunk{t, i, sizes[i], 0});
  }
  assign_roots(chunks, shares);
  return chunks;
}

bool is_busy(std::uint32_t occupancy, std::uint32_t bound, BusyRule rule) {
  return rule == BusyRule::Inclusive ? occupancy >= bound : occupancy > bound;
}

PathChoice pick_path(const SendQueues& q, std::uint32_t primary_busy_bound,
                     std::uint32_t aux_capacity, BusyRule rule) {
  if (!is_busy(q.primary.occupancy, primary_busy_bound, rule)) return {false, 0};
  for (std::uint32_t i = 0; i < q.aux.size(); ++i) {
    if (q.aux[i].occupancy < aux_capacity) return {true, i};
  }
  return {false, 0};  // everything busy: fall back to the primary route
}

}  // namespace wansync
