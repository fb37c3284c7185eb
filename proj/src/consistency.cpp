#include "wansync/consistency.hpp"

#include <cmath>

namespace wansync {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Reader {
  const std::vector<std::uint8_t>& b;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos + 1 > b.size()) throw ProtocolError("truncated message meta");
    return b[pos++];
  }
  std::uint16_t u16() {
    std::uint16_t v = u8();
    return static_cast<std::uint16_t>(v | (static_cast<std::uint16_t>(u8()) << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
};

}  // namespace

std::vector<std::uint8_t> encode_meta(const MessageMeta& m) {
  std::vector<std::uint8_t> out;
  put_u32(out, m.epoch);
  out.push_back(m.is_aux ? 1 : 0);
  if (m.is_aux) {
    if (m.path.size() > 0xffff) throw ProtocolError("path too long");
    put_u16(out, static_cast<std::uint16_t>(m.path.size()));
    for (NodeId v : m.path) put_u32(out, v);
  }
  // Fixed-point seconds: signed nanoseconds.
  auto ns = static_cast<std::int64_t>(std::llround(m.send_ts * 1e9));
  put_u64(out, static_cast<std::uint64_t>(ns));
  put_u32(out, m.sender);
  put_u32(out, m.tensor_id);
  put_u32(out, m.chunk_index);
  put_u64(out, m.chunk_size);
  return out;
}

MessageMeta decode_meta(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  MessageMeta m;
  m.epoch = r.u32();
  std::uint8_t flag = r.u8();
  if (flag > 1) throw ProtocolError("bad is_aux flag");
  m.is_aux = flag == 1;
  if (m.is_aux) {
    std::uint16_t len = r.u16();
    if (len < 2) throw ProtocolError("auxiliary path needs at least two nodes");
    m.path.reserve(len);
    for (std::uint16_t i = 0; i < len; ++i) m.path.push_back(r.u32());
  }
  m.send_ts = static_cast<double>(static_cast<std::int64_t>(r.u64())) / 1e9;
  m.sender = r.u32();
  m.tensor_id = r.u32();
  m.chunk_index = r.u32();
  m.chunk_size = r.u64();
  if (r.pos != bytes.size()) throw ProtocolError("trailing bytes in message meta");
  return m;
}

ReceiveAction classify_receive(std::uint32_t local_epoch, NodeId node, const MessageMeta& m) {
  if (m.is_aux) {
    for (std::size_t i = 0; i < m.path.size(); ++i) {
      if (m.path[i] != node) continue;
      if (i + 1 < m.path.size()) return {ReceiveKind::Forward, m.path[i + 1]};
      return {ReceiveKind::Aggregate, 0};  // path terminal
    }
    throw ProtocolError("auxiliary message delivered off its recorded path");
  }
  if (m.epoch > local_epoch) return {ReceiveKind::Cache, 0};
  return {ReceiveKind::Aggregate, 0};
}

void PolicyStore::adopt(std::shared_ptr<const PolicyBundle> bundle) {
  if (!bundle) throw std::invalid_argument("null bundle");
  bundles_[bundle->epoch] = std::move(bundle);
}

std::shared_ptr<const PolicyBundle> PolicyStore::get(std::uint32_t epoch) const {
  auto it = bundles_.find(epoch);
  return it == bundles_.end() ? nullptr : it->second;
}

void PolicyStore::gc(std::uint32_t oldest_live) {
  bundles_.erase(bundles_.begin(), bundles_.lower_bound(oldest_live));
}

}  // namespace wansync
