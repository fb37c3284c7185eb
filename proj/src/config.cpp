#include "wansync/config.hpp"

#include <charconv>
#include <cstdio>

namespace wansync {

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw std::invalid_argument(key + ": expected unsigned integer, got '" + v + "'");
  return out;
}

double parse_f64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return out;
  } catch (...) {
    throw std::invalid_argument(key + ": expected number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw std::invalid_argument(key + ": expected 0/1, got '" + v + "'");
}

std::string fmt_f64(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void Hyperparams::set(const std::string& key, const std::string& value) {
  if (key == "NUM_ROOT_SERVERS") {
    num_root_servers = static_cast<std::uint32_t>(parse_u64(key, value));
    if (num_root_servers == 0) throw std::invalid_argument("NUM_ROOT_SERVERS must be >= 1");
  } else if (key == "CHUNK_SIZE") {
    chunk_size = parse_u64(key, value);
    if (chunk_size == 0) throw std::invalid_argument("CHUNK_SIZE must be >= 1");
  } else if (key == "PRIMARY_BUSY_BOUND") {
    primary_busy_bound = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (key == "AUXILIARY_QUEUE_LENGTH") {
    auxiliary_queue_length = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (key == "PROBE_CHUNK_SIZE") {
    probe_chunk_size = parse_u64(key, value);
  } else if (key == "PROBE_CHUNK_NUM") {
    probe_chunk_num = static_cast<std::uint32_t>(parse_u64(key, value));
    if (probe_chunk_num == 0) throw std::invalid_argument("PROBE_CHUNK_NUM must be >= 1");
  } else if (key == "UPDATE_TIME") {
    update_time = parse_f64(key, value);
    if (update_time <= 0) throw std::invalid_argument("UPDATE_TIME must be > 0");
  } else if (key == "UPDATE_RATE") {
    update_rate = parse_f64(key, value);
    if (update_rate < 0) throw std::invalid_argument("UPDATE_RATE must be >= 0");
  } else if (key == "ENABLE_AWARENESS") {
    enable_awareness = parse_bool(key, value);
  } else if (key == "ENABLE_AUX_PATH") {
    enable_aux_path = parse_bool(key, value);
  } else if (key == "DEFAULT_RATE") {
    default_rate = parse_f64(key, value);
    if (default_rate <= 0) throw std::invalid_argument("DEFAULT_RATE must be > 0");
  } else if (key == "CONTROL_LATENCY") {
    control_latency = parse_f64(key, value);
    if (control_latency < 0) throw std::invalid_argument("CONTROL_LATENCY must be >= 0");
  } else if (key == "AGGREGATION_COST") {
    aggregation_cost = parse_f64(key, value);
    if (aggregation_cost < 0) throw std::invalid_argument("AGGREGATION_COST must be >= 0");
  } else if (key == "COMPUTE_TIME") {
    compute_time = parse_f64(key, value);
    if (compute_time < 0) throw std::invalid_argument("COMPUTE_TIME must be >= 0");
  } else if (key == "BUSY_RULE") {
    if (value == "inclusive")
      busy_rule = BusyRule::Inclusive;
    else if (value == "strict")
      busy_rule = BusyRule::Strict;
    else
      throw std::invalid_argument("BUSY_RULE: expected inclusive|strict, got '" + value + "'");
  } else if (key == "MAX_AUX_PATHS") {
    max_aux_paths = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (key == "BASELINE_ROOT") {
    baseline_root = static_cast<NodeId>(parse_u64(key, value));
  } else if (key == "BKT_FANOUT") {
    bkt_fanout = static_cast<std::uint32_t>(parse_u64(key, value));
    if (bkt_fanout == 0) throw std::invalid_argument("BKT_FANOUT must be >= 1");
  } else {
    throw std::invalid_argument("unknown parameter '" + key + "'");
  }
}

void Hyperparams::set_kv(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("expected KEY=VALUE, got '" + assignment + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::map<std::string, std::string> Hyperparams::to_map() const {
  std::map<std::string, std::string> m;
  m["NUM_ROOT_SERVERS"] = std::to_string(num_root_servers);
  m["CHUNK_SIZE"] = std::to_string(chunk_size);
  m["PRIMARY_BUSY_BOUND"] = std::to_string(primary_busy_bound);
  m["AUXILIARY_QUEUE_LENGTH"] = std::to_string(auxiliary_queue_length);
  m["PROBE_CHUNK_SIZE"] = std::to_string(probe_chunk_size);
  m["PROBE_CHUNK_NUM"] = std::to_string(probe_chunk_num);
  m["UPDATE_TIME"] = fmt_f64(update_time);
  m["UPDATE_RATE"] = fmt_f64(update_rate);
  m["ENABLE_AWARENESS"] = enable_awareness ? "1" : "0";
  m["ENABLE_AUX_PATH"] = enable_aux_path ? "1" : "0";
  m["DEFAULT_RATE"] = fmt_f64(default_rate);
  m["CONTROL_LATENCY"] = fmt_f64(control_latency);
  m["AGGREGATION_COST"] = fmt_f64(aggregation_cost);
  m["COMPUTE_TIME"] = fmt_f64(compute_time);
  m["BUSY_RULE"] = busy_rule == BusyRule::Inclusive ? "inclusive" : "strict";
  m["MAX_AUX_PATHS"] = std::to_string(max_aux_paths);
  m["BASELINE_ROOT"] = std::to_string(baseline_root);
  m["BKT_FANOUT"] = std::to_string(bkt_fanout);
  return m;
}

bool is_sweepable_param(const std::string& key) {
  return key == "CHUNK_SIZE" || key == "UPDATE_TIME" || key == "PROBE_CHUNK_SIZE" ||
         key == "PROBE_CHUNK_NUM" || key == "PRIMARY_BUSY_BOUND" ||
         key == "AUXILIARY_QUEUE_LENGTH";
}

}  // namespace wansync
