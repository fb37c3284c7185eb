#include "wansync/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wansync {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

double to_f64(const std::string& v, const char* what, int line) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return out;
  } catch (...) {
    throw ScenarioError(std::string("bad ") + what + " '" + v + "'", line);
  }
}

std::uint64_t to_u64(const std::string& v, const char* what, int line) {
  try {
    std::size_t pos = 0;
    unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return out;
  } catch (...) {
    throw ScenarioError(std::string("bad ") + what + " '" + v + "'", line);
  }
}

std::pair<std::string, std::string> split_attr(const std::string& tok, int line) {
  auto eq = tok.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
    throw ScenarioError("expected key=value attribute, got '" + tok + "'", line);
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::vector<RatePoint> parse_schedule(const std::string& v, int line) {
  std::vector<RatePoint> sched;
  std::stringstream in(v);
  std::string seg;
  while (std::getline(in, seg, ',')) {
    auto colon = seg.find(':');
    if (colon == std::string::npos)
      throw ScenarioError("rate segment needs <time>:<rate>, got '" + seg + "'", line);
    RatePoint p;
    p.start_time = to_f64(seg.substr(0, colon), "segment time", line);
    p.rate = to_f64(seg.substr(colon + 1), "segment rate", line);
    sched.push_back(p);
  }
  if (sched.empty()) throw ScenarioError("empty rate schedule", line);
  return sched;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source_name) {
  Scenario s;
  std::optional<std::uint32_t> nodes;
  std::vector<LinkSpec> links;
  std::vector<std::pair<NodeId, std::pair<double, double>>> clocks;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];

    if (kw == "nodes") {
      if (toks.size() != 2) throw ScenarioError("usage: nodes <count>", line_no);
      if (nodes) throw ScenarioError("duplicate nodes declaration", line_no);
      nodes = static_cast<std::uint32_t>(to_u64(toks[1], "node count", line_no));
      if (*nodes == 0) throw ScenarioError("node count must be >= 1", line_no);
    } else if (kw == "set") {
      if (toks.size() != 3) throw ScenarioError("usage: set <KEY> <VALUE>", line_no);
      try {
        s.params.set(toks[1], toks[2]);
      } catch (const std::exception& e) {
        throw ScenarioError(e.what(), line_no);
      }
    } else if (kw == "tensor") {
      if (toks.size() != 3) throw ScenarioError("usage: tensor <name> <size>", line_no);
      std::uint64_t size = to_u64(toks[2], "tensor size", line_no);
      if (size == 0) throw ScenarioError("tensor size must be >= 1", line_no);
      for (const auto& t : s.tensors)
        if (t.name == toks[1]) throw ScenarioError("duplicate tensor '" + toks[1] + "'", line_no);
      s.tensors.push_back({toks[1], size});
    } else if (kw == "link") {
      if (toks.size() < 4)
        throw ScenarioError("usage: link <a> <b> rate=... [latency=...] [loss=...]", line_no);
      LinkSpec l;
      l.a = static_cast<NodeId>(to_u64(toks[1], "endpoint", line_no));
      l.b = static_cast<NodeId>(to_u64(toks[2], "endpoint", line_no));
      bool have_rate = false;
      for (std::size_t i = 3; i < toks.size(); ++i) {
        auto [key, value] = split_attr(toks[i], line_no);
        if (key == "rate") {
          l.rate_schedule = parse_schedule(value, line_no);
          have_rate = true;
        } else if (key == "latency") {
          l.latency = to_f64(value, "latency", line_no);
        } else if (key == "loss") {
          l.loss_rate = to_f64(value, "loss", line_no);
        } else {
          throw ScenarioError("unknown link attribute '" + key + "'", line_no);
        }
      }
      if (!have_rate) throw ScenarioError("link needs a rate schedule", line_no);
      links.push_back(std::move(l));
    } else if (kw == "clock") {
      if (toks.size() < 3)
        throw ScenarioError("usage: clock <node> offset=<sec> [skew=<v>]", line_no);
      NodeId node = static_cast<NodeId>(to_u64(toks[1], "node id", line_no));
      double offset = 0.0, skew = 0.0;
      bool have_offset = false;
      for (std::size_t i = 2; i < toks.size(); ++i) {
        auto [key, value] = split_attr(toks[i], line_no);
        if (key == "offset") {
          offset = to_f64(value, "offset", line_no);
          have_offset = true;
        } else if (key == "skew") {
          skew = to_f64(value, "skew", line_no);
        } else {
          throw ScenarioError("unknown clock attribute '" + key + "'", line_no);
        }
      }
      if (!have_offset) throw ScenarioError("clock line needs offset=", line_no);
      clocks.push_back({node, {offset, skew}});
    } else {
      throw ScenarioError("unknown keyword '" + kw + "'", line_no);
    }
  }

  if (!nodes) throw ScenarioError("missing nodes declaration in " + source_name, 0);
  try {
    s.graph = OverlayGraph(*nodes, std::move(links));
  } catch (const std::exception& e) {
    throw ScenarioError(e.what(), line_no);
  }
  s.clock_offset.assign(*nodes, 0.0);
  s.clock_skew.assign(*nodes, 0.0);
  for (const auto& [node, os] : clocks) {
    if (node >= *nodes) throw ScenarioError("clock node out of range", 0);
    s.clock_offset[node] = os.first;
    s.clock_skew[node] = os.second;
  }
  return s;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

std::string emit_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "nodes " << s.graph.node_count() << "\n";
  for (const auto& [key, value] : s.params.to_map()) out << "set " << key << " " << value << "\n";
  for (const auto& t : s.tensors) out << "tensor " << t.name << " " << t.size << "\n";
  for (const auto& l : s.graph.links()) {
    out << "link " << l.a << " " << l.b << " rate=";
    for (std::size_t i = 0; i < l.rate_schedule.size(); ++i) {
      if (i) out << ",";
      out << fmt(l.rate_schedule[i].start_time) << ":" << fmt(l.rate_schedule[i].rate);
    }
    if (l.latency != 0) out << " latency=" << fmt(l.latency);
    if (l.loss_rate != 0) out << " loss=" << fmt(l.loss_rate);
    out << "\n";
  }
  for (NodeId v = 0; v < s.clock_offset.size(); ++v) {
    if (s.clock_offset[v] != 0 || s.clock_skew[v] != 0) {
      out << "clock " << v << " offset=" << fmt(s.clock_offset[v]);
      if (s.clock_skew[v] != 0) out << " skew=" << fmt(s.clock_skew[v]);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace wansync
