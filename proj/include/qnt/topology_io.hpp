// Copyright 2026 The qnt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * Line-oriented topology files:
 *
 *     # comment
 *     node <id> monitor|internal
 *     edge <id> <nodeA> <nodeB> <qx> <qy> <qz>
 *
 * Nodes must be declared before the edges that use them.
 */

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnt/topology.hpp"

namespace qnt {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message)
      : std::runtime_error(format(line, field, message)),
        line_(line),
        field_(std::move(field)) {}

  /// 1-based; 0 for whole-file problems.
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(std::size_t line, const std::string& field,
                            const std::string& message) {
    std::string out = line ? "line " + std::to_string(line) : "topology";
    if (!field.empty()) out += " [" + field + "]";
    return out + ": " + message;
  }

  std::size_t line_;
  std::string field_;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double parse_real(const std::string& tok, std::size_t line,
                         const std::string& field) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, field, "expected a number, got '" + tok + "'");
  }
  return v;
}

}  // namespace detail

inline Topology parse_topology(const std::string& text) {
  Topology t;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const auto tok = detail::split_ws(raw);
    if (tok.empty()) continue;
    if (tok[0] == "node") {
      if (tok.size() != 3) {
        throw ParseError(lineno, "node", "expected 'node <id> monitor|internal'");
      }
      NodeKind kind;
      if (tok[2] == "monitor") {
        kind = NodeKind::Monitor;
      } else if (tok[2] == "internal") {
        kind = NodeKind::Internal;
      } else {
        throw ParseError(lineno, "kind", "unknown node kind '" + tok[2] + "'");
      }
      if (t.has_node(tok[1])) {
        throw ParseError(lineno, "id", "duplicate node id " + tok[1]);
      }
      t.add_node(tok[1], kind);
    } else if (tok[0] == "edge") {
      if (tok.size() != 7) {
        throw ParseError(lineno, "edge",
                         "expected 'edge <id> <nodeA> <nodeB> qx qy qz'");
      }
      if (t.has_edge(tok[1])) {
        throw ParseError(lineno, "id", "duplicate edge id " + tok[1]);
      }
      for (int k : {2, 3}) {
        if (!t.has_node(tok[static_cast<std::size_t>(k)])) {
          throw ParseError(lineno, k == 2 ? "nodeA" : "nodeB",
                           "unknown node " + tok[static_cast<std::size_t>(k)]);
        }
      }
      if (tok[2] == tok[3]) {
        throw ParseError(lineno, "nodeB", "self-loop at " + tok[2]);
      }
      const double qx = detail::parse_real(tok[4], lineno, "qx");
      const double qy = detail::parse_real(tok[5], lineno, "qy");
      const double qz = detail::parse_real(tok[6], lineno, "qz");
      try {
        t.add_edge(tok[1], tok[2], tok[3], PauliChannel(qx, qy, qz));
      } catch (const std::invalid_argument& ex) {
        throw ParseError(lineno, "channel", ex.what());
      }
    } else {
      throw ParseError(lineno, "keyword", "unknown keyword '" + tok[0] + "'");
    }
  }
  if (t.node_count() == 0) throw ParseError(0, "", "no nodes declared");
  for (const auto& v : validate(t)) {
    throw ParseError(0, v.subject, v.rule + ": " + v.message);
  }
  return t;
}

inline Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_topology(buf.str());
}

inline std::string format_topology(const Topology& t) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [id, kind] : t.nodes())
    out << "node " << id << ' ' << to_string(kind) << '\n';
  for (const auto& [id, e] : t.edges())
    out << "edge " << id << ' ' << e.a << ' ' << e.b << ' ' << e.channel.qx()
        << ' ' << e.channel.qy() << ' ' << e.channel.qz() << '\n';
  return out.str();
}

inline nlohmann::json to_json(const Topology& t) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& [id, kind] : t.nodes())
    j["nodes"].push_back({{"id", id}, {"kind", to_string(kind)}});
  j["edges"] = nlohmann::json::array();
  for (const auto& [id, e] : t.edges())
    j["edges"].push_back({{"id", id},
                          {"a", e.a},
                          {"b", e.b},
                          {"q", {e.channel.qx(), e.channel.qy(), e.channel.qz()}}});
  return j;
}

inline Topology topology_from_json(const nlohmann::json& j) {
  Topology t;
  for (const auto& n : j.at("nodes")) {
    const auto kind = n.at("kind").get<std::string>();
    if (kind != "monitor" && kind != "internal") {
      throw ParseError(0, "kind", "unknown node kind '" + kind + "'");
    }
    t.add_node(n.at("id").get<std::string>(),
               kind == "monitor" ? NodeKind::Monitor : NodeKind::Internal);
  }
  for (const auto& e : j.at("edges")) {
    const auto& q = e.at("q");
    t.add_edge(e.at("id").get<std::string>(), e.at("a").get<std::string>(),
               e.at("b").get<std::string>(),
               PauliChannel(q.at(0).get<double>(), q.at(1).get<double>(),
                            q.at(2).get<double>()));
  }
  return t;
}

}  // namespace qnt
