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

#include "mlvc/edge_list.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "mlvc/error.hpp"
#include "mlvc/hash.hpp"

namespace mlvc {

void EdgeList::symmetrize() {
  const std::size_t n = edges.size();
  edges.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Edge e = edges[i];
    if (e.src != e.dst) edges.push_back({e.dst, e.src, e.value});
  }
}

std::vector<std::uint64_t> EdgeList::in_degrees() const {
  std::vector<std::uint64_t> deg(num_vertices, 0);
  for (const auto& e : edges) ++deg[e.dst];
  return deg;
}

std::vector<std::uint64_t> EdgeList::out_degrees() const {
  std::vector<std::uint64_t> deg(num_vertices, 0);
  for (const auto& e : edges) ++deg[e.src];
  return deg;
}

namespace {

struct RawEdge {
  std::uint64_t src;
  std::uint64_t dst;
  float value;
};

std::string_view next_token(std::string_view& rest) {
  std::size_t b = rest.find_first_not_of(" \t\r,");
  if (b == std::string_view::npos) {
    rest = {};
    return {};
  }
  std::size_t e = rest.find_first_of(" \t\r,", b);
  if (e == std::string_view::npos) e = rest.size();
  auto tok = rest.substr(b, e - b);
  rest.remove_prefix(e);
  return tok;
}

std::uint64_t parse_id(std::string_view tok, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw IngestError("line " + std::to_string(line_no) +
                      ": invalid vertex id '" + std::string(tok) + "'");
  }
  return v;
}

float parse_weight(std::string_view tok, std::size_t line_no) {
  // from_chars for float is missing on older toolchains.
  std::string s(tok);
  std::size_t used = 0;
  float w = 0.0f;
  try {
    w = std::stof(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) {
    throw IngestError("line " + std::to_string(line_no) +
                      ": invalid edge weight '" + s + "'");
  }
  return w;
}

}  // namespace

ParsedEdgeList parse_edge_list(std::istream& in, bool undirected) {
  std::vector<RawEdge> raw;
  bool has_values = false;
  Fnv1a64 hash;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    hash.update(line.data(), line.size());
    hash.update("\n", 1);
    std::string_view rest(line);
    auto first = next_token(rest);
    if (first.empty() || first.front() == '#' || first.front() == '%') {
      continue;
    }
    auto second = next_token(rest);
    if (second.empty()) {
      throw IngestError("line " + std::to_string(line_no) +
                        ": expected 'src dst [weight]'");
    }
    RawEdge e{parse_id(first, line_no), parse_id(second, line_no), 0.0f};
    auto third = next_token(rest);
    if (!third.empty()) {
      e.value = parse_weight(third, line_no);
      has_values = true;
      if (!next_token(rest).empty()) {
        throw IngestError("line " + std::to_string(line_no) +
                          ": too many columns");
      }
    }
    raw.push_back(e);
  }

  ParsedEdgeList out;
  auto& ids = out.original_ids;
  ids.reserve(raw.size() * 2);
  for (const auto& e : raw) {
    ids.push_back(e.src);
    ids.push_back(e.dst);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() >= kInvalidVertex) {
    throw IngestError("graph has more vertices than 32-bit ids can address");
  }
  auto dense = [&](std::uint64_t id) {
    return static_cast<VertexId>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  out.graph.num_vertices = static_cast<VertexId>(ids.size());
  out.graph.has_values = has_values;
  out.graph.edges.reserve(raw.size());
  for (const auto& e : raw) {
    out.graph.edges.push_back({dense(e.src), dense(e.dst), e.value});
  }
  if (undirected) out.graph.symmetrize();
  out.content_hash = hash.digest();
  return out;
}

ParsedEdgeList read_edge_list_file(const std::filesystem::path& path,
                                   bool undirected) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list '" + path.string() + "'");
  return parse_edge_list(in, undirected);
}

}  // namespace mlvc
