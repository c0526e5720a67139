#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmc/errors.hpp"
#include "mmc/generators.hpp"
#include "mmc/screens.hpp"
#include "mmc/space.hpp"
#include "mmc/tree.hpp"

namespace mmc {

// Space files are JSON objects with "labels", "weights", and either a full
// "dist" matrix or the condensed strict upper triangle "dist_condensed" in
// row-major order. Writing always emits the condensed form.

inline FiniteMMSpace space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("labels") || !j.contains("weights"))
    throw BadSpec("space file needs labels and weights");
  std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<double> weights = j.at("weights").get<std::vector<double>>();
  const std::size_t n = labels.size();
  std::vector<double> d(n * n, 0.0);
  if (j.contains("dist")) {
    const auto& rows = j.at("dist");
    if (rows.size() != n) throw BadSpec("distance matrix row count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw BadSpec("distance matrix column count mismatch");
      for (std::size_t k = 0; k < n; ++k) d[i * n + k] = rows[i][k].get<double>();
    }
  } else if (j.contains("dist_condensed")) {
    const auto& c = j.at("dist_condensed");
    if (c.size() != n * (n - 1) / 2) throw BadSpec("condensed distance length mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k) {
        const double v = c[idx++].get<double>();
        d[i * n + k] = v;
        d[k * n + i] = v;
      }
  } else {
    throw BadSpec("space file needs dist or dist_condensed");
  }
  return FiniteMMSpace(std::move(labels), std::move(d), std::move(weights));
}

inline nlohmann::json space_to_json(const FiniteMMSpace& X) {
  nlohmann::json j;
  j["labels"] = X.labels();
  j["weights"] = X.weights();
  std::vector<double> c;
  c.reserve(X.size() * (X.size() - 1) / 2);
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t k = i + 1; k < X.size(); ++k) c.push_back(X.dist(i, k));
  j["dist_condensed"] = c;
  return j;
}

inline FiniteMMSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadSpec("cannot open space file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw BadSpec("space file " + path + " is not valid JSON: " + e.what());
  }
  return space_from_json(j);
}

inline void save_space(const FiniteMMSpace& X, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BadSpec("cannot write space file " + path);
  out << space_to_json(X).dump(2) << "\n";
}

// Tree files: {"vertices": <count or list>, "edges": [[u, v, length], ...]}.

inline MetricTree tree_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw BadSpec("tree file needs vertices and edges");
  std::size_t V = 0;
  if (j.at("vertices").is_number()) {
    V = j.at("vertices").get<std::size_t>();
  } else {
    V = j.at("vertices").size();
  }
  std::vector<MetricTree::Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (e.size() != 3) throw BadSpec("tree edge needs [u, v, length]");
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  return MetricTree(V, std::move(edges));
}

inline nlohmann::json tree_to_json(const MetricTree& t) {
  nlohmann::json j;
  j["vertices"] = t.vertex_count();
  auto edges = nlohmann::json::array();
  for (const auto& e : t.edges()) edges.push_back({e.u, e.v, e.len});
  j["edges"] = edges;
  return j;
}

inline MetricTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadSpec("cannot open tree file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw BadSpec("tree file " + path + " is not valid JSON: " + e.what());
  }
  return tree_from_json(j);
}

// Screen descriptions: "euclid:<dim>", "hyperbolic:<dim>:<kappa>",
// "tree:<path to tree file>".
inline Screen parse_screen(const std::string& text) {
  const auto c1 = text.find(':');
  const std::string kind = text.substr(0, c1);
  if (kind == "euclid") {
    if (c1 == std::string::npos) throw BadSpec("euclid screen needs a dimension");
    try {
      const long dim = std::stol(text.substr(c1 + 1));
      if (dim < 1) throw BadSpec("screen dimension must be positive");
      return EuclideanScreen{static_cast<std::size_t>(dim)};
    } catch (const BadSpec&) {
      throw;
    } catch (const std::exception&) {
      throw BadSpec("malformed euclid screen: " + text);
    }
  }
  if (kind == "hyperbolic") {
    const auto c2 = text.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw BadSpec("hyperbolic screen needs dimension and curvature");
    try {
      const long dim = std::stol(text.substr(c1 + 1, c2 - c1 - 1));
      const double kappa = std::stod(text.substr(c2 + 1));
      if (dim < 1) throw BadSpec("screen dimension must be positive");
      if (!(kappa < 0.0)) throw BadSpec("hyperbolic curvature must be negative");
      return HyperbolicScreen{static_cast<std::size_t>(dim), kappa};
    } catch (const BadSpec&) {
      throw;
    } catch (const std::exception&) {
      throw BadSpec("malformed hyperbolic screen: " + text);
    }
  }
  if (kind == "tree") {
    if (c1 == std::string::npos) throw BadSpec("tree screen needs a file path");
    return TreeScreen{std::make_shared<MetricTree>(load_tree(text.substr(c1 + 1)))};
  }
  throw BadSpec("unknown screen kind: " + text);
}

// A space argument is either a file path (detected by .json suffix or an
// existing file) or a generator spec string.
inline FiniteMMSpace load_or_generate_space(const std::string& arg, std::uint64_t seed) {
  const bool looks_like_file =
      arg.size() > 5 && arg.compare(arg.size() - 5, 5, ".json") == 0;
  if (looks_like_file) return load_space(arg);
  return gen_space(arg, seed);
}

inline nlohmann::json screen_point_json(const ScreenPoint& p) {
  if (const auto* v = std::get_if<Vec>(&p)) return nlohmann::json(*v);
  const TreePoint& t = std::get<TreePoint>(p);
  if (t.is_vertex()) return nlohmann::json{{"vertex", t.vertex}};
  return nlohmann::json{{"edge", t.edge}, {"offset", t.offset}};
}

}  // namespace mmc
