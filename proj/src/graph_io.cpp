#include "edgeprune/graph_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "edgeprune/errors.hpp"

namespace edgeprune {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw DataError(std::string("missing field '") + field + "'");
  return *it;
}

std::size_t as_index(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw DataError(where + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) throw DataError(where + ": expected a number");
  return v.get<double>();
}

}  // namespace

json graph_to_json(const Graph& graph) {
  json doc;
  doc["n"] = graph.num_nodes();
  doc["d"] = graph.feature_dim();
  json edges = json::array();
  for (const auto& [i, j] : graph.adjacency.edges()) edges.push_back({i, j});
  doc["edges"] = std::move(edges);
  json features = json::array();
  for (Eigen::Index r = 0; r < graph.features.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < graph.features.cols(); ++c) row.push_back(graph.features(r, c));
    features.push_back(std::move(row));
  }
  doc["features"] = std::move(features);
  doc["labels"] = graph.labels ? json(*graph.labels) : json(nullptr);
  return doc;
}

Graph graph_from_json(const json& doc) {
  if (!doc.is_object()) throw DataError("graph document must be a JSON object");
  const std::size_t n = as_index(require(doc, "n"), "n");
  const std::size_t d = as_index(require(doc, "d"), "d");
  if (n == 0) throw DataError("n: graph must have at least one node");

  const json& edges = require(doc, "edges");
  if (!edges.is_array()) throw DataError("edges: expected an array");
  Adjacency adj(n);
  std::set<Edge> seen;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string where = "edges[" + std::to_string(k) + "]";
    const json& e = edges[k];
    if (!e.is_array() || e.size() != 2) throw DataError(where + ": expected an [i, j] pair");
    const std::size_t i = as_index(e[0], where + "[0]");
    const std::size_t j = as_index(e[1], where + "[1]");
    if (i >= n || j >= n) {
      throw DataError(where + ": index out of range (" + std::to_string(i) + "," + std::to_string(j) +
                      ") for n=" + std::to_string(n));
    }
    if (i == j) throw DataError(where + ": self-loop on node " + std::to_string(i));
    const Edge key{std::min(i, j), std::max(i, j)};
    if (!seen.insert(key).second) {
      throw DataError(where + ": duplicate edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                      "); undirected edges are listed once");
    }
    adj.set_edge(i, j, true);
  }

  const json& feats = require(doc, "features");
  if (!feats.is_array() || feats.size() != n) throw DataError("features: expected " + std::to_string(n) + " rows");
  Matrix features(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    const json& row = feats[r];
    const std::string where = "features[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != d) throw DataError(where + ": expected " + std::to_string(d) + " values");
    for (std::size_t c = 0; c < d; ++c) {
      const double v = as_real(row[c], where + "[" + std::to_string(c) + "]");
      if (!std::isfinite(v)) throw DataError(where + "[" + std::to_string(c) + "]: non-finite value");
      features(r, c) = v;
    }
  }

  std::optional<std::vector<int>> labels;
  auto it = doc.find("labels");
  if (it != doc.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != n) throw DataError("labels: expected " + std::to_string(n) + " entries or null");
    std::vector<int> values(n);
    for (std::size_t r = 0; r < n; ++r) {
      values[r] = static_cast<int>(as_index((*it)[r], "labels[" + std::to_string(r) + "]"));
    }
    labels = std::move(values);
  }
  return Graph{std::move(adj), std::move(features), std::move(labels)};
}

void write_json(const json& doc, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Graph load_graph(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return graph_from_json(doc);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_graph(const Graph& graph, const std::filesystem::path& path) { write_json(graph_to_json(graph), path); }

json params_to_json(const EncoderParams& params, const json& hyper) {
  json doc;
  doc["input_dim"] = params.input_dim();
  doc["hidden_dim"] = params.hidden_dim();
  doc["embed_dim"] = params.embed_dim();
  doc["hyper"] = hyper;
  doc["w1"] = std::vector<double>(params.w1.data(), params.w1.data() + params.w1.size());
  doc["w2"] = std::vector<double>(params.w2.data(), params.w2.data() + params.w2.size());
  return doc;
}

EncoderParams params_from_json(const json& doc) {
  const std::size_t d = as_index(require(doc, "input_dim"), "input_dim");
  const std::size_t h = as_index(require(doc, "hidden_dim"), "hidden_dim");
  const std::size_t e = as_index(require(doc, "embed_dim"), "embed_dim");
  auto load = [](const json& arr, std::size_t rows, std::size_t cols, const char* name) {
    if (!arr.is_array() || arr.size() != rows * cols) {
      throw DataError(std::string(name) + ": expected " + std::to_string(rows * cols) + " values");
    }
    Matrix m(rows, cols);
    for (std::size_t k = 0; k < rows * cols; ++k) m.data()[k] = as_real(arr[k], std::string(name));
    return m;
  };
  EncoderParams p;
  p.w1 = load(require(doc, "w1"), d, h, "w1");
  p.w2 = load(require(doc, "w2"), h, e, "w2");
  return p;
}

void save_params(const EncoderParams& params, const std::filesystem::path& path, const json& hyper) {
  write_json(params_to_json(params, hyper), path);
}

EncoderParams load_params(const std::filesystem::path& path) { return params_from_json(read_json(path)); }

}  // namespace edgeprune
