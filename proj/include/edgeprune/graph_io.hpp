#pragma once

#include <filesystem>

#include <json.hpp>

#include "edgeprune/graph.hpp"
#include "edgeprune/numerics.hpp"

namespace edgeprune {

/// Graph JSON: {"n", "d", "edges": [[i,j],...] with i<j sorted, "features": n rows of d,
/// "labels": [..] or null}. Parse failures throw DataError naming the field.
nlohmann::json graph_to_json(const Graph& graph);
Graph graph_from_json(const nlohmann::json& doc);

Graph load_graph(const std::filesystem::path& path);
void save_graph(const Graph& graph, const std::filesystem::path& path);

/// Encoder checkpoint: dims and training hyperparameters followed by w1 and w2
/// flattened row-major, all in one JSON document.
nlohmann::json params_to_json(const EncoderParams& params, const nlohmann::json& hyper = nlohmann::json::object());
EncoderParams params_from_json(const nlohmann::json& doc);

void save_params(const EncoderParams& params, const std::filesystem::path& path,
                 const nlohmann::json& hyper = nlohmann::json::object());
EncoderParams load_params(const std::filesystem::path& path);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace edgeprune
