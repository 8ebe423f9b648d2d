#include "edgeprune/commands.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "edgeprune/attack.hpp"
#include "edgeprune/config.hpp"
#include "edgeprune/defense.hpp"
#include "edgeprune/errors.hpp"
#include "edgeprune/eval.hpp"
#include "edgeprune/graph_io.hpp"
#include "edgeprune/rng.hpp"
#include "edgeprune/train.hpp"

namespace edgeprune {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string graph;
  std::vector<std::string> sbm;
  std::optional<std::size_t> subsample;
  std::optional<std::size_t> epochs;
  std::string engine;
  std::optional<double> budget;
  std::optional<double> threshold;
  std::optional<double> prune_fraction;
  std::optional<double> add_probability;
  std::string clean;
  std::string other;
};

void apply_sbm_token(SBMParams& sbm, const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos) throw ConfigError("--sbm expects key=value pairs, got '" + token + "'");
  const std::string key = token.substr(0, eq);
  const std::string value = token.substr(eq + 1);
  try {
    if (key == "blocks" || key == "communities") sbm.communities = std::stoul(value);
    else if (key == "size" || key == "nodes_per_block") sbm.nodes_per_block = std::stoul(value);
    else if (key == "p_in") sbm.p_in = std::stod(value);
    else if (key == "p_out") sbm.p_out = std::stod(value);
    else if (key == "dim" || key == "feature_dim") sbm.feature_dim = std::stoul(value);
    else if (key == "noise" || key == "feature_noise") sbm.feature_noise = std::stod(value);
    else throw ConfigError("unknown --sbm key '" + key + "'");
  } catch (const std::logic_error&) {
    throw ConfigError("--sbm " + key + ": cannot parse '" + value + "'");
  }
}

ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    json doc;
    try {
      doc = read_json(o.config_path);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    cfg = config_from_json(doc);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.graph.empty()) cfg.dataset.path = o.graph;
  if (!o.sbm.empty()) {
    cfg.dataset.path.clear();
    for (const auto& token : o.sbm) apply_sbm_token(cfg.dataset.sbm, token);
  }
  if (o.subsample) cfg.dataset.subsample = o.subsample;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (!o.engine.empty()) cfg.sanitize.engine = o.engine;
  if (o.budget) cfg.attack.budget_fraction = *o.budget;
  if (o.threshold) cfg.sanitize.pruner.similarity_threshold = *o.threshold;
  if (o.prune_fraction) cfg.sanitize.pruner.max_prune_fraction = *o.prune_fraction;
  if (o.add_probability) cfg.sanitize.add_probability = *o.add_probability;
  if (!o.clean.empty()) cfg.inspect_clean = o.clean;
  if (!o.other.empty()) cfg.inspect_other = o.other;
  cfg.derive_stage_seeds();
  cfg.validate();
  return cfg;
}

Graph input_graph(const ExperimentConfig& cfg) {
  Graph g = cfg.dataset.path.empty() ? generate_sbm(cfg.dataset.sbm) : load_graph(cfg.dataset.path);
  if (cfg.dataset.subsample) {
    if (*cfg.dataset.subsample > g.num_nodes()) {
      throw DataError("subsample size " + std::to_string(*cfg.dataset.subsample) + " exceeds node count " +
                      std::to_string(g.num_nodes()));
    }
    g = subsample_nodes(g, *cfg.dataset.subsample, derive_seed(cfg.seed, "subsample"));
  }
  return g;
}

fs::path prepare_out(const ExperimentConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_json(config_to_json(cfg), dir / "effective_config.json");
  return dir;
}

void cmd_generate(const ExperimentConfig& cfg, std::ostream& out) {
  const Graph g = input_graph(cfg);
  const fs::path dir = prepare_out(cfg);
  save_graph(g, dir / "graph.json");
  out << "generated " << g.num_nodes() << " nodes, " << g.adjacency.edge_count() << " edges -> "
      << (dir / "graph.json").string() << '\n';
}

void cmd_poison(const ExperimentConfig& cfg, std::ostream& out) {
  const Graph clean = input_graph(cfg);
  const fs::path dir = prepare_out(cfg);
  const auto [poisoned, report] = clga_poison(clean, cfg.attack, cfg.train, cfg.augmentation);
  save_graph(poisoned, dir / "poisoned.json");
  write_json(attack_report_to_json(report), dir / "attack_report.json");
  write_attack_trace_csv(report, dir / "attack_trace.csv");
  out << "poisoned: " << report.flips.size() << " flips (" << report.additions() << " added, " << report.deletions()
      << " deleted)" << (report.stopped_early ? ", stopped early" : "") << '\n';
}

void cmd_sanitize(const ExperimentConfig& cfg, std::ostream& out) {
  const Graph graph = input_graph(cfg);
  const fs::path dir = prepare_out(cfg);
  const SanitizerEngine engine = *parse_engine(cfg.sanitize.engine);
  const auto [sanitized, report] =
      run_sanitizer(engine, graph, cfg.sanitize.pruner, cfg.sanitize.add_probability, cfg.train, cfg.augmentation);
  json doc = sanitize_report_to_json(report);
  if (!cfg.inspect_clean.empty()) {
    const Graph clean = load_graph(cfg.inspect_clean);
    const auto precision = pruned_edge_precision(report, clean, graph);
    doc["pruned_edge_precision"] = precision ? json(*precision) : json(nullptr);
  }
  save_graph(sanitized, dir / "sanitized.json");
  write_json(doc, dir / "sanitize_report.json");
  write_sanitize_trace_csv(report, dir / "sanitize_trace.csv");
  out << report.engine << ": " << report.returned_modifications << " of " << report.input_edges
      << " edges modified in the returned graph (realized rate " << report.realized_rate() << "), stop: "
      << to_string(report.stop_reason) << '\n';
}

void cmd_eval(const ExperimentConfig& cfg, std::ostream& out) {
  const Graph graph = input_graph(cfg);
  const fs::path dir = prepare_out(cfg);
  const TrainResult trained = train_encoder(graph, cfg.train, cfg.augmentation);
  const EvalResult result = node_classification_accuracy(graph, trained.params, cfg.split, cfg.probe);
  write_loss_csv(trained.losses, dir / "train_loss.csv");
  save_params(trained.params, dir / "encoder.json", config_to_json(cfg)["train"]);
  write_eval_csv(result, dir / "eval.csv");
  out << "accuracy " << result.mean << " +/- " << result.std << " over " << result.accuracies.size() << " splits";
  if (result.resampled_splits > 0) out << " (" << result.resampled_splits << " splits redrawn for missing classes)";
  out << '\n';
}

void cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  const Graph graph = input_graph(cfg);
  const fs::path dir = prepare_out(cfg);
  const SanitizerEngine engine = *parse_engine(cfg.sanitize.engine);
  const auto rows = pruning_sweep(graph, cfg.sweep_rates, engine, cfg.sanitize.pruner, cfg.sanitize.add_probability,
                                  cfg.train, cfg.augmentation, cfg.split, cfg.probe);
  write_sweep_csv(rows, dir / "sweep.csv");
  for (const auto& r : rows) {
    out << "rate " << r.rate << ": accuracy " << r.eval.mean << ", realized prune rate " << r.realized_rate << '\n';
  }
}

void cmd_inspect(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.inspect_clean.empty() || cfg.inspect_other.empty()) {
    throw ConfigError("inspect needs --clean and --other graph files");
  }
  const Graph clean = load_graph(cfg.inspect_clean);
  const Graph other = load_graph(cfg.inspect_other);
  const fs::path dir = prepare_out(cfg);
  const EdgeDelta delta = modification_stats(clean, other);
  const SimilarityStats sims = similarity_stats(clean, other);
  json doc = {{"edges", {{"added", delta.added}, {"deleted", delta.deleted}}},
              {"similarity", similarity_stats_to_json(sims)},
              {"mean_neighbor_similarity",
               {{"clean", mean_neighbor_similarity(clean)}, {"other", mean_neighbor_similarity(other)}}}};
  write_json(doc, dir / "stats.json");
  out << "added " << delta.added << ", deleted " << delta.deleted << ", adversarial edges " << sims.adversarial.count
      << '\n';
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "Experiment config JSON");
  sub->add_option("--seed", o.seed, "Global seed");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--epochs", o.epochs, "Training epochs for the encoder");
}

void add_input(CLI::App* sub, Overrides& o) {
  sub->add_option("--graph", o.graph, "Input graph JSON (default: generate from the SBM config)");
  sub->add_option("--sbm", o.sbm, "SBM overrides as key=value (blocks, size, p_in, p_out, dim, noise)")
      ->expected(1, -1);
  sub->add_option("--subsample", o.subsample, "Uniformly sample this many nodes");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph poisoning and gradient-guided edge pruning for contrastive graph learning", "edgeprune"};
  app.require_subcommand(1);
  Overrides o;

  auto* generate = app.add_subcommand("generate", "Emit an SBM or subsampled graph (graph.json)");
  add_common(generate, o);
  add_input(generate, o);

  auto* poison = app.add_subcommand("poison", "Run the CLGA attack (poisoned.json, attack_report.json)");
  add_common(poison, o);
  add_input(poison, o);
  poison->add_option("--budget", o.budget, "Fraction of edges to flip");

  auto* sanitize = app.add_subcommand("sanitize", "Sanitize a graph (sanitized.json, sanitize_report.json)");
  auto* sweep = app.add_subcommand("sweep", "Sanitize and evaluate across pruning rates (sweep.csv)");
  for (auto* sub : {sanitize, sweep}) {
    add_common(sub, o);
    add_input(sub, o);
    std::string names;
    for (const auto& n : engine_names()) names += (names.empty() ? "" : ", ") + n;
    sub->add_option("--engine", o.engine, "Sanitizer: " + names);
    sub->add_option("--threshold", o.threshold, "Feature-similarity threshold T");
    sub->add_option("--prune-fraction", o.prune_fraction, "Maximum fraction of edges to modify");
    sub->add_option("--add-probability", o.add_probability, "Addition probability (edgemodifier)");
  }
  sanitize->add_option("--clean", o.clean, "Clean graph, to report pruned-edge precision");

  auto* eval = app.add_subcommand("eval", "Train an encoder and probe node classification (eval.csv)");
  add_common(eval, o);
  add_input(eval, o);

  auto* inspect = app.add_subcommand("inspect", "Edge and similarity statistics of a modified graph (stats.json)");
  add_common(inspect, o);
  inspect->add_option("--clean", o.clean, "Clean graph JSON");
  inspect->add_option("--other", o.other, "Poisoned or sanitized graph JSON");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const ExperimentConfig cfg = resolve_config(o);
    if (generate->parsed()) cmd_generate(cfg, out);
    else if (poison->parsed()) cmd_poison(cfg, out);
    else if (sanitize->parsed()) cmd_sanitize(cfg, out);
    else if (eval->parsed()) cmd_eval(cfg, out);
    else if (sweep->parsed()) cmd_sweep(cfg, out);
    else if (inspect->parsed()) cmd_inspect(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ContractError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace edgeprune
