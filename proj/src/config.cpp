#include "edgeprune/config.hpp"

#include <set>
#include <type_traits>

#include "edgeprune/errors.hpp"
#include "edgeprune/rng.hpp"

namespace edgeprune {

using nlohmann::json;

static_assert(std::is_same_v<std::uint64_t, std::size_t>, "seed fields are read through the size_t overload");

namespace {

// Reads known keys from one JSON object and rejects anything left over.
class ObjectReader {
 public:
  ObjectReader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  void read(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void read(const char* key, std::size_t& out) {
    if (const json* v = take(key)) out = as_unsigned(*v, key);
  }

  void read(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void read(const char* key, std::optional<std::size_t>& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        out = as_unsigned(*v, key);
      }
    }
  }

  void read(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
      out.clear();
      for (const json& x : *v) {
        if (!x.is_number()) throw ConfigError(where(key) + ": expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  /// Runs `fn` on the nested object if present.
  template <typename Fn>
  void nested(const char* key, Fn&& fn) {
    if (const json* v = take(key)) {
      ObjectReader child(*v, where(key));
      fn(child);
      child.finish();
    }
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown config key '" + where(key.c_str()) + "'");
    }
  }

 private:
  const json* take(const char* key) {
    auto it = doc_.find(key);
    if (it == doc_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  std::uint64_t as_unsigned(const json& v, const char* key) const {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
      throw ConfigError(where(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string where(const char* key = nullptr) const {
    if (key == nullptr) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  const json& doc_;
  std::string path_;
  std::set<std::string> used_;
};

void read_rates(ObjectReader& r, ViewRates& rates) {
  r.read("edge_drop_rate", rates.edge_drop_rate);
  r.read("feature_mask_rate", rates.feature_mask_rate);
}

json rates_json(const ViewRates& r) {
  return {{"edge_drop_rate", r.edge_drop_rate}, {"feature_mask_rate", r.feature_mask_rate}};
}

}  // namespace

void ExperimentConfig::derive_stage_seeds() {
  dataset.sbm.seed = derive_seed(seed, "sbm");
  train.seed = derive_seed(seed, "train");
  attack.seed = derive_seed(seed, "attack");
  sanitize.pruner.seed = derive_seed(seed, "sanitize");
  split.seed = derive_seed(seed, "split");
}

void ExperimentConfig::validate() const {
  try {
    if (dataset.path.empty()) dataset.sbm.validate();
    if (dataset.subsample && *dataset.subsample == 0) throw ContractError("dataset.subsample must be positive");
    train.validate();
    augmentation.validate();
    attack.validate();
    sanitize.pruner.validate();
    if (!parse_engine(sanitize.engine)) {
      std::string names;
      for (const auto& n : engine_names()) names += (names.empty() ? "" : ", ") + n;
      throw ContractError("unknown engine '" + sanitize.engine + "'; valid engines: " + names);
    }
    if (!(sanitize.add_probability >= 0.0 && sanitize.add_probability <= 1.0)) {
      throw ContractError("sanitize.add_probability must lie in [0,1]");
    }
    split.validate();
    if (!(probe.l2 >= 0.0) || !(probe.tol > 0.0)) throw ContractError("probe.l2 must be >= 0 and probe.tol > 0");
    for (double r : sweep_rates)
      if (!(r >= 0.0 && r <= 1.0)) throw ContractError("sweep rates must lie in [0,1]");
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig cfg;
  ObjectReader root(doc, "");
  root.read("seed", cfg.seed);
  root.read("output_dir", cfg.output_dir);
  root.nested("dataset", [&](ObjectReader& r) {
    r.read("path", cfg.dataset.path);
    r.read("subsample", cfg.dataset.subsample);
    r.nested("sbm", [&](ObjectReader& s) {
      s.read("communities", cfg.dataset.sbm.communities);
      s.read("nodes_per_block", cfg.dataset.sbm.nodes_per_block);
      s.read("p_in", cfg.dataset.sbm.p_in);
      s.read("p_out", cfg.dataset.sbm.p_out);
      s.read("feature_dim", cfg.dataset.sbm.feature_dim);
      s.read("feature_noise", cfg.dataset.sbm.feature_noise);
    });
  });
  root.nested("train", [&](ObjectReader& r) {
    r.read("epochs", cfg.train.epochs);
    r.read("tau", cfg.train.tau);
    r.read("hidden_dim", cfg.train.hidden_dim);
    r.read("embed_dim", cfg.train.embed_dim);
    r.nested("adam", [&](ObjectReader& a) {
      a.read("lr", cfg.train.adam.lr);
      a.read("beta1", cfg.train.adam.beta1);
      a.read("beta2", cfg.train.adam.beta2);
      a.read("eps", cfg.train.adam.eps);
    });
  });
  root.nested("augmentation", [&](ObjectReader& r) {
    r.nested("view1", [&](ObjectReader& v) { read_rates(v, cfg.augmentation.view1); });
    r.nested("view2", [&](ObjectReader& v) { read_rates(v, cfg.augmentation.view2); });
    r.read("per_entry_feature_mask", cfg.augmentation.per_entry_feature_mask);
  });
  root.nested("attack", [&](ObjectReader& r) {
    r.read("budget_fraction", cfg.attack.budget_fraction);
    r.read("retrain_epochs_per_flip", cfg.attack.retrain_epochs_per_flip);
    r.read("views_per_gradient", cfg.attack.views_per_gradient);
    r.read("pretrain_epochs", cfg.attack.pretrain_epochs);
    r.read("fresh_retrain", cfg.attack.fresh_retrain);
  });
  root.nested("sanitize", [&](ObjectReader& r) {
    r.read("engine", cfg.sanitize.engine);
    r.read("max_prune_fraction", cfg.sanitize.pruner.max_prune_fraction);
    r.read("augmentation_draws", cfg.sanitize.pruner.augmentation_draws);
    r.read("use_feature_similarity", cfg.sanitize.pruner.use_feature_similarity);
    r.read("similarity_threshold", cfg.sanitize.pruner.similarity_threshold);
    r.read("retrain_epochs_per_iteration", cfg.sanitize.pruner.retrain_epochs_per_iteration);
    r.read("fresh_init", cfg.sanitize.pruner.fresh_init);
    r.read("add_probability", cfg.sanitize.add_probability);
  });
  root.nested("split", [&](ObjectReader& r) {
    r.read("train_frac", cfg.split.train_frac);
    r.read("val_frac", cfg.split.val_frac);
    r.read("test_frac", cfg.split.test_frac);
    r.read("n_repeats", cfg.split.n_repeats);
  });
  root.nested("probe", [&](ObjectReader& r) {
    r.read("l2", cfg.probe.l2);
    r.read("max_iter", cfg.probe.max_iter);
    r.read("tol", cfg.probe.tol);
  });
  root.nested("sweep", [&](ObjectReader& r) { r.read("rates", cfg.sweep_rates); });
  root.nested("inspect", [&](ObjectReader& r) {
    r.read("clean", cfg.inspect_clean);
    r.read("other", cfg.inspect_other);
  });
  root.finish();
  cfg.derive_stage_seeds();
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  const auto& sbm = cfg.dataset.sbm;
  const auto& p = cfg.sanitize.pruner;
  return {
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir},
      {"dataset",
       {{"path", cfg.dataset.path},
        {"subsample", cfg.dataset.subsample ? json(*cfg.dataset.subsample) : json(nullptr)},
        {"sbm",
         {{"communities", sbm.communities},
          {"nodes_per_block", sbm.nodes_per_block},
          {"p_in", sbm.p_in},
          {"p_out", sbm.p_out},
          {"feature_dim", sbm.feature_dim},
          {"feature_noise", sbm.feature_noise}}}}},
      {"train",
       {{"epochs", cfg.train.epochs},
        {"tau", cfg.train.tau},
        {"hidden_dim", cfg.train.hidden_dim},
        {"embed_dim", cfg.train.embed_dim},
        {"adam",
         {{"lr", cfg.train.adam.lr},
          {"beta1", cfg.train.adam.beta1},
          {"beta2", cfg.train.adam.beta2},
          {"eps", cfg.train.adam.eps}}}}},
      {"augmentation",
       {{"view1", rates_json(cfg.augmentation.view1)},
        {"view2", rates_json(cfg.augmentation.view2)},
        {"per_entry_feature_mask", cfg.augmentation.per_entry_feature_mask}}},
      {"attack",
       {{"budget_fraction", cfg.attack.budget_fraction},
        {"retrain_epochs_per_flip", cfg.attack.retrain_epochs_per_flip},
        {"views_per_gradient", cfg.attack.views_per_gradient},
        {"pretrain_epochs", cfg.attack.pretrain_epochs},
        {"fresh_retrain", cfg.attack.fresh_retrain}}},
      {"sanitize",
       {{"engine", cfg.sanitize.engine},
        {"max_prune_fraction", p.max_prune_fraction},
        {"augmentation_draws", p.augmentation_draws},
        {"use_feature_similarity", p.use_feature_similarity},
        {"similarity_threshold", p.similarity_threshold},
        {"retrain_epochs_per_iteration", p.retrain_epochs_per_iteration},
        {"fresh_init", p.fresh_init},
        {"add_probability", cfg.sanitize.add_probability}}},
      {"split",
       {{"train_frac", cfg.split.train_frac},
        {"val_frac", cfg.split.val_frac},
        {"test_frac", cfg.split.test_frac},
        {"n_repeats", cfg.split.n_repeats}}},
      {"probe", {{"l2", cfg.probe.l2}, {"max_iter", cfg.probe.max_iter}, {"tol", cfg.probe.tol}}},
      {"sweep", {{"rates", cfg.sweep_rates}}},
      {"inspect", {{"clean", cfg.inspect_clean}, {"other", cfg.inspect_other}}},
  };
}

}  // namespace edgeprune
