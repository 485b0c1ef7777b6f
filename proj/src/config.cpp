#include "reglab/config.hpp"

#include <json.hpp>

#include "reglab/tasks.hpp"

namespace reglab {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "config errors:";
  for (const auto& e : errors) {
    out += "\n  - " + e;
  }
  return out;
}

struct Errors {
  std::vector<std::string> list;

  void add(const std::string& path, const std::string& message) {
    list.push_back(path + ": " + message);
  }
  void raise_if_any() const {
    if (!list.empty()) throw ConfigError(list);
  }
};

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Errors& errs) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* k : allowed) {
      if (key == k) {
        known = true;
        break;
      }
    }
    if (!known) errs.add(path.empty() ? key : path + "." + key, "unknown key");
  }
}

const json* get_member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::optional<double> get_number(const json& obj, const std::string& path,
                                 const char* key, Errors& errs) {
  const json* v = get_member(obj, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_number()) {
    errs.add(path + "." + key, "expected a number");
    return std::nullopt;
  }
  return v->get<double>();
}

std::optional<std::uint64_t> get_count(const json& obj, const std::string& path,
                                       const char* key, Errors& errs) {
  const json* v = get_member(obj, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_number_unsigned()) {
    errs.add(path + "." + key, "expected a non-negative integer");
    return std::nullopt;
  }
  return v->get<std::uint64_t>();
}

std::optional<std::string> get_string(const json& obj, const std::string& path,
                                      const char* key, Errors& errs) {
  const json* v = get_member(obj, key);
  if (v == nullptr) return std::nullopt;
  if (!v->is_string()) {
    errs.add(path + "." + key, "expected a string");
    return std::nullopt;
  }
  return v->get<std::string>();
}

template <typename Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<ActivationKind> kActivations[] = {
    {ActivationKind::identity, "identity"},
    {ActivationKind::sigmoid, "sigmoid"},
    {ActivationKind::tanh, "tanh"},
    {ActivationKind::relu, "relu"},
};
constexpr EnumName<LossKind> kLosses[] = {
    {LossKind::mse, "mse"},
    {LossKind::bce, "bce"},
};
constexpr EnumName<PenaltyKind> kPenalties[] = {
    {PenaltyKind::l1, "l1"},
    {PenaltyKind::l2, "l2"},
};
constexpr EnumName<DropGranularity> kGranularities[] = {
    {DropGranularity::neuron, "neuron"},
    {DropGranularity::weight, "weight"},
};
constexpr EnumName<MaskGranularity> kMaskGranularities[] = {
    {MaskGranularity::per_epoch, "per_epoch"},
    {MaskGranularity::per_minibatch, "per_minibatch"},
};
constexpr EnumName<ScaleMode> kScaleModes[] = {
    {ScaleMode::inverse_p, "inverse_p"},
    {ScaleMode::retention_p, "retention_p"},
};
constexpr EnumName<SamplingMode> kSamplings[] = {
    {SamplingMode::shuffle, "shuffle"},
    {SamplingMode::with_replacement, "with_replacement"},
};
constexpr EnumName<NoiseMode> kNoiseModes[] = {
    {NoiseMode::additive, "additive"},
    {NoiseMode::multiplicative, "multiplicative"},
};
constexpr EnumName<AugmentTarget> kTargets[] = {
    {AugmentTarget::input, "input"},
    {AugmentTarget::feature, "feature"},
    {AugmentTarget::label, "label"},
};
constexpr EnumName<AugmentPlan::Application> kApplications[] = {
    {AugmentPlan::Application::fresh, "fresh"},
    {AugmentPlan::Application::frozen, "frozen"},
};
constexpr EnumName<DistSpec::Kind> kDistKinds[] = {
    {DistSpec::Kind::gaussian, "gaussian"},
    {DistSpec::Kind::bernoulli, "bernoulli"},
    {DistSpec::Kind::uniform, "uniform"},
};

template <typename Enum, std::size_t N>
const char* enum_to_name(const EnumName<Enum> (&table)[N], Enum value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> name_to_enum(const EnumName<Enum> (&table)[N],
                                 const std::string& name) {
  for (const auto& entry : table) {
    if (name == entry.name) return entry.value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
Enum parse_enum(const json& obj, const std::string& path, const char* key,
                const EnumName<Enum> (&table)[N], Enum fallback, Errors& errs) {
  const auto name = get_string(obj, path, key, errs);
  if (!name.has_value()) return fallback;
  const auto value = name_to_enum(table, *name);
  if (!value.has_value()) {
    std::string options;
    for (const auto& entry : table) {
      if (!options.empty()) options += "|";
      options += entry.name;
    }
    errs.add(path + "." + key, "expected one of " + options);
    return fallback;
  }
  return *value;
}

std::optional<DistSpec> parse_dist(const json& obj, const std::string& path, Errors& errs) {
  if (!obj.is_object()) {
    errs.add(path, "expected an object");
    return std::nullopt;
  }
  const auto name = get_string(obj, path, "kind", errs);
  if (!name.has_value()) {
    errs.add(path + ".kind", "required");
    return std::nullopt;
  }
  try {
    if (*name == "gaussian") {
      check_keys(obj, path, {"kind", "mean", "stddev"}, errs);
      const auto mean = get_number(obj, path, "mean", errs);
      const auto stddev = get_number(obj, path, "stddev", errs);
      if (!mean || !stddev) {
        errs.add(path, "gaussian requires mean and stddev");
        return std::nullopt;
      }
      return DistSpec::gaussian(*mean, *stddev);
    }
    if (*name == "bernoulli") {
      check_keys(obj, path, {"kind", "p"}, errs);
      const auto p = get_number(obj, path, "p", errs);
      if (!p) {
        errs.add(path, "bernoulli requires p");
        return std::nullopt;
      }
      return DistSpec::bernoulli(*p);
    }
    if (*name == "uniform") {
      check_keys(obj, path, {"kind", "lo", "hi"}, errs);
      const auto lo = get_number(obj, path, "lo", errs);
      const auto hi = get_number(obj, path, "hi", errs);
      if (!lo || !hi) {
        errs.add(path, "uniform requires lo and hi");
        return std::nullopt;
      }
      return DistSpec::uniform(*lo, *hi);
    }
  } catch (const std::invalid_argument& e) {
    errs.add(path, e.what());
    return std::nullopt;
  }
  errs.add(path + ".kind", "expected one of gaussian|bernoulli|uniform");
  return std::nullopt;
}

json dist_to_json(const DistSpec& dist) {
  json out;
  out["kind"] = enum_to_name(kDistKinds, dist.kind);
  switch (dist.kind) {
    case DistSpec::Kind::gaussian:
      out["mean"] = dist.a;
      out["stddev"] = dist.b;
      break;
    case DistSpec::Kind::bernoulli:
      out["p"] = dist.a;
      break;
    case DistSpec::Kind::uniform:
      out["lo"] = dist.a;
      out["hi"] = dist.b;
      break;
  }
  return out;
}

std::optional<RealMat> parse_matrix(const json& v, const std::string& path, Errors& errs) {
  if (!v.is_array() || v.empty()) {
    errs.add(path, "expected a non-empty array of rows");
    return std::nullopt;
  }
  std::vector<RealVec> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.empty()) {
      errs.add(path + "[" + std::to_string(i) + "]", "expected a non-empty row");
      return std::nullopt;
    }
    RealVec r;
    for (const auto& cell : row) {
      if (!cell.is_number()) {
        errs.add(path + "[" + std::to_string(i) + "]", "expected numbers");
        return std::nullopt;
      }
      r.push_back(cell.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return RealMat::from_rows(rows);
  } catch (const std::invalid_argument& e) {
    errs.add(path, e.what());
    return std::nullopt;
  }
}

std::optional<RealVec> parse_vector(const json& v, const std::string& path, Errors& errs) {
  if (!v.is_array()) {
    errs.add(path, "expected an array of numbers");
    return std::nullopt;
  }
  RealVec out;
  for (const auto& cell : v) {
    if (!cell.is_number()) {
      errs.add(path, "expected numbers");
      return std::nullopt;
    }
    out.push_back(cell.get<double>());
  }
  return out;
}

std::optional<Decoder> parse_decoder(const json& obj, const std::string& path, Errors& errs) {
  if (!obj.is_object()) {
    errs.add(path, "expected an object");
    return std::nullopt;
  }
  const auto kind = get_string(obj, path, "kind", errs);
  if (!kind.has_value()) {
    errs.add(path + ".kind", "required");
    return std::nullopt;
  }
  try {
    if (*kind == "identity") {
      check_keys(obj, path, {"kind", "dim"}, errs);
      const auto dim = get_count(obj, path, "dim", errs);
      if (!dim) {
        errs.add(path, "identity decoder requires dim");
        return std::nullopt;
      }
      return Decoder::identity(static_cast<std::size_t>(*dim));
    }
    if (*kind == "linear" || *kind == "linear_nonlinear") {
      const bool nonlinear = *kind == "linear_nonlinear";
      if (nonlinear) {
        check_keys(obj, path, {"kind", "a", "c", "activation"}, errs);
      } else {
        check_keys(obj, path, {"kind", "a", "c"}, errs);
      }
      const json* a = get_member(obj, "a");
      const json* c = get_member(obj, "c");
      if (a == nullptr || c == nullptr) {
        errs.add(path, "linear decoder requires a and c");
        return std::nullopt;
      }
      auto mat = parse_matrix(*a, path + ".a", errs);
      auto vec = parse_vector(*c, path + ".c", errs);
      if (!mat || !vec) return std::nullopt;
      if (!nonlinear) return Decoder::linear(std::move(*mat), std::move(*vec));
      const auto activation = parse_enum(obj, path, "activation", kActivations,
                                         ActivationKind::identity, errs);
      return Decoder::linear_nonlinear(std::move(*mat), std::move(*vec), activation);
    }
    if (*kind == "composed") {
      check_keys(obj, path, {"kind", "stages"}, errs);
      const json* stages = get_member(obj, "stages");
      if (stages == nullptr || !stages->is_array() || stages->empty()) {
        errs.add(path + ".stages", "expected a non-empty array");
        return std::nullopt;
      }
      std::vector<Decoder> parsed;
      for (std::size_t i = 0; i < stages->size(); ++i) {
        auto stage =
            parse_decoder((*stages)[i], path + ".stages[" + std::to_string(i) + "]", errs);
        if (!stage) return std::nullopt;
        parsed.push_back(std::move(*stage));
      }
      return Decoder::composed(std::move(parsed));
    }
  } catch (const std::invalid_argument& e) {
    errs.add(path, e.what());
    return std::nullopt;
  }
  errs.add(path + ".kind", "expected one of identity|linear|linear_nonlinear|composed");
  return std::nullopt;
}

json matrix_to_json(const RealMat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json decoder_to_json(const Decoder& d) {
  json out;
  switch (d.kind) {
    case Decoder::Kind::identity:
      out["kind"] = "identity";
      out["dim"] = d.dim;
      break;
    case Decoder::Kind::linear:
      out["kind"] = "linear";
      out["a"] = matrix_to_json(d.A);
      out["c"] = d.c;
      break;
    case Decoder::Kind::linear_nonlinear:
      out["kind"] = "linear_nonlinear";
      out["a"] = matrix_to_json(d.A);
      out["c"] = d.c;
      out["activation"] = enum_to_name(kActivations, d.activation);
      break;
    case Decoder::Kind::composed: {
      out["kind"] = "composed";
      json stages = json::array();
      for (const auto& stage : d.stages) stages.push_back(decoder_to_json(stage));
      out["stages"] = std::move(stages);
      break;
    }
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors_)
    : std::runtime_error(join_errors(errors_)), errors(std::move(errors_)) {}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("invalid JSON: ") + e.what()});
  }
  if (!root.is_object()) {
    throw ConfigError({"config: expected a JSON object"});
  }

  Errors errs;
  ExperimentConfig config;

  check_keys(root, "",
             {"schema_version", "task", "network", "loss", "train", "augment", "verify",
              "sweep", "output"},
             errs);

  // schema_version is mandatory
  if (const auto version = get_count(root, "config", "schema_version", errs)) {
    config.schema_version = static_cast<int>(*version);
    if (config.schema_version != 1) {
      errs.add("schema_version", "unsupported version (expected 1)");
    }
  } else {
    errs.add("schema_version", "required");
  }

  // task
  if (const json* task = get_member(root, "task")) {
    if (!task->is_object()) {
      errs.add("task", "expected an object");
    } else {
      check_keys(*task, "task", {"builtin", "dataset"}, errs);
      const auto builtin = get_string(*task, "task", "builtin", errs);
      const auto dataset = get_string(*task, "task", "dataset", errs);
      if (builtin.has_value() == dataset.has_value()) {
        errs.add("task", "exactly one of builtin or dataset is required");
      }
      if (builtin.has_value()) {
        config.task_builtin = *builtin;
        if (!tasks::is_builtin(*builtin)) {
          errs.add("task.builtin", "unknown builtin task '" + *builtin + "'");
        }
      }
      if (dataset.has_value()) config.task_dataset = *dataset;
    }
  } else {
    errs.add("task", "required");
  }

  // network topology
  if (const json* network = get_member(root, "network")) {
    if (!network->is_array() || network->empty()) {
      errs.add("network", "expected a non-empty array of layers");
    } else {
      for (std::size_t i = 0; i < network->size(); ++i) {
        const std::string path = "network[" + std::to_string(i) + "]";
        const json& layer = (*network)[i];
        if (!layer.is_object()) {
          errs.add(path, "expected an object");
          continue;
        }
        check_keys(layer, path, {"units", "activation"}, errs);
        LayerSpec spec;
        if (const auto units = get_count(layer, path, "units", errs)) {
          spec.units = static_cast<std::size_t>(*units);
          if (spec.units == 0) errs.add(path + ".units", "must be >= 1");
        } else {
          errs.add(path + ".units", "required");
        }
        spec.activation = parse_enum(layer, path, "activation", kActivations,
                                     ActivationKind::identity, errs);
        config.network.push_back(spec);
      }
    }
  } else {
    errs.add("network", "required");
  }

  config.loss = parse_enum(root, "config", "loss", kLosses, LossKind::mse, errs);

  // train section
  if (const json* train = get_member(root, "train")) {
    if (!train->is_object()) {
      errs.add("train", "expected an object");
    } else {
      check_keys(*train, "train",
                 {"eta", "epochs", "minibatch_size", "seed", "sampling", "penalty", "drop"},
                 errs);
      if (const auto eta = get_number(*train, "train", "eta", errs)) {
        config.train.eta = *eta;
        if (!(*eta > 0.0)) errs.add("train.eta", "must be > 0");
      }
      if (const auto epochs = get_count(*train, "train", "epochs", errs)) {
        config.train.epochs = static_cast<std::size_t>(*epochs);
      } else {
        errs.add("train.epochs", "required");
      }
      if (const auto m = get_count(*train, "train", "minibatch_size", errs)) {
        config.train.minibatch_size = static_cast<std::size_t>(*m);
        if (*m == 0) errs.add("train.minibatch_size", "must be >= 1");
      }
      if (const auto seed = get_count(*train, "train", "seed", errs)) {
        config.train.seed = *seed;
      }
      config.train.sampling =
          parse_enum(*train, "train", "sampling", kSamplings, SamplingMode::shuffle, errs);

      if (const json* penalty = get_member(*train, "penalty")) {
        if (!penalty->is_object()) {
          errs.add("train.penalty", "expected an object");
        } else {
          check_keys(*penalty, "train.penalty", {"kind", "alpha"}, errs);
          PenaltySpec spec;
          spec.kind = parse_enum(*penalty, "train.penalty", "kind", kPenalties,
                                 PenaltyKind::l2, errs);
          if (const auto alpha = get_number(*penalty, "train.penalty", "alpha", errs)) {
            spec.alpha = *alpha;
            if (!(*alpha >= 0.0)) errs.add("train.penalty.alpha", "must be >= 0");
          } else {
            errs.add("train.penalty.alpha", "required");
          }
          config.train.penalty = spec;
        }
      }

      if (const json* drop = get_member(*train, "drop")) {
        if (!drop->is_object()) {
          errs.add("train.drop", "expected an object");
        } else {
          check_keys(*drop, "train.drop",
                     {"p", "granularity", "layer_index", "mask_granularity", "scale_mode"},
                     errs);
          DropSection section;
          if (const auto p = get_number(*drop, "train.drop", "p", errs)) {
            section.p = *p;
            if (!(*p >= 0.0 && *p <= 1.0)) errs.add("train.drop.p", "must be in [0, 1]");
          } else {
            errs.add("train.drop.p", "required");
          }
          section.granularity = parse_enum(*drop, "train.drop", "granularity",
                                           kGranularities, DropGranularity::neuron, errs);
          if (const auto idx = get_count(*drop, "train.drop", "layer_index", errs)) {
            section.layer_index = static_cast<std::size_t>(*idx);
          }
          section.mask_granularity =
              parse_enum(*drop, "train.drop", "mask_granularity", kMaskGranularities,
                         MaskGranularity::per_minibatch, errs);
          section.scale_mode = parse_enum(*drop, "train.drop", "scale_mode", kScaleModes,
                                          ScaleMode::retention_p, errs);
          config.train.drop = section;
        }
      }
    }
  } else {
    errs.add("train", "required");
  }

  // augment section
  if (const json* augment = get_member(root, "augment")) {
    if (!augment->is_object()) {
      errs.add("augment", "expected an object");
    } else {
      check_keys(*augment, "augment",
                 {"mode", "dist", "target", "decoder", "application", "copies"}, errs);
      AugmentSection section;
      section.mode =
          parse_enum(*augment, "augment", "mode", kNoiseModes, NoiseMode::additive, errs);
      if (const json* dist = get_member(*augment, "dist")) {
        if (auto parsed = parse_dist(*dist, "augment.dist", errs)) {
          section.dist = *parsed;
        }
      } else {
        errs.add("augment.dist", "required");
      }
      section.target = parse_enum(*augment, "augment", "target", kTargets,
                                  AugmentTarget::input, errs);
      if (const json* decoder = get_member(*augment, "decoder")) {
        if (decoder->is_string() && decoder->get<std::string>() == "task") {
          section.use_task_decoder = true;
        } else if (auto parsed = parse_decoder(*decoder, "augment.decoder", errs)) {
          section.decoder = std::move(*parsed);
        }
      }
      section.application = parse_enum(*augment, "augment", "application", kApplications,
                                       AugmentPlan::Application::fresh, errs);
      if (const auto copies = get_count(*augment, "augment", "copies", errs)) {
        section.copies = static_cast<std::size_t>(*copies);
        if (*copies == 0) errs.add("augment.copies", "must be >= 1");
      }
      if (section.target == AugmentTarget::feature && !section.use_task_decoder &&
          !section.decoder.has_value()) {
        errs.add("augment.decoder", "required for feature targets");
      }
      config.augment = std::move(section);
    }
  }

  // verify selection
  if (const json* verify = get_member(root, "verify")) {
    if (!verify->is_array()) {
      errs.add("verify", "expected an array of verification names");
    } else {
      for (std::size_t i = 0; i < verify->size(); ++i) {
        if (!(*verify)[i].is_string()) {
          errs.add("verify[" + std::to_string(i) + "]", "expected a string");
          continue;
        }
        config.verify.push_back((*verify)[i].get<std::string>());
      }
    }
  }

  // sweep section
  if (const json* sweep = get_member(root, "sweep")) {
    if (!sweep->is_object()) {
      errs.add("sweep", "expected an object");
    } else {
      check_keys(*sweep, "sweep", {"seeds", "eta", "alpha"}, errs);
      SweepSection section;
      if (const json* seeds = get_member(*sweep, "seeds")) {
        if (!seeds->is_array() || seeds->empty()) {
          errs.add("sweep.seeds", "expected a non-empty array");
        } else {
          for (const auto& s : *seeds) {
            if (!s.is_number_unsigned()) {
              errs.add("sweep.seeds", "expected non-negative integers");
              break;
            }
            section.seeds.push_back(s.get<std::uint64_t>());
          }
        }
      } else {
        errs.add("sweep.seeds", "required");
      }
      for (const char* key : {"eta", "alpha"}) {
        if (const json* values = get_member(*sweep, key)) {
          if (!values->is_array() || values->empty()) {
            errs.add(std::string("sweep.") + key, "expected a non-empty array");
            continue;
          }
          for (const auto& v : *values) {
            if (!v.is_number()) {
              errs.add(std::string("sweep.") + key, "expected numbers");
              break;
            }
            (std::string(key) == "eta" ? section.eta : section.alpha)
                .push_back(v.get<double>());
          }
        }
      }
      config.sweep = std::move(section);
    }
  }

  if (const auto output = get_string(root, "config", "output", errs)) {
    config.output = *output;
  }

  errs.raise_if_any();
  return config;
}

std::string emit_config(const ExperimentConfig& config) {
  json root;
  root["schema_version"] = config.schema_version;

  json task;
  if (!config.task_builtin.empty()) task["builtin"] = config.task_builtin;
  if (!config.task_dataset.empty()) task["dataset"] = config.task_dataset;
  root["task"] = std::move(task);

  json network = json::array();
  for (const auto& layer : config.network) {
    json spec;
    spec["units"] = layer.units;
    spec["activation"] = enum_to_name(kActivations, layer.activation);
    network.push_back(std::move(spec));
  }
  root["network"] = std::move(network);

  root["loss"] = enum_to_name(kLosses, config.loss);

  json train;
  train["eta"] = config.train.eta;
  train["epochs"] = config.train.epochs;
  train["minibatch_size"] = config.train.minibatch_size;
  train["seed"] = config.train.seed;
  train["sampling"] = enum_to_name(kSamplings, config.train.sampling);
  if (config.train.penalty.has_value()) {
    json penalty;
    penalty["kind"] = enum_to_name(kPenalties, config.train.penalty->kind);
    penalty["alpha"] = config.train.penalty->alpha;
    train["penalty"] = std::move(penalty);
  }
  if (config.train.drop.has_value()) {
    const auto& d = *config.train.drop;
    json drop;
    drop["p"] = d.p;
    drop["granularity"] = enum_to_name(kGranularities, d.granularity);
    drop["layer_index"] = d.layer_index;
    drop["mask_granularity"] = enum_to_name(kMaskGranularities, d.mask_granularity);
    drop["scale_mode"] = enum_to_name(kScaleModes, d.scale_mode);
    train["drop"] = std::move(drop);
  }
  root["train"] = std::move(train);

  if (config.augment.has_value()) {
    const auto& a = *config.augment;
    json augment;
    augment["mode"] = enum_to_name(kNoiseModes, a.mode);
    augment["dist"] = dist_to_json(a.dist);
    augment["target"] = enum_to_name(kTargets, a.target);
    if (a.use_task_decoder) {
      augment["decoder"] = "task";
    } else if (a.decoder.has_value()) {
      augment["decoder"] = decoder_to_json(*a.decoder);
    }
    augment["application"] = enum_to_name(kApplications, a.application);
    augment["copies"] = a.copies;
    root["augment"] = std::move(augment);
  }

  if (!config.verify.empty()) root["verify"] = config.verify;

  if (config.sweep.has_value()) {
    json sweep;
    sweep["seeds"] = config.sweep->seeds;
    if (!config.sweep->eta.empty()) sweep["eta"] = config.sweep->eta;
    if (!config.sweep->alpha.empty()) sweep["alpha"] = config.sweep->alpha;
    root["sweep"] = std::move(sweep);
  }

  if (!config.output.empty()) root["output"] = config.output;

  return root.dump(2) + "\n";
}

TrainConfig to_train_config(const ExperimentConfig& config,
                            const std::optional<Decoder>& task_decoder) {
  TrainConfig train;
  train.topology = config.network;
  train.loss = config.loss;
  train.eta = config.train.eta;
  train.epochs = config.train.epochs;
  train.minibatch_size = config.train.minibatch_size;
  train.seed = config.train.seed;
  train.sampling = config.train.sampling;
  train.penalty = config.train.penalty;
  if (config.train.drop.has_value()) {
    const auto& d = *config.train.drop;
    train.drop = DropSpec{d.p, d.granularity, d.layer_index};
    train.mask_granularity = d.mask_granularity;
    train.scale_mode = d.scale_mode;
  }
  if (config.augment.has_value()) {
    const auto& a = *config.augment;
    AugmentPlan plan;
    plan.spec.noise = NoiseSpec{a.mode, a.dist};
    plan.spec.target = a.target;
    if (a.use_task_decoder) {
      if (!task_decoder.has_value()) {
        throw std::invalid_argument(
            "augment.decoder: 'task' requires a builtin task that provides a decoder");
      }
      plan.spec.decoder = *task_decoder;
    } else {
      plan.spec.decoder = a.decoder;
    }
    plan.application = a.application;
    plan.frozen_copies = a.copies;
    train.augmentation = std::move(plan);
  }
  return train;
}

}  // namespace reglab
