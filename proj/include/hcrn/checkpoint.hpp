#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcrn/model.hpp"
#include "hcrn/optim.hpp"
#include "hcrn/rng.hpp"

namespace hcrn {

// On-disk layout: magic "HCRN", little-endian u32 version, little-endian u64
// manifest byte length, UTF-8 JSON manifest, then the raw little-endian
// IEEE-754 payload of every tensor at the offsets the manifest records.
struct TensorRecord {
  std::string name;
  std::vector<std::size_t> shape;
  std::string dtype;  // "f32" | "f64"
  std::string group;  // "model" | "opt_eg2" | "opt_edx2"
  bool frozen = false;
  std::vector<double> data;  // lossless carrier for either dtype
};

struct CheckpointData {
  std::uint32_t version = 1;
  nlohmann::json config;
  int epoch = 0;
  std::string rng_state;
  std::vector<TensorRecord> tensors;
};

void write_checkpoint_file(const std::string& path, const CheckpointData& c);
CheckpointData read_checkpoint_file(const std::string& path);

// Manifest config only; lets callers pick the dtype/phase before a full load.
nlohmann::json peek_checkpoint_config(const std::string& path);

// ---------------------------------------------------------------------------

template <typename S>
CheckpointData to_checkpoint(ModelAssembly<S>& m, const Adadelta<S>& opt,
                             const Rng& rng, int epoch) {
  CheckpointData c;
  c.epoch = epoch;
  c.rng_state = rng.state();
  c.config = nlohmann::json{{"dtype", dtype_name<S>::value},
                            {"phase", phase_name(m.phase)},
                            {"encoder", encoder_name(m.encoder)},
                            {"model", m.config.to_json()},
                            {"train_words", m.train_words}};
  if (m.wemb.present()) c.config["wemb_words"] = m.wemb.words;
  c.config["optimizer"] = {{"rho", opt.rho}, {"eps", opt.eps}};

  for (Parameter<S>* p : m.params()) {
    TensorRecord r;
    r.name = p->name;
    r.shape = p->value.shape;
    r.dtype = dtype_name<S>::value;
    r.group = "model";
    r.frozen = p->frozen;
    r.data.assign(p->value.v.begin(), p->value.v.end());
    c.tensors.push_back(std::move(r));
  }
  for (const auto& [name, slot] : opt.slots()) {
    for (const auto& [group, tensor] :
         {std::pair{std::string("opt_eg2"), &slot.eg2},
          std::pair{std::string("opt_edx2"), &slot.edx2}}) {
      TensorRecord r;
      r.name = name;
      r.shape = tensor->shape;
      r.dtype = dtype_name<S>::value;
      r.group = group;
      r.data.assign(tensor->v.begin(), tensor->v.end());
      c.tensors.push_back(std::move(r));
    }
  }
  return c;
}

template <typename S>
ModelAssembly<S> model_from_checkpoint_config(const nlohmann::json& cfg) {
  const std::string dtype = cfg.at("dtype").get<std::string>();
  if (dtype != dtype_name<S>::value)
    throw FormatError("checkpoint dtype is " + dtype + ", expected " +
                      dtype_name<S>::value);
  const Phase phase = phase_from_name(cfg.at("phase").get<std::string>());
  const EncoderKind enc =
      encoder_from_name(cfg.at("encoder").get<std::string>());
  const HcrnConfig mc = HcrnConfig::from_json(cfg.at("model"));
  Rng scratch(0, "checkpoint-load");
  ModelAssembly<S> m = ModelAssembly<S>::build(mc, phase, enc, scratch);
  if (enc == EncoderKind::word_table) {
    m.wemb = NonCompEmbedding<S>::from_words(
        cfg.at("wemb_words").get<std::vector<std::string>>(), mc.wemb_dim);
    m.rebuild_registry();
  }
  if (cfg.contains("train_words"))
    m.train_words = cfg.at("train_words").get<std::vector<std::string>>();
  return m;
}

template <typename S>
struct LoadedModel {
  ModelAssembly<S> model;
  Adadelta<S> opt;
  Rng rng;
  int epoch = 0;
};

template <typename S>
LoadedModel<S> from_checkpoint(const CheckpointData& c) {
  LoadedModel<S> out;
  out.model = model_from_checkpoint_config<S>(c.config);
  out.epoch = c.epoch;
  out.rng.set_state(c.rng_state);
  if (c.config.contains("optimizer")) {
    out.opt.rho = c.config["optimizer"].value("rho", 0.9);
    out.opt.eps = c.config["optimizer"].value("eps", 1e-6);
  }

  std::size_t model_records = 0;
  for (const TensorRecord& r : c.tensors) {
    if (r.group == "model") {
      Parameter<S>* p = out.model.find(r.name);
      if (!p)
        throw FormatError("checkpoint names unknown parameter '" + r.name + "'");
      if (p->value.shape != r.shape)
        throw FormatError("checkpoint shape mismatch for '" + r.name + "'");
      for (std::size_t i = 0; i < r.data.size(); ++i)
        p->value[i] = static_cast<S>(r.data[i]);
      p->frozen = r.frozen;
      ++model_records;
    } else if (r.group == "opt_eg2" || r.group == "opt_edx2") {
      Parameter<S>* p = out.model.find(r.name);
      if (!p)
        throw FormatError("checkpoint optimizer state for unknown parameter '" +
                          r.name + "'");
      auto& slot = out.opt.slot(*p);
      Tensor<S>& dst = r.group == "opt_eg2" ? slot.eg2 : slot.edx2;
      if (dst.shape != r.shape)
        throw FormatError("checkpoint optimizer shape mismatch for '" + r.name +
                          "'");
      for (std::size_t i = 0; i < r.data.size(); ++i)
        dst[i] = static_cast<S>(r.data[i]);
    } else {
      throw FormatError("checkpoint has unknown tensor group '" + r.group + "'");
    }
  }
  if (model_records != out.model.params().size())
    throw FormatError("checkpoint covers " + std::to_string(model_records) +
                      " parameters, model has " +
                      std::to_string(out.model.params().size()));
  return out;
}

template <typename S>
void save_checkpoint(const std::string& path, ModelAssembly<S>& m,
                     const Adadelta<S>& opt, const Rng& rng, int epoch) {
  write_checkpoint_file(path, to_checkpoint(m, opt, rng, epoch));
}

template <typename S>
LoadedModel<S> load_checkpoint(const std::string& path) {
  return from_checkpoint<S>(read_checkpoint_file(path));
}

// Copies parameters under the given name prefixes from a checkpoint into a
// freshly built model (lower levels of the hierarchy). Every prefix must
// match something on both sides.
template <typename S>
std::size_t init_params_from(ModelAssembly<S>& target, const CheckpointData& c,
                             std::span<const std::string> prefixes) {
  std::size_t copied = 0;
  for (const std::string& prefix : prefixes) {
    std::size_t matched = 0;
    for (const TensorRecord& r : c.tensors) {
      if (r.group != "model" || r.name.rfind(prefix, 0) != 0) continue;
      ++matched;
      Parameter<S>* p = target.find(r.name);
      if (!p)
        throw DimensionError("init: checkpoint parameter '" + r.name +
                             "' has no counterpart in the target model");
      if (p->value.shape != r.shape)
        throw DimensionError(
            "init: shape mismatch for '" + r.name + "': checkpoint " +
            Tensor<S>(std::vector<std::size_t>(r.shape)).shape_str() +
            " vs model " + p->value.shape_str() +
            " (were both built from the same size preset?)");
      for (std::size_t i = 0; i < r.data.size(); ++i)
        p->value[i] = static_cast<S>(r.data[i]);
      ++copied;
    }
    if (matched == 0)
      throw DimensionError(
          "init: checkpoint has no parameters under '" + prefix +
          "'; it was saved from phase '" +
          c.config.value("phase", std::string("?")) +
          "', which does not provide this level of the hierarchy");
  }
  return copied;
}

}  // namespace hcrn
