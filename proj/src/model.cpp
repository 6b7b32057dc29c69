#include "hcrn/model.hpp"

namespace hcrn {

using nlohmann::json;

Phase phase_from_name(const std::string& s) {
  if (s == "word") return Phase::word;
  if (s == "sentence") return Phase::sentence;
  if (s == "discourse") return Phase::discourse;
  throw ConfigError("unknown phase '" + s + "'");
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::word: return "word";
    case Phase::sentence: return "sentence";
    case Phase::discourse: return "discourse";
  }
  return "?";
}

EncoderKind encoder_from_name(const std::string& s) {
  if (s == "hierarchical") return EncoderKind::hierarchical;
  if (s == "word-table") return EncoderKind::word_table;
  if (s == "flat-chars") return EncoderKind::flat_chars;
  throw ConfigError("unknown encoder kind '" + s + "'");
}

std::string encoder_name(EncoderKind k) {
  switch (k) {
    case EncoderKind::hierarchical: return "hierarchical";
    case EncoderKind::word_table: return "word-table";
    case EncoderKind::flat_chars: return "flat-chars";
  }
  return "?";
}

HcrnConfig HcrnConfig::preset(const std::string& name) {
  if (name == "small") return small_preset();
  if (name == "large") return large_preset();
  throw ConfigError("unknown preset '" + name + "' (expected small or large)");
}

json HcrnConfig::to_json() const {
  return json{{"cc", cc},
              {"cw", cw},
              {"cs", cs},
              {"char_embed_dim", char_embed_dim},
              {"mlp_hidden", mlp_hidden},
              {"num_classes", num_classes},
              {"wemb_dim", wemb_dim},
              {"wemb_cutoff", wemb_cutoff}};
}

HcrnConfig HcrnConfig::from_json(const json& j) {
  HcrnConfig c;
  c.cc = j.at("cc").get<std::vector<std::size_t>>();
  c.cw = j.at("cw").get<std::vector<std::size_t>>();
  c.cs = j.at("cs").get<std::vector<std::size_t>>();
  c.char_embed_dim = j.at("char_embed_dim").get<std::size_t>();
  c.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.wemb_dim = j.value("wemb_dim", std::size_t{64});
  c.wemb_cutoff = j.value("wemb_cutoff", std::size_t{5});
  return c;
}

}  // namespace hcrn
