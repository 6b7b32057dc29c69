#include "hcrn/synth.hpp"

#include <array>
#include <map>

namespace hcrn {

namespace {

// Surface forms drawn from the letters a..f only.
const std::array<std::string, 6> kForms = {"abba", "beef", "cafe",
                                           "dada", "fed",  "bead"};
const std::string kLead = "ed";

Sentence make_sentence(const std::string& text, const std::string& speaker,
                       int label) {
  Sentence s;
  s.raw_text = text;
  s.agent = speaker;
  s.label = label;
  s.words = tokenize(text);
  return s;
}

}  // namespace

SynthVariant synth_variant_from_name(const std::string& name) {
  if (name == "context-free") return SynthVariant::context_free;
  if (name == "context-bound") return SynthVariant::context_bound;
  if (name == "speaker-gated") return SynthVariant::speaker_gated;
  if (name == "long-flat") return SynthVariant::long_flat;
  throw ConfigError("unknown synthetic variant '" + name + "'");
}

std::string synth_variant_name(SynthVariant v) {
  switch (v) {
    case SynthVariant::context_free: return "context-free";
    case SynthVariant::context_bound: return "context-bound";
    case SynthVariant::speaker_gated: return "speaker-gated";
    case SynthVariant::long_flat: return "long-flat";
  }
  return "?";
}

SynthResult synth_dialogues(const SynthSpec& spec) {
  Rng rng(spec.seed, "synth");
  SynthResult out;
  out.tags = TagSet::from_names({"c0", "c1", "c2", "c3", "c4", "c5"});

  const bool contextual = spec.variant == SynthVariant::context_bound ||
                          spec.variant == SynthVariant::speaker_gated;
  out.sentence_bayes_ceiling = contextual ? 0.75 : 1.0;

  for (std::size_t di = 0; di < spec.dialogues; ++di) {
    Dialogue d;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "d%04zu", di);
    d.id = buf;

    std::string prev_speaker;
    int prev_parity = 0;
    for (std::size_t si = 0; si < spec.sentences_per_dialogue; ++si) {
      const std::string speaker = rng.coin() ? "A" : "B";
      const bool changed = si > 0 && speaker != prev_speaker;

      std::string text;
      int label = 0;
      switch (spec.variant) {
        case SynthVariant::context_free: {
          const std::size_t u = rng.below(6);
          text = kLead + " " + kForms[u];
          label = static_cast<int>(u);
          break;
        }
        case SynthVariant::context_bound:
        case SynthVariant::speaker_gated: {
          // Forms 0..1 are ambiguous per-sentence; 2..3 are not.
          const std::size_t u = rng.below(4);
          const int c = spec.variant == SynthVariant::speaker_gated
                            ? (changed ? 1 : 0)
                            : ((changed ? 1 : 0) ^ prev_parity);
          label = u < 2 ? static_cast<int>(2 * u) + c
                        : static_cast<int>(u) + 2;
          text = kLead + " " + kForms[u];
          break;
        }
        case SynthVariant::long_flat: {
          const std::size_t u = rng.below(6);
          label = static_cast<int>(u);
          text = kForms[u];
          for (int k = 0; k < 10; ++k) text += " " + kForms[rng.below(6)];
          break;
        }
      }
      prev_parity = label & 1;
      prev_speaker = speaker;
      d.sentences.push_back(make_sentence(text, speaker, label));
    }
    out.corpus.dialogues.push_back(std::move(d));
  }
  return out;
}

double empirical_sentence_ceiling(const Corpus& c) {
  std::map<std::string, std::map<int, std::size_t>> by_text;
  std::size_t total = 0;
  for (const Dialogue& d : c.dialogues)
    for (const Sentence& s : d.sentences) {
      ++by_text[s.raw_text][s.label];
      ++total;
    }
  if (total == 0) throw InputError("empirical_sentence_ceiling: empty corpus");
  std::size_t best = 0;
  for (const auto& [text, hist] : by_text) {
    std::size_t top = 0;
    for (const auto& [label, n] : hist) top = std::max(top, n);
    best += top;
  }
  return static_cast<double>(best) / static_cast<double>(total);
}

}  // namespace hcrn
