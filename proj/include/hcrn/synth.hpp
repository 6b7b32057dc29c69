#pragma once

#include <cstdint>
#include <string>

#include "hcrn/corpus.hpp"

namespace hcrn {

// Desk-scale dialogue generators over a 6-letter alphabet. Each sentence
// carries one of a few surface forms; the label rules differ per variant:
//
//   context_free   label is a function of the surface form alone
//   context_bound  for half the forms the label also depends on a context
//                  bit c = (speaker changed) XOR (previous label's parity),
//                  so a per-sentence classifier is capped at 75% accuracy
//                  while the dialogue history determines the label exactly
//   speaker_gated  like context_bound but c is the speaker-change bit itself;
//                  removing the speaker input removes the signal entirely
//   long_flat      many-word sentences (>= 40 chars as a flat character
//                  sequence); the first word alone determines the label
enum class SynthVariant { context_free, context_bound, speaker_gated, long_flat };

struct SynthSpec {
  SynthVariant variant = SynthVariant::context_free;
  std::size_t dialogues = 20;
  std::size_t sentences_per_dialogue = 10;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Corpus corpus;
  TagSet tags;
  // Best per-sentence accuracy achievable without dialogue context, exact
  // from the generator's label tables.
  double sentence_bayes_ceiling = 1.0;
};

SynthResult synth_dialogues(const SynthSpec& spec);

SynthVariant synth_variant_from_name(const std::string& name);
std::string synth_variant_name(SynthVariant v);

// Empirical counterpart of the ceiling: groups sentences by exact text and
// scores the majority label of each group.
double empirical_sentence_ceiling(const Corpus& c);

}  // namespace hcrn
