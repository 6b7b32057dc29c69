#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hcrn/corpus.hpp"
#include "hcrn/layers.hpp"
#include "hcrn/vocab.hpp"

namespace hcrn {

enum class Phase { word, sentence, discourse };
enum class EncoderKind { hierarchical, word_table, flat_chars };

Phase phase_from_name(const std::string& s);
std::string phase_name(Phase p);
EncoderKind encoder_from_name(const std::string& s);
std::string encoder_name(EncoderKind k);

// Hidden sizes per level plus the shared classifier/embedding settings.
struct HcrnConfig {
  std::vector<std::size_t> cc;  // character-level layers
  std::vector<std::size_t> cw;  // word-level layers
  std::vector<std::size_t> cs;  // sentence-level layers
  std::size_t char_embed_dim = 15;
  std::size_t mlp_hidden = 128;
  std::size_t num_classes = 42;
  std::size_t wemb_dim = 64;      // word-table baseline row width
  std::size_t wemb_cutoff = 5;    // words rarer than this collapse to <unk>

  static HcrnConfig small_preset() {
    HcrnConfig c;
    c.cc = {64};
    c.cw = {128, 128};
    c.cs = {256, 256};
    return c;
  }
  static HcrnConfig large_preset() {
    HcrnConfig c;
    c.cc = {128, 128};
    c.cw = {256, 256, 256};
    c.cs = {512, 512, 512};
    return c;
  }
  static HcrnConfig preset(const std::string& name);

  nlohmann::json to_json() const;
  static HcrnConfig from_json(const nlohmann::json& j);
};

// Speaker identity change input: (1,0) while the speaker holds the floor
// (including the first sentence of a dialogue), (0,1) on a change.
template <typename S>
Tensor<S> speaker_change_vec(const std::string& agent,
                             const std::string* prev_agent) {
  Tensor<S> x({2});
  const bool changed = prev_agent != nullptr && *prev_agent != agent;
  x[changed ? 1 : 0] = S(1);
  return x;
}

// Frequency-cutoff word embedding baseline; row 0 is <unk>.
template <typename S>
struct NonCompEmbedding {
  std::vector<std::string> words;  // row i+1 holds words[i]... see row_of
  std::unordered_map<std::string, std::size_t> index;
  Parameter<S> table;

  bool present() const { return table.value.numel() > 0; }

  static NonCompEmbedding build(std::span<const WordCount> inventory,
                                std::size_t cutoff, std::size_t dim, Rng& rng) {
    NonCompEmbedding e;
    std::vector<const WordCount*> kept;
    for (const auto& wc : inventory)
      if (wc.count >= cutoff) kept.push_back(&wc);
    std::sort(kept.begin(), kept.end(), [](const auto* a, const auto* b) {
      if (a->count != b->count) return a->count > b->count;
      return a->text < b->text;
    });
    e.words.reserve(kept.size() + 1);
    e.words.push_back("<unk>");
    for (const auto* wc : kept) e.words.push_back(wc->text);
    for (std::size_t i = 0; i < e.words.size(); ++i) e.index[e.words[i]] = i;
    e.table = Parameter<S>("wemb.table",
                           init_uniform<S>({e.words.size(), dim}, rng));
    return e;
  }

  static NonCompEmbedding from_words(std::vector<std::string> words,
                                     std::size_t dim) {
    NonCompEmbedding e;
    e.words = std::move(words);
    for (std::size_t i = 0; i < e.words.size(); ++i) e.index[e.words[i]] = i;
    e.table = Parameter<S>("wemb.table",
                           Tensor<S>::zeros({e.words.size(), dim}));
    return e;
  }

  std::size_t row_of(const std::string& w) const {
    auto it = index.find(w);
    return it == index.end() ? 0 : it->second;
  }

  Var lookup(Tape<S>& t, const std::string& w) {
    return t.lookup(table, row_of(w));
  }
};

// The assembled model for one training phase. Parameter groups carry stable
// name prefixes (cc., cw., cs., dec., mlp., wemb.) used for freezing and for
// checkpoint manifests.
template <typename S>
class ModelAssembly {
 public:
  HcrnConfig config;
  Phase phase = Phase::sentence;
  EncoderKind encoder = EncoderKind::hierarchical;

  EmbeddingTable<S> char_table;  // "cc.embed"; shared with the decoder
  GruStack<S> cc;
  GruStack<S> cw;
  GruStack<S> cs;
  GruStack<S> dec;
  Parameter<S> dec_out_w, dec_out_b;
  std::vector<Parameter<S>> dec_init_w;  // per-layer projections, only when
                                         // decoder widths differ from e^(W)
  NonCompEmbedding<S> wemb;
  MlpClassifier<S> mlp;

  // Unique training words, recorded for neighbor/reconstruction probes.
  std::vector<std::string> train_words;

  static ModelAssembly build(const HcrnConfig& cfg, Phase phase,
                             EncoderKind encoder, Rng& rng,
                             std::span<const WordCount> inventory = {}) {
    ModelAssembly m;
    m.config = cfg;
    m.phase = phase;
    m.encoder = encoder;
    if (phase != Phase::sentence && encoder != EncoderKind::hierarchical)
      throw ConfigError("baseline encoders apply to the sentence phase only");
    if (cfg.cc.empty() || (phase != Phase::word && cfg.cw.empty() &&
                           encoder == EncoderKind::hierarchical))
      throw ConfigError("model config: missing level sizes");

    const bool needs_chars = encoder != EncoderKind::word_table;
    if (needs_chars) {
      m.char_table = EmbeddingTable<S>("cc.embed", CharVocab::kTotalSymbols,
                                       cfg.char_embed_dim);
      m.char_table.init(rng);
    }

    if (encoder == EncoderKind::flat_chars) {
      // One stacked recurrence over characters with word-boundary blanks;
      // layer sizes mirror the hierarchical counterpart's cc ++ cw.
      std::vector<std::size_t> dims = cfg.cc;
      dims.insert(dims.end(), cfg.cw.begin(), cfg.cw.end());
      m.cc = GruStack<S>("cc", cfg.char_embed_dim, dims);
      m.cc.init(rng);
    } else if (needs_chars) {
      m.cc = GruStack<S>("cc", cfg.char_embed_dim, cfg.cc);
      m.cc.init(rng);
    }

    if (phase == Phase::word) {
      m.dec = GruStack<S>("dec", cfg.char_embed_dim, cfg.cc);
      m.dec.init(rng);
      m.dec_out_w = Parameter<S>(
          "dec.out.W",
          init_uniform<S>({CharVocab::kTotalSymbols, m.dec.top_dim()}, rng));
      m.dec_out_b = Parameter<S>(
          "dec.out.b", Tensor<S>::zeros({CharVocab::kTotalSymbols}));
      const std::size_t ew = m.cc.top_dim();
      for (std::size_t l = 0; l < m.dec.layers.size(); ++l)
        if (m.dec.layers[l].hidden_dim != ew)
          m.dec_init_w.emplace_back(
              "dec.init" + std::to_string(l) + ".W",
              init_uniform<S>({m.dec.layers[l].hidden_dim, ew}, rng));
    } else {
      if (encoder == EncoderKind::hierarchical) {
        m.cw = GruStack<S>("cw", m.cc.top_dim(), cfg.cw);
        m.cw.init(rng);
      } else if (encoder == EncoderKind::word_table) {
        m.wemb = NonCompEmbedding<S>::build(inventory, cfg.wemb_cutoff,
                                            cfg.wemb_dim, rng);
        m.cw = GruStack<S>("cw", cfg.wemb_dim, cfg.cw);
        m.cw.init(rng);
      }
      std::size_t rep_dim = encoder == EncoderKind::flat_chars
                                ? m.cc.top_dim()
                                : m.cw.top_dim();
      if (phase == Phase::discourse) {
        m.cs = GruStack<S>("cs", rep_dim + 2, cfg.cs);
        m.cs.init(rng);
        rep_dim = m.cs.top_dim();
      }
      m.mlp = MlpClassifier<S>("mlp", rep_dim, cfg.mlp_hidden, cfg.num_classes);
      m.mlp.init(rng);
    }
    m.rebuild_registry();
    return m;
  }

  // The registry is rebuilt on access: it holds pointers into this object's
  // members, which would dangle after a move otherwise. Callers that loop
  // should snapshot the result while the assembly stays put.
  std::span<Parameter<S>* const> params() {
    rebuild_registry();
    return registry_;
  }

  Parameter<S>* find(const std::string& name) {
    for (Parameter<S>* p : params())
      if (p->name == name) return p;
    return nullptr;
  }

  bool has_decoder() const { return dec.present(); }

  // --- word level -----------------------------------------------------------

  // Runs the character encoder over one word from zero states; the word
  // vector is the top state at the final character.
  Var compose_word(Tape<S>& t, std::span<const std::uint16_t> char_ids) {
    if (char_ids.empty()) throw InputError("compose_word: empty word");
    std::vector<Var> states = cc.zero_states(t);
    for (std::uint16_t id : char_ids)
      states = cc.step(t, states, char_table.lookup(t, id));
    return states.back();
  }

  // --- sentence level --------------------------------------------------------

  Var compose_sentence(Tape<S>& t, std::span<const Var> word_vecs) {
    if (word_vecs.empty()) throw InputError("compose_sentence: empty sentence");
    std::vector<Var> states = cw.zero_states(t);
    for (Var wv : word_vecs) states = cw.step(t, states, wv);
    return states.back();
  }

  Var encode_sentence(Tape<S>& t, const Sentence& s) {
    if (s.words.empty()) throw InputError("encode_sentence: empty sentence");
    switch (encoder) {
      case EncoderKind::hierarchical: {
        std::vector<Var> wvs;
        for (const WordToken& w : s.words)
          wvs.push_back(compose_word(t, w.char_ids));
        return compose_sentence(t, wvs);
      }
      case EncoderKind::word_table: {
        std::vector<Var> wvs;
        for (const WordToken& w : s.words) wvs.push_back(wemb.lookup(t, w.text));
        return compose_sentence(t, wvs);
      }
      case EncoderKind::flat_chars: {
        std::vector<Var> states = cc.zero_states(t);
        for (std::size_t wi = 0; wi < s.words.size(); ++wi) {
          if (wi > 0)
            states = cc.step(t, states,
                             char_table.lookup(t, CharVocab::kBlank));
          for (std::uint16_t id : s.words[wi].char_ids)
            states = cc.step(t, states, char_table.lookup(t, id));
        }
        return states.back();
      }
    }
    throw StateError("encode_sentence: bad encoder kind");
  }

  // --- discourse level -------------------------------------------------------

  std::vector<Var> dialogue_start(Tape<S>& t) const { return cs.zero_states(t); }

  std::vector<Var> dialogue_step(Tape<S>& t, const std::vector<Var>& states,
                                 Var sentence_vec, Var speaker_vec) {
    if (!cs.present())
      throw ConfigError("dialogue_step: model has no sentence-sequence level");
    if (t.value(sentence_vec).numel() + 2 != cs.input_dim())
      throw DimensionError("dialogue_step: sentence vector width " +
                           t.value(sentence_vec).shape_str() +
                           " does not match level input");
    return cs.step(t, states, t.concat(sentence_vec, speaker_vec));
  }

  // --- classifier ------------------------------------------------------------

  Var classify_logits(Tape<S>& t, Var rep) {
    if (!mlp.present()) throw ConfigError("classify: model has no classifier");
    return mlp.logits(t, rep);
  }

  Var classify_probs(Tape<S>& t, Var rep) {
    if (!mlp.present()) throw ConfigError("classify: model has no classifier");
    return mlp.probs(t, rep);
  }

  // --- reconstruction decoder --------------------------------------------------

  // Teacher-forced reconstruction loss; `target` must end with the
  // end-of-word symbol. The decoder starts from the word vector (projected
  // per layer when widths differ) and consumes gold previous characters.
  Var decode_teacher_forced(Tape<S>& t, Var word_vec,
                            std::span<const std::uint16_t> target) {
    if (!has_decoder())
      throw ConfigError("decode: model was not built with a decoder");
    if (target.empty() || target.back() != CharVocab::kEow)
      throw InputError("decode: target must end with the end-of-word symbol");
    std::vector<Var> states = decoder_init(t, word_vec);
    std::uint16_t prev = CharVocab::kSow;
    Var loss = 0;
    bool first = true;
    for (std::uint16_t target_id : target) {
      states = dec.step(t, states, char_table.lookup(t, prev));
      const Var logits = t.add(t.matvec(t.param(dec_out_w), states.back()),
                               t.param(dec_out_b));
      const Var nll = t.softmax_nll(logits, target_id);
      loss = first ? nll : t.add(loss, nll);
      first = false;
      prev = target_id;
    }
    return loss;
  }

  // Greedy generation from a word vector; stops at end-of-word or max_len.
  // Ties resolve to the lowest symbol id.
  std::vector<std::uint16_t> decode_greedy(Tape<S>& t, Var word_vec,
                                           std::size_t max_len) {
    if (!has_decoder())
      throw ConfigError("decode: model was not built with a decoder");
    std::vector<Var> states = decoder_init(t, word_vec);
    std::vector<std::uint16_t> out;
    std::uint16_t prev = CharVocab::kSow;
    for (std::size_t step = 0; step < max_len; ++step) {
      states = dec.step(t, states, char_table.lookup(t, prev));
      const Var logits = t.add(t.matvec(t.param(dec_out_w), states.back()),
                               t.param(dec_out_b));
      const Tensor<S>& l = t.value(logits);
      std::size_t best = 0;
      for (std::size_t i = 1; i < l.numel(); ++i)
        if (l[i] > l[best]) best = i;
      if (best == CharVocab::kEow) break;
      out.push_back(static_cast<std::uint16_t>(best));
      prev = static_cast<std::uint16_t>(best);
    }
    return out;
  }

  void rebuild_registry() {
    registry_.clear();
    if (char_table.present()) registry_.push_back(&char_table.weights);
    for (Parameter<S>* p : cc.params()) registry_.push_back(p);
    for (Parameter<S>* p : cw.params()) registry_.push_back(p);
    for (Parameter<S>* p : cs.params()) registry_.push_back(p);
    for (Parameter<S>* p : dec.params()) registry_.push_back(p);
    for (auto& p : dec_init_w) registry_.push_back(&p);
    if (dec.present()) {
      registry_.push_back(&dec_out_w);
      registry_.push_back(&dec_out_b);
    }
    if (wemb.present()) registry_.push_back(&wemb.table);
    if (mlp.present())
      for (Parameter<S>* p : mlp.params()) registry_.push_back(p);
  }

 private:
  std::vector<Var> decoder_init(Tape<S>& t, Var word_vec) {
    std::vector<Var> states;
    std::size_t proj = 0;
    for (auto& layer : dec.layers) {
      if (layer.hidden_dim == t.value(word_vec).numel())
        states.push_back(word_vec);
      else
        states.push_back(t.matvec(t.param(dec_init_w[proj++]), word_vec));
    }
    return states;
  }

  std::vector<Parameter<S>*> registry_;
};

}  // namespace hcrn
