#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <thread>

#include "hcrn/checkpoint.hpp"
#include "hcrn/corpus.hpp"
#include "hcrn/metrics.hpp"
#include "hcrn/model.hpp"
#include "hcrn/optim.hpp"

namespace hcrn {

// Validation-plateau rule: stop once the loss has failed to improve on the
// best seen value by at least `min_rel_improve` (relative) for `patience`
// consecutive observations.
class PlateauStopper {
 public:
  PlateauStopper(double min_rel_improve = 0.001, int patience = 3)
      : min_rel_(min_rel_improve), patience_(patience) {}

  bool observe(double loss) {
    if (!has_best_) {
      has_best_ = true;
      best_ = loss;
      return false;
    }
    const double rel = (best_ - loss) / std::max(std::abs(best_), 1e-300);
    if (rel >= min_rel_) {
      best_ = loss;
      bad_ = 0;
    } else {
      ++bad_;
    }
    return bad_ >= patience_;
  }

  double best() const { return best_; }
  int bad_epochs() const { return bad_; }

 private:
  double min_rel_;
  int patience_;
  double best_ = 0;
  bool has_best_ = false;
  int bad_ = 0;
};

struct StoppingRule {
  double min_rel_improve = 0.001;
  int patience = 3;
};

inline std::size_t default_batch(Phase p) {
  switch (p) {
    case Phase::word: return 10;
    case Phase::sentence: return 64;
    case Phase::discourse: return 8;
  }
  return 1;
}

inline int default_freeze_epochs(Phase p) {
  switch (p) {
    case Phase::word: return 0;
    case Phase::sentence: return 1;
    case Phase::discourse: return 5;
  }
  return 0;
}

struct TrainPhaseConfig {
  Phase phase = Phase::sentence;
  std::size_t batch_size = 0;  // 0 picks the phase default (10/64/8)
  int freeze_epochs = 0;       // epochs with the pre-trained levels frozen
  int max_epochs = 10;
  int start_epoch = 0;         // nonzero when resuming
  bool early_stop = true;
  StoppingRule stop;
  double clip_threshold = 5.0;
  double valid_fraction = 0.05;  // word phase: held-out inventory slice
  bool ablate_speaker = false;   // discourse: replace x_s by zeros
  std::uint64_t seed = 0;
  // Optional per-epoch callback (epoch, train_loss); returning true stops.
  std::function<bool(int, double)> epoch_hook;

  std::size_t batch() const {
    return batch_size ? batch_size : default_batch(phase);
  }
};

struct EpochStats {
  int epoch = 0;
  double train_loss = std::numeric_limits<double>::quiet_NaN();
  double valid_loss = std::numeric_limits<double>::quiet_NaN();
  double test_error = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHistory {
  Phase phase = Phase::sentence;
  std::vector<EpochStats> epochs;
  bool stopped_early = false;
  std::string stop_reason = "max-epochs";
  int best_epoch = -1;
};

void write_history_csv(const std::string& path, const TrainHistory& h);

inline std::size_t eval_threads() {
  const char* env = std::getenv("HCRN_THREADS");
  if (!env) return 1;
  const long n = std::strtol(env, nullptr, 10);
  return n < 1 ? 1 : static_cast<std::size_t>(n);
}

inline std::vector<std::string> freeze_prefixes(Phase p) {
  switch (p) {
    case Phase::sentence: return {"cc."};
    case Phase::discourse: return {"cc.", "cw."};
    default: return {};
  }
}

// ---------------------------------------------------------------------------
// Forward helpers shared by training and evaluation

template <typename S>
Var sentence_class_loss(ModelAssembly<S>& m, Tape<S>& t, const Sentence& s) {
  if (s.label < 0 || static_cast<std::size_t>(s.label) >= m.config.num_classes)
    throw DataError("sentence label " + std::to_string(s.label) +
                    " outside the tag set");
  const Var rep = m.encode_sentence(t, s);
  return t.softmax_nll(m.classify_logits(t, rep),
                       static_cast<std::size_t>(s.label));
}

// Runs the sentence-sequence level across a dialogue and returns per-sentence
// classifier logits; state carries across the whole dialogue.
template <typename S>
std::vector<Var> dialogue_logits(ModelAssembly<S>& m, Tape<S>& t,
                                 const Dialogue& d, bool ablate_speaker) {
  std::vector<Var> states = m.dialogue_start(t);
  const std::string* prev_agent = nullptr;
  std::vector<Var> logits;
  for (const Sentence& s : d.sentences) {
    const Var e = m.encode_sentence(t, s);
    Tensor<S> x = ablate_speaker ? Tensor<S>::zeros({2})
                                 : speaker_change_vec<S>(s.agent, prev_agent);
    states = m.dialogue_step(t, states, e, t.leaf(std::move(x)));
    logits.push_back(m.classify_logits(t, states.back()));
    prev_agent = &s.agent;
  }
  return logits;
}

struct EvalOutcome {
  std::vector<int> predicted;
  std::vector<int> actual;
  double mean_nll = 0;

  double error_pct() const {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
      if (predicted[i] != actual[i]) ++wrong;
    return predicted.empty()
               ? 0
               : 100.0 * static_cast<double>(wrong) /
                     static_cast<double>(predicted.size());
  }
};

// Forward-only pass over a corpus; dialogues are sharded across workers and
// merged back in corpus order, so the thread count never changes the result.
template <typename S>
EvalOutcome evaluate(ModelAssembly<S>& m, const Corpus& corpus,
                     bool ablate_speaker = false, std::size_t threads = 0) {
  if (threads == 0) threads = eval_threads();
  const std::size_t nd = corpus.dialogues.size();
  std::vector<std::vector<int>> preds(nd), actuals(nd);
  std::vector<double> nll(nd, 0.0);

  const auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t di = lo; di < hi; ++di) {
      const Dialogue& d = corpus.dialogues[di];
      if (m.phase == Phase::discourse) {
        Tape<S> t;
        const std::vector<Var> logits = dialogue_logits(m, t, d, ablate_speaker);
        for (std::size_t si = 0; si < d.sentences.size(); ++si) {
          const Tensor<S>& l = t.value(logits[si]);
          std::size_t best = 0;
          for (std::size_t i = 1; i < l.numel(); ++i)
            if (l[i] > l[best]) best = i;
          preds[di].push_back(static_cast<int>(best));
          actuals[di].push_back(d.sentences[si].label);
          nll[di] += t.scalar(t.softmax_nll(
              logits[si], static_cast<std::size_t>(d.sentences[si].label)));
        }
      } else {
        for (const Sentence& s : d.sentences) {
          Tape<S> t;
          const Var rep = m.encode_sentence(t, s);
          const Var logits = m.classify_logits(t, rep);
          const Tensor<S>& l = t.value(logits);
          std::size_t best = 0;
          for (std::size_t i = 1; i < l.numel(); ++i)
            if (l[i] > l[best]) best = i;
          preds[di].push_back(static_cast<int>(best));
          actuals[di].push_back(s.label);
          nll[di] += t.scalar(
              t.softmax_nll(logits, static_cast<std::size_t>(s.label)));
        }
      }
    }
  };

  if (threads <= 1 || nd <= 1) {
    run_range(0, nd);
  } else {
    threads = std::min(threads, nd);
    std::vector<std::thread> pool;
    const std::size_t chunk = (nd + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t lo = w * chunk, hi = std::min(nd, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  EvalOutcome out;
  double total_nll = 0;
  for (std::size_t di = 0; di < nd; ++di) {
    out.predicted.insert(out.predicted.end(), preds[di].begin(), preds[di].end());
    out.actual.insert(out.actual.end(), actuals[di].begin(), actuals[di].end());
    total_nll += nll[di];
  }
  out.mean_nll = out.predicted.empty()
                     ? 0
                     : total_nll / static_cast<double>(out.predicted.size());
  return out;
}

// ---------------------------------------------------------------------------
// Word-hierarchy learning (unsupervised spelling autoencoder)

template <typename S>
double word_recon_loss(ModelAssembly<S>& m, const WordCount& w) {
  Tape<S> t;
  const Var wv = m.compose_word(t, w.char_ids);
  std::vector<std::uint16_t> target = w.char_ids;
  target.push_back(CharVocab::kEow);
  return t.scalar(m.decode_teacher_forced(t, wv, target));
}

template <typename S>
std::string greedy_spelling(ModelAssembly<S>& m, const WordCount& w,
                            std::size_t extra = 8) {
  Tape<S> t;
  const Var wv = m.compose_word(t, w.char_ids);
  const auto ids = m.decode_greedy(t, wv, w.char_ids.size() + extra);
  return CharVocab::decode(ids);
}

template <typename S>
std::vector<std::pair<std::string, std::string>> reconstruct_words(
    ModelAssembly<S>& m, std::span<const WordCount> words,
    std::size_t extra = 8) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(words.size());
  for (const WordCount& w : words)
    pairs.emplace_back(CharVocab::decode(w.char_ids),
                       greedy_spelling(m, w, extra));
  return pairs;
}

template <typename S>
TrainHistory pretrain_word(ModelAssembly<S>& m,
                           std::span<const WordCount> inventory,
                           const TrainPhaseConfig& cfg, Adadelta<S>& opt,
                           Rng& rng) {
  if (inventory.empty()) throw InputError("pretrain_word: empty inventory");
  if (!m.has_decoder())
    throw ConfigError("pretrain_word: model was built without a decoder");

  // Held-out spelling slice for the stopping rule; derived from the run seed
  // so a resumed run sees the same split.
  std::vector<std::size_t> order(inventory.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng(cfg.seed, "word-valid-split");
  split_rng.shuffle(order);
  const std::size_t n_valid =
      cfg.early_stop
          ? static_cast<std::size_t>(
                std::round(cfg.valid_fraction *
                           static_cast<double>(inventory.size())))
          : 0;
  std::vector<std::size_t> valid_ix(order.begin(), order.begin() + n_valid);
  std::vector<std::size_t> train_ix(order.begin() + n_valid, order.end());
  if (train_ix.empty())
    throw InputError("pretrain_word: validation slice consumed every word");

  TrainHistory hist;
  hist.phase = Phase::word;
  PlateauStopper stopper(cfg.stop.min_rel_improve, cfg.stop.patience);
  const std::vector<Parameter<S>*> params_vec(m.params().begin(),
                                              m.params().end());
  const std::span<Parameter<S>* const> params(params_vec);

  for (int epoch = cfg.start_epoch; epoch < cfg.max_epochs; ++epoch) {
    const auto batches = make_batches(train_ix.size(), cfg.batch(), rng);
    double total = 0;
    for (const auto& batch : batches) {
      for (Parameter<S>* p : params) p->zero_grad();
      for (std::size_t bi : batch) {
        const WordCount& w = inventory[train_ix[bi]];
        Tape<S> t;
        const Var wv = m.compose_word(t, w.char_ids);
        std::vector<std::uint16_t> target = w.char_ids;
        target.push_back(CharVocab::kEow);
        const Var loss = m.decode_teacher_forced(t, wv, target);
        t.backward(loss);
        total += t.scalar(loss);
      }
      const S inv = static_cast<S>(1.0 / static_cast<double>(batch.size()));
      for (Parameter<S>* p : params)
        for (S& g : p->grad.v) g *= inv;
      clip_global_norm(params, cfg.clip_threshold);
      opt.step(params);
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = total / static_cast<double>(train_ix.size());
    if (!valid_ix.empty()) {
      double v = 0;
      for (std::size_t vi : valid_ix) v += word_recon_loss(m, inventory[vi]);
      st.valid_loss = v / static_cast<double>(valid_ix.size());
    }
    hist.epochs.push_back(st);

    if (cfg.epoch_hook && cfg.epoch_hook(epoch, st.train_loss)) {
      hist.stopped_early = true;
      hist.stop_reason = "hook";
      break;
    }
    if (cfg.early_stop && !valid_ix.empty() && stopper.observe(st.valid_loss)) {
      hist.stopped_early = true;
      hist.stop_reason = "plateau";
      break;
    }
  }
  return hist;
}

// ---------------------------------------------------------------------------
// Supervised phases

namespace detail {

template <typename S>
void scale_grads(std::span<Parameter<S>* const> params, double inv) {
  for (Parameter<S>* p : params)
    for (S& g : p->grad.v) g = static_cast<S>(static_cast<double>(g) * inv);
}

template <typename S>
std::vector<Tensor<S>> snapshot_values(std::span<Parameter<S>* const> params) {
  std::vector<Tensor<S>> vs;
  vs.reserve(params.size());
  for (Parameter<S>* p : params) vs.push_back(p->value);
  return vs;
}

template <typename S>
void restore_values(std::span<Parameter<S>* const> params,
                    const std::vector<Tensor<S>>& vs) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = vs[i];
}

inline void check_labels(const Corpus& c, std::size_t num_classes) {
  for (const Dialogue& d : c.dialogues)
    for (const Sentence& s : d.sentences)
      if (s.label < 0 || static_cast<std::size_t>(s.label) >= num_classes)
        throw DataError("label " + std::to_string(s.label) +
                        " outside the tag set in dialogue " + d.id);
}

}  // namespace detail

// Per-sentence classification training on e^(S). With a pre-trained character
// level, keep it frozen for the first epoch(s) via cfg.freeze_epochs.
template <typename S>
TrainHistory train_sentence(ModelAssembly<S>& m, const Corpus& train,
                            const Corpus* valid, const Corpus* test,
                            const TrainPhaseConfig& cfg, Adadelta<S>& opt,
                            Rng& rng) {
  if (m.phase != Phase::sentence)
    throw ConfigError("train_sentence: model was assembled for another phase");
  detail::check_labels(train, m.config.num_classes);
  std::vector<const Sentence*> sentences;
  for (const Dialogue& d : train.dialogues)
    for (const Sentence& s : d.sentences) sentences.push_back(&s);
  if (sentences.empty()) throw InputError("train_sentence: empty corpus");

  const std::vector<Parameter<S>*> params_vec(m.params().begin(),
                                              m.params().end());
  const std::span<Parameter<S>* const> params(params_vec);
  const auto groups = freeze_prefixes(Phase::sentence);
  TrainHistory hist;
  hist.phase = Phase::sentence;
  PlateauStopper stopper(cfg.stop.min_rel_improve, cfg.stop.patience);
  std::vector<Tensor<S>> best;
  double best_valid = std::numeric_limits<double>::infinity();
  const bool use_valid =
      cfg.early_stop && valid != nullptr && !valid->dialogues.empty();

  for (int epoch = cfg.start_epoch; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.freeze_epochs > 0)
      set_frozen(params, std::span<const std::string>(groups),
                 epoch < cfg.freeze_epochs);
    const auto batches = make_batches(sentences.size(), cfg.batch(), rng);
    double total = 0;
    for (const auto& batch : batches) {
      for (Parameter<S>* p : params) p->zero_grad();
      for (std::size_t bi : batch) {
        Tape<S> t;
        const Var loss = sentence_class_loss(m, t, *sentences[bi]);
        t.backward(loss);
        total += t.scalar(loss);
      }
      detail::scale_grads(params, 1.0 / static_cast<double>(batch.size()));
      clip_global_norm(params, cfg.clip_threshold);
      opt.step(params);
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = total / static_cast<double>(sentences.size());
    if (valid != nullptr && !valid->dialogues.empty())
      st.valid_loss = evaluate(m, *valid).mean_nll;
    if (test != nullptr && !test->dialogues.empty())
      st.test_error = evaluate(m, *test).error_pct();
    hist.epochs.push_back(st);

    if (cfg.epoch_hook && cfg.epoch_hook(epoch, st.train_loss)) {
      hist.stopped_early = true;
      hist.stop_reason = "hook";
      break;
    }
    if (use_valid) {
      if (st.valid_loss < best_valid) {
        best_valid = st.valid_loss;
        hist.best_epoch = epoch;
        best = detail::snapshot_values(params);
      }
      if (stopper.observe(st.valid_loss)) {
        hist.stopped_early = true;
        hist.stop_reason = "plateau";
        break;
      }
    }
  }
  if (use_valid && !best.empty()) detail::restore_values(params, best);
  return hist;
}

// Dialogue-level training on h^(S): the sentence-sequence state runs across
// the whole dialogue and every sentence contributes a classification loss.
template <typename S>
TrainHistory train_discourse(ModelAssembly<S>& m, const Corpus& train,
                             const Corpus* valid, const Corpus* test,
                             const TrainPhaseConfig& cfg, Adadelta<S>& opt,
                             Rng& rng) {
  if (m.phase != Phase::discourse)
    throw ConfigError("train_discourse: model was assembled for another phase");
  detail::check_labels(train, m.config.num_classes);
  std::vector<const Dialogue*> dialogues;
  std::size_t n_sentences = 0;
  for (const Dialogue& d : train.dialogues) {
    if (d.sentences.empty()) {
      std::cerr << "warning: empty dialogue '" << d.id << "' skipped\n";
      continue;
    }
    dialogues.push_back(&d);
    n_sentences += d.sentences.size();
  }
  if (dialogues.empty()) throw InputError("train_discourse: empty corpus");

  const std::vector<Parameter<S>*> params_vec(m.params().begin(),
                                              m.params().end());
  const std::span<Parameter<S>* const> params(params_vec);
  const auto groups = freeze_prefixes(Phase::discourse);
  TrainHistory hist;
  hist.phase = Phase::discourse;
  PlateauStopper stopper(cfg.stop.min_rel_improve, cfg.stop.patience);
  std::vector<Tensor<S>> best;
  double best_valid = std::numeric_limits<double>::infinity();
  const bool use_valid =
      cfg.early_stop && valid != nullptr && !valid->dialogues.empty();

  for (int epoch = cfg.start_epoch; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.freeze_epochs > 0)
      set_frozen(params, std::span<const std::string>(groups),
                 epoch < cfg.freeze_epochs);
    const auto batches = make_batches(dialogues.size(), cfg.batch(), rng);
    double total = 0;
    for (const auto& batch : batches) {
      for (Parameter<S>* p : params) p->zero_grad();
      for (std::size_t bi : batch) {
        const Dialogue& d = *dialogues[bi];
        Tape<S> t;
        const std::vector<Var> logits =
            dialogue_logits(m, t, d, cfg.ablate_speaker);
        Var loss = 0;
        for (std::size_t si = 0; si < d.sentences.size(); ++si) {
          const Var nll = t.softmax_nll(
              logits[si], static_cast<std::size_t>(d.sentences[si].label));
          loss = si == 0 ? nll : t.add(loss, nll);
        }
        t.backward(loss);
        total += t.scalar(loss);
      }
      detail::scale_grads(params, 1.0 / static_cast<double>(batch.size()));
      clip_global_norm(params, cfg.clip_threshold);
      opt.step(params);
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = total / static_cast<double>(n_sentences);
    if (valid != nullptr && !valid->dialogues.empty())
      st.valid_loss = evaluate(m, *valid, cfg.ablate_speaker).mean_nll;
    if (test != nullptr && !test->dialogues.empty())
      st.test_error = evaluate(m, *test, cfg.ablate_speaker).error_pct();
    hist.epochs.push_back(st);

    if (cfg.epoch_hook && cfg.epoch_hook(epoch, st.train_loss)) {
      hist.stopped_early = true;
      hist.stop_reason = "hook";
      break;
    }
    if (use_valid) {
      if (st.valid_loss < best_valid) {
        best_valid = st.valid_loss;
        hist.best_epoch = epoch;
        best = detail::snapshot_values(params);
      }
      if (stopper.observe(st.valid_loss)) {
        hist.stopped_early = true;
        hist.stop_reason = "plateau";
        break;
      }
    }
  }
  if (use_valid && !best.empty()) detail::restore_values(params, best);
  return hist;
}

// Copies matching parameter values (e.g. "cc.", "cw.") between assemblies.
template <typename S>
std::size_t copy_params_by_prefix(ModelAssembly<S>& dst, ModelAssembly<S>& src,
                                  std::span<const std::string> prefixes) {
  std::size_t copied = 0;
  for (Parameter<S>* sp : src.params()) {
    for (const std::string& prefix : prefixes) {
      if (sp->name.rfind(prefix, 0) != 0) continue;
      Parameter<S>* dp = dst.find(sp->name);
      if (!dp)
        throw DimensionError("copy: '" + sp->name +
                             "' missing from target model");
      if (!dp->value.same_shape(sp->value))
        throw DimensionError("copy: shape mismatch for '" + sp->name + "'");
      dp->value = sp->value;
      ++copied;
      break;
    }
  }
  return copied;
}

// ---------------------------------------------------------------------------
// Hierarchy-wise vs end-to-end initialization comparison

struct CompareInitConfig {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  HcrnConfig model;
  int sentence_epochs = 10;
  int discourse_epochs = 20;
  std::size_t sentence_batch = 64;
  std::size_t discourse_batch = 8;
  int freeze_epochs = 5;
  double clip_threshold = 5.0;
};

struct CompareCurvePoint {
  std::uint64_t seed = 0;
  std::string arm;  // "pretrained" | "end-to-end"
  int epoch = 0;
  double train_loss = 0;
  double test_loss = std::numeric_limits<double>::quiet_NaN();
};

struct CompareInitResult {
  std::vector<std::uint64_t> seeds;
  std::vector<CompareCurvePoint> points;
  double mean_final_pretrained = 0;
  double mean_final_end_to_end = 0;
};

template <typename S>
CompareInitResult compare_init(const Corpus& train, const Corpus* test,
                               const CompareInitConfig& cfg) {
  CompareInitResult out;
  out.seeds = cfg.seeds;
  double sum_pre = 0, sum_e2e = 0;

  for (std::uint64_t seed : cfg.seeds) {
    const auto run_arm = [&](const std::string& arm, ModelAssembly<S>& model,
                             int freeze_epochs) {
      Adadelta<S> opt;
      // Both arms draw the shuffle sequence from the same stream, so they
      // see identical data order.
      Rng data_rng(seed, "compare-data");
      TrainPhaseConfig tc;
      tc.phase = Phase::discourse;
      tc.batch_size = cfg.discourse_batch;
      tc.max_epochs = cfg.discourse_epochs;
      tc.freeze_epochs = freeze_epochs;
      tc.early_stop = false;
      tc.clip_threshold = cfg.clip_threshold;
      tc.seed = seed;
      const TrainHistory h =
          train_discourse(model, train, test, nullptr, tc, opt, data_rng);
      for (const EpochStats& st : h.epochs)
        out.points.push_back(
            CompareCurvePoint{seed, arm, st.epoch, st.train_loss, st.valid_loss});
      return h.epochs.back().train_loss;
    };

    // Arm 1: lower levels initialized from sentence-hierarchy training.
    {
      Rng init_s(seed, "init-sentence");
      ModelAssembly<S> ms = ModelAssembly<S>::build(
          cfg.model, Phase::sentence, EncoderKind::hierarchical, init_s);
      Adadelta<S> opt_s;
      Rng rng_s(seed, "sentence-data");
      TrainPhaseConfig sc;
      sc.phase = Phase::sentence;
      sc.batch_size = cfg.sentence_batch;
      sc.max_epochs = cfg.sentence_epochs;
      sc.early_stop = false;
      sc.clip_threshold = cfg.clip_threshold;
      sc.seed = seed;
      train_sentence(ms, train, nullptr, nullptr, sc, opt_s, rng_s);

      Rng init_d(seed, "init-discourse");
      ModelAssembly<S> md = ModelAssembly<S>::build(
          cfg.model, Phase::discourse, EncoderKind::hierarchical, init_d);
      const std::vector<std::string> prefixes = {"cc.", "cw."};
      copy_params_by_prefix(md, ms, std::span<const std::string>(prefixes));
      sum_pre += run_arm("pretrained", md, cfg.freeze_epochs);
    }

    // Arm 2: everything random, trained end-to-end.
    {
      Rng init_e(seed, "init-e2e");
      ModelAssembly<S> me = ModelAssembly<S>::build(
          cfg.model, Phase::discourse, EncoderKind::hierarchical, init_e);
      sum_e2e += run_arm("end-to-end", me, 0);
    }
  }
  out.mean_final_pretrained = sum_pre / static_cast<double>(cfg.seeds.size());
  out.mean_final_end_to_end = sum_e2e / static_cast<double>(cfg.seeds.size());
  return out;
}

void write_compare_csv(const std::string& path, const CompareInitResult& r);

}  // namespace hcrn
