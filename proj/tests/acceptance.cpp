// Acceptance suite: one numbered criterion per run block, one PASS/FAIL line
// each, non-zero exit if anything fails. Budgeted for a few minutes on one
// core; the heavier convergence runs print their timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hcrn/checkpoint.hpp"
#include "hcrn/grad_check.hpp"
#include "hcrn/metrics.hpp"
#include "hcrn/synth.hpp"
#include "hcrn/trainer.hpp"

using namespace hcrn;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

HcrnConfig desk_config(std::size_t cc, std::size_t cw, std::size_t cs) {
  HcrnConfig c;
  c.cc = {cc};
  c.cw = {cw};
  if (cs) c.cs = {cs};
  c.char_embed_dim = 8;
  c.mlp_hidden = 32;
  c.num_classes = 6;
  return c;
}

// probe parameters away from relu kinks and saturation for FD checks
template <typename S>
void randomize(ModelAssembly<S>& m, Rng& rng, double half_width = 0.5) {
  for (Parameter<S>* p : m.params())
    p->value = init_uniform<S>(p->value.shape, rng, -half_width, half_width);
}

std::vector<WordCount> random_inventory(std::size_t n, std::size_t max_len,
                                        std::uint64_t seed) {
  Rng rng(seed, "inventory");
  std::vector<WordCount> inv;
  std::set<std::string> seen;
  while (inv.size() < n) {
    const std::size_t len = 1 + rng.below(max_len);
    std::string w;
    for (std::size_t i = 0; i < len; ++i)
      w += static_cast<char>('a' + rng.below(6));
    if (seen.insert(w).second)
      inv.push_back({w, CharVocab::encode_word(w), 1});
  }
  return inv;
}

double train_accuracy(ModelAssembly<double>& m, const Corpus& c,
                      bool ablate = false) {
  return 100.0 - evaluate(m, c, ablate).error_pct();
}

// independent reference implementations for criterion 2
std::size_t slow_distance(const std::string& a, const std::string& b,
                          std::size_t i, std::size_t j,
                          std::map<std::pair<std::size_t, std::size_t>,
                                   std::size_t>& memo) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const auto key = std::make_pair(i, j);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::size_t best = slow_distance(a, b, i + 1, j, memo) + 1;
  best = std::min(best, slow_distance(a, b, i, j + 1, memo) + 1);
  best = std::min(best, slow_distance(a, b, i + 1, j + 1, memo) +
                            (a[i] == b[j] ? 0 : 1));
  return memo[key] = best;
}

std::size_t slow_distance(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  return slow_distance(a, b, 0, 0, memo);
}

std::string random_word(Rng& rng, std::size_t max_len, bool allow_empty) {
  std::string s;
  const std::size_t n = (allow_empty ? 0 : 1) + rng.below(max_len);
  for (std::size_t i = 0; i < n; ++i)
    s += static_cast<char>('a' + rng.below(4));
  return s;
}

// ---------------------------------------------------------------------------

std::string criterion_gradients() {
  double worst = 0;
  Rng rng(101, "acc-grad");

  // (a) elementwise ops, concat, matvec, softmax_nll
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(5);
    Parameter<double> a("a", init_uniform<double>({n}, rng, -1, 1));
    Parameter<double> b("b", init_uniform<double>({n}, rng, -1, 1));
    Parameter<double> r("r", init_uniform<double>({1, n}, rng, -1, 1));
    Parameter<double> r2("r2", init_uniform<double>({1, 2 * n}, rng, -1, 1));
    Parameter<double> w("w", init_uniform<double>({n, n}, rng, -1, 1));
    for (auto& v : a.value.v)
      if (std::abs(v) < 0.05) v += v < 0 ? -0.1 : 0.1;  // keep off relu kink
    std::vector<Parameter<double>*> ps = {&a, &b, &r, &r2, &w};
    for (int which = 0; which < 10; ++which) {
      const auto build = [&](Tape<double>& t) -> Var {
        const Var va = t.param(a), vb = t.param(b);
        switch (which) {
          case 0: return t.matvec(t.param(r), t.sigmoid(va));
          case 1: return t.matvec(t.param(r), t.tanh(va));
          case 2: return t.matvec(t.param(r), t.relu(va));
          case 3: return t.matvec(t.param(r), t.add(va, vb));
          case 4: return t.matvec(t.param(r), t.sub(va, vb));
          case 5: return t.matvec(t.param(r), t.mul(va, vb));
          case 6: return t.matvec(t.param(r), t.one_minus(va));
          case 7: return t.matvec(t.param(r2), t.concat(va, vb));
          case 8: return t.matvec(t.param(r), t.matvec(t.param(w), va));
          default: return t.softmax_nll(t.matvec(t.param(w), va), n - 1);
        }
      };
      worst = std::max(worst, grad_check<double>(build, ps, 1e-5));
    }
  }

  // (b) one recurrence step
  {
    GruCell<double> cell("g", 3, 4);
    for (Parameter<double>* p : cell.params())
      for (auto& v : p->value.v) v = rng.real(-0.7, 0.7);
    Parameter<double> h0("h0", init_uniform<double>({4}, rng, -0.9, 0.9));
    Parameter<double> x("x", init_uniform<double>({3}, rng, -1, 1));
    Parameter<double> r("r", init_uniform<double>({1, 4}, rng, -1, 1));
    std::vector<Parameter<double>*> ps = cell.params();
    ps.push_back(&h0);
    ps.push_back(&x);
    ps.push_back(&r);
    worst = std::max(
        worst, grad_check<double>(
                   [&](Tape<double>& t) {
                     return t.matvec(t.param(r),
                                     cell.step(t, t.param(h0), t.param(x)));
                   },
                   ps, 1e-5));
  }

  // (c) full sentence-hierarchy loss on a 2-word toy sentence
  {
    HcrnConfig cfg = desk_config(4, 5, 0);
    cfg.char_embed_dim = 3;
    cfg.mlp_hidden = 8;
    auto m = ModelAssembly<double>::build(cfg, Phase::sentence,
                                          EncoderKind::hierarchical, rng);
    randomize(m, rng);
    Sentence s;
    s.words = tokenize("abba fed");
    s.label = 3;
    std::vector<Parameter<double>*> ps(m.params().begin(), m.params().end());
    worst = std::max(
        worst,
        grad_check<double>(
            [&](Tape<double>& t) { return sentence_class_loss(m, t, s); }, ps,
            1e-5));
  }

  // (d) discourse loss across a 3-sentence toy dialogue
  {
    HcrnConfig cfg = desk_config(4, 5, 6);
    cfg.char_embed_dim = 3;
    cfg.mlp_hidden = 8;
    auto m = ModelAssembly<double>::build(cfg, Phase::discourse,
                                          EncoderKind::hierarchical, rng);
    randomize(m, rng);
    Dialogue d;
    d.id = "toy";
    const char* texts[] = {"ed abba", "fed", "cafe ed"};
    const char* agents[] = {"A", "B", "B"};
    for (int i = 0; i < 3; ++i) {
      Sentence s;
      s.words = tokenize(texts[i]);
      s.agent = agents[i];
      s.label = i;
      d.sentences.push_back(s);
    }
    std::vector<Parameter<double>*> ps(m.params().begin(), m.params().end());
    worst = std::max(
        worst, grad_check<double>(
                   [&](Tape<double>& t) {
                     const auto logits = dialogue_logits(m, t, d, false);
                     Var loss = t.softmax_nll(logits[0], 0);
                     for (int i = 1; i < 3; ++i)
                       loss = t.add(loss, t.softmax_nll(
                                              logits[i],
                                              static_cast<std::size_t>(i)));
                     return loss;
                   },
                   ps, 1e-5));
  }

  require(worst < 1e-3, "max relative error " + fmt("%.3e", worst));
  return "max relative error " + fmt("%.3e", worst) +
         " across ops, gru step, sentence and discourse losses";
}

std::string criterion_metric_oracles() {
  Rng rng(202, "acc-metrics");
  // cper against the recursive reference
  for (int i = 0; i < 1000; ++i) {
    const std::string ref = random_word(rng, 8, false);
    const std::string hyp = random_word(rng, 8, true);
    const double expect =
        static_cast<double>(slow_distance(ref, hyp)) /
        static_cast<double>(ref.size());
    require(std::abs(cper(ref, hyp) - expect) < 1e-12, "cper mismatch");
  }
  // wrfr against direct counting
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::pair<std::string, std::string>> pairs;
    const std::size_t n = 1 + rng.below(12);
    std::size_t expect_failed = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::string ref = random_word(rng, 6, false);
      std::string hyp = ref;
      if (rng.coin()) hyp = random_word(rng, 6, true);
      if (hyp != ref) ++expect_failed;
      pairs.emplace_back(ref, hyp);
    }
    const auto rep = wrfr(pairs);
    const double expect =
        100.0 * static_cast<double>(expect_failed) / static_cast<double>(n);
    require(std::abs(rep.wrfr_pct - expect) < 1e-12, "wrfr mismatch");
  }
  // classification error against direct counting
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<int> pred(n), act(n);
    std::size_t wrong = 0;
    for (std::size_t k = 0; k < n; ++k) {
      pred[k] = static_cast<int>(rng.below(6));
      act[k] = static_cast<int>(rng.below(6));
      if (pred[k] != act[k]) ++wrong;
    }
    const auto rep = classification_error(pred, act, 6);
    const double expect =
        100.0 * static_cast<double>(wrong) / static_cast<double>(n);
    require(std::abs(rep.error_rate_pct - expect) < 1e-12,
            "classification error mismatch");
  }
  return "cper, wrfr and classification error match brute force on 1000 "
         "cases each";
}

std::string criterion_adadelta() {
  Parameter<double> p("w", Tensor<double>::vec({0.5}));
  Adadelta<double> opt;
  Parameter<double>* ps[] = {&p};
  double x = 0.5, eg2 = 0, edx2 = 0;
  double first_step = 0;
  for (int k = 0; k < 10; ++k) {
    const double g = k == 0 ? 1.0 : std::sin(static_cast<double>(k));
    p.zero_grad();
    p.grad[0] = g;
    opt.step(ps);
    eg2 = 0.9 * eg2 + 0.1 * g * g;
    const double dx = -std::sqrt(edx2 + 1e-6) / std::sqrt(eg2 + 1e-6) * g;
    edx2 = 0.9 * edx2 + 0.1 * dx * dx;
    x += dx;
    if (k == 0) first_step = dx;
    require(std::abs(p.value[0] - x) < 1e-12,
            "step " + std::to_string(k) + " drifted by " +
                fmt("%.3e", std::abs(p.value[0] - x)));
  }
  require(std::abs(first_step - (-0.0031623)) < 1e-6,
          "first step " + fmt("%.7f", first_step));
  return "10 hand-iterated steps match to 1e-12; first step " +
         fmt("%.7f", first_step);
}

std::string criterion_word_pretraining() {
  const auto inventory = random_inventory(50, 8, 123);
  HcrnConfig cfg;
  cfg.cc = {32};
  cfg.char_embed_dim = 15;
  cfg.num_classes = 2;

  // convergence run: reconstruction of the training vocabulary reaches 0%
  Rng init(3, "init");
  auto m = ModelAssembly<double>::build(cfg, Phase::word,
                                        EncoderKind::hierarchical, init);
  Adadelta<double> opt;
  Rng data(3, "data");
  TrainPhaseConfig tc;
  tc.phase = Phase::word;
  tc.max_epochs = 300;
  tc.early_stop = false;
  tc.seed = 3;
  int zero_at = -1;
  tc.epoch_hook = [&](int epoch, double) {
    if (epoch % 5 != 4 && epoch < 200) return false;
    if (wrfr(reconstruct_words(m, inventory)).wrfr_pct == 0.0) {
      zero_at = epoch;
      return true;
    }
    return false;
  };
  pretrain_word(m, inventory, tc, opt, data);
  require(zero_at >= 0 && zero_at < 300,
          "train WRFR did not reach 0% within 300 epochs");

  // plateau run: the 0.1%/3-epoch rule terminates training by itself
  Rng init2(3, "init");
  auto m2 = ModelAssembly<double>::build(cfg, Phase::word,
                                         EncoderKind::hierarchical, init2);
  Adadelta<double> opt2;
  Rng data2(3, "data");
  TrainPhaseConfig tp;
  tp.phase = Phase::word;
  tp.max_epochs = 5000;
  tp.early_stop = true;
  tp.valid_fraction = 0.05;
  tp.seed = 3;
  const TrainHistory h2 = pretrain_word(m2, inventory, tp, opt2, data2);
  require(h2.stopped_early && h2.stop_reason == "plateau",
          "stopping rule did not fire (ran " +
              std::to_string(h2.epochs.size()) + " epochs)");
  return "train WRFR 0% at epoch " + std::to_string(zero_at) +
         "; plateau rule fired after " + std::to_string(h2.epochs.size()) +
         " epochs";
}

std::string criterion_sentence_separability() {
  SynthResult r = synth_dialogues({SynthVariant::context_free, 20, 10, 5});
  require(r.corpus.num_sentences() == 200, "fixture size");
  Rng init(2, "init");
  auto m = ModelAssembly<double>::build(desk_config(16, 16, 0),
                                        Phase::sentence,
                                        EncoderKind::hierarchical, init);
  Adadelta<double> opt;
  Rng data(2, "data");
  TrainPhaseConfig tc;
  tc.phase = Phase::sentence;
  tc.batch_size = 8;
  tc.max_epochs = 200;
  tc.early_stop = false;
  int done = -1;
  tc.epoch_hook = [&](int epoch, double) {
    if (epoch % 5 != 4) return false;
    if (train_accuracy(m, r.corpus) == 100.0) {
      done = epoch;
      return true;
    }
    return false;
  };
  train_sentence(m, r.corpus, nullptr, nullptr, tc, opt, data);
  require(done >= 0, "did not reach 100% train accuracy within 200 epochs");
  return "100% train accuracy at epoch " + std::to_string(done);
}

std::string criterion_discourse_context() {
  SynthResult r = synth_dialogues({SynthVariant::context_bound, 40, 12, 6});
  require(r.sentence_bayes_ceiling == 0.75, "designed ceiling is 75%");

  Rng init_s(2, "init");
  auto ms = ModelAssembly<double>::build(desk_config(16, 16, 0),
                                         Phase::sentence,
                                         EncoderKind::hierarchical, init_s);
  Adadelta<double> opt_s;
  Rng data_s(2, "data");
  TrainPhaseConfig ts;
  ts.phase = Phase::sentence;
  ts.batch_size = 8;
  ts.max_epochs = 100;
  ts.early_stop = false;
  train_sentence(ms, r.corpus, nullptr, nullptr, ts, opt_s, data_s);
  const double sent_acc = train_accuracy(ms, r.corpus);
  require(sent_acc <= 80.0,
          "sentence-hierarchy accuracy " + fmt("%.2f", sent_acc) +
              "% exceeded the 80% bound");
  require(sent_acc >= 70.0,
          "sentence-hierarchy accuracy " + fmt("%.2f", sent_acc) +
              "% never reached the ceiling region");

  Rng init_d(2, "init-d");
  auto md = ModelAssembly<double>::build(desk_config(16, 16, 24),
                                         Phase::discourse,
                                         EncoderKind::hierarchical, init_d);
  Adadelta<double> opt_d;
  Rng data_d(2, "data-d");
  TrainPhaseConfig td;
  td.phase = Phase::discourse;
  td.max_epochs = 400;
  td.early_stop = false;
  double disc_acc = 0;
  td.epoch_hook = [&](int epoch, double) {
    if (epoch % 10 != 9) return false;
    disc_acc = train_accuracy(md, r.corpus);
    return disc_acc > 95.0;
  };
  train_discourse(md, r.corpus, nullptr, nullptr, td, opt_d, data_d);
  require(disc_acc > 95.0, "discourse-hierarchy accuracy stalled at " +
                               fmt("%.2f", disc_acc) + "%");
  const double rel =
      relative_improvement(100.0 - sent_acc, 100.0 - disc_acc);
  return "sentence " + fmt("%.2f", sent_acc) + "% vs discourse " +
         fmt("%.2f", disc_acc) + "% train accuracy; relative error " +
         "improvement " + fmt("%.1f", rel) + "%";
}

std::string criterion_speaker_change() {
  SynthResult r = synth_dialogues({SynthVariant::speaker_gated, 80, 12, 7});
  double acc[2];
  for (const bool ablate : {true, false}) {
    Rng init(3, "init");
    auto m = ModelAssembly<double>::build(desk_config(16, 16, 24),
                                          Phase::discourse,
                                          EncoderKind::hierarchical, init);
    Adadelta<double> opt;
    Rng data(3, "data");
    TrainPhaseConfig tc;
    tc.phase = Phase::discourse;
    tc.max_epochs = ablate ? 100 : 150;
    tc.early_stop = false;
    tc.ablate_speaker = ablate;
    train_discourse(m, r.corpus, nullptr, nullptr, tc, opt, data);
    acc[ablate ? 0 : 1] = train_accuracy(m, r.corpus, ablate);
  }
  require(acc[0] <= 80.0, "ablated accuracy " + fmt("%.2f", acc[0]) +
                              "% stayed above the 75% ceiling region");
  require(acc[1] >= 95.0, "full model accuracy only " + fmt("%.2f", acc[1]) +
                              "%; speaker input not exploited");
  return "speaker input ablated: " + fmt("%.2f", acc[0]) +
         "% (ceiling 75%); with speaker input: " + fmt("%.2f", acc[1]) + "%";
}

std::string criterion_compare_init() {
  SynthResult r = synth_dialogues({SynthVariant::context_bound, 30, 12, 8});
  CompareInitConfig cfg;
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.model = desk_config(16, 16, 24);
  cfg.sentence_epochs = 40;
  cfg.discourse_epochs = 60;
  cfg.sentence_batch = 8;
  cfg.discourse_batch = 8;
  const auto res = compare_init<double>(r.corpus, nullptr, cfg);

  // both arms share one epoch grid per seed
  std::map<std::pair<std::uint64_t, std::string>, std::vector<int>> grids;
  for (const auto& p : res.points) grids[{p.seed, p.arm}].push_back(p.epoch);
  for (std::uint64_t seed : cfg.seeds)
    require(grids[{seed, "pretrained"}] == grids[{seed, "end-to-end"}],
            "epoch grids differ between arms");

  const auto csv = std::filesystem::path("acceptance_compare_init.csv");
  write_compare_csv(csv.string(), res);
  require(std::filesystem::exists(csv), "curve csv missing");

  require(res.mean_final_pretrained <= res.mean_final_end_to_end,
          "pretrained arm ended higher: " +
              fmt("%.4f", res.mean_final_pretrained) + " vs " +
              fmt("%.4f", res.mean_final_end_to_end));
  return "mean final train loss " + fmt("%.4f", res.mean_final_pretrained) +
         " (hierarchy-wise) vs " + fmt("%.4f", res.mean_final_end_to_end) +
         " (end-to-end); curves in " + csv.string();
}

std::string criterion_flat_baseline() {
  SynthResult r = synth_dialogues({SynthVariant::long_flat, 12, 10, 9});
  for (const auto& d : r.corpus.dialogues)
    for (const auto& s : d.sentences)
      require(s.char_count() + s.words.size() - 1 >= 40,
              "fixture sentences not long enough");
  double hier = 0, flat = 0;
  for (const std::uint64_t seed : {0, 1, 2}) {
    for (const EncoderKind kind :
         {EncoderKind::hierarchical, EncoderKind::flat_chars}) {
      Rng init(seed, "init");
      auto m = ModelAssembly<double>::build(desk_config(16, 16, 0),
                                            Phase::sentence, kind, init);
      Adadelta<double> opt;
      Rng data(seed, "data");
      TrainPhaseConfig tc;
      tc.phase = Phase::sentence;
      tc.batch_size = 8;
      tc.max_epochs = 300;
      tc.early_stop = false;
      const auto h = train_sentence(m, r.corpus, nullptr, nullptr, tc, opt, data);
      (kind == EncoderKind::hierarchical ? hier : flat) +=
          h.epochs.back().train_loss / 3.0;
    }
  }
  require(hier < flat, "hierarchical mean " + fmt("%.4f", hier) +
                           " not below flat mean " + fmt("%.4f", flat));
  return "300-epoch budget: hierarchical mean train loss " +
         fmt("%.4f", hier) + " vs flat stacked baseline " + fmt("%.4f", flat);
}

std::string criterion_persistence() {
  SynthResult r = synth_dialogues({SynthVariant::context_bound, 6, 6, 80});
  const auto dir = std::filesystem::temp_directory_path() / "hcrn_acceptance";
  std::filesystem::create_directories(dir);

  const auto make = [&](const char* stream) {
    Rng init(21, stream);
    return ModelAssembly<double>::build(desk_config(8, 8, 10),
                                        Phase::discourse,
                                        EncoderKind::hierarchical, init);
  };
  TrainPhaseConfig tc;
  tc.phase = Phase::discourse;
  tc.batch_size = 2;
  tc.max_epochs = 3;
  tc.early_stop = false;

  auto ma = make("init");
  Adadelta<double> opt_a;
  Rng data_a(21, "data");
  train_discourse(ma, r.corpus, nullptr, nullptr, tc, opt_a, data_a);

  auto mb = make("init");
  Adadelta<double> opt_b;
  Rng data_b(21, "data");
  TrainPhaseConfig one = tc;
  one.max_epochs = 1;
  train_discourse(mb, r.corpus, nullptr, nullptr, one, opt_b, data_b);
  const auto ck = (dir / "resume.hcrn").string();
  save_checkpoint(ck, mb, opt_b, data_b, 1);

  // byte-identical round trip
  auto loaded = load_checkpoint<double>(ck);
  const auto ck2 = (dir / "resume2.hcrn").string();
  save_checkpoint(ck2, loaded.model, loaded.opt, loaded.rng, loaded.epoch);
  std::ifstream f1(ck, std::ios::binary), f2(ck2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)),
                       std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)),
                       std::istreambuf_iterator<char>());
  require(!b1.empty() && b1 == b2, "checkpoint round trip not byte-identical");

  // resume and compare bit for bit
  TrainPhaseConfig rest = tc;
  rest.start_epoch = loaded.epoch;
  train_discourse(loaded.model, r.corpus, nullptr, nullptr, rest, loaded.opt,
                  loaded.rng);
  auto pa = ma.params();
  auto pb = loaded.model.params();
  require(pa.size() == pb.size(), "parameter registries differ");
  for (std::size_t i = 0; i < pa.size(); ++i)
    require(pa[i]->value.v == pb[i]->value.v,
            "resumed value drifted for " + pa[i]->name);
  return "checkpoint bytes stable; 1+2 resumed epochs match 3 uninterrupted "
         "epochs bit for bit";
}

std::string criterion_full_corpus() {
  const char* dir = std::getenv("HCRN_SWBD_DIR");
  if (!dir)
    return std::string("SKIPPED (set HCRN_SWBD_DIR to a directory with "
                       "swbd.jsonl and swbd.tags to enable)");
  const std::string base(dir);
  const TagSet tags = TagSet::load(base + "/swbd.tags");
  const Corpus corpus = load_corpus(base + "/swbd.jsonl", tags);
  const CorpusStats st = corpus_stats(corpus);
  const double expect[4] = {8.19, 8.28, 161.26, 37.92};
  const double got[4] = {st.cpw_mean, st.wps_mean, st.spd_mean, st.cps_mean};
  for (int i = 0; i < 4; ++i)
    require(std::abs(got[i] - expect[i]) <= 0.5,
            "stat " + std::to_string(i) + " = " + fmt("%.2f", got[i]) +
                " differs from " + fmt("%.2f", expect[i]) + " by more than 0.5");

  // three-phase smoke on a slice to show the pipeline runs end to end
  Corpus slice;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, corpus.dialogues.size());
       ++i)
    slice.dialogues.push_back(corpus.dialogues[i]);
  HcrnConfig cfg = desk_config(16, 16, 24);
  cfg.num_classes = tags.size();
  Rng init(1, "full-init");
  auto mw = ModelAssembly<double>::build(cfg, Phase::word,
                                         EncoderKind::hierarchical, init);
  Adadelta<double> ow;
  Rng dw(1, "full-word");
  TrainPhaseConfig tw;
  tw.phase = Phase::word;
  tw.max_epochs = 1;
  tw.early_stop = false;
  const auto inv = word_inventory(slice);
  pretrain_word(mw, inv, tw, ow, dw);

  auto msent = ModelAssembly<double>::build(cfg, Phase::sentence,
                                            EncoderKind::hierarchical, init);
  const std::vector<std::string> cc = {"cc."};
  copy_params_by_prefix(msent, mw, std::span<const std::string>(cc));
  Adadelta<double> os;
  Rng ds(1, "full-sent");
  TrainPhaseConfig tsent;
  tsent.phase = Phase::sentence;
  tsent.max_epochs = 1;
  tsent.freeze_epochs = 1;
  tsent.early_stop = false;
  train_sentence(msent, slice, nullptr, nullptr, tsent, os, ds);

  auto mdisc = ModelAssembly<double>::build(cfg, Phase::discourse,
                                            EncoderKind::hierarchical, init);
  const std::vector<std::string> ccw = {"cc.", "cw."};
  copy_params_by_prefix(mdisc, msent, std::span<const std::string>(ccw));
  Adadelta<double> od;
  Rng dd(1, "full-disc");
  TrainPhaseConfig tdisc;
  tdisc.phase = Phase::discourse;
  tdisc.max_epochs = 1;
  tdisc.freeze_epochs = 1;
  tdisc.early_stop = false;
  train_discourse(mdisc, slice, nullptr, nullptr, tdisc, od, dd);

  return "stats " + fmt("%.2f", got[0]) + "/" + fmt("%.2f", got[1]) + "/" +
         fmt("%.2f", got[2]) + "/" + fmt("%.2f", got[3]) +
         " within 0.5 of 8.19/8.28/161.26/37.92; three-phase pipeline ran "
         "(reference test errors 26.27%/22.73% are documentation, not "
         "assertions)";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient integrity", criterion_gradients},
      {2, "metric oracles", criterion_metric_oracles},
      {3, "adadelta oracle", criterion_adadelta},
      {4, "word pre-training convergence", criterion_word_pretraining},
      {5, "sentence-phase separability", criterion_sentence_separability},
      {6, "discourse-context win", criterion_discourse_context},
      {7, "speaker-change effect", criterion_speaker_change},
      {8, "hierarchy-wise vs end-to-end", criterion_compare_init},
      {9, "flat-baseline gap", criterion_flat_baseline},
      {10, "determinism and persistence", criterion_persistence},
      {11, "full-corpus path (conditional)", criterion_full_corpus},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] %2d. %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                c.name, detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
