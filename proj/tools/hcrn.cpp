// hcrn: preprocessing, hierarchy-wise training, evaluation and probing from
// the command line. Exit codes: 0 success, 1 runtime/data error, 2 usage.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hcrn/checkpoint.hpp"
#include "hcrn/metrics.hpp"
#include "hcrn/synth.hpp"
#include "hcrn/trainer.hpp"

using namespace hcrn;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// run manifests

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void write_manifest(const std::string& primary_output,
                    const std::string& command, const json& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["config"] = config;
  json ins = json::object();
  for (const auto& p : inputs) ins[p] = digest_file(p);
  m["inputs"] = ins;
  m["outputs"] = outputs;
  const std::string path = primary_output + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw InputError("manifest: cannot write " + path);
  out << m.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// shared options

struct ModelSizeArgs {
  std::string preset = "small";
  std::vector<std::size_t> cc, cw, cs;  // override the preset when given
  std::size_t embed_dim = 0;
  std::size_t mlp_hidden = 0;
  std::size_t wemb_dim = 0;
  std::size_t wemb_cutoff = 0;

  HcrnConfig resolve(std::size_t num_classes) const {
    HcrnConfig c = HcrnConfig::preset(preset);
    if (!cc.empty()) c.cc = cc;
    if (!cw.empty()) c.cw = cw;
    if (!cs.empty()) c.cs = cs;
    if (embed_dim) c.char_embed_dim = embed_dim;
    if (mlp_hidden) c.mlp_hidden = mlp_hidden;
    if (wemb_dim) c.wemb_dim = wemb_dim;
    if (wemb_cutoff) c.wemb_cutoff = wemb_cutoff;
    c.num_classes = num_classes;
    return c;
  }

  json echo() const {
    return json{{"preset", preset},   {"cc", cc},
                {"cw", cw},           {"cs", cs},
                {"embed_dim", embed_dim}, {"mlp_hidden", mlp_hidden},
                {"wemb_dim", wemb_dim},   {"wemb_cutoff", wemb_cutoff}};
  }
};

void add_size_options(CLI::App* cmd, ModelSizeArgs& a) {
  cmd->add_option("--preset", a.preset, "model size preset (small|large)")
      ->check(CLI::IsMember({"small", "large"}));
  cmd->add_option("--cc", a.cc, "character-level hidden sizes per layer");
  cmd->add_option("--cw", a.cw, "word-level hidden sizes per layer");
  cmd->add_option("--cs", a.cs, "sentence-level hidden sizes per layer");
  cmd->add_option("--embed-dim", a.embed_dim, "character embedding width");
  cmd->add_option("--mlp-hidden", a.mlp_hidden, "classifier hidden width");
  cmd->add_option("--wemb-dim", a.wemb_dim, "word-table baseline row width");
  cmd->add_option("--wemb-cutoff", a.wemb_cutoff,
                  "word-table frequency cutoff");
}

struct SplitArgs {
  std::string dir;
  std::string only;  // eval: restrict to this split
};

Corpus restrict_to_ids(const Corpus& c, const std::vector<std::string>& ids) {
  std::set<std::string> keep(ids.begin(), ids.end());
  Corpus out;
  for (const Dialogue& d : c.dialogues)
    if (keep.count(d.id)) out.dialogues.push_back(d);
  return out;
}

struct LoadedData {
  TagSet tags;
  Corpus train, valid, test;
};

LoadedData load_data(const std::string& corpus_path,
                     const std::string& tagset_path, const SplitArgs& splits) {
  LoadedData d;
  d.tags = TagSet::load(tagset_path);
  Corpus all = load_corpus(corpus_path, d.tags);
  if (splits.dir.empty()) {
    d.train = std::move(all);
    return d;
  }
  const auto ids = [&](const char* name) -> std::vector<std::string> {
    const std::string p = splits.dir + "/" + name + ".ids";
    if (!std::filesystem::exists(p)) return {};
    return load_id_list(p);
  };
  SplitResult s = split(all, ids("train"), ids("valid"), ids("test"));
  d.train = std::move(s.train);
  d.valid = std::move(s.valid);
  d.test = std::move(s.test);
  return d;
}

std::vector<std::string> collect_words(const Corpus& c) {
  std::vector<std::string> words;
  for (const auto& wc : word_inventory(c)) words.push_back(wc.text);
  return words;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string variant = "context-free";
  std::size_t dialogues = 20;
  std::size_t sentences = 10;
  std::uint64_t seed = 0;
  std::string out;
  std::string tags_out;
};

int cmd_synth(const SynthArgs& a) {
  SynthSpec spec;
  spec.variant = synth_variant_from_name(a.variant);
  spec.dialogues = a.dialogues;
  spec.sentences_per_dialogue = a.sentences;
  spec.seed = a.seed;
  const SynthResult r = synth_dialogues(spec);
  save_corpus(a.out, r.corpus, r.tags);
  const std::string tags_path =
      a.tags_out.empty() ? a.out + ".tags" : a.tags_out;
  r.tags.save(tags_path);
  std::cout << "wrote " << r.corpus.dialogues.size() << " dialogues ("
            << r.corpus.num_sentences() << " sentences) to " << a.out << "\n"
            << "tag set: " << tags_path << "\n"
            << "per-sentence bayes ceiling: " << r.sentence_bayes_ceiling
            << "\n";
  write_manifest(a.out, "synth",
                 json{{"variant", a.variant},
                      {"dialogues", a.dialogues},
                      {"sentences", a.sentences},
                      {"seed", a.seed}},
                 {}, {a.out, tags_path});
  return 0;
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string input;
  std::string output;
  std::string tagset;
};

int cmd_preprocess(const PreprocessArgs& a) {
  const TagSet tags = TagSet::load(a.tagset);
  std::ifstream in(a.input);
  if (!in) throw InputError("cannot open " + a.input);

  Corpus out;
  std::set<std::string> unknown_labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(a.input + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
    Dialogue d;
    d.id = j.at("id").get<std::string>();
    for (const auto& turn : j.at("turns")) {
      Sentence s;
      s.agent = turn.at("speaker").get<std::string>();
      const std::string label = turn.at("label").get<std::string>();
      if (auto id = tags.try_id(label)) {
        s.label = *id;
      } else {
        unknown_labels.insert(label);
        continue;
      }
      s.segment = turn.value("segment", false);
      s.raw_text = preprocess_text(turn.at("text").get<std::string>());
      s.words = tokenize(s.raw_text);
      if (s.words.empty()) continue;  // cleaned away entirely
      d.sentences.push_back(std::move(s));
    }
    if (d.sentences.empty()) continue;
    out.dialogues.push_back(merge_segments(d));
  }
  if (!unknown_labels.empty()) {
    std::cerr << "error: unknown labels in " << a.input << ":\n";
    for (const auto& l : unknown_labels) std::cerr << "  " << l << "\n";
    throw DataError("tag set does not cover the input labels");
  }

  save_corpus(a.output, out, tags);
  const CorpusStats st = out.dialogues.empty() ? CorpusStats{} : corpus_stats(out);
  std::cout << out.dialogues.size() << " dialogues, " << out.num_sentences()
            << " sentences\n"
            << format_stats(st);
  write_manifest(a.output, "preprocess", json{{"tagset", a.tagset}},
                 {a.input, a.tagset}, {a.output});
  return 0;
}

// ---------------------------------------------------------------------------
// pretrain-word

struct PretrainArgs {
  std::string corpus;
  std::string words;
  std::string tagset;
  std::string model_out;
  ModelSizeArgs size;
  std::uint64_t seed = 0;
  int epochs = 100;
  std::size_t batch = 0;
  bool no_early_stop = false;
  std::string dtype = "f64";
};

template <typename S>
int run_pretrain(const PretrainArgs& a) {
  std::vector<WordCount> inventory;
  std::vector<std::string> inputs;
  if (!a.words.empty()) {
    std::ifstream in(a.words);
    if (!in) throw InputError("cannot open " + a.words);
    std::map<std::string, std::size_t> counts;
    std::string w;
    while (in >> w) ++counts[w];
    for (const auto& [text, count] : counts)
      inventory.push_back({text, CharVocab::encode_word(text), count});
    inputs.push_back(a.words);
  } else {
    const TagSet tags = TagSet::load(a.tagset);
    const Corpus c = load_corpus(a.corpus, tags);
    inventory = word_inventory(c);
    inputs = {a.corpus, a.tagset};
  }
  std::cout << "inventory: " << inventory.size() << " unique words\n";

  HcrnConfig cfg = a.size.resolve(2);
  Rng init(a.seed, "init");
  auto m = ModelAssembly<S>::build(cfg, Phase::word, EncoderKind::hierarchical,
                                   init);
  for (const auto& wc : inventory) m.train_words.push_back(wc.text);

  Adadelta<S> opt;
  Rng data(a.seed, "word-data");
  TrainPhaseConfig tc;
  tc.phase = Phase::word;
  tc.batch_size = a.batch;
  tc.max_epochs = a.epochs;
  tc.early_stop = !a.no_early_stop;
  tc.seed = a.seed;
  tc.epoch_hook = [](int epoch, double loss) {
    std::cout << "epoch " << epoch << " train loss " << loss << "\n";
    return false;
  };
  const TrainHistory h = pretrain_word(m, inventory, tc, opt, data);
  std::cout << (h.stopped_early ? "stopped: " + h.stop_reason
                                : std::string("reached max epochs"))
            << " after " << h.epochs.size() << " epochs\n";

  save_checkpoint(a.model_out, m, opt, data,
                  static_cast<int>(h.epochs.size()));
  const std::string hist_path = a.model_out + ".history.csv";
  write_history_csv(hist_path, h);
  json cfgj = a.size.echo();
  cfgj["seed"] = a.seed;
  cfgj["epochs"] = a.epochs;
  cfgj["dtype"] = a.dtype;
  write_manifest(a.model_out, "pretrain-word", cfgj, inputs,
                 {a.model_out, hist_path});
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string phase = "sentence";
  std::string corpus;
  std::string tagset;
  SplitArgs splits;
  std::string init;
  std::string resume;
  std::string model_out;
  std::string encoder = "hierarchical";
  ModelSizeArgs size;
  std::uint64_t seed = 0;
  int epochs = 20;
  std::size_t batch = 0;
  int freeze_epochs = -1;  // -1: paper default when --init is given
  bool ablate_speaker = false;
  bool no_early_stop = false;
  std::string dtype = "f64";
};

template <typename S>
int run_train(const TrainArgs& a) {
  const Phase phase = phase_from_name(a.phase);
  if (phase == Phase::word)
    throw ConfigError("use the pretrain-word command for the word phase");
  const EncoderKind enc = encoder_from_name(a.encoder);
  LoadedData data = load_data(a.corpus, a.tagset, a.splits);
  if (data.train.dialogues.empty()) throw InputError("training split is empty");

  HcrnConfig cfg = a.size.resolve(data.tags.size());
  TrainPhaseConfig tc;
  tc.phase = phase;
  tc.batch_size = a.batch;
  tc.max_epochs = a.epochs;
  tc.early_stop = !a.no_early_stop;
  tc.ablate_speaker = a.ablate_speaker;
  tc.seed = a.seed;
  tc.epoch_hook = [](int epoch, double loss) {
    std::cout << "epoch " << epoch << " train loss " << loss << "\n";
    return false;
  };

  ModelAssembly<S> m;
  Adadelta<S> opt;
  Rng rng(a.seed, phase == Phase::sentence ? "sentence-data" : "discourse-data");
  if (!a.resume.empty()) {
    auto loaded = load_checkpoint<S>(a.resume);
    if (loaded.model.phase != phase)
      throw ConfigError("resume checkpoint is for phase '" +
                        phase_name(loaded.model.phase) + "'");
    m = std::move(loaded.model);
    opt = std::move(loaded.opt);
    rng = loaded.rng;
    tc.start_epoch = loaded.epoch;
    tc.freeze_epochs = a.freeze_epochs >= 0 ? a.freeze_epochs : 0;
  } else {
    Rng init(a.seed, "init");
    const auto inventory = word_inventory(data.train);
    m = ModelAssembly<S>::build(cfg, phase, enc, init, inventory);
    m.train_words = collect_words(data.train);
    if (!a.init.empty()) {
      const CheckpointData src = read_checkpoint_file(a.init);
      const std::vector<std::string> prefixes =
          phase == Phase::sentence ? std::vector<std::string>{"cc."}
                                   : std::vector<std::string>{"cc.", "cw."};
      const std::size_t copied =
          init_params_from(m, src, std::span<const std::string>(prefixes));
      std::cout << "initialized " << copied << " parameter tensors from "
                << a.init << "\n";
      tc.freeze_epochs = a.freeze_epochs >= 0 ? a.freeze_epochs
                                              : default_freeze_epochs(phase);
    } else {
      tc.freeze_epochs = a.freeze_epochs >= 0 ? a.freeze_epochs : 0;
    }
  }

  const Corpus* valid = data.valid.dialogues.empty() ? nullptr : &data.valid;
  const Corpus* test = data.test.dialogues.empty() ? nullptr : &data.test;
  const TrainHistory h =
      phase == Phase::sentence
          ? train_sentence(m, data.train, valid, test, tc, opt, rng)
          : train_discourse(m, data.train, valid, test, tc, opt, rng);
  std::cout << (h.stopped_early ? "stopped: " + h.stop_reason
                                : std::string("reached max epochs"))
            << "; final train loss " << h.epochs.back().train_loss << "\n";
  if (h.best_epoch >= 0)
    std::cout << "restored best validation epoch " << h.best_epoch << "\n";

  save_checkpoint(a.model_out, m, opt, rng,
                  tc.start_epoch + static_cast<int>(h.epochs.size()));
  const std::string hist_path = a.model_out + ".history.csv";
  write_history_csv(hist_path, h);
  json cfgj = a.size.echo();
  cfgj["phase"] = a.phase;
  cfgj["encoder"] = a.encoder;
  cfgj["seed"] = a.seed;
  cfgj["epochs"] = a.epochs;
  cfgj["freeze_epochs"] = tc.freeze_epochs;
  cfgj["ablate_speaker"] = a.ablate_speaker;
  cfgj["dtype"] = a.dtype;
  std::vector<std::string> inputs = {a.corpus, a.tagset};
  if (!a.init.empty()) inputs.push_back(a.init);
  if (!a.resume.empty()) inputs.push_back(a.resume);
  write_manifest(a.model_out, "train", cfgj, inputs, {a.model_out, hist_path});
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string model;
  std::string corpus;
  std::string tagset;
  SplitArgs splits;
  std::string report;
  bool ablate_speaker = false;
};

template <typename S>
int run_eval(const EvalArgs& a) {
  auto loaded = load_checkpoint<S>(a.model);
  LoadedData data = load_data(a.corpus, a.tagset, a.splits);
  const Corpus* which = &data.train;
  if (!a.splits.only.empty()) {
    if (a.splits.only == "valid") which = &data.valid;
    else if (a.splits.only == "test") which = &data.test;
    else if (a.splits.only != "train")
      throw ConfigError("--split must be train, valid or test");
  }
  if (which->dialogues.empty()) throw InputError("selected split is empty");

  const EvalOutcome out =
      evaluate(loaded.model, *which, a.ablate_speaker);
  const auto report =
      classification_error(out.predicted, out.actual, data.tags.size());
  std::cout << format_classification_report(report, data.tags.names);
  std::cout << "mean nll: " << out.mean_nll << "\n";

  if (!a.report.empty()) {
    json j;
    j["error_rate_pct"] = report.error_rate_pct;
    j["total"] = report.total;
    j["correct"] = report.correct;
    j["mean_nll"] = out.mean_nll;
    j["confusion"] = report.confusion;
    json per = json::array();
    for (std::size_t c = 0; c < report.per_class_accuracy.size(); ++c) {
      json e{{"class", data.tags.names[c]}};
      if (report.per_class_accuracy[c]) e["accuracy"] = *report.per_class_accuracy[c];
      else e["accuracy"] = nullptr;
      per.push_back(std::move(e));
    }
    j["per_class"] = per;
    std::ofstream f(a.report);
    if (!f) throw InputError("cannot write " + a.report);
    f << j.dump(2) << "\n";
    write_manifest(a.report, "eval",
                   json{{"model", a.model},
                        {"split", a.splits.only},
                        {"ablate_speaker", a.ablate_speaker}},
                   {a.model, a.corpus, a.tagset}, {a.report});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructArgs {
  std::string model;
  std::string words;
  std::string report;
};

template <typename S>
int run_reconstruct(const ReconstructArgs& a) {
  auto loaded = load_checkpoint<S>(a.model);
  if (!loaded.model.has_decoder())
    throw ConfigError("model has no decoder; reconstruct needs a word-phase "
                      "checkpoint");
  std::ifstream in(a.words);
  if (!in) throw InputError("cannot open " + a.words);
  const std::set<std::string> train_words(loaded.model.train_words.begin(),
                                          loaded.model.train_words.end());
  std::vector<std::pair<std::string, std::string>> in_vocab, oov;
  std::string w;
  while (in >> w) {
    const WordCount wc{w, CharVocab::encode_word(w), 1};
    const std::string ref = CharVocab::decode(wc.char_ids);
    const std::string hyp = greedy_spelling(loaded.model, wc);
    (train_words.count(w) ? in_vocab : oov).emplace_back(ref, hyp);
  }
  if (in_vocab.empty() && oov.empty()) throw InputError("word list is empty");

  json j;
  const auto to_json = [](const ReconstructionReport& r) {
    json e{{"cper_pct", r.cper_pct},
           {"wrfr_pct", r.wrfr_pct},
           {"total", r.total},
           {"failed", r.failed}};
    if (r.failed_len_mean) {
      e["failed_len_mean"] = *r.failed_len_mean;
      e["failed_len_stddev"] = *r.failed_len_stddev;
    } else {
      e["failed_len_mean"] = nullptr;
      e["failed_len_stddev"] = nullptr;
    }
    return e;
  };
  ReconstructionReport in_rep, oov_rep;
  if (!in_vocab.empty()) {
    in_rep = wrfr(in_vocab);
    j["in_vocabulary"] = to_json(in_rep);
  }
  if (!oov.empty()) {
    oov_rep = wrfr(oov);
    j["out_of_vocabulary"] = to_json(oov_rep);
  }
  std::cout << format_reconstruction_report(in_rep,
                                            oov.empty() ? nullptr : &oov_rep);
  if (!a.report.empty()) {
    std::ofstream f(a.report);
    if (!f) throw InputError("cannot write " + a.report);
    f << j.dump(2) << "\n";
    write_manifest(a.report, "reconstruct", json{{"model", a.model}},
                   {a.model, a.words}, {a.report});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// nn

struct NnArgs {
  std::string model;
  std::string query;
  std::size_t k = 3;
  std::string out;
};

template <typename S>
int run_nn(const NnArgs& a) {
  auto loaded = load_checkpoint<S>(a.model);
  ModelAssembly<S>& m = loaded.model;
  if (m.train_words.empty())
    throw DataError("checkpoint carries no training vocabulary");

  const auto embed = [&](const std::string& word) -> std::vector<double> {
    if (m.encoder == EncoderKind::word_table) {
      const std::size_t row = m.wemb.row_of(word);
      std::vector<double> v(m.wemb.table.value.cols());
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<double>(m.wemb.table.value.at2(row, i));
      return v;
    }
    Tape<S> t;
    const Var wv = m.compose_word(t, CharVocab::encode_word(word));
    std::vector<double> v(t.value(wv).numel());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = static_cast<double>(t.value(wv)[i]);
    return v;
  };

  std::vector<std::pair<std::string, std::vector<double>>> entries;
  for (const std::string& word : m.train_words)
    entries.emplace_back(word, embed(word));
  const auto neighbors = nearest_neighbors(entries, a.query, embed(a.query),
                                           a.k);
  for (const auto& [word, dist] : neighbors)
    std::cout << word << "\t" << dist << "\n";

  if (!a.out.empty()) {
    json j;
    j["query"] = a.query;
    json ns = json::array();
    for (const auto& [word, dist] : neighbors)
      ns.push_back(json{{"word", word}, {"distance", dist}});
    j["neighbors"] = ns;
    std::ofstream f(a.out);
    if (!f) throw InputError("cannot write " + a.out);
    f << j.dump(2) << "\n";
    write_manifest(a.out, "nn", json{{"model", a.model}, {"k", a.k}},
                   {a.model}, {a.out});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// compare-init

struct CompareArgs {
  std::string corpus;
  std::string tagset;
  std::string out;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  ModelSizeArgs size;
  int sentence_epochs = 40;
  int discourse_epochs = 60;
  std::size_t sentence_batch = 0;
  std::size_t discourse_batch = 0;
  std::string dtype = "f64";
};

template <typename S>
int run_compare(const CompareArgs& a) {
  LoadedData data = load_data(a.corpus, a.tagset, {});
  CompareInitConfig cfg;
  cfg.seeds = a.seeds;
  cfg.model = a.size.resolve(data.tags.size());
  cfg.sentence_epochs = a.sentence_epochs;
  cfg.discourse_epochs = a.discourse_epochs;
  if (a.sentence_batch) cfg.sentence_batch = a.sentence_batch;
  if (a.discourse_batch) cfg.discourse_batch = a.discourse_batch;
  const auto res = compare_init<S>(data.train, nullptr, cfg);
  write_compare_csv(a.out, res);
  std::cout << "mean final train loss: hierarchy-wise init "
            << res.mean_final_pretrained << " vs end-to-end "
            << res.mean_final_end_to_end << "\n"
            << "curves: " << a.out << "\n";
  json cfgj = a.size.echo();
  cfgj["seeds"] = a.seeds;
  cfgj["sentence_epochs"] = a.sentence_epochs;
  cfgj["discourse_epochs"] = a.discourse_epochs;
  write_manifest(a.out, "compare-init", cfgj, {a.corpus, a.tagset}, {a.out});
  return 0;
}

template <typename F>
int dispatch_dtype(const std::string& dtype, F&& f) {
  if (dtype == "f64") return f(double{});
  if (dtype == "f32") return f(float{});
  throw ConfigError("--dtype must be f32 or f64");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical composition recurrent network trainer"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->set_config("--config");
  synth->add_option("--variant", synth_args.variant,
                    "context-free|context-bound|speaker-gated|long-flat");
  synth->add_option("--dialogues", synth_args.dialogues, "dialogue count");
  synth->add_option("--sentences", synth_args.sentences,
                    "sentences per dialogue");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--out", synth_args.out, "corpus output path")->required();
  synth->add_option("--tags-out", synth_args.tags_out, "tag set output path");

  PreprocessArgs pre_args;
  auto* pre = app.add_subcommand("preprocess",
                                 "clean a raw transcript corpus");
  pre->set_config("--config");
  pre->add_option("--input", pre_args.input, "raw corpus (jsonl)")->required();
  pre->add_option("--output", pre_args.output, "cleaned corpus path")
      ->required();
  pre->add_option("--tagset", pre_args.tagset, "class name file")->required();

  PretrainArgs pw_args;
  auto* pw = app.add_subcommand("pretrain-word",
                                "spelling autoencoder pre-training");
  pw->set_config("--config");
  pw->add_option("--corpus", pw_args.corpus, "corpus whose words to learn");
  pw->add_option("--words", pw_args.words, "plain word list instead");
  pw->add_option("--tagset", pw_args.tagset, "class name file");
  pw->add_option("--model-out", pw_args.model_out, "checkpoint path")
      ->required();
  add_size_options(pw, pw_args.size);
  pw->add_option("--seed", pw_args.seed, "run seed");
  pw->add_option("--epochs", pw_args.epochs, "max epochs");
  pw->add_option("--batch", pw_args.batch, "minibatch size (default 10)");
  pw->add_flag("--no-early-stop", pw_args.no_early_stop,
               "disable the 0.1%/3-epoch rule");
  pw->add_option("--dtype", pw_args.dtype, "f32|f64");

  TrainArgs tr_args;
  auto* tr = app.add_subcommand("train", "supervised phase training");
  tr->set_config("--config");
  tr->add_option("--phase", tr_args.phase, "sentence|discourse")->required();
  tr->add_option("--corpus", tr_args.corpus, "corpus path")->required();
  tr->add_option("--tagset", tr_args.tagset, "class name file")->required();
  tr->add_option("--splits-dir", tr_args.splits.dir,
                 "directory with train.ids/valid.ids/test.ids");
  tr->add_option("--init", tr_args.init,
                 "checkpoint providing the pre-trained lower levels");
  tr->add_option("--resume", tr_args.resume, "checkpoint to resume");
  tr->add_option("--model-out", tr_args.model_out, "checkpoint path")
      ->required();
  tr->add_option("--encoder", tr_args.encoder,
                 "hierarchical|word-table|flat-chars");
  add_size_options(tr, tr_args.size);
  tr->add_option("--seed", tr_args.seed, "run seed");
  tr->add_option("--epochs", tr_args.epochs, "max epochs");
  tr->add_option("--batch", tr_args.batch, "minibatch size (default 64/8)");
  tr->add_option("--freeze-epochs", tr_args.freeze_epochs,
                 "epochs with pre-trained levels frozen (default 1/5 with "
                 "--init)");
  tr->add_flag("--ablate-speaker", tr_args.ablate_speaker,
               "feed zeros instead of the speaker-change vector");
  tr->add_flag("--no-early-stop", tr_args.no_early_stop,
               "train for the full epoch budget");
  tr->add_option("--dtype", tr_args.dtype, "f32|f64");

  EvalArgs ev_args;
  auto* ev = app.add_subcommand("eval", "classification report");
  ev->set_config("--config");
  ev->add_option("--model", ev_args.model, "checkpoint path")->required();
  ev->add_option("--corpus", ev_args.corpus, "corpus path")->required();
  ev->add_option("--tagset", ev_args.tagset, "class name file")->required();
  ev->add_option("--splits-dir", ev_args.splits.dir, "split id directory");
  ev->add_option("--split", ev_args.splits.only, "train|valid|test");
  ev->add_option("--report", ev_args.report, "json report path");
  ev->add_flag("--ablate-speaker", ev_args.ablate_speaker,
               "zero the speaker-change input");

  ReconstructArgs rc_args;
  auto* rc = app.add_subcommand("reconstruct",
                                "greedy spelling reconstruction report");
  rc->set_config("--config");
  rc->add_option("--model", rc_args.model, "word-phase checkpoint")
      ->required();
  rc->add_option("--words", rc_args.words, "word list file")->required();
  rc->add_option("--report", rc_args.report, "json report path");

  NnArgs nn_args;
  auto* nn = app.add_subcommand("nn", "nearest neighbors of a word vector");
  nn->set_config("--config");
  nn->add_option("--model", nn_args.model, "checkpoint path")->required();
  nn->add_option("--query", nn_args.query, "query word")->required();
  nn->add_option("-k,--k", nn_args.k, "neighbor count");
  nn->add_option("--out", nn_args.out, "json output path");

  CompareArgs cp_args;
  auto* cp = app.add_subcommand(
      "compare-init", "hierarchy-wise vs end-to-end learning curves");
  cp->set_config("--config");
  cp->add_option("--corpus", cp_args.corpus, "corpus path")->required();
  cp->add_option("--tagset", cp_args.tagset, "class name file")->required();
  cp->add_option("--out", cp_args.out, "curve csv path")->required();
  cp->add_option("--seeds", cp_args.seeds, "seed list");
  add_size_options(cp, cp_args.size);
  cp->add_option("--sentence-epochs", cp_args.sentence_epochs,
                 "sentence-phase epochs per seed");
  cp->add_option("--discourse-epochs", cp_args.discourse_epochs,
                 "discourse epochs per arm");
  cp->add_option("--sentence-batch", cp_args.sentence_batch, "batch size");
  cp->add_option("--discourse-batch", cp_args.discourse_batch, "batch size");
  cp->add_option("--dtype", cp_args.dtype, "f32|f64");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_args);
    if (pre->parsed()) return cmd_preprocess(pre_args);
    if (pw->parsed()) {
      if (pw_args.corpus.empty() == pw_args.words.empty())
        throw ConfigError("pass exactly one of --corpus or --words");
      if (!pw_args.corpus.empty() && pw_args.tagset.empty())
        throw ConfigError("--corpus needs --tagset");
      return dispatch_dtype(pw_args.dtype,
                            [&](auto s) { return run_pretrain<decltype(s)>(pw_args); });
    }
    if (tr->parsed())
      return dispatch_dtype(tr_args.dtype,
                            [&](auto s) { return run_train<decltype(s)>(tr_args); });
    if (ev->parsed()) {
      const std::string dtype =
          peek_checkpoint_config(ev_args.model).value("dtype", "f64");
      return dispatch_dtype(dtype,
                            [&](auto s) { return run_eval<decltype(s)>(ev_args); });
    }
    if (rc->parsed()) {
      const std::string dtype =
          peek_checkpoint_config(rc_args.model).value("dtype", "f64");
      return dispatch_dtype(
          dtype, [&](auto s) { return run_reconstruct<decltype(s)>(rc_args); });
    }
    if (nn->parsed()) {
      const std::string dtype =
          peek_checkpoint_config(nn_args.model).value("dtype", "f64");
      return dispatch_dtype(dtype,
                            [&](auto s) { return run_nn<decltype(s)>(nn_args); });
    }
    if (cp->parsed())
      return dispatch_dtype(cp_args.dtype,
                            [&](auto s) { return run_compare<decltype(s)>(cp_args); });
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
