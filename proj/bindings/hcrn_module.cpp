// Python module exposing the main operations: corpus handling, the three
// training phases, evaluation, reconstruction and the metrics. Double
// precision only; the CLI covers f32 runs.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hcrn/checkpoint.hpp"
#include "hcrn/metrics.hpp"
#include "hcrn/synth.hpp"
#include "hcrn/trainer.hpp"

namespace py = pybind11;
using namespace hcrn;

namespace {

struct PyCorpus {
  Corpus corpus;
  TagSet tags;
  double sentence_bayes_ceiling = 1.0;
};

struct PyModel {
  ModelAssembly<double> model;
  Adadelta<double> opt;
  Rng data_rng{0, "py-data"};
};

py::dict history_to_dict(const TrainHistory& h) {
  py::list epochs;
  for (const EpochStats& e : h.epochs) {
    py::dict d;
    d["epoch"] = e.epoch;
    d["train_loss"] = e.train_loss;
    if (!std::isnan(e.valid_loss)) d["valid_loss"] = e.valid_loss;
    if (!std::isnan(e.test_error)) d["test_error"] = e.test_error;
    epochs.append(d);
  }
  py::dict out;
  out["epochs"] = epochs;
  out["stopped_early"] = h.stopped_early;
  out["stop_reason"] = h.stop_reason;
  out["best_epoch"] = h.best_epoch;
  return out;
}

TrainPhaseConfig make_config(Phase phase, int epochs, std::size_t batch,
                             int freeze_epochs, bool early_stop,
                             bool ablate_speaker, std::uint64_t seed) {
  TrainPhaseConfig tc;
  tc.phase = phase;
  tc.batch_size = batch;
  tc.max_epochs = epochs;
  tc.freeze_epochs = freeze_epochs;
  tc.early_stop = early_stop;
  tc.ablate_speaker = ablate_speaker;
  tc.seed = seed;
  return tc;
}

Sentence sentence_from_text(const std::string& text) {
  Sentence s;
  s.raw_text = preprocess_text(text);
  s.words = tokenize(s.raw_text);
  if (s.words.empty()) throw InputError("text cleaned away to nothing");
  s.label = 0;
  return s;
}

}  // namespace

PYBIND11_MODULE(hcrn, m) {
  m.doc() = "character -> word -> sentence hierarchy of recurrent encoders "
            "with hierarchy-wise training";

  py::register_exception<Error>(m, "HcrnError");

  // ---- text and corpus --------------------------------------------------
  m.def("preprocess_text", &preprocess_text, py::arg("raw"),
        "lower-case, strip disfluency tags and ? ! , ; normalize whitespace");
  m.def(
      "tokenize",
      [](const std::string& cleaned) {
        py::list out;
        for (const WordToken& w : tokenize(cleaned)) out.append(w.text);
        return out;
      },
      py::arg("cleaned"));
  m.def(
      "encode_word",
      [](const std::string& word) {
        py::list out;
        for (auto id : CharVocab::encode_word(word)) out.append(int(id));
        return out;
      },
      py::arg("word"), "character ids of one word");
  m.def(
      "speaker_change",
      [](const std::string& agent, const std::optional<std::string>& prev) {
        const std::string* p = prev ? &*prev : nullptr;
        const auto v = speaker_change_vec<double>(agent, p);
        return py::make_tuple(v[0], v[1]);
      },
      py::arg("agent"), py::arg("prev_agent") = std::nullopt);

  py::class_<PyCorpus>(m, "Corpus")
      .def_property_readonly(
          "num_dialogues",
          [](const PyCorpus& c) { return c.corpus.dialogues.size(); })
      .def_property_readonly(
          "num_sentences",
          [](const PyCorpus& c) { return c.corpus.num_sentences(); })
      .def_property_readonly("class_names",
                             [](const PyCorpus& c) { return c.tags.names; })
      .def_property_readonly(
          "sentence_bayes_ceiling",
          [](const PyCorpus& c) { return c.sentence_bayes_ceiling; })
      .def("stats",
           [](const PyCorpus& c) {
             const CorpusStats st = corpus_stats(c.corpus);
             py::dict d;
             d["chars_per_word"] = py::make_tuple(st.cpw_mean, st.cpw_std);
             d["words_per_sentence"] = py::make_tuple(st.wps_mean, st.wps_std);
             d["sentences_per_dialogue"] =
                 py::make_tuple(st.spd_mean, st.spd_std);
             d["chars_per_sentence"] = py::make_tuple(st.cps_mean, st.cps_std);
             return d;
           })
      .def("save",
           [](const PyCorpus& c, const std::string& path,
              const std::string& tags_path) {
             save_corpus(path, c.corpus, c.tags);
             c.tags.save(tags_path);
           },
           py::arg("path"), py::arg("tags_path"))
      .def("empirical_sentence_ceiling", [](const PyCorpus& c) {
        return empirical_sentence_ceiling(c.corpus);
      });

  m.def(
      "synth_corpus",
      [](const std::string& variant, std::size_t dialogues,
         std::size_t sentences, std::uint64_t seed) {
        SynthSpec spec;
        spec.variant = synth_variant_from_name(variant);
        spec.dialogues = dialogues;
        spec.sentences_per_dialogue = sentences;
        spec.seed = seed;
        SynthResult r = synth_dialogues(spec);
        return PyCorpus{std::move(r.corpus), std::move(r.tags),
                        r.sentence_bayes_ceiling};
      },
      py::arg("variant") = "context-free", py::arg("dialogues") = 20,
      py::arg("sentences") = 10, py::arg("seed") = 0);

  m.def(
      "load_corpus",
      [](const std::string& path, const std::string& tags_path) {
        TagSet tags = TagSet::load(tags_path);
        Corpus c = load_corpus(path, tags);
        return PyCorpus{std::move(c), std::move(tags), 1.0};
      },
      py::arg("path"), py::arg("tags_path"));

  // ---- model ------------------------------------------------------------
  py::class_<PyModel>(m, "Model")
      .def_property_readonly(
          "phase", [](const PyModel& pm) { return phase_name(pm.model.phase); })
      .def_property_readonly(
          "encoder",
          [](const PyModel& pm) { return encoder_name(pm.model.encoder); })
      .def_property_readonly("num_parameters",
                             [](PyModel& pm) {
                               std::size_t n = 0;
                               for (auto* p : pm.model.params())
                                 n += p->value.numel();
                               return n;
                             })
      .def("parameter_names",
           [](PyModel& pm) {
             std::vector<std::string> names;
             for (auto* p : pm.model.params()) names.push_back(p->name);
             return names;
           })
      .def(
          "pretrain_words",
          [](PyModel& pm, const PyCorpus& corpus, int epochs, std::size_t batch,
             bool early_stop) {
            const auto inv = word_inventory(corpus.corpus);
            const auto tc = make_config(Phase::word, epochs, batch, 0,
                                        early_stop, false, 0);
            return history_to_dict(
                pretrain_word(pm.model, inv, tc, pm.opt, pm.data_rng));
          },
          py::arg("corpus"), py::arg("epochs") = 50, py::arg("batch") = 10,
          py::arg("early_stop") = false)
      .def(
          "train_sentence",
          [](PyModel& pm, const PyCorpus& corpus, int epochs, std::size_t batch,
             int freeze_epochs, bool early_stop) {
            const auto tc = make_config(Phase::sentence, epochs, batch,
                                        freeze_epochs, early_stop, false, 0);
            return history_to_dict(train_sentence(
                pm.model, corpus.corpus, nullptr, nullptr, tc, pm.opt,
                pm.data_rng));
          },
          py::arg("corpus"), py::arg("epochs") = 20, py::arg("batch") = 64,
          py::arg("freeze_epochs") = 0, py::arg("early_stop") = false)
      .def(
          "train_discourse",
          [](PyModel& pm, const PyCorpus& corpus, int epochs, std::size_t batch,
             int freeze_epochs, bool early_stop, bool ablate_speaker) {
            const auto tc =
                make_config(Phase::discourse, epochs, batch, freeze_epochs,
                            early_stop, ablate_speaker, 0);
            return history_to_dict(train_discourse(
                pm.model, corpus.corpus, nullptr, nullptr, tc, pm.opt,
                pm.data_rng));
          },
          py::arg("corpus"), py::arg("epochs") = 20, py::arg("batch") = 8,
          py::arg("freeze_epochs") = 0, py::arg("early_stop") = false,
          py::arg("ablate_speaker") = false)
      .def(
          "evaluate",
          [](PyModel& pm, const PyCorpus& corpus, bool ablate_speaker) {
            const EvalOutcome out =
                evaluate(pm.model, corpus.corpus, ablate_speaker);
            const auto rep = classification_error(out.predicted, out.actual,
                                                  corpus.tags.size());
            py::dict d;
            d["error_pct"] = rep.error_rate_pct;
            d["accuracy_pct"] = 100.0 - rep.error_rate_pct;
            d["mean_nll"] = out.mean_nll;
            d["predicted"] = out.predicted;
            d["actual"] = out.actual;
            return d;
          },
          py::arg("corpus"), py::arg("ablate_speaker") = false)
      .def(
          "encode_word",
          [](PyModel& pm, const std::string& word) {
            Tape<double> t;
            const Var v =
                pm.model.compose_word(t, CharVocab::encode_word(word));
            return std::vector<double>(t.value(v).v);
          },
          py::arg("word"))
      .def(
          "encode_sentence",
          [](PyModel& pm, const std::string& text) {
            Tape<double> t;
            const Var v =
                pm.model.encode_sentence(t, sentence_from_text(text));
            return std::vector<double>(t.value(v).v);
          },
          py::arg("text"))
      .def(
          "classify",
          [](PyModel& pm, const std::string& text) {
            Tape<double> t;
            const Var rep =
                pm.model.encode_sentence(t, sentence_from_text(text));
            const Var probs = pm.model.classify_probs(t, rep);
            return std::vector<double>(t.value(probs).v);
          },
          py::arg("text"), "class distribution for a single sentence")
      .def(
          "reconstruct",
          [](PyModel& pm, const std::string& word, std::size_t extra) {
            return greedy_spelling(
                pm.model, WordCount{word, CharVocab::encode_word(word), 1},
                extra);
          },
          py::arg("word"), py::arg("extra") = 8,
          "greedy spelling of a word through the decoder")
      .def(
          "save",
          [](PyModel& pm, const std::string& path) {
            save_checkpoint(path, pm.model, pm.opt, pm.data_rng, 0);
          },
          py::arg("path"));

  m.def(
      "build_model",
      [](const std::string& phase, const std::string& encoder,
         std::vector<std::size_t> cc, std::vector<std::size_t> cw,
         std::vector<std::size_t> cs, std::size_t embed_dim,
         std::size_t mlp_hidden, std::size_t num_classes,
         std::size_t wemb_dim, std::size_t wemb_cutoff, std::uint64_t seed,
         const PyCorpus* corpus) {
        HcrnConfig cfg;
        cfg.cc = std::move(cc);
        cfg.cw = std::move(cw);
        cfg.cs = std::move(cs);
        cfg.char_embed_dim = embed_dim;
        cfg.mlp_hidden = mlp_hidden;
        cfg.num_classes = num_classes;
        cfg.wemb_dim = wemb_dim;
        cfg.wemb_cutoff = wemb_cutoff;
        Rng init(seed, "init");
        std::vector<WordCount> inventory;
        if (corpus) inventory = word_inventory(corpus->corpus);
        auto pm = std::make_unique<PyModel>();
        pm->model =
            ModelAssembly<double>::build(cfg, phase_from_name(phase),
                                         encoder_from_name(encoder), init,
                                         inventory);
        if (corpus)
          for (const auto& wc : inventory)
            pm->model.train_words.push_back(wc.text);
        pm->data_rng = Rng(seed, "py-data");
        return pm;
      },
      py::arg("phase") = "sentence", py::arg("encoder") = "hierarchical",
      py::arg("cc") = std::vector<std::size_t>{16},
      py::arg("cw") = std::vector<std::size_t>{16},
      py::arg("cs") = std::vector<std::size_t>{},
      py::arg("embed_dim") = 15, py::arg("mlp_hidden") = 128,
      py::arg("num_classes") = 42, py::arg("wemb_dim") = 64,
      py::arg("wemb_cutoff") = 5, py::arg("seed") = 0,
      py::arg("corpus") = nullptr);

  m.def(
      "load_model",
      [](const std::string& path) {
        auto pm = std::make_unique<PyModel>();
        auto loaded = load_checkpoint<double>(path);
        pm->model = std::move(loaded.model);
        pm->opt = std::move(loaded.opt);
        pm->data_rng = loaded.rng;
        return pm;
      },
      py::arg("path"));

  m.def(
      "copy_lower_levels",
      [](PyModel& dst, PyModel& src, const std::vector<std::string>& prefixes) {
        return copy_params_by_prefix(dst.model, src.model,
                                     std::span<const std::string>(prefixes));
      },
      py::arg("dst"), py::arg("src"), py::arg("prefixes"),
      "copy parameter groups such as 'cc.' between assemblies");

  // ---- metrics ----------------------------------------------------------
  m.def(
      "edit_distance",
      [](const std::string& a, const std::string& b) {
        return edit_distance(a, b);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "cper",
      [](const std::string& ref, const std::string& hyp, bool by_hypothesis) {
        return cper(ref, hyp,
                    by_hypothesis ? CperDenominator::hypothesis
                                  : CperDenominator::reference);
      },
      py::arg("reference"), py::arg("hypothesis"),
      py::arg("by_hypothesis") = false);
  m.def(
      "wrfr",
      [](const std::vector<std::pair<std::string, std::string>>& pairs) {
        const auto r = wrfr(pairs);
        py::dict d;
        d["cper_pct"] = r.cper_pct;
        d["wrfr_pct"] = r.wrfr_pct;
        d["total"] = r.total;
        d["failed"] = r.failed;
        d["failed_len_mean"] =
            r.failed_len_mean ? py::cast(*r.failed_len_mean) : py::none();
        d["failed_len_stddev"] =
            r.failed_len_stddev ? py::cast(*r.failed_len_stddev) : py::none();
        return d;
      },
      py::arg("pairs"));
  m.def(
      "classification_error",
      [](const std::vector<int>& pred, const std::vector<int>& act,
         std::size_t num_classes) {
        const auto r = classification_error(pred, act, num_classes);
        py::dict d;
        d["error_rate_pct"] = r.error_rate_pct;
        d["total"] = r.total;
        d["correct"] = r.correct;
        d["confusion"] = r.confusion;
        py::list per;
        for (const auto& a : r.per_class_accuracy)
          per.append(a ? py::cast(*a) : py::none());
        d["per_class_accuracy"] = per;
        return d;
      },
      py::arg("predicted"), py::arg("actual"), py::arg("num_classes"));
  m.def("relative_improvement", &relative_improvement, py::arg("base_error"),
        py::arg("new_error"));
  m.def(
      "nearest_neighbors",
      [](const std::vector<std::pair<std::string, std::vector<double>>>& map,
         const std::string& query, const std::vector<double>& query_vec,
         std::size_t k) { return nearest_neighbors(map, query, query_vec, k); },
      py::arg("entries"), py::arg("query"), py::arg("query_vec"),
      py::arg("k") = 3);
}
