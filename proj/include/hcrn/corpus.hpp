#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hcrn/errors.hpp"
#include "hcrn/rng.hpp"
#include "hcrn/vocab.hpp"

namespace hcrn {

// Ordered list of class names, loaded from a text file (one name per line).
struct TagSet {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> index;

  static TagSet from_names(std::vector<std::string> names);
  static TagSet load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t size() const { return names.size(); }
  int id_of(const std::string& name) const;  // DataError when unknown
  std::optional<int> try_id(const std::string& name) const;
};

struct WordToken {
  std::string text;
  std::vector<std::uint16_t> char_ids;
};

struct Sentence {
  std::vector<WordToken> words;
  std::string agent;
  int label = -1;
  std::string raw_text;
  bool segment = false;  // continuation of this speaker's previous sentence

  std::size_t char_count() const {
    std::size_t n = 0;
    for (const auto& w : words) n += w.char_ids.size();
    return n;
  }
};

struct Dialogue {
  std::string id;
  std::vector<Sentence> sentences;
};

struct Corpus {
  std::vector<Dialogue> dialogues;

  std::size_t num_sentences() const {
    std::size_t n = 0;
    for (const auto& d : dialogues) n += d.sentences.size();
    return n;
  }
};

// Appendix-style text cleanup: lower-case, strip disfluency tag punctuation
// and the marks ? ! , ; normalize non-verbal <...> groups to "<noise>";
// drop sentence-final periods; collapse whitespace. Idempotent.
std::string preprocess_text(const std::string& raw);

// Whitespace-split a cleaned string into words with character ids.
std::vector<WordToken> tokenize(const std::string& cleaned);

// Appends each segment-flagged sentence to the same speaker's previous
// sentence (keeping that sentence's position and label); a segment with no
// predecessor from its speaker is kept as an ordinary sentence with a warning.
Dialogue merge_segments(const Dialogue& d);

struct CorpusStats {
  // chars per unique word (types), words per sentence, sentences per
  // dialogue, chars per sentence counting word-boundary blanks
  double cpw_mean = 0, cpw_std = 0;
  double wps_mean = 0, wps_std = 0;
  double spd_mean = 0, spd_std = 0;
  double cps_mean = 0, cps_std = 0;
};

CorpusStats corpus_stats(const Corpus& c);  // InputError when empty
std::string format_stats(const CorpusStats& s);

struct SplitResult {
  Corpus train, valid, test;
};

// Partitions dialogues by id; id lists must be disjoint. Dialogues not named
// by any list are dropped with a warning.
SplitResult split(const Corpus& c, const std::vector<std::string>& train_ids,
                  const std::vector<std::string>& valid_ids,
                  const std::vector<std::string>& test_ids);

struct WordCount {
  std::string text;
  std::vector<std::uint16_t> char_ids;
  std::size_t count = 0;
};

// Unique words of the corpus with frequencies, ordered lexicographically.
std::vector<WordCount> word_inventory(const Corpus& c);

// Shuffled index batches; the last partial batch is kept.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n_items,
                                                   std::size_t batch_size,
                                                   Rng& rng);

// Line-delimited JSON, one dialogue per line:
//   {"id": ..., "turns": [{"speaker","label","text","segment"?}, ...]}
// Labels are strings resolved through the tag set; sentences that clean to
// nothing are dropped with a warning.
Corpus load_corpus(const std::string& path, const TagSet& tags);
void save_corpus(const std::string& path, const Corpus& c, const TagSet& tags);

std::vector<std::string> load_id_list(const std::string& path);

}  // namespace hcrn
