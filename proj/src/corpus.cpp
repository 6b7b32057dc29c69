#include "hcrn/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hcrn {

using nlohmann::json;

// ---------------------------------------------------------------------------
// TagSet

TagSet TagSet::from_names(std::vector<std::string> names) {
  TagSet t;
  t.names = std::move(names);
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    if (!t.index.emplace(t.names[i], static_cast<int>(i)).second)
      throw DataError("tag set: duplicate class name '" + t.names[i] + "'");
  }
  return t;
}

TagSet TagSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("tag set: cannot open " + path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  return from_names(std::move(names));
}

void TagSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("tag set: cannot write " + path);
  for (const auto& n : names) out << n << "\n";
}

int TagSet::id_of(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end())
    throw DataError("tag set: unknown class name '" + name + "'");
  return it->second;
}

std::optional<int> TagSet::try_id(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Pre-processing

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string collapse_whitespace(const std::string& s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string preprocess_text(const std::string& raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw)
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  // Non-verbal markers like <laughter> become the noise token.
  std::string t;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '<') {
      const std::size_t close = s.find('>', i);
      if (close != std::string::npos) {
        t += ' ';
        t += CharVocab::noise_token();
        t += ' ';
        i = close + 1;
        continue;
      }
    }
    t += s[i++];
  }

  // Disfluency tag conventions: "{f " style markers keep their content,
  // bracket and repair punctuation is dropped outright.
  std::string u;
  for (std::size_t i = 0; i < t.size();) {
    const char c = t[i];
    if (c == '{') {
      if (i + 2 < t.size() &&
          std::isalpha(static_cast<unsigned char>(t[i + 1])) &&
          t[i + 2] == ' ') {
        i += 2;  // drop "{x", keep the content after the space
        continue;
      }
      ++i;
      continue;
    }
    if (c == '}' || c == '[' || c == ']' || c == '+') {
      ++i;
      continue;
    }
    if (c == '?' || c == '!' || c == ',') {
      ++i;
      continue;
    }
    u += c;
    ++i;
  }

  u = collapse_whitespace(u);
  // Sentence-final periods are punctuation; interior ones mark abbreviations.
  while (!u.empty() && u.back() == '.') u.pop_back();
  while (!u.empty() && is_space(u.back())) u.pop_back();
  return u;
}

std::vector<WordToken> tokenize(const std::string& cleaned) {
  std::vector<WordToken> words;
  std::istringstream in(cleaned);
  std::string w;
  while (in >> w)
    words.push_back(WordToken{w, CharVocab::encode_word(w)});
  return words;
}

Dialogue merge_segments(const Dialogue& d) {
  Dialogue out;
  out.id = d.id;
  std::map<std::string, std::size_t> last_of_speaker;  // index into out
  for (const Sentence& s : d.sentences) {
    if (s.segment) {
      auto it = last_of_speaker.find(s.agent);
      if (it != last_of_speaker.end()) {
        Sentence& head = out.sentences[it->second];
        head.words.insert(head.words.end(), s.words.begin(), s.words.end());
        if (!s.raw_text.empty()) {
          if (!head.raw_text.empty()) head.raw_text += ' ';
          head.raw_text += s.raw_text;
        }
        continue;
      }
      std::cerr << "warning: segment continuation with no previous sentence "
                   "from speaker '"
                << s.agent << "' in dialogue " << d.id
                << "; keeping as ordinary sentence\n";
    }
    Sentence plain = s;
    plain.segment = false;
    out.sentences.push_back(std::move(plain));
    last_of_speaker[s.agent] = out.sentences.size() - 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

struct Running {
  double sum = 0, sumsq = 0;
  std::size_t n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0; }
  double stddev() const {
    if (!n) return 0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sumsq / static_cast<double>(n) - m * m));
  }
};

}  // namespace

CorpusStats corpus_stats(const Corpus& c) {
  if (c.dialogues.empty()) throw InputError("corpus_stats: empty corpus");
  Running wps, spd, cps, cpw;
  std::set<std::string> seen;
  for (const Dialogue& d : c.dialogues) {
    spd.add(static_cast<double>(d.sentences.size()));
    for (const Sentence& s : d.sentences) {
      wps.add(static_cast<double>(s.words.size()));
      std::size_t chars = 0;
      for (const WordToken& w : s.words) {
        chars += w.char_ids.size();
        if (seen.insert(w.text).second)
          cpw.add(static_cast<double>(w.char_ids.size()));
      }
      if (!s.words.empty()) chars += s.words.size() - 1;  // boundary blanks
      cps.add(static_cast<double>(chars));
    }
  }
  CorpusStats st;
  st.cpw_mean = cpw.mean();
  st.cpw_std = cpw.stddev();
  st.wps_mean = wps.mean();
  st.wps_std = wps.stddev();
  st.spd_mean = spd.mean();
  st.spd_std = spd.stddev();
  st.cps_mean = cps.mean();
  st.cps_std = cps.stddev();
  return st;
}

std::string format_stats(const CorpusStats& s) {
  char buf[256];
  std::string out;
  out += "level    #C/W    #W/S    #S/D    #C/S\n";
  std::snprintf(buf, sizeof(buf), "mean   %7.2f %7.2f %7.2f %7.2f\n",
                s.cpw_mean, s.wps_mean, s.spd_mean, s.cps_mean);
  out += buf;
  std::snprintf(buf, sizeof(buf), "stddev %7.2f %7.2f %7.2f %7.2f\n",
                s.cpw_std, s.wps_std, s.spd_std, s.cps_std);
  out += buf;
  return out;
}

// ---------------------------------------------------------------------------
// Splits, inventory, batches

SplitResult split(const Corpus& c, const std::vector<std::string>& train_ids,
                  const std::vector<std::string>& valid_ids,
                  const std::vector<std::string>& test_ids) {
  std::set<std::string> train(train_ids.begin(), train_ids.end());
  std::set<std::string> valid(valid_ids.begin(), valid_ids.end());
  std::set<std::string> test(test_ids.begin(), test_ids.end());
  for (const auto& id : valid)
    if (train.count(id))
      throw ConfigError("split: dialogue '" + id + "' in train and valid");
  for (const auto& id : test)
    if (train.count(id) || valid.count(id))
      throw ConfigError("split: dialogue '" + id + "' assigned twice");

  SplitResult r;
  for (const Dialogue& d : c.dialogues) {
    if (train.count(d.id)) r.train.dialogues.push_back(d);
    else if (valid.count(d.id)) r.valid.dialogues.push_back(d);
    else if (test.count(d.id)) r.test.dialogues.push_back(d);
    else
      std::cerr << "warning: dialogue '" << d.id
                << "' not assigned to any split; dropped\n";
  }
  return r;
}

std::vector<WordCount> word_inventory(const Corpus& c) {
  std::map<std::string, std::size_t> counts;
  for (const Dialogue& d : c.dialogues)
    for (const Sentence& s : d.sentences)
      for (const WordToken& w : s.words) ++counts[w.text];
  std::vector<WordCount> out;
  out.reserve(counts.size());
  for (const auto& [text, count] : counts)
    out.push_back(WordCount{text, CharVocab::encode_word(text), count});
  return out;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n_items,
                                                   std::size_t batch_size,
                                                   Rng& rng) {
  if (batch_size == 0) throw ConfigError("make_batches: batch_size must be >= 1");
  std::vector<std::size_t> order(n_items);
  for (std::size_t i = 0; i < n_items; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n_items; i += batch_size) {
    const std::size_t end = std::min(n_items, i + batch_size);
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }
  return batches;
}

// ---------------------------------------------------------------------------
// Corpus files

Corpus load_corpus(const std::string& path, const TagSet& tags) {
  std::ifstream in(path);
  if (!in) throw InputError("corpus: cannot open " + path);
  Corpus c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("corpus: " + path + ":" + std::to_string(lineno) +
                        ": " + e.what());
    }
    Dialogue d;
    d.id = j.at("id").get<std::string>();
    for (const auto& turn : j.at("turns")) {
      Sentence s;
      s.agent = turn.at("speaker").get<std::string>();
      s.label = tags.id_of(turn.at("label").get<std::string>());
      s.raw_text = turn.at("text").get<std::string>();
      s.segment = turn.value("segment", false);
      s.words = tokenize(s.raw_text);
      if (s.words.empty()) {
        std::cerr << "warning: empty sentence dropped in dialogue " << d.id
                  << "\n";
        continue;
      }
      d.sentences.push_back(std::move(s));
    }
    if (d.sentences.empty()) {
      std::cerr << "warning: empty dialogue '" << d.id << "' dropped\n";
      continue;
    }
    c.dialogues.push_back(std::move(d));
  }
  return c;
}

void save_corpus(const std::string& path, const Corpus& c, const TagSet& tags) {
  std::ofstream out(path);
  if (!out) throw InputError("corpus: cannot write " + path);
  for (const Dialogue& d : c.dialogues) {
    json turns = json::array();
    for (const Sentence& s : d.sentences) {
      if (s.label < 0 || static_cast<std::size_t>(s.label) >= tags.size())
        throw DataError("corpus: label id out of tag set range in dialogue " +
                        d.id);
      json turn{{"speaker", s.agent},
                {"label", tags.names[static_cast<std::size_t>(s.label)]},
                {"text", s.raw_text}};
      if (s.segment) turn["segment"] = true;
      turns.push_back(std::move(turn));
    }
    out << json{{"id", d.id}, {"turns", std::move(turns)}}.dump() << "\n";
  }
}

std::vector<std::string> load_id_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("id list: cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

}  // namespace hcrn
