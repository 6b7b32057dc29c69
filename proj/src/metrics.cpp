#include "hcrn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace hcrn {

namespace {

template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

std::size_t edit_distance(std::span<const std::uint16_t> a,
                          std::span<const std::uint16_t> b) {
  return levenshtein(a, b);
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  return levenshtein(a, b);
}

template <typename Seq>
static double cper_impl(const Seq& ref, const Seq& hyp, CperDenominator denom) {
  const std::size_t d =
      denom == CperDenominator::reference ? ref.size() : hyp.size();
  if (d == 0)
    throw InputError("cper: empty normalizing sequence");
  return static_cast<double>(levenshtein(ref, hyp)) / static_cast<double>(d);
}

double cper(std::span<const std::uint16_t> reference,
            std::span<const std::uint16_t> hypothesis, CperDenominator denom) {
  return cper_impl(reference, hypothesis, denom);
}

double cper(const std::string& reference, const std::string& hypothesis,
            CperDenominator denom) {
  return cper_impl(reference, hypothesis, denom);
}

ReconstructionReport wrfr(
    std::span<const std::pair<std::string, std::string>> pairs) {
  if (pairs.empty()) throw InputError("wrfr: no reconstruction pairs");
  ReconstructionReport r;
  r.total = pairs.size();
  std::size_t dist_total = 0, ref_chars = 0;
  double len_sum = 0, len_sumsq = 0;
  for (const auto& [ref, hyp] : pairs) {
    dist_total += edit_distance(ref, hyp);
    ref_chars += ref.size();
    if (ref != hyp) {
      ++r.failed;
      len_sum += static_cast<double>(ref.size());
      len_sumsq += static_cast<double>(ref.size()) * static_cast<double>(ref.size());
    }
  }
  if (ref_chars == 0) throw InputError("wrfr: references are empty");
  r.cper_pct = 100.0 * static_cast<double>(dist_total) /
               static_cast<double>(ref_chars);
  r.wrfr_pct = 100.0 * static_cast<double>(r.failed) /
               static_cast<double>(r.total);
  if (r.failed > 0) {
    const double mean = len_sum / static_cast<double>(r.failed);
    r.failed_len_mean = mean;
    r.failed_len_stddev = std::sqrt(
        std::max(0.0, len_sumsq / static_cast<double>(r.failed) - mean * mean));
  }
  return r;
}

ClassificationReport classification_error(std::span<const int> predicted,
                                          std::span<const int> actual,
                                          std::size_t num_classes) {
  if (predicted.size() != actual.size())
    throw InputError("classification_error: prediction/label count mismatch");
  if (predicted.empty())
    throw InputError("classification_error: no predictions");
  ClassificationReport r;
  r.total = predicted.size();
  r.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i], a = actual[i];
    if (p < 0 || a < 0 || static_cast<std::size_t>(p) >= num_classes ||
        static_cast<std::size_t>(a) >= num_classes)
      throw IndexError("classification_error: class id out of range");
    ++r.confusion[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)];
    if (p == a) ++r.correct;
  }
  r.error_rate_pct = 100.0 * (1.0 - static_cast<double>(r.correct) /
                                        static_cast<double>(r.total));
  r.per_class_accuracy.assign(num_classes, std::nullopt);
  for (std::size_t cls = 0; cls < num_classes; ++cls) {
    std::size_t support = 0;
    for (std::size_t p = 0; p < num_classes; ++p) support += r.confusion[cls][p];
    if (support > 0)
      r.per_class_accuracy[cls] = static_cast<double>(r.confusion[cls][cls]) /
                                  static_cast<double>(support);
  }
  return r;
}

double relative_improvement(double base_error, double new_error) {
  if (base_error == 0)
    throw InputError("relative_improvement: base error is zero");
  return 100.0 * (base_error - new_error) / base_error;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(
    std::span<const std::pair<std::string, std::vector<double>>> entries,
    const std::string& query, std::span<const double> query_vec,
    std::size_t k) {
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [word, vec] : entries) {
    if (word == query) continue;
    if (vec.size() != query_vec.size())
      throw DimensionError("nearest_neighbors: vector width mismatch for '" +
                           word + "'");
    double sq = 0;
    for (std::size_t i = 0; i < vec.size(); ++i) {
      const double d = vec[i] - query_vec[i];
      sq += d * d;
    }
    scored.emplace_back(word, std::sqrt(sq));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  if (k < scored.size()) {
    scored.resize(k);
  } else if (k > scored.size()) {
    std::cerr << "warning: asked for " << k << " neighbors but only "
              << scored.size() << " candidates exist\n";
  }
  return scored;
}

namespace {

std::string fmt_pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.2f", x);
  return buf;
}

std::string fmt_len(const ReconstructionReport& r) {
  if (!r.failed_len_mean) return "     -";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f(%.1f)", *r.failed_len_mean,
                *r.failed_len_stddev);
  return buf;
}

}  // namespace

std::string format_reconstruction_report(const ReconstructionReport& in_vocab,
                                         const ReconstructionReport* oov) {
  std::string out;
  out += "partition       CPER(%)  WRFR(%)  Length\n";
  out += "in-vocabulary   " + fmt_pct(in_vocab.cper_pct) + "   " +
         fmt_pct(in_vocab.wrfr_pct) + "   " + fmt_len(in_vocab) + "\n";
  if (oov)
    out += "out-of-vocab    " + fmt_pct(oov->cper_pct) + "   " +
           fmt_pct(oov->wrfr_pct) + "   " + fmt_len(*oov) + "\n";
  return out;
}

std::string format_classification_report(
    const ClassificationReport& r, const std::vector<std::string>& class_names) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "error rate: %.2f%%  (%zu/%zu correct)\n",
                r.error_rate_pct, r.correct, r.total);
  out += buf;
  out += "class accuracy:\n";
  for (std::size_t c = 0; c < r.per_class_accuracy.size(); ++c) {
    const std::string name =
        c < class_names.size() ? class_names[c] : std::to_string(c);
    if (r.per_class_accuracy[c]) {
      std::snprintf(buf, sizeof(buf), "  %-24s %6.2f%%\n", name.c_str(),
                    100.0 * *r.per_class_accuracy[c]);
      out += buf;
    } else {
      std::snprintf(buf, sizeof(buf), "  %-24s      - (no support)\n",
                    name.c_str());
      out += buf;
    }
  }
  return out;
}

}  // namespace hcrn
