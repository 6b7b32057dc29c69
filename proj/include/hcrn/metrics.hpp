#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcrn/errors.hpp"

namespace hcrn {

// Unit-cost Levenshtein distance.
std::size_t edit_distance(std::span<const std::uint16_t> a,
                          std::span<const std::uint16_t> b);
std::size_t edit_distance(const std::string& a, const std::string& b);

// Character prediction error rate: edit distance normalized by the reference
// length (or by the hypothesis length under the alternative convention).
enum class CperDenominator { reference, hypothesis };

double cper(std::span<const std::uint16_t> reference,
            std::span<const std::uint16_t> hypothesis,
            CperDenominator denom = CperDenominator::reference);
double cper(const std::string& reference, const std::string& hypothesis,
            CperDenominator denom = CperDenominator::reference);

struct ReconstructionReport {
  double cper_pct = 0;   // pooled: total edit distance / total ref chars
  double wrfr_pct = 0;   // share of words not reconstructed exactly
  std::size_t total = 0;
  std::size_t failed = 0;
  // character-length stats of the failed references; absent when none failed
  std::optional<double> failed_len_mean;
  std::optional<double> failed_len_stddev;
};

// Exact-match reconstruction scoring over (reference, hypothesis) pairs.
ReconstructionReport wrfr(
    std::span<const std::pair<std::string, std::string>> pairs);

struct ClassificationReport {
  double error_rate_pct = 0;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::vector<std::vector<std::size_t>> confusion;      // [actual][predicted]
  std::vector<std::optional<double>> per_class_accuracy;  // absent at support 0
};

ClassificationReport classification_error(std::span<const int> predicted,
                                          std::span<const int> actual,
                                          std::size_t num_classes);

// 100 * (base - improved) / base.
double relative_improvement(double base_error, double new_error);

// k nearest entries to `query_vec` by Euclidean distance, excluding any entry
// named exactly `query`; ties break lexicographically. Asking for more
// neighbors than entries returns them all with a warning.
std::vector<std::pair<std::string, double>> nearest_neighbors(
    std::span<const std::pair<std::string, std::vector<double>>> entries,
    const std::string& query, std::span<const double> query_vec,
    std::size_t k = 3);

std::string format_reconstruction_report(const ReconstructionReport& in_vocab,
                                         const ReconstructionReport* oov);
std::string format_classification_report(
    const ClassificationReport& r, const std::vector<std::string>& class_names);

}  // namespace hcrn
