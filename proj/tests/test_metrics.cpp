#include <doctest.h>

#include <map>
#include <string>

#include "hcrn/metrics.hpp"
#include "hcrn/rng.hpp"

using namespace hcrn;

namespace {

// Independent oracle: top-down recursive edit distance with memoization,
// deliberately a different algorithm shape than the two-row production DP.
std::size_t naive_distance(const std::string& a, const std::string& b,
                           std::size_t i, std::size_t j,
                           std::map<std::pair<std::size_t, std::size_t>,
                                    std::size_t>& memo) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const auto key = std::make_pair(i, j);
  const auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  std::size_t best = naive_distance(a, b, i + 1, j, memo) + 1;
  best = std::min(best, naive_distance(a, b, i, j + 1, memo) + 1);
  best = std::min(best, naive_distance(a, b, i + 1, j + 1, memo) +
                            (a[i] == b[j] ? 0 : 1));
  memo[key] = best;
  return best;
}

std::size_t naive_distance(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  return naive_distance(a, b, 0, 0, memo);
}

std::string random_string(Rng& rng, std::size_t max_len) {
  std::string s;
  const std::size_t n = rng.below(max_len + 1);
  for (std::size_t i = 0; i < n; ++i)
    s += static_cast<char>('a' + rng.below(4));
  return s;
}

}  // namespace

TEST_CASE("cper examples") {
  CHECK(cper(std::string("cat"), std::string("cat")) == 0.0);
  CHECK(cper(std::string("cat"), std::string("cut")) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(cper(std::string("ab"), std::string("")) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cper(std::string(""), std::string("x")), InputError);

  // alternative denominator convention
  CHECK(cper(std::string("ab"), std::string("abcd"),
             CperDenominator::hypothesis) == doctest::Approx(0.5));
}

TEST_CASE("edit distance matches the naive oracle and is symmetric") {
  Rng rng(99, "edit");
  for (int trial = 0; trial < 300; ++trial) {
    const std::string a = random_string(rng, 10);
    const std::string b = random_string(rng, 10);
    const std::size_t d = edit_distance(a, b);
    CHECK(d == naive_distance(a, b));
    CHECK(d == edit_distance(b, a));
    CHECK(edit_distance(a, a) == 0);
  }
}

TEST_CASE("wrfr examples") {
  using P = std::pair<std::string, std::string>;
  std::vector<P> exact = {{"aa", "aa"}, {"bb", "bb"}};
  const auto r0 = wrfr(exact);
  CHECK(r0.wrfr_pct == 0.0);
  CHECK(r0.cper_pct == 0.0);
  CHECK(!r0.failed_len_mean.has_value());

  std::vector<P> quarter = {{"aa", "aa"}, {"bb", "bb"}, {"cc", "cc"},
                            {"dd", "de"}};
  const auto r1 = wrfr(quarter);
  CHECK(r1.wrfr_pct == doctest::Approx(25.0));
  CHECK(r1.failed == 1);

  std::vector<P> lengths = {{"abcdefghijklm", "abcdefghijkl"}, {"ok", "ok"}};
  const auto r2 = wrfr(lengths);
  REQUIRE(r2.failed_len_mean.has_value());
  CHECK(*r2.failed_len_mean == doctest::Approx(13.0));
  CHECK(*r2.failed_len_stddev == doctest::Approx(0.0));

  CHECK_THROWS_AS(wrfr({}), InputError);
}

TEST_CASE("wrfr on identical random pairs is zero") {
  Rng rng(7, "wrfr");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 50; ++i) {
    std::string s = random_string(rng, 8);
    if (s.empty()) s = "a";
    pairs.emplace_back(s, s);
  }
  const auto r = wrfr(pairs);
  CHECK(r.wrfr_pct == 0.0);
  CHECK(r.cper_pct == 0.0);
}

TEST_CASE("classification_error counts the confusion matrix") {
  std::vector<int> pred = {0, 1, 2, 2};
  std::vector<int> act = {0, 1, 2, 1};
  const auto r = classification_error(pred, act, 4);
  CHECK(r.error_rate_pct == doctest::Approx(25.0));
  CHECK(r.confusion[1][2] == 1);
  CHECK(r.correct == 3);

  // error equals the off-diagonal mass
  std::size_t off = 0, total = 0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t p = 0; p < 4; ++p) {
      total += r.confusion[a][p];
      if (a != p) off += r.confusion[a][p];
    }
  CHECK(r.error_rate_pct ==
        doctest::Approx(100.0 * static_cast<double>(off) /
                        static_cast<double>(total)));

  // class 3 has no support: accuracy reported as absent, not zero
  CHECK(!r.per_class_accuracy[3].has_value());
  CHECK(*r.per_class_accuracy[1] == doctest::Approx(0.5));

  const auto perfect = classification_error(act, act, 4);
  CHECK(perfect.error_rate_pct == 0.0);

  std::vector<int> shorter = {0};
  CHECK_THROWS_AS(classification_error(shorter, act, 4), InputError);
}

TEST_CASE("relative_improvement reproduces the reference pairs") {
  CHECK(relative_improvement(26.27, 22.73) == doctest::Approx(13.48).epsilon(0.001));
  CHECK(relative_improvement(35.80, 27.13) == doctest::Approx(24.22).epsilon(0.001));
  CHECK(relative_improvement(10.0, 10.0) == 0.0);
  CHECK_THROWS_AS(relative_improvement(0.0, 1.0), InputError);
}

TEST_CASE("nearest_neighbors ranks by distance with stable ties") {
  using Entry = std::pair<std::string, std::vector<double>>;
  std::vector<Entry> entries = {
      {"far", {10, 0}}, {"close", {1, 0}}, {"query", {0, 0}}, {"mid", {2, 0}}};
  std::vector<double> q = {0, 0};
  const auto nn = nearest_neighbors(entries, "query", q, 3);
  REQUIRE(nn.size() == 3);
  CHECK(nn[0].first == "close");
  CHECK(nn[1].first == "mid");
  CHECK(nn[2].first == "far");

  // an exact-match vector ranks first
  const std::vector<double> q2 = {1, 0};
  const auto nn2 = nearest_neighbors(entries, "other", q2, 1);
  CHECK(nn2[0].first == "close");
  CHECK(nn2[0].second == doctest::Approx(0.0));

  // invariant under insertion order
  std::vector<Entry> shuffled = {entries[3], entries[1], entries[0],
                                 entries[2]};
  const auto nn3 = nearest_neighbors(shuffled, "query", q, 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(nn3[i].first == nn[i].first);

  // ties break lexicographically
  std::vector<Entry> ties = {{"bb", {1, 0}}, {"aa", {0, 1}}, {"cc", {-1, 0}}};
  const std::vector<double> q4 = {0, 0};
  const auto nn4 = nearest_neighbors(ties, "none", q4, 3);
  CHECK(nn4[0].first == "aa");
  CHECK(nn4[1].first == "bb");
  CHECK(nn4[2].first == "cc");

  // k beyond the map size returns everything
  const auto nn5 = nearest_neighbors(ties, "none", q4, 9);
  CHECK(nn5.size() == 3);
}
