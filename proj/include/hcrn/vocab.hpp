#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hcrn/errors.hpp"

namespace hcrn {

// Fixed character dictionary: 26 letters, '-' (partial word), ''' (possessive),
// '.' (abbreviation), <noise> (non-verbal sound), <unk> (anything else) are
// the 31 corpus-visible symbols. End-of-word, start-of-word and the flat
// baseline's word-boundary blank are reserved control symbols on top.
struct CharVocab {
  static constexpr std::uint16_t kHyphen = 26;
  static constexpr std::uint16_t kApostrophe = 27;
  static constexpr std::uint16_t kPeriod = 28;
  static constexpr std::uint16_t kNoise = 29;
  static constexpr std::uint16_t kUnk = 30;
  static constexpr std::uint16_t kEow = 31;
  static constexpr std::uint16_t kSow = 32;
  static constexpr std::uint16_t kBlank = 33;

  static constexpr std::size_t kVisibleSymbols = 31;
  static constexpr std::size_t kTotalSymbols = 34;

  static const std::string& noise_token();

  static std::uint16_t id_of_char(char c);

  // Character ids of one whitespace-free word; the literal token "<noise>"
  // maps to the single noise symbol.
  static std::vector<std::uint16_t> encode_word(const std::string& word);

  static std::string decode(std::span<const std::uint16_t> ids);
};

}  // namespace hcrn
