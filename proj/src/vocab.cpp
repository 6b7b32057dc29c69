#include "hcrn/vocab.hpp"

namespace hcrn {

const std::string& CharVocab::noise_token() {
  static const std::string tok = "<noise>";
  return tok;
}

std::uint16_t CharVocab::id_of_char(char c) {
  if (c >= 'a' && c <= 'z') return static_cast<std::uint16_t>(c - 'a');
  switch (c) {
    case '-': return kHyphen;
    case '\'': return kApostrophe;
    case '.': return kPeriod;
    default: return kUnk;
  }
}

std::vector<std::uint16_t> CharVocab::encode_word(const std::string& word) {
  if (word == noise_token()) return {kNoise};
  std::vector<std::uint16_t> ids;
  ids.reserve(word.size());
  for (char c : word) ids.push_back(id_of_char(c));
  return ids;
}

std::string CharVocab::decode(std::span<const std::uint16_t> ids) {
  std::string out;
  for (std::uint16_t id : ids) {
    if (id < 26) {
      out += static_cast<char>('a' + id);
    } else {
      switch (id) {
        case kHyphen: out += '-'; break;
        case kApostrophe: out += '\''; break;
        case kPeriod: out += '.'; break;
        case kNoise: out += "<noise>"; break;
        case kUnk: out += "<unk>"; break;
        case kEow: out += "<eow>"; break;
        case kSow: out += "<sow>"; break;
        case kBlank: out += ' '; break;
        default: throw IndexError("decode: bad char id " + std::to_string(id));
      }
    }
  }
  return out;
}

}  // namespace hcrn
