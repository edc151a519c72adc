#include "ipcfuse/names.hpp"

#include <array>
#include <cstdint>

namespace ipcfuse {

namespace {

// ASCII fallbacks for U+00C0..U+00FF (Latin-1 Supplement letters).
constexpr std::array<const char*, 64> kLatin1 = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "y"};

// ASCII fallbacks for U+0100..U+017F (Latin Extended-A).
constexpr std::array<const char*, 128> kLatinExtA = {
    "a", "a", "a", "a", "a", "a", "c", "c", "c", "c", "c", "c", "c", "c", "d", "d",
    "d", "d", "e", "e", "e", "e", "e", "e", "e", "e", "e", "e", "g", "g", "g", "g",
    "g", "g", "g", "g", "h", "h", "h", "h", "i", "i", "i", "i", "i", "i", "i", "i",
    "i", "i", "ij", "ij", "j", "j", "k", "k", "k", "l", "l", "l", "l", "l", "l", "l",
    "l", "l", "l", "n", "n", "n", "n", "n", "n", "n", "n", "n", "o", "o", "o", "o",
    "o", "o", "oe", "oe", "r", "r", "r", "r", "r", "r", "s", "s", "s", "s", "s", "s",
    "s", "s", "t", "t", "t", "t", "t", "t", "u", "u", "u", "u", "u", "u", "u", "u",
    "u", "u", "u", "u", "w", "w", "y", "y", "y", "z", "z", "z", "z", "z", "z", "s"};

void append_codepoint(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    char c = static_cast<char>(cp);
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out += c;
  } else if (cp >= 0xC0 && cp <= 0xFF) {
    out += kLatin1[cp - 0xC0];
  } else if (cp >= 0x100 && cp <= 0x17F) {
    out += kLatinExtA[cp - 0x100];
  } else {
    // outside the mapped ranges: keep as lowered UTF-8? No good fold exists;
    // re-encode unchanged so distinct names stay distinct.
    if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
}

}  // namespace

std::string normalize_name(std::string_view raw) {
  // decode UTF-8, treating invalid sequences as Latin-1 bytes
  std::string folded;
  folded.reserve(raw.size());
  size_t i = 0;
  while (i < raw.size()) {
    const uint8_t b0 = static_cast<uint8_t>(raw[i]);
    uint32_t cp = b0;
    size_t consumed = 1;
    if (b0 >= 0xC2 && b0 <= 0xDF && i + 1 < raw.size() &&
        (static_cast<uint8_t>(raw[i + 1]) & 0xC0) == 0x80) {
      cp = (uint32_t(b0 & 0x1F) << 6) | (static_cast<uint8_t>(raw[i + 1]) & 0x3F);
      consumed = 2;
    } else if (b0 >= 0xE0 && b0 <= 0xEF && i + 2 < raw.size() &&
               (static_cast<uint8_t>(raw[i + 1]) & 0xC0) == 0x80 &&
               (static_cast<uint8_t>(raw[i + 2]) & 0xC0) == 0x80) {
      cp = (uint32_t(b0 & 0x0F) << 12) | (uint32_t(static_cast<uint8_t>(raw[i + 1]) & 0x3F) << 6) |
           (static_cast<uint8_t>(raw[i + 2]) & 0x3F);
      consumed = 3;
    }
    append_codepoint(folded, cp);
    i += consumed;
  }

  // trim + collapse whitespace
  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (char c : folded) {
    const bool ws = (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v');
    if (ws) {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) {
        out += ' ';
        pending_space = false;
      }
      out += c;
    }
  }
  return out;
}

}  // namespace ipcfuse
