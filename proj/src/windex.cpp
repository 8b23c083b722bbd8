#include "greenwalk/windex.hpp"

#include <algorithm>

#include "greenwalk/errors.hpp"

namespace greenwalk {

FreeWordIndex::FreeWordIndex(int rank, int maxlen)
    : k_(rank), maxlen_(maxlen), deg_(2 * rank),
      width_(static_cast<std::size_t>(2 * rank - 1)) {
  if (rank < 2 || rank > 26) throw ConfigError("free rank must be in [2, 26]");
  if (maxlen < 0) throw ConfigError("word index length must be >= 0");
  // level l holds deg * width^(l-1) words (level 0 is the identity alone)
  off_.assign(static_cast<std::size_t>(maxlen_) + 2, 0);
  std::size_t level_count = 1;
  for (int l = 1; l <= maxlen_ + 1; ++l) {
    off_[l] = off_[l - 1] + level_count;
    level_count = (l == 1) ? static_cast<std::size_t>(deg_) : level_count * width_;
  }

  last_.assign(off_.back(), 0xFF);
  if (maxlen_ >= 1) {
    for (int s = 0; s < deg_; ++s) last_[1 + static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(s);
    for (int l = 1; l < maxlen_; ++l) {
      for (std::size_t i = off_[l]; i < off_[l + 1]; ++i) {
        const int forbidden = static_cast<int>(last_[i]) ^ 1;
        std::size_t child = off_[l + 1] + (i - off_[l]) * width_;
        for (int s = 0; s < deg_; ++s) {
          if (s == forbidden) continue;
          last_[child++] = static_cast<std::uint8_t>(s);
        }
      }
    }
  }
}

int FreeWordIndex::level_of(std::size_t i) const {
  const auto it = std::upper_bound(off_.begin(), off_.end(), i);
  return static_cast<int>(it - off_.begin()) - 1;
}

std::size_t FreeWordIndex::index_of(const std::int16_t* word, std::size_t len) const {
  if (static_cast<int>(len) > maxlen_) return npos;
  std::size_t i = 0;
  for (std::size_t j = 0; j < len; ++j) {
    i = step(i, static_cast<int>(j), static_cast<int>(word[j]));
    if (i == npos) return npos;
  }
  return i;
}

std::size_t FreeWordIndex::index_of(const std::vector<std::int16_t>& word) const {
  return index_of(word.data(), word.size());
}

std::vector<std::int16_t> FreeWordIndex::word_of(std::size_t i) const {
  std::vector<std::int16_t> out;
  int l = level_of(i);
  out.reserve(static_cast<std::size_t>(l));
  while (l > 0) {
    out.push_back(static_cast<std::int16_t>(last_[i]));
    i = parent(i, l);
    --l;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::size_t free_ball_size(int rank, int radius) {
  // 1 + 2k * ((2k-1)^r - 1) / (2k-2)
  const std::size_t deg = static_cast<std::size_t>(2 * rank);
  std::size_t level = deg, total = 1;
  for (int r = 1; r <= radius; ++r) {
    total += level;
    level *= deg - 1;
  }
  return total;
}

} // namespace greenwalk
