#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace greenwalk {

/**
 * Level-major index of the reduced words of a free group F_k up to a fixed
 * length. Words of length l occupy the contiguous block
 * [level_begin(l), level_end(l)); within a level, the children of consecutive
 * parents are consecutive, so parent/child moves are pure arithmetic:
 *
 *   child(i, s)  = level_begin(l+1) + rel(i) * (2k-1) + digit(last(i), s)
 *   parent(i)    = level_begin(l-1) + rel(i) / (2k-1)
 *
 * The only stored payload is one byte per word (its last letter). This is
 * what lets Green-kernel convolutions run over multi-million element balls
 * as flat array sweeps.
 */
class FreeWordIndex {
public:
  FreeWordIndex(int rank, int maxlen);

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  int rank() const { return k_; }
  int maxlen() const { return maxlen_; }
  std::size_t size() const { return off_.back(); }

  std::size_t level_begin(int level) const { return off_[level]; }
  std::size_t level_end(int level) const { return off_[level + 1]; }
  std::size_t level_count(int level) const { return off_[level + 1] - off_[level]; }
  int level_of(std::size_t i) const;

  /// Last letter of word i, or -1 for the identity.
  int last_letter(std::size_t i) const {
    return i == 0 ? -1 : static_cast<int>(last_[i]);
  }

  /// Right-multiply word i (of the given level) by a letter.
  /// Returns npos when the result would exceed maxlen.
  std::size_t step(std::size_t i, int level, int letter) const {
    if (level == 0) return maxlen_ >= 1 ? 1 + static_cast<std::size_t>(letter) : npos;
    const int top = static_cast<int>(last_[i]);
    if (letter == (top ^ 1)) return parent(i, level);
    if (level == maxlen_) return npos;
    const int forbidden = top ^ 1;
    const int digit = letter - (letter > forbidden ? 1 : 0);
    return off_[level + 1] + (i - off_[level]) * width_ + static_cast<std::size_t>(digit);
  }

  std::size_t parent(std::size_t i, int level) const {
    if (level <= 1) return 0;
    return off_[level - 1] + (i - off_[level]) / width_;
  }

  /// Index of a reduced word; npos if it does not fit.
  std::size_t index_of(const std::vector<std::int16_t>& word) const;
  std::size_t index_of(const std::int16_t* word, std::size_t len) const;
  std::vector<std::int16_t> word_of(std::size_t i) const;

private:
  int k_;
  int maxlen_;
  int deg_;
  std::size_t width_;
  std::vector<std::size_t> off_;
  std::vector<std::uint8_t> last_;
};

/// Number of elements in the closed ball of radius r of F_k (4-regular tree
/// for k=2): 1 + 2k * ((2k-1)^r - 1) / (2k-2).
std::size_t free_ball_size(int rank, int radius);

} // namespace greenwalk
