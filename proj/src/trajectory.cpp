#include "greenwalk/trajectory.hpp"

#include <algorithm>

#include "greenwalk/errors.hpp"

namespace greenwalk {

namespace {
constexpr std::uint64_t kWalkStream = 0x77616c6bULL; // per-purpose stream tag
}

WordWalk::WordWalk(const GroupSpec& spec, const StepDistribution& mu,
                   std::vector<double> letter_cost)
    : spec_(spec), sampler_(mu.weight), cost_(std::move(letter_cost)) {
  if (!spec.is_word_kind())
    throw ConfigError("WordWalk requires a free group or free product");
  weighted_ = !cost_.empty();
  if (weighted_ && static_cast<int>(cost_.size()) != spec.letter_count())
    throw ConfigError("letter cost table size mismatch");
  support_words_.reserve(mu.support.size());
  for (const auto& g : mu.support) support_words_.push_back(g.word);
  word_.reserve(256);
}

void WordWalk::reset(std::uint64_t seed, std::uint64_t trajectory) {
  rng_ = SplitRng::derive(seed, trajectory, kWalkStream);
  n_ = 0;
  last_idx_ = -1;
  word_.clear();
  length_ = 0;
  wlength_ = 0.0;
}

void WordWalk::push_letter(int s) {
  if (spec_.kind == GroupKind::free_group) {
    if (!word_.empty() && word_.back() == static_cast<std::int16_t>(s ^ 1)) {
      word_.pop_back();
      length_ -= 1;
      if (weighted_) wlength_ -= cost_[static_cast<std::size_t>(s ^ 1)];
    } else {
      word_.push_back(static_cast<std::int16_t>(s));
      length_ += 1;
      if (weighted_) wlength_ += cost_[static_cast<std::size_t>(s)];
    }
    return;
  }
  // free product syllable merge
  if (!word_.empty() && spec_.letter_factor(word_.back()) == spec_.letter_factor(s)) {
    const int old_letter = word_.back();
    GroupElement tmp;
    tmp.word = {static_cast<std::int16_t>(old_letter)};
    apply_letter_inplace(spec_, tmp, s);
    word_.pop_back();
    length_ -= spec_.letter_weight(old_letter);
    if (weighted_) wlength_ -= cost_[static_cast<std::size_t>(old_letter)];
    if (!tmp.word.empty()) {
      const int merged = tmp.word[0];
      word_.push_back(static_cast<std::int16_t>(merged));
      length_ += spec_.letter_weight(merged);
      if (weighted_) wlength_ += cost_[static_cast<std::size_t>(merged)];
    }
    return;
  }
  word_.push_back(static_cast<std::int16_t>(s));
  length_ += spec_.letter_weight(s);
  if (weighted_) wlength_ += cost_[static_cast<std::size_t>(s)];
}

void WordWalk::step() {
  const int idx = sampler_.sample(rng_.unit_at(static_cast<std::uint64_t>(n_)));
  last_idx_ = idx;
  for (auto s : support_words_[static_cast<std::size_t>(idx)])
    push_letter(static_cast<int>(s));
  ++n_;
}

void WordWalk::run_to(long n) {
  while (n_ < n) step();
}

GroupElement WordWalk::element() const {
  GroupElement g;
  g.word = word_;
  return g;
}

LampWalk::LampWalk(const GroupSpec& spec, const StepDistribution& mu)
    : spec_(spec), sampler_(mu.weight) {
  if (!spec.is_lamplighter())
    throw ConfigError("LampWalk requires the lamplighter spec");
  support_words_.reserve(mu.support.size());
  for (const auto& g : mu.support) {
    // spell each support element as letters: visit lamp sites in order,
    // set each lamp, then move to the final shift
    std::vector<std::int16_t> letters;
    int cur = 0;
    for (auto& [site, val] : g.lamps) {
      while (cur < site) { letters.push_back(0); ++cur; }
      while (cur > site) { letters.push_back(1); --cur; }
      for (int r = 0; r < std::abs(val); ++r)
        letters.push_back(val > 0 ? 2 : 3);
    }
    while (cur < g.shift) { letters.push_back(0); ++cur; }
    while (cur > g.shift) { letters.push_back(1); --cur; }
    support_words_.push_back(std::move(letters));
  }
}

void LampWalk::reset(std::uint64_t seed, std::uint64_t trajectory) {
  rng_ = SplitRng::derive(seed, trajectory, kWalkStream);
  n_ = 0;
  lamps_.clear();
  pos_ = 0;
  flips_ = 0;
}

void LampWalk::step() {
  const int idx = sampler_.sample(rng_.unit_at(static_cast<std::uint64_t>(n_)));
  for (auto s : support_words_[static_cast<std::size_t>(idx)]) {
    switch (s) {
      case 0: ++pos_; break;
      case 1: --pos_; break;
      case 2:
      case 3: {
        const int delta = (s == 2) ? 1 : -1;
        auto it = lamps_.find(pos_);
        if (it == lamps_.end()) {
          lamps_.emplace(pos_, delta);
          flips_ += 1;
        } else {
          flips_ -= std::abs(it->second);
          it->second += delta;
          if (it->second == 0) {
            lamps_.erase(it);
          } else {
            flips_ += std::abs(it->second);
          }
        }
        break;
      }
      default: break;
    }
  }
  ++n_;
}

void LampWalk::run_to(long n) {
  while (n_ < n) step();
}

long LampWalk::length() const {
  int lo = std::min(0, pos_), hi = std::max(0, pos_);
  if (!lamps_.empty()) {
    lo = std::min(lo, lamps_.begin()->first);
    hi = std::max(hi, lamps_.rbegin()->first);
  }
  const long L = -static_cast<long>(lo);
  const long R = static_cast<long>(hi);
  return flips_ + 2 * L + 2 * R - std::abs(static_cast<long>(pos_));
}

GroupElement LampWalk::element() const {
  GroupElement g;
  g.shift = pos_;
  g.lamps.reserve(lamps_.size());
  for (auto& [site, val] : lamps_) g.lamps.push_back({site, val});
  return g;
}

} // namespace greenwalk
