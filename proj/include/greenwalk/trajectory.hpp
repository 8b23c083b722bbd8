#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/rng.hpp"

namespace greenwalk {

/**
 * Letter-level random walk on a word kind (free group or free product).
 * Keeps the reduced word of Z_n incrementally plus two running lengths:
 * the integer word length and an optional weighted length with per-letter
 * costs (used for the Green word metric). Step s of trajectory j under seed
 * q always consumes the same random draw, no matter how work is scheduled.
 */
class WordWalk {
public:
  WordWalk(const GroupSpec& spec, const StepDistribution& mu,
           std::vector<double> letter_cost = {});

  void reset(std::uint64_t seed, std::uint64_t trajectory);
  void step();
  void run_to(long n);

  long steps() const { return n_; }
  const std::vector<std::int16_t>& word() const { return word_; }
  long length() const { return length_; }
  double weighted_length() const { return wlength_; }
  int last_support_index() const { return last_idx_; }
  GroupElement element() const;

private:
  GroupSpec spec_;
  std::vector<std::vector<std::int16_t>> support_words_;
  DiscreteSampler sampler_;
  std::vector<double> cost_;
  bool weighted_ = false;
  SplitRng rng_;
  long n_ = 0;
  int last_idx_ = -1;
  std::vector<std::int16_t> word_;
  long length_ = 0;
  double wlength_ = 0.0;

  void push_letter(int s);
};

/**
 * Random walk on the lamplighter group. Lamp configuration lives in an
 * ordered map so the word length (lamp flips plus the optimal tour over the
 * touched interval) is available in O(1) at any checkpoint.
 */
class LampWalk {
public:
  LampWalk(const GroupSpec& spec, const StepDistribution& mu);

  void reset(std::uint64_t seed, std::uint64_t trajectory);
  void step();
  void run_to(long n);

  long steps() const { return n_; }
  long length() const;
  GroupElement element() const;

private:
  GroupSpec spec_;
  std::vector<std::vector<std::int16_t>> support_words_;
  DiscreteSampler sampler_;
  SplitRng rng_;
  long n_ = 0;
  std::map<int, int> lamps_;
  int pos_ = 0;
  long flips_ = 0;
};

} // namespace greenwalk
