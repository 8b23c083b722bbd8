#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace greenwalk {

enum class GroupKind { free_group, free_product, lamplighter };

/**
 * Static description of one of the supported groups:
 *
 *   free_group    F_k, k >= 2, letters a, a-, b, b-, ...
 *   free_product  Z/n1 * Z/n2 * ... with letters a, a^2, ..., one block per
 *                 factor; a syllable a^e costs min(e, n-e) generator steps
 *   lamplighter   Z wr Z with walker letters t, t- and lamp letters a, a-
 *
 * Letters are small integer ids; the tables below translate between ids,
 * labels, inverses and word-length contributions.
 */
struct GroupSpec {
  GroupKind kind = GroupKind::free_group;
  int rank = 2;             // free_group only
  std::vector<int> orders;  // free_product factor orders, each >= 2

  /// Parses "free:k", "freeprod:n1,n2,...", "zwrz". Throws ConfigError.
  static GroupSpec parse(const std::string& text);
  std::string to_string() const;

  bool is_free() const { return kind == GroupKind::free_group; }
  bool is_free_product() const { return kind == GroupKind::free_product; }
  bool is_lamplighter() const { return kind == GroupKind::lamplighter; }
  /// True when reduced words index the group elements (free or free product).
  bool is_word_kind() const { return !is_lamplighter(); }

  int letter_count() const;
  int letter_inverse(int s) const;
  int letter_factor(int s) const;
  int letter_weight(int s) const;
  std::string letter_label(int s) const;
  int parse_letter(const std::string& token) const;

  /// The standard single-step generating set (letter ids), inverse-closed.
  std::vector<int> generator_letters() const;
};

/**
 * A group element. Word kinds store the reduced letter word; the lamplighter
 * stores its state directly: sorted (site, value) pairs with nonzero values
 * plus the walker position. Exactly one representation is populated.
 */
struct GroupElement {
  std::vector<std::int16_t> word;
  std::vector<std::pair<std::int32_t, std::int32_t>> lamps;
  std::int32_t shift = 0;

  bool operator==(const GroupElement&) const = default;
};

struct ElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept;
};

GroupElement identity_element();
bool is_identity(const GroupElement& g);

/// Right multiplication by a single letter, with reduction.
GroupElement apply_letter(const GroupSpec& spec, const GroupElement& g, int letter);
/// In-place variant used by hot loops.
void apply_letter_inplace(const GroupSpec& spec, GroupElement& g, int letter);

GroupElement from_letters(const GroupSpec& spec, const std::vector<int>& letters);
GroupElement multiply(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupSpec& spec, const GroupElement& g);
bool commutes(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);

long word_length(const GroupSpec& spec, const GroupElement& g);

/// Dotted token form, e.g. "a.b.a-"; identity prints as "e". Lamplighter
/// elements use the state form "L{site:value,...}|shift".
std::string format_element(const GroupSpec& spec, const GroupElement& g);
GroupElement parse_element(const GroupSpec& spec, const std::string& text);

/// Deterministic total order used to canonicalize measure supports and
/// report rows: by word length, then letters, then lamplighter state.
bool element_less(const GroupSpec& spec, const GroupElement& a, const GroupElement& b);

struct BallResult {
  std::vector<GroupElement> elements;   // BFS order, identity first
  std::vector<std::size_t> level_offsets; // level_offsets[r] = first index at distance r
};

/**
 * Closed ball of the word metric via BFS over generator_letters().
 * Lamplighter balls are served up to radius 8 only (CapabilityError above);
 * any ball larger than `cap` elements raises ResourceError.
 */
BallResult ball(const GroupSpec& spec, int radius, std::size_t cap = 5'000'000);

} // namespace greenwalk
