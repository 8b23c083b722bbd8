#include "greenwalk/group.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "greenwalk/errors.hpp"

namespace greenwalk {

namespace {

constexpr int kLampT = 0;
constexpr int kLampTInv = 1;
constexpr int kLampA = 2;
constexpr int kLampAInv = 3;

int parse_positive_int(const std::string& s, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v <= 0)
    throw ConfigError(std::string("invalid ") + what + ": '" + s + "'");
  return v;
}

// letter block layout for free products: factor i owns the contiguous ids
// [base(i), base(i) + orders[i] - 1), id base(i) + (e-1) meaning a_i^e
int fp_base(const std::vector<int>& orders, int factor) {
  int b = 0;
  for (int i = 0; i < factor; ++i) b += orders[i] - 1;
  return b;
}

} // namespace

GroupSpec GroupSpec::parse(const std::string& text) {
  GroupSpec spec;
  if (text == "zwrz") {
    spec.kind = GroupKind::lamplighter;
    return spec;
  }
  auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "free") {
    if (colon == std::string::npos)
      throw ConfigError("free group needs a rank, e.g. free:2");
    spec.kind = GroupKind::free_group;
    spec.rank = parse_positive_int(text.substr(colon + 1), "free rank");
    if (spec.rank < 2 || spec.rank > 26)
      throw ConfigError("free rank must be in [2, 26]");
    return spec;
  }
  if (head == "freeprod") {
    if (colon == std::string::npos)
      throw ConfigError("free product needs factor orders, e.g. freeprod:2,3");
    spec.kind = GroupKind::free_product;
    std::stringstream ss(text.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ','))
      spec.orders.push_back(parse_positive_int(tok, "factor order"));
    if (spec.orders.size() < 2 || spec.orders.size() > 26)
      throw ConfigError("free product needs between 2 and 26 factors");
    int degree = 0;
    for (int n : spec.orders) {
      if (n < 2) throw ConfigError("free product factor orders must be >= 2");
      degree += (n == 2) ? 1 : 2;
    }
    if (degree < 3)
      throw ConfigError("free product is elementary (Cayley degree < 3); "
                        "use larger factors");
    return spec;
  }
  throw ConfigError("unknown group '" + text + "' (expected free:k, freeprod:n1,n2,..., zwrz)");
}

std::string GroupSpec::to_string() const {
  switch (kind) {
    case GroupKind::free_group:
      return "free:" + std::to_string(rank);
    case GroupKind::lamplighter:
      return "zwrz";
    case GroupKind::free_product: {
      std::string s = "freeprod:";
      for (std::size_t i = 0; i < orders.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(orders[i]);
      }
      return s;
    }
  }
  return {};
}

int GroupSpec::letter_count() const {
  switch (kind) {
    case GroupKind::free_group: return 2 * rank;
    case GroupKind::lamplighter: return 4;
    case GroupKind::free_product: return fp_base(orders, static_cast<int>(orders.size()));
  }
  return 0;
}

int GroupSpec::letter_inverse(int s) const {
  if (kind == GroupKind::free_group || kind == GroupKind::lamplighter) return s ^ 1;
  const int f = letter_factor(s);
  const int b = fp_base(orders, f);
  const int e = s - b + 1;
  return b + (orders[f] - e) - 1;
}

int GroupSpec::letter_factor(int s) const {
  if (kind == GroupKind::free_group) return s / 2;
  if (kind == GroupKind::lamplighter) return s / 2;
  int b = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const int width = orders[i] - 1;
    if (s < b + width) return static_cast<int>(i);
    b += width;
  }
  throw ConfigError("letter id out of range");
}

int GroupSpec::letter_weight(int s) const {
  if (kind != GroupKind::free_product) return 1;
  const int f = letter_factor(s);
  const int e = s - fp_base(orders, f) + 1;
  return std::min(e, orders[f] - e);
}

std::string GroupSpec::letter_label(int s) const {
  if (kind == GroupKind::lamplighter) {
    static const char* names[4] = {"t", "t-", "a", "a-"};
    return names[s];
  }
  if (kind == GroupKind::free_group) {
    std::string out(1, static_cast<char>('a' + s / 2));
    if (s & 1) out += '-';
    return out;
  }
  const int f = letter_factor(s);
  const int n = orders[f];
  const int e = s - fp_base(orders, f) + 1;
  std::string out(1, static_cast<char>('a' + f));
  // canonical spelling: the short way around the cycle, so labels come in
  // formally inverse pairs (a^2 and a-^2 in Z/5, etc.)
  if (2 * e <= n) {
    if (e > 1) out += "^" + std::to_string(e);
  } else {
    out += '-';
    if (n - e > 1) out += "^" + std::to_string(n - e);
  }
  return out;
}

int GroupSpec::parse_letter(const std::string& token) const {
  if (token.empty()) throw ConfigError("empty letter token");
  const char c = token[0];
  std::size_t pos = 1;
  bool inv = false;
  if (pos < token.size() && token[pos] == '-') {
    inv = true;
    ++pos;
  }
  int exp = 1;
  if (pos < token.size() && token[pos] == '^') {
    const std::string rest = token.substr(pos + 1);
    exp = parse_positive_int(rest, "letter exponent");
    pos = token.size();
  }
  if (pos != token.size())
    throw ConfigError("malformed letter token '" + token + "'");

  if (kind == GroupKind::lamplighter) {
    if (exp != 1) throw ConfigError("lamplighter letters take no exponent");
    if (c == 't') return inv ? kLampTInv : kLampT;
    if (c == 'a') return inv ? kLampAInv : kLampA;
    throw ConfigError("unknown lamplighter letter '" + token + "'");
  }
  if (kind == GroupKind::free_group) {
    const int g = c - 'a';
    if (g < 0 || g >= rank) throw ConfigError("unknown generator '" + token + "'");
    if (exp != 1) throw ConfigError("free-group letters take no exponent");
    return 2 * g + (inv ? 1 : 0);
  }
  const int f = c - 'a';
  if (f < 0 || f >= static_cast<int>(orders.size()))
    throw ConfigError("unknown factor letter '" + token + "'");
  const int n = orders[f];
  int e = inv ? (n - exp) : exp;
  e = ((e % n) + n) % n;
  if (e == 0) throw ConfigError("letter token '" + token + "' is the identity");
  return fp_base(orders, f) + e - 1;
}

std::vector<int> GroupSpec::generator_letters() const {
  std::vector<int> out;
  if (kind == GroupKind::free_group || kind == GroupKind::lamplighter) {
    for (int s = 0; s < letter_count(); ++s) out.push_back(s);
    return out;
  }
  for (std::size_t f = 0; f < orders.size(); ++f) {
    const int b = fp_base(orders, static_cast<int>(f));
    out.push_back(b); // exponent 1
    if (orders[f] > 2) out.push_back(b + orders[f] - 2); // exponent n-1
  }
  return out;
}

std::size_t ElementHash::operator()(const GroupElement& g) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  auto mixin = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  };
  for (auto s : g.word) mixin(static_cast<std::uint64_t>(s) + 1);
  for (auto& [site, val] : g.lamps) {
    mixin(static_cast<std::uint64_t>(static_cast<std::uint32_t>(site)));
    mixin(static_cast<std::uint64_t>(static_cast<std::uint32_t>(val)) << 1);
  }
  mixin(static_cast<std::uint64_t>(static_cast<std::uint32_t>(g.shift)) << 2);
  return h;
}

GroupElement identity_element() { return GroupElement{}; }

bool is_identity(const GroupElement& g) {
  return g.word.empty() && g.lamps.empty() && g.shift == 0;
}

namespace {

void lamp_apply(GroupElement& g, int letter) {
  switch (letter) {
    case kLampT: ++g.shift; return;
    case kLampTInv: --g.shift; return;
    case kLampA:
    case kLampAInv: {
      const int delta = (letter == kLampA) ? 1 : -1;
      auto it = std::lower_bound(g.lamps.begin(), g.lamps.end(),
                                 std::make_pair(g.shift, 0),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
      if (it != g.lamps.end() && it->first == g.shift) {
        it->second += delta;
        if (it->second == 0) g.lamps.erase(it);
      } else {
        g.lamps.insert(it, {g.shift, delta});
      }
      return;
    }
    default:
      throw ConfigError("invalid lamplighter letter id");
  }
}

void word_apply(const GroupSpec& spec, GroupElement& g, int letter) {
  auto& w = g.word;
  if (spec.kind == GroupKind::free_group) {
    if (!w.empty() && w.back() == static_cast<std::int16_t>(letter ^ 1)) {
      w.pop_back();
    } else {
      w.push_back(static_cast<std::int16_t>(letter));
    }
    return;
  }
  // free product: merge with the top syllable when factors coincide
  if (!w.empty() && spec.letter_factor(w.back()) == spec.letter_factor(letter)) {
    const int f = spec.letter_factor(letter);
    const int b = fp_base(spec.orders, f);
    const int n = spec.orders[f];
    const int e = ((w.back() - b + 1) + (letter - b + 1)) % n;
    w.pop_back();
    if (e != 0) w.push_back(static_cast<std::int16_t>(b + e - 1));
    return;
  }
  w.push_back(static_cast<std::int16_t>(letter));
}

} // namespace

void apply_letter_inplace(const GroupSpec& spec, GroupElement& g, int letter) {
  if (letter < 0 || letter >= spec.letter_count())
    throw ConfigError("letter id out of range");
  if (spec.is_lamplighter()) {
    lamp_apply(g, letter);
  } else {
    word_apply(spec, g, letter);
  }
}

GroupElement apply_letter(const GroupSpec& spec, const GroupElement& g, int letter) {
  GroupElement out = g;
  apply_letter_inplace(spec, out, letter);
  return out;
}

GroupElement from_letters(const GroupSpec& spec, const std::vector<int>& letters) {
  GroupElement g;
  for (int s : letters) apply_letter_inplace(spec, g, s);
  return g;
}

GroupElement multiply(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
  if (spec.is_lamplighter()) {
    GroupElement out;
    out.shift = a.shift + b.shift;
    out.lamps = a.lamps;
    for (auto& [site, val] : b.lamps) {
      const int s = site + a.shift;
      auto it = std::lower_bound(out.lamps.begin(), out.lamps.end(),
                                 std::make_pair(s, 0),
                                 [](const auto& x, const auto& y) { return x.first < y.first; });
      if (it != out.lamps.end() && it->first == s) {
        it->second += val;
        if (it->second == 0) out.lamps.erase(it);
      } else {
        out.lamps.insert(it, {s, val});
      }
    }
    return out;
  }
  GroupElement out = a;
  for (auto s : b.word) word_apply(spec, out, s);
  return out;
}

GroupElement inverse(const GroupSpec& spec, const GroupElement& g) {
  GroupElement out;
  if (spec.is_lamplighter()) {
    out.shift = -g.shift;
    out.lamps.reserve(g.lamps.size());
    for (auto& [site, val] : g.lamps) out.lamps.push_back({site - g.shift, -val});
    std::sort(out.lamps.begin(), out.lamps.end());
    return out;
  }
  out.word.reserve(g.word.size());
  for (auto it = g.word.rbegin(); it != g.word.rend(); ++it)
    out.word.push_back(static_cast<std::int16_t>(spec.letter_inverse(*it)));
  return out;
}

bool commutes(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
  return multiply(spec, a, b) == multiply(spec, b, a);
}

long word_length(const GroupSpec& spec, const GroupElement& g) {
  if (spec.is_lamplighter()) {
    long flips = 0;
    int lo = 0, hi = 0;
    for (auto& [site, val] : g.lamps) {
      flips += std::abs(val);
      lo = std::min(lo, site);
      hi = std::max(hi, site);
    }
    lo = std::min(lo, g.shift);
    hi = std::max(hi, g.shift);
    // tour the touched interval [lo, hi] from 0 and stop at the final
    // position: 2L + 2R - |shift| with L = -lo, R = hi
    const long L = -static_cast<long>(lo);
    const long R = static_cast<long>(hi);
    return flips + 2 * L + 2 * R - std::abs(static_cast<long>(g.shift));
  }
  if (spec.kind == GroupKind::free_group) return static_cast<long>(g.word.size());
  long len = 0;
  for (auto s : g.word) len += spec.letter_weight(s);
  return len;
}

std::string format_element(const GroupSpec& spec, const GroupElement& g) {
  if (is_identity(g)) return "e";
  if (spec.is_lamplighter()) {
    std::string out = "L{";
    for (std::size_t i = 0; i < g.lamps.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(g.lamps[i].first) + ":" + std::to_string(g.lamps[i].second);
    }
    out += "}|" + std::to_string(g.shift);
    return out;
  }
  std::string out;
  for (std::size_t i = 0; i < g.word.size(); ++i) {
    if (i) out += '.';
    out += spec.letter_label(g.word[i]);
  }
  return out;
}

GroupElement parse_element(const GroupSpec& spec, const std::string& text) {
  if (text == "e" || text.empty()) return identity_element();
  if (spec.is_lamplighter() && text.size() >= 2 && text[0] == 'L' && text[1] == '{') {
    const auto close = text.find('}');
    const auto bar = text.find('|');
    if (close == std::string::npos || bar == std::string::npos || bar < close)
      throw ConfigError("malformed lamplighter element '" + text + "'");
    GroupElement g;
    const std::string body = text.substr(2, close - 2);
    if (!body.empty()) {
      std::stringstream ss(body);
      std::string pair;
      while (std::getline(ss, pair, ',')) {
        const auto sep = pair.find(':');
        if (sep == std::string::npos)
          throw ConfigError("malformed lamp entry '" + pair + "'");
        const int site = std::stoi(pair.substr(0, sep));
        const int val = std::stoi(pair.substr(sep + 1));
        if (val == 0) throw ConfigError("lamp values must be nonzero");
        g.lamps.push_back({site, val});
      }
    }
    std::sort(g.lamps.begin(), g.lamps.end());
    for (std::size_t i = 1; i < g.lamps.size(); ++i)
      if (g.lamps[i].first == g.lamps[i - 1].first)
        throw ConfigError("repeated lamp site in '" + text + "'");
    g.shift = std::stoi(text.substr(bar + 1));
    return g;
  }
  GroupElement g;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, '.'))
    apply_letter_inplace(spec, g, spec.parse_letter(tok));
  return g;
}

bool element_less(const GroupSpec& spec, const GroupElement& a, const GroupElement& b) {
  const long la = word_length(spec, a), lb = word_length(spec, b);
  if (la != lb) return la < lb;
  if (a.word != b.word) return a.word < b.word;
  if (a.shift != b.shift) return a.shift < b.shift;
  return a.lamps < b.lamps;
}

BallResult ball(const GroupSpec& spec, int radius, std::size_t cap) {
  if (radius < 0) throw ConfigError("ball radius must be >= 0");
  if (spec.is_lamplighter() && radius > 8)
    throw CapabilityError("lamplighter balls are served up to radius 8 "
                          "(exponential growth; use trajectory statistics instead)");
  BallResult out;
  std::unordered_set<GroupElement, ElementHash> seen;
  out.elements.push_back(identity_element());
  seen.insert(identity_element());
  out.level_offsets.push_back(0);
  const auto gens = spec.generator_letters();
  std::size_t lo = 0, hi = 1;
  for (int r = 1; r <= radius; ++r) {
    out.level_offsets.push_back(out.elements.size());
    for (std::size_t i = lo; i < hi; ++i) {
      const GroupElement src = out.elements[i]; // copy: vector may reallocate
      for (int s : gens) {
        GroupElement nb = apply_letter(spec, src, s);
        if (seen.insert(nb).second) {
          if (out.elements.size() >= cap)
            throw ResourceError("ball exceeds the support cap of " + std::to_string(cap));
          out.elements.push_back(std::move(nb));
        }
      }
    }
    lo = hi;
    hi = out.elements.size();
  }
  out.level_offsets.push_back(out.elements.size());
  return out;
}

} // namespace greenwalk
