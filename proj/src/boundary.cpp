#include "greenwalk/boundary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "greenwalk/errors.hpp"
#include "greenwalk/trajectory.hpp"

namespace greenwalk {

namespace {

void require_free(const GroupSpec& spec, const char* what) {
  if (!spec.is_free())
    throw CapabilityError(std::string(what) +
                          " is served on free groups (digit rays need a tree)");
}

} // namespace

BoundaryPoint BoundaryPoint::periodic(const GroupSpec& spec,
                                      const std::vector<std::int16_t>& pattern,
                                      int depth) {
  require_free(spec, "boundary point construction");
  if (pattern.empty()) throw ConfigError("boundary pattern must be nonempty");
  for (std::size_t i = 0; i + 1 < pattern.size(); ++i)
    if (pattern[i + 1] == (pattern[i] ^ 1))
      throw ConfigError("boundary pattern is not reduced");
  if (pattern.front() == (pattern.back() ^ 1))
    throw ConfigError("boundary pattern cancels across its period");
  BoundaryPoint xi;
  xi.digits.reserve(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i)
    xi.digits.push_back(pattern[static_cast<std::size_t>(i) % pattern.size()]);
  return xi;
}

BoundaryPoint BoundaryPoint::from_word(const GroupSpec& spec, const std::string& dotted,
                                       int repeat_to_depth) {
  require_free(spec, "boundary point construction");
  const GroupElement g = parse_element(spec, dotted);
  if (g.word.empty()) throw ConfigError("boundary word must be nonempty");
  if (repeat_to_depth > 0) return periodic(spec, g.word, repeat_to_depth);
  BoundaryPoint xi;
  xi.digits = g.word;
  return xi;
}

std::string BoundaryPoint::format(const GroupSpec& spec) const {
  GroupElement g;
  g.word = digits;
  return format_element(spec, g);
}

long common_prefix(const BoundaryPoint& a, const BoundaryPoint& b) {
  const std::size_t n = std::min(a.digits.size(), b.digits.size());
  std::size_t c = 0;
  while (c < n && a.digits[c] == b.digits[c]) ++c;
  return static_cast<long>(c);
}

long gromov2_elements(const GroupSpec& spec, const GroupElement& x,
                      const GroupElement& y, const GroupElement& base) {
  const GroupElement bx = multiply(spec, inverse(spec, base), x);
  const GroupElement by = multiply(spec, inverse(spec, base), y);
  const long dx = word_length(spec, bx);
  const long dy = word_length(spec, by);
  const long dxy = word_length(spec, multiply(spec, inverse(spec, bx), by));
  return dx + dy - dxy;
}

long gromov2_boundary(const BoundaryPoint& xi, const BoundaryPoint& eta) {
  const long c = common_prefix(xi, eta);
  if (c >= xi.depth() || c >= eta.depth())
    throw PrecisionError("boundary points agree to their full stored depth; "
                         "deepen them to separate the rays");
  return 2 * c;
}

long horofunction(const GroupSpec& spec, const BoundaryPoint& xi, const GroupElement& x) {
  require_free(spec, "horofunction evaluation");
  const long lx = static_cast<long>(x.word.size());
  if (xi.depth() < lx)
    throw PrecisionError("horofunction needs the ray at least as deep as |x| = " +
                         std::to_string(lx));
  long c = 0;
  while (c < lx && x.word[static_cast<std::size_t>(c)] == xi.digits[static_cast<std::size_t>(c)])
    ++c;
  return lx - 2 * c;
}

double horofunction_weighted(const GroupSpec& spec, const BoundaryPoint& xi,
                             const GroupElement& x, const Metric& metric) {
  require_free(spec, "horofunction evaluation");
  if (!metric.has_letter_costs())
    throw ConfigError("weighted horofunction needs a letter-cost metric");
  const long lx = static_cast<long>(x.word.size());
  if (xi.depth() < lx)
    throw PrecisionError("horofunction needs the ray at least as deep as |x|");
  double acc = 0.0;
  std::size_t c = 0;
  while (c < x.word.size() && x.word[c] == xi.digits[c]) {
    acc -= metric.letter_cost[static_cast<std::size_t>(x.word[c])];
    ++c;
  }
  for (std::size_t i = c; i < x.word.size(); ++i)
    acc += metric.letter_cost[static_cast<std::size_t>(x.word[i])];
  return acc;
}

BoundaryActionResult boundary_action(const GroupSpec& spec, const GroupElement& g,
                                     const BoundaryPoint& xi) {
  require_free(spec, "the boundary action");
  const long lg = static_cast<long>(g.word.size());
  if (xi.depth() <= lg)
    throw PrecisionError("boundary action by |g| = " + std::to_string(lg) +
                         " needs depth > |g|");
  BoundaryActionResult out;
  // reduce g . digits: cancellation eats a prefix of the ray
  std::size_t c = 0;
  while (c < g.word.size() &&
         xi.digits[c] == (g.word[g.word.size() - 1 - c] ^ 1))
    ++c;
  out.image.digits.reserve(g.word.size() - c + xi.digits.size() - c);
  for (std::size_t i = 0; i + c < g.word.size(); ++i) out.image.digits.push_back(g.word[i]);
  for (std::size_t i = c; i < xi.digits.size(); ++i) out.image.digits.push_back(xi.digits[i]);
  // h_xi(g^-1) = |g| - 2 cpl(g^-1, xi); the cancellation count above is
  // exactly that common prefix length
  out.busemann = lg - 2 * static_cast<long>(c);
  return out;
}

CocycleCase cocycle_case(const GroupSpec& spec, const GroupElement& g,
                         const BoundaryPoint& xi, const BoundaryPoint& eta) {
  CocycleCase out;
  const long before = gromov2_boundary(xi, eta);
  const GroupElement ginv = inverse(spec, g);
  const BoundaryActionResult axi = boundary_action(spec, ginv, xi);
  const BoundaryActionResult aeta = boundary_action(spec, ginv, eta);
  const long after = gromov2_boundary(axi.image, aeta.image);
  out.lhs2 = before - after;
  const long h_sum = horofunction(spec, xi, g) + horofunction(spec, eta, g);
  out.mine2 = -h_sum;
  out.quoted2 = 4 * h_sum;
  out.match_mine = (out.lhs2 == out.mine2);
  out.match_quoted = (out.lhs2 == out.quoted2);
  return out;
}

namespace {

// Shared four-point scan over a precomputed distance matrix. The word-metric
// version runs in doubled integers (exactness matters: the acceptance bar is
// "delta == 0", not "delta small").
template <typename T>
double delta_scan(const std::vector<T>& dist2, std::size_t n, int threads,
                  std::uint64_t& tuples, bool& exact_zero) {
  std::atomic<long> next_base{0};
  std::vector<T> maxima(std::max(1, threads), T(0));
  auto worker = [&](int tid) {
    T local = 0;
    for (;;) {
      const long wbase = next_base.fetch_add(1);
      if (wbase >= static_cast<long>(n)) break;
      const std::size_t w = static_cast<std::size_t>(wbase);
      const T* dw = dist2.data() + w * n;
      for (std::size_t x = 0; x < n; ++x) {
        const T* dx = dist2.data() + x * n;
        for (std::size_t y = x + 1; y < n; ++y) {
          const T* dy = dist2.data() + y * n;
          const T pxy = dw[x] + dw[y] - dx[y];
          T best = std::numeric_limits<T>::lowest();
          for (std::size_t z = 0; z < n; ++z) {
            const T pxz = dw[x] + dw[z] - dx[z];
            const T pzy = dw[z] + dw[y] - dy[z];
            const T m = pxz < pzy ? pxz : pzy;
            if (m > best) best = m;
          }
          const T gap = best - pxy;
          if (gap > local) local = gap;
        }
      }
    }
    maxima[static_cast<std::size_t>(tid)] = local;
  };
  const int nt = std::max(1, threads);
  if (nt == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < nt; ++tid) pool.emplace_back(worker, tid);
    for (auto& th : pool) th.join();
  }
  T overall = 0;
  for (const T m : maxima) overall = std::max(overall, m);
  tuples = static_cast<std::uint64_t>(n) * n * (n - 1) / 2 * n;
  exact_zero = (overall == T(0));
  return static_cast<double>(overall) / 4.0; // doubled products, halved delta
}

} // namespace

DeltaReport hyperbolicity_delta_word(const GroupSpec& spec,
                                     const std::vector<GroupElement>& points,
                                     int threads) {
  const std::size_t n = points.size();
  if (n < 4) throw ConfigError("hyperbolicity scan needs at least 4 points");
  if (n > 4000) throw ResourceError("hyperbolicity scan capped at 4000 points");
  std::vector<std::int32_t> dist2(n * n, 0);
  if (spec.is_free()) {
    // tree distance via common prefixes, no multiplication needed
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const auto& a = points[i].word;
        const auto& b = points[j].word;
        std::size_t c = 0;
        while (c < a.size() && c < b.size() && a[c] == b[c]) ++c;
        const auto d = static_cast<std::int32_t>(a.size() + b.size() - 2 * c);
        dist2[i * n + j] = 2 * d;
        dist2[j * n + i] = 2 * d;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const GroupElement inv_i = inverse(spec, points[i]);
      for (std::size_t j = i; j < n; ++j) {
        const auto d =
            static_cast<std::int32_t>(word_length(spec, multiply(spec, inv_i, points[j])));
        dist2[i * n + j] = 2 * d;
        dist2[j * n + i] = 2 * d;
      }
    }
  }
  DeltaReport rep;
  rep.points = n;
  const int nt = threads > 0 ? threads
                             : static_cast<int>(std::thread::hardware_concurrency());
  rep.delta = delta_scan<std::int32_t>(dist2, n, std::max(1, nt), rep.tuples, rep.exact_zero);
  return rep;
}

DeltaReport hyperbolicity_delta(const GroupSpec& spec,
                                const std::vector<GroupElement>& points,
                                const std::function<double(const GroupElement&,
                                                           const GroupElement&)>& dist,
                                int threads) {
  const std::size_t n = points.size();
  if (n < 4) throw ConfigError("hyperbolicity scan needs at least 4 points");
  if (n > 4000) throw ResourceError("hyperbolicity scan capped at 4000 points");
  std::vector<double> dist2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double d = 2.0 * dist(points[i], points[j]);
      dist2[i * n + j] = d;
      dist2[j * n + i] = d;
    }
  DeltaReport rep;
  rep.points = n;
  const int nt = threads > 0 ? threads
                             : static_cast<int>(std::thread::hardware_concurrency());
  rep.delta = delta_scan<double>(dist2, n, std::max(1, nt), rep.tuples, rep.exact_zero);
  rep.exact_zero = false; // float path never claims exactness
  return rep;
}

RayReport ray_convergence(const GroupSpec& spec, const StepDistribution& mu,
                          long n, int prefix_depth, std::uint64_t seed,
                          std::uint64_t trajectory) {
  require_free(spec, "ray convergence tracking");
  WordWalk walk(spec, mu);
  walk.reset(seed, trajectory);
  RayReport rep;
  std::vector<std::int16_t> prefix;
  long last_change = 0;
  for (long k = 1; k <= n; ++k) {
    walk.step();
    const auto& w = walk.word();
    const std::size_t take =
        std::min(w.size(), static_cast<std::size_t>(prefix_depth));
    if (prefix.size() != take ||
        !std::equal(prefix.begin(), prefix.end(), w.begin())) {
      prefix.assign(w.begin(), w.begin() + static_cast<long>(take));
      last_change = k;
    }
  }
  rep.prefix = prefix;
  rep.final_length = walk.length();
  rep.first_stable_step = last_change;
  rep.stabilized = static_cast<int>(prefix.size()) == prefix_depth &&
                   last_change <= n / 2;
  return rep;
}

BusemannTrace busemann_vs_distance(const GroupSpec& spec, const StepDistribution& mu,
                                   long n, std::uint64_t seed, std::uint64_t trajectory) {
  require_free(spec, "Busemann tracking");
  WordWalk walk(spec, mu);
  walk.reset(seed, trajectory);
  std::vector<std::vector<std::int16_t>> snapshots;
  const long stride = std::max<long>(1, n / 64);
  std::vector<long> ks;
  for (long k = 1; k <= n; ++k) {
    walk.step();
    if (k % stride == 0 && k <= n / 2) {
      ks.push_back(k);
      snapshots.push_back(walk.word());
    }
  }
  BoundaryPoint xi;
  xi.digits = walk.word();
  BusemannTrace tr;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    GroupElement z;
    z.word = snapshots[i];
    if (xi.depth() < static_cast<int>(z.word.size())) continue; // walk ended short
    tr.checkpoints.push_back(ks[i]);
    tr.horo.push_back(horofunction(spec, xi, z));
    tr.minus_d.push_back(-static_cast<long>(z.word.size()));
  }
  return tr;
}

} // namespace greenwalk
