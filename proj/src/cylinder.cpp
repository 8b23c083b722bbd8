#include "greenwalk/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "greenwalk/boundary.hpp"
#include "greenwalk/errors.hpp"
#include "greenwalk/trajectory.hpp"

namespace greenwalk {

namespace {

void require_free(const GroupSpec& spec, const char* what) {
  if (!spec.is_free())
    throw CapabilityError(std::string(what) +
                          " needs a free group (cylinder cells index tree rays)");
}

// reduced concatenation a . b for free-group words
std::vector<std::int16_t> reduce_concat(const std::vector<std::int16_t>& a,
                                        const std::int16_t* b, std::size_t blen) {
  std::vector<std::int16_t> out = a;
  for (std::size_t i = 0; i < blen; ++i) {
    const std::int16_t s = b[i];
    if (!out.empty() && out.back() == (s ^ 1)) {
      out.pop_back();
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<std::int16_t> invert_word(const std::vector<std::int16_t>& w) {
  std::vector<std::int16_t> out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back(static_cast<std::int16_t>(*it ^ 1));
  return out;
}

// weighted horofunction increment h_w(g) for |g| <= |w|, letter costs `cost`
double horo_against_prefix(const std::vector<std::int16_t>& g,
                           const std::vector<std::int16_t>& w,
                           const std::vector<double>& cost) {
  std::size_t c = 0;
  while (c < g.size() && c < w.size() && g[c] == w[c]) ++c;
  double acc = 0.0;
  for (std::size_t i = 0; i < c; ++i) acc -= cost[static_cast<std::size_t>(g[i])];
  for (std::size_t i = c; i < g.size(); ++i) acc += cost[static_cast<std::size_t>(g[i])];
  return acc;
}

} // namespace

CylinderBasis::CylinderBasis(const GroupSpec& spec, int depth)
    : spec_(spec), depth_(depth) {
  require_free(spec, "a cylinder basis");
  if (depth < 0) throw ConfigError("cylinder depth must be >= 0");
  idx_ = std::make_shared<FreeWordIndex>(spec.rank, depth);
}

std::size_t CylinderBasis::cell_of(const std::int16_t* word, std::size_t len) const {
  if (static_cast<int>(len) != depth_)
    throw ConfigError("cylinder cell word has the wrong depth");
  const std::size_t i = idx_->index_of(word, len);
  // index_of tracks cancellations, so a non-reduced word of the right length
  // lands at a shallower level instead of npos; reject both shapes here
  if (i == FreeWordIndex::npos || i < idx_->level_begin(depth_))
    throw ConfigError("word is not reduced");
  return i - idx_->level_begin(depth_);
}

std::size_t CylinderBasis::cell_of(const std::vector<std::int16_t>& word) const {
  return cell_of(word.data(), word.size());
}

std::vector<std::int16_t> CylinderBasis::word_of(std::size_t cell) const {
  return idx_->word_of(idx_->level_begin(depth_) + cell);
}

double CylinderFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

CylinderFunction make_cylinder_function(const GroupSpec& spec, int depth,
                                        std::vector<double> values) {
  CylinderFunction phi;
  phi.basis = std::make_shared<CylinderBasis>(spec, depth);
  if (values.empty()) {
    phi.values.assign(phi.basis->count(), 0.0);
  } else {
    if (values.size() != phi.basis->count())
      throw ConfigError("cylinder value vector has the wrong size");
    phi.values = std::move(values);
  }
  return phi;
}

double StationaryMeasure::mass_prefix(const std::int16_t* word, std::size_t len) const {
  if (static_cast<int>(len) > depth)
    throw PrecisionError("cylinder measure stored to depth " + std::to_string(depth) +
                         " only");
  const std::size_t i = idx->index_of(word, len);
  if (i == FreeWordIndex::npos || idx->level_of(i) != static_cast<int>(len))
    throw ConfigError("word is not reduced");
  return level_mass[len][i - idx->level_begin(static_cast<int>(len))];
}

double StationaryMeasure::mass_prefix(const std::vector<std::int16_t>& word) const {
  return mass_prefix(word.data(), word.size());
}

double StationaryMeasure::integrate(const CylinderFunction& phi) const {
  const int d = phi.depth();
  if (d > depth) throw PrecisionError("measure too shallow for this integrand");
  const auto& mass = level_mass[static_cast<std::size_t>(d)];
  double acc = 0.0;
  for (std::size_t c = 0; c < mass.size(); ++c) acc += mass[c] * phi.values[c];
  return acc;
}

std::vector<std::int16_t> StationaryMeasure::sample_ray(int target_depth,
                                                        SplitRng& rng) const {
  std::vector<std::int16_t> w;
  w.reserve(static_cast<std::size_t>(target_depth));
  const int deg = 2 * spec.rank;
  // exact sequential sampling down to `depth`
  std::size_t node = 0;
  for (int l = 0; l < std::min(depth, target_depth); ++l) {
    const double denom = level_mass[static_cast<std::size_t>(l)]
                                   [node - idx->level_begin(l)];
    const double u = rng.unit() * denom;
    double acc = 0.0;
    int chosen = -1;
    std::size_t chosen_node = 0;
    for (int s = 0; s < deg; ++s) {
      if (!w.empty() && s == (w.back() ^ 1)) continue;
      const std::size_t child = idx->step(node, l, s);
      const double m = level_mass[static_cast<std::size_t>(l + 1)]
                                 [child - idx->level_begin(l + 1)];
      acc += m;
      if (u < acc) {
        chosen = s;
        chosen_node = child;
        break;
      }
    }
    if (chosen < 0) throw NumericError("cylinder sampling ran out of mass");
    w.push_back(static_cast<std::int16_t>(chosen));
    node = chosen_node;
  }
  // extend with the deepest stored conditionals (order depth-1)
  std::vector<std::int16_t> window;
  while (static_cast<int>(w.size()) < target_depth) {
    window.assign(w.end() - (depth - 1), w.end());
    const double denom = mass_prefix(window);
    if (!(denom > 0.0)) throw NumericError("cylinder sampling hit a null window");
    const double u = rng.unit() * denom;
    double acc = 0.0;
    int chosen = -1;
    for (int s = 0; s < deg; ++s) {
      if (s == (w.back() ^ 1)) continue;
      window.push_back(static_cast<std::int16_t>(s));
      acc += mass_prefix(window);
      window.pop_back();
      if (u < acc) {
        chosen = s;
        break;
      }
    }
    if (chosen < 0) throw NumericError("cylinder sampling ran out of mass");
    w.push_back(static_cast<std::int16_t>(chosen));
  }
  return w;
}

namespace {

// builds all coarser levels of a measure from its deepest level
std::vector<std::vector<double>> marginalize_levels(const FreeWordIndex& idx, int top,
                                                    std::vector<double> deepest) {
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(top) + 1);
  levels[static_cast<std::size_t>(top)] = std::move(deepest);
  for (int l = top; l >= 1; --l) {
    const std::size_t width = (l == 1) ? static_cast<std::size_t>(2 * idx.rank())
                                       : static_cast<std::size_t>(2 * idx.rank() - 1);
    std::vector<double> up(idx.level_count(l - 1), 0.0);
    const auto& cur = levels[static_cast<std::size_t>(l)];
    for (std::size_t p = 0; p < up.size(); ++p) {
      double acc = 0.0;
      for (std::size_t c = 0; c < width; ++c) acc += cur[p * width + c];
      up[p] = acc;
    }
    levels[static_cast<std::size_t>(l - 1)] = std::move(up);
  }
  return levels;
}

} // namespace

StationaryMeasure solve_stationary(const GroupSpec& spec, const StepDistribution& mu,
                                   int m, double tol, int max_iter) {
  require_free(spec, "the stationary cylinder solve");
  require_admissible(mu, false, true);
  if (m < 1) throw ConfigError("stationary depth must be >= 1");
  const int L = mu.max_word_length();
  if (L < 1) throw ConfigError("measure concentrated on the identity");
  const int W = std::max(m + L, 2 * L + 1);

  StationaryMeasure nu;
  nu.spec = spec;
  nu.depth = W;
  nu.idx = std::make_shared<FreeWordIndex>(spec.rank, W);
  nu.source = "solved";
  const FreeWordIndex& idx = *nu.idx;

  const std::size_t top_count = idx.level_count(W);
  std::vector<double> top(top_count, 1.0 / static_cast<double>(top_count));
  nu.level_mass = marginalize_levels(idx, W, top);

  std::vector<std::vector<std::int16_t>> ginv_words;
  for (const auto& g : mu.support) ginv_words.push_back(invert_word(g.word));

  const int push_depth = W - L;
  const std::size_t push_count = idx.level_count(push_depth);
  std::vector<double> pushed(push_count);
  const int deg = 2 * spec.rank;

  for (nu.iterations = 1; nu.iterations <= max_iter; ++nu.iterations) {
    // push-forward: (mu * nu)([w]) = sum_g mu(g) nu([g^-1 w]), exact at
    // depth W - L because cancellation cannot reach past w
    for (std::size_t c = 0; c < push_count; ++c) {
      const std::vector<std::int16_t> w =
          idx.word_of(idx.level_begin(push_depth) + c);
      double acc = 0.0;
      for (std::size_t j = 0; j < mu.support.size(); ++j) {
        const std::vector<std::int16_t> gw =
            reduce_concat(ginv_words[j], w.data(), w.size());
        acc += mu.weight[j] * nu.mass_prefix(gw);
      }
      pushed[c] = acc;
    }
    auto pushed_levels = marginalize_levels(idx, push_depth, pushed);

    // stationarity defect at the requested depth
    double res = 0.0;
    for (std::size_t c = 0; c < idx.level_count(m); ++c)
      res += std::abs(pushed_levels[static_cast<std::size_t>(m)][c] -
                      nu.level_mass[static_cast<std::size_t>(m)][c]);
    nu.residual = 0.5 * res;

    // re-extend to depth W with the pushed measure's own deepest conditionals
    std::vector<std::vector<double>> next(static_cast<std::size_t>(W) + 1);
    for (int l = 0; l <= push_depth; ++l)
      next[static_cast<std::size_t>(l)] = pushed_levels[static_cast<std::size_t>(l)];
    for (int l = push_depth; l < W; ++l) {
      const auto& cur = next[static_cast<std::size_t>(l)];
      std::vector<double> deeper(idx.level_count(l + 1), 0.0);
      for (std::size_t p = 0; p < cur.size(); ++p) {
        if (cur[p] == 0.0) continue;
        const std::size_t pnode = idx.level_begin(l) + p;
        const std::vector<std::int16_t> pword = idx.word_of(pnode);
        // conditional window: the last (push_depth - 1) letters
        std::vector<std::int16_t> window(pword.end() - (push_depth - 1), pword.end());
        const double denom =
            pushed_levels[static_cast<std::size_t>(push_depth - 1)]
                         [idx.index_of(window) - idx.level_begin(push_depth - 1)];
        if (!(denom > 0.0)) continue;
        const int last = pword.back();
        for (int s = 0; s < deg; ++s) {
          if (s == (last ^ 1)) continue;
          window.push_back(static_cast<std::int16_t>(s));
          const double numer =
              pushed_levels[static_cast<std::size_t>(push_depth)]
                           [idx.index_of(window) - idx.level_begin(push_depth)];
          window.pop_back();
          const std::size_t child = idx.step(pnode, l, s);
          deeper[child - idx.level_begin(l + 1)] = cur[p] * (numer / denom);
        }
      }
      next[static_cast<std::size_t>(l + 1)] = std::move(deeper);
    }
    // guard against rounding drift in the total mass
    double total = 0.0;
    for (double v : next[static_cast<std::size_t>(W)]) total += v;
    if (total > 0.0 && std::abs(total - 1.0) > 1e-15)
      for (auto& lv : next)
        for (double& v : lv) v /= total;
    nu.level_mass = std::move(next);

    if (nu.residual <= tol) return nu;
  }
  throw NumericError("stationary measure iteration did not reach tolerance " +
                     std::to_string(tol) + " in " + std::to_string(max_iter) +
                     " sweeps (residual " + std::to_string(nu.residual) + ")");
}

StationaryMeasure empirical_stationary(const GroupSpec& spec, const StepDistribution& mu,
                                       int m, long rays, long steps,
                                       std::uint64_t seed, int threads) {
  require_free(spec, "the empirical cylinder measure");
  if (m < 1) throw ConfigError("cylinder depth must be >= 1");
  if (rays < 1) throw ConfigError("need at least one ray");

  StationaryMeasure nu;
  nu.spec = spec;
  nu.depth = m;
  nu.idx = std::make_shared<FreeWordIndex>(spec.rank, m);
  nu.source = "empirical";
  const FreeWordIndex& idx = *nu.idx;
  const std::size_t cells = idx.level_count(m);

  const int nt = std::max(1, threads > 0 ? threads
                                         : static_cast<int>(std::thread::hardware_concurrency()));
  std::vector<std::vector<double>> counts(static_cast<std::size_t>(nt),
                                          std::vector<double>(cells, 0.0));
  std::vector<long> discarded(static_cast<std::size_t>(nt), 0);
  auto worker = [&](int tid) {
    WordWalk walk(spec, mu);
    for (long r = tid; r < rays; r += nt) {
      walk.reset(seed, static_cast<std::uint64_t>(r));
      walk.run_to(steps);
      const auto& w = walk.word();
      if (static_cast<int>(w.size()) < m) {
        ++discarded[static_cast<std::size_t>(tid)];
        continue;
      }
      const std::size_t i = idx.index_of(w.data(), static_cast<std::size_t>(m));
      counts[static_cast<std::size_t>(tid)][i - idx.level_begin(m)] += 1.0;
    }
  };
  if (nt == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int tid = 0; tid < nt; ++tid) pool.emplace_back(worker, tid);
    for (auto& th : pool) th.join();
  }
  std::vector<double> top(cells, 0.0);
  long bad = 0;
  for (int tid = 0; tid < nt; ++tid) {
    bad += discarded[static_cast<std::size_t>(tid)];
    for (std::size_t c = 0; c < cells; ++c) top[c] += counts[static_cast<std::size_t>(tid)][c];
  }
  const long kept = rays - bad;
  if (kept <= 0 || bad > rays / 20)
    throw StatisticalError("too many rays ended shorter than the cylinder depth; "
                           "increase the step count");
  for (double& v : top) v /= static_cast<double>(kept);
  nu.level_mass = marginalize_levels(idx, m, std::move(top));
  nu.iterations = static_cast<int>(kept);
  return nu;
}

double tv_distance(const StationaryMeasure& a, const StationaryMeasure& b, int depth) {
  if (depth > a.depth || depth > b.depth)
    throw ConfigError("tv_distance depth exceeds a measure's stored depth");
  const auto& ma = a.level_mass[static_cast<std::size_t>(depth)];
  const auto& mb = b.level_mass[static_cast<std::size_t>(depth)];
  if (ma.size() != mb.size()) throw ConfigError("cylinder bases do not match");
  double acc = 0.0;
  for (std::size_t c = 0; c < ma.size(); ++c) acc += std::abs(ma[c] - mb[c]);
  return 0.5 * acc;
}

CylinderFunction apply_transfer(const GroupSpec& spec, const StepDistribution& mu,
                                const CylinderFunction& phi) {
  require_free(spec, "the transfer operator");
  const int m = phi.depth();
  const int L = mu.max_word_length();
  if (L < 1) throw ConfigError("measure concentrated on the identity");
  CylinderFunction out = make_cylinder_function(spec, m + L);
  const CylinderBasis& ob = *out.basis;
  const CylinderBasis& ib = *phi.basis;

  std::vector<std::vector<std::int16_t>> ginv_words;
  for (const auto& g : mu.support) ginv_words.push_back(invert_word(g.word));

  for (std::size_t c = 0; c < ob.count(); ++c) {
    const std::vector<std::int16_t> v = ob.word_of(c);
    double acc = 0.0;
    for (std::size_t j = 0; j < mu.support.size(); ++j) {
      const std::vector<std::int16_t> gv = reduce_concat(ginv_words[j], v.data(), v.size());
      acc += mu.weight[j] *
             phi.values[ib.cell_of(gv.data(), static_cast<std::size_t>(m))];
    }
    out.values[c] = acc;
  }
  return out;
}

CylinderFunction project_to_depth(const CylinderFunction& phi,
                                  const StationaryMeasure& nu, int m) {
  const int d = phi.depth();
  if (m > d) throw ConfigError("projection target deeper than the function");
  if (nu.depth < d) throw PrecisionError("measure too shallow for this projection");
  CylinderFunction out = make_cylinder_function(phi.basis->spec(), m);
  if (m == d) {
    out.values = phi.values;
    return out;
  }
  const auto& mass_d = nu.level_mass[static_cast<std::size_t>(d)];
  const auto& mass_m = nu.level_mass[static_cast<std::size_t>(m)];
  const std::size_t width = static_cast<std::size_t>(2 * phi.basis->spec().rank - 1);
  std::size_t block = 1;
  for (int l = m; l < d; ++l) block *= width;
  for (std::size_t c = 0; c < out.basis->count(); ++c) {
    double num = 0.0;
    for (std::size_t v = c * block; v < (c + 1) * block; ++v)
      num += mass_d[v] * phi.values[v];
    if (mass_m[c] > 0.0) {
      out.values[c] = num / mass_m[c];
    } else if (std::abs(num) > 1e-14) {
      throw NumericError("conditional average against a null cylinder");
    } else {
      out.values[c] = 0.0;
    }
  }
  return out;
}

CylinderFunction transfer_step(const GroupSpec& spec, const StepDistribution& mu,
                               const StationaryMeasure& nu, const CylinderFunction& phi) {
  return project_to_depth(apply_transfer(spec, mu, phi), nu, phi.depth());
}

CylinderFunction psi_increment(const GroupSpec& spec, const StepDistribution& mu,
                               const Metric& metric, const StationaryMeasure& nu,
                               int m, double drift) {
  require_free(spec, "the cocycle increment");
  if (!metric.has_letter_costs())
    throw CapabilityError("the cocycle increment needs a letter-cost metric");
  const int L = mu.max_word_length();
  if (m < L)
    throw ConfigError("cylinder depth must reach the support horizon L = " +
                      std::to_string(L));
  if (nu.depth < m) throw PrecisionError("measure too shallow for psi");
  CylinderFunction psi = make_cylinder_function(spec, m);
  const CylinderBasis& basis = *psi.basis;
  for (std::size_t c = 0; c < basis.count(); ++c) {
    const std::vector<std::int16_t> w = basis.word_of(c);
    double acc = 0.0;
    for (std::size_t j = 0; j < mu.support.size(); ++j)
      acc += mu.weight[j] *
             horo_against_prefix(mu.support[j].word, w, metric.letter_cost);
    psi.values[c] = acc;
  }
  double a = drift;
  if (std::isnan(a)) a = nu.integrate(psi);
  for (double& v : psi.values) v -= a;
  return psi;
}

double holder_seminorm(const CylinderFunction& phi, double alpha) {
  const int m = phi.depth();
  if (m == 0) return 0.0;
  const FreeWordIndex& idx = phi.basis->index();
  const std::size_t width = static_cast<std::size_t>(2 * phi.basis->spec().rank - 1);
  double best = 0.0;
  // pairs of cells with common prefix exactly c live under one level-c node
  // but in different child subtrees
  for (int c = 0; c < m; ++c) {
    std::size_t block = 1;
    for (int l = c + 1; l < m; ++l) block *= width;
    const std::size_t nkids =
        (c == 0) ? static_cast<std::size_t>(2 * phi.basis->spec().rank) : width;
    const std::size_t parents = idx.level_count(c);
    for (std::size_t p = 0; p < parents; ++p) {
      double max1 = -1e300, max2 = -1e300, min1 = 1e300, min2 = 1e300;
      std::size_t argmax = 0, argmin = 0;
      for (std::size_t kid = 0; kid < nkids; ++kid) {
        const std::size_t lo = (p * nkids + kid) * block;
        double mx = -1e300, mn = 1e300;
        for (std::size_t v = lo; v < lo + block; ++v) {
          mx = std::max(mx, phi.values[v]);
          mn = std::min(mn, phi.values[v]);
        }
        if (mx > max1) {
          max2 = max1;
          max1 = mx;
          argmax = kid;
        } else if (mx > max2) {
          max2 = mx;
        }
        if (mn < min1) {
          min2 = min1;
          min1 = mn;
          argmin = kid;
        } else if (mn < min2) {
          min2 = mn;
        }
      }
      const double diff = (argmax != argmin)
                              ? max1 - min1
                              : std::max(max1 - min2, max2 - min1);
      best = std::max(best, diff * std::exp(alpha * static_cast<double>(c)));
    }
  }
  return best;
}

namespace detail {

NeumannResult neumann_sum(
    const std::function<std::vector<double>(const std::vector<double>&)>& step,
    std::vector<double> first, double tol, int max_terms) {
  NeumannResult res;
  auto norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  std::vector<double> sum = first;
  std::vector<double> term = std::move(first);
  double tnorm = norm(term);
  res.term_norms.push_back(tnorm);
  res.terms = 1;
  while (tnorm > tol) {
    if (res.terms >= max_terms)
      throw NumericError("Neumann series did not reach tolerance in " +
                         std::to_string(max_terms) + " terms");
    term = step(term);
    tnorm = norm(term);
    res.term_norms.push_back(tnorm);
    ++res.terms;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
    if (res.terms >= 8) {
      double ratio = 1.0;
      int used = 0;
      for (std::size_t i = res.term_norms.size() - 5; i + 1 < res.term_norms.size(); ++i) {
        if (res.term_norms[i] > 0.0) {
          ratio *= res.term_norms[i + 1] / res.term_norms[i];
          ++used;
        }
      }
      if (used > 0) {
        res.tau_run = std::pow(ratio, 1.0 / used);
        if (res.tau_run >= 0.9999)
          throw SpectralError("transfer iteration is not contracting "
                              "(observed rate >= 1)");
      }
    }
  }
  res.sum = std::move(sum);
  return res;
}

} // namespace detail

PoissonSolution solve_poisson(const GroupSpec& spec, const StepDistribution& mu,
                              const StationaryMeasure& nu, const CylinderFunction& psi,
                              double tol, int max_terms) {
  const int m = psi.depth();
  const int L = mu.max_word_length();
  if (nu.depth < m + L)
    throw PrecisionError("Poisson solve at depth " + std::to_string(m) +
                         " needs the measure at depth " + std::to_string(m + L));
  const double mean = nu.integrate(psi);
  if (std::abs(mean) > 1e-6)
    throw NumericError("psi is not mean-zero against nu (integral " +
                       std::to_string(mean) + ")");
  CylinderFunction centered = psi;
  for (double& v : centered.values) v -= mean;

  const auto& mass_m = nu.level_mass[static_cast<std::size_t>(m)];
  auto recenter = [&](std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) acc += mass_m[c] * v[c];
    for (double& x : v) x -= acc;
  };
  auto step = [&](const std::vector<double>& v) {
    CylinderFunction f = centered; // reuse basis
    f.values = v;
    CylinderFunction next = transfer_step(spec, mu, nu, f);
    recenter(next.values);
    return next.values;
  };

  detail::NeumannResult nr = detail::neumann_sum(step, centered.values, tol, max_terms);

  PoissonSolution sol;
  sol.u = centered;
  sol.u.values = std::move(nr.sum);
  sol.terms = nr.terms;
  sol.term_norms = std::move(nr.term_norms);
  sol.tau_run = nr.tau_run;

  // exact equation defect at depth m
  CylinderFunction pu = transfer_step(spec, mu, nu, sol.u);
  double res = 0.0;
  for (std::size_t c = 0; c < sol.u.values.size(); ++c)
    res = std::max(res, std::abs(sol.u.values[c] - pu.values[c] - centered.values[c]));
  sol.residual = res;

  // lifted defect at depth m + L (diagnostic: carries the projection error)
  CylinderFunction pu_full = apply_transfer(spec, mu, sol.u);
  const std::size_t width = static_cast<std::size_t>(2 * spec.rank - 1);
  std::size_t block = 1;
  for (int l = 0; l < L; ++l) block *= width;
  double lifted = 0.0;
  for (std::size_t c = 0; c < sol.u.values.size(); ++c)
    for (std::size_t v = c * block; v < (c + 1) * block; ++v)
      lifted = std::max(lifted, std::abs(sol.u.values[c] - pu_full.values[v] -
                                         centered.values[c]));
  sol.lifted_residual = lifted;
  return sol;
}

SpectralReport transfer_contraction(const GroupSpec& spec, const StepDistribution& mu,
                                    const StationaryMeasure& nu, int m, int iterations,
                                    std::uint64_t seed) {
  CylinderFunction x = make_cylinder_function(spec, m);
  SplitRng rng = SplitRng::derive(seed, 0x73706563ULL);
  for (double& v : x.values) v = 2.0 * rng.unit() - 1.0;
  const auto& mass = nu.level_mass[static_cast<std::size_t>(m)];
  auto recenter = [&](std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) acc += mass[c] * v[c];
    for (double& y : v) y -= acc;
  };
  recenter(x.values);
  double nx = x.sup_norm();
  if (nx > 0.0)
    for (double& v : x.values) v /= nx;

  SpectralReport rep;
  rep.norms.push_back(x.sup_norm());
  for (int it = 0; it < iterations; ++it) {
    x = transfer_step(spec, mu, nu, x);
    recenter(x.values);
    const double n1 = x.sup_norm();
    rep.norms.push_back(n1);
    const double n0 = rep.norms[rep.norms.size() - 2];
    rep.ratios.push_back(n0 > 0.0 ? n1 / n0 : 0.0);
    if (n1 == 0.0) break;
  }
  rep.iterations = static_cast<int>(rep.ratios.size());
  const int tail = std::max(3, rep.iterations / 3);
  double prod = 1.0;
  int used = 0;
  for (int i = std::max(0, rep.iterations - tail); i < rep.iterations; ++i) {
    if (rep.ratios[static_cast<std::size_t>(i)] > 0.0) {
      prod *= rep.ratios[static_cast<std::size_t>(i)];
      ++used;
    }
  }
  rep.tau_hat = used > 0 ? std::pow(prod, 1.0 / used) : 0.0;
  return rep;
}

double sigma2_green_kubo(const GroupSpec& spec, const StepDistribution& mu,
                         const Metric& metric, const StationaryMeasure& nu,
                         const CylinderFunction& u, double drift) {
  require_free(spec, "the Green-Kubo variance");
  if (!metric.has_letter_costs())
    throw CapabilityError("the Green-Kubo variance needs a letter-cost metric");
  const int m = u.depth();
  const int L = mu.max_word_length();
  if (nu.depth < m + L)
    throw PrecisionError("variance evaluation needs the measure at depth m + L");

  CylinderBasis deep(spec, m + L);
  const CylinderBasis& ub = *u.basis;
  std::vector<std::vector<std::int16_t>> ginv_words;
  for (const auto& g : mu.support) ginv_words.push_back(invert_word(g.word));

  double a = drift;
  if (std::isnan(a)) {
    a = 0.0;
    for (std::size_t c = 0; c < deep.count(); ++c) {
      const std::vector<std::int16_t> w = deep.word_of(c);
      const double nw = nu.mass_prefix(w);
      if (nw == 0.0) continue;
      double acc = 0.0;
      for (std::size_t j = 0; j < mu.support.size(); ++j)
        acc += mu.weight[j] *
               horo_against_prefix(mu.support[j].word, w, metric.letter_cost);
      a += nw * acc;
    }
  }

  double sigma2 = 0.0;
  for (std::size_t c = 0; c < deep.count(); ++c) {
    const std::vector<std::int16_t> w = deep.word_of(c);
    const double nw = nu.mass_prefix(w);
    if (nw == 0.0) continue;
    const double uw = u.values[ub.cell_of(w.data(), static_cast<std::size_t>(m))];
    double acc = 0.0;
    for (std::size_t j = 0; j < mu.support.size(); ++j) {
      const double h =
          horo_against_prefix(mu.support[j].word, w, metric.letter_cost);
      const std::vector<std::int16_t> gw =
          reduce_concat(ginv_words[j], w.data(), w.size());
      const double ugw = u.values[ub.cell_of(gw.data(), static_cast<std::size_t>(m))];
      const double inc = h - a + ugw - uw;
      acc += mu.weight[j] * inc * inc;
    }
    sigma2 += nw * acc;
  }
  return sigma2;
}

ProximalityReport proximality_scan(const GroupSpec& spec, const StepDistribution& mu,
                                   const StationaryMeasure& nu, int steps, double alpha,
                                   long pairs, std::uint64_t seed) {
  require_free(spec, "the proximality scan");
  if (steps < 1) throw ConfigError("proximality needs steps >= 1");
  if (pairs < 1) throw ConfigError("proximality needs at least one pair");
  const ElementDist dist = convolution_power(spec, mu, steps);
  // deterministic iteration order for reproducible float sums
  std::vector<std::pair<GroupElement, double>> walkn(dist.begin(), dist.end());
  std::sort(walkn.begin(), walkn.end(), [&](const auto& a, const auto& b) {
    return element_less(spec, a.first, b.first);
  });

  ProximalityReport rep;
  rep.steps = steps;
  rep.alpha = alpha;
  const int ray_depth = nu.depth + 48 + steps;
  for (long p = 0; p < pairs; ++p) {
    BoundaryPoint xi, eta;
    bool ok = false;
    for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
      SplitRng rng = SplitRng::derive(seed, static_cast<std::uint64_t>(p),
                                      static_cast<std::uint64_t>(attempt));
      xi.digits = nu.sample_ray(ray_depth, rng);
      eta.digits = nu.sample_ray(ray_depth, rng);
      if (common_prefix(xi, eta) + steps + 2 < ray_depth && xi.digits != eta.digits)
        ok = true;
    }
    if (!ok)
      throw StatisticalError("could not sample separated boundary pairs; "
                             "the measure looks degenerate");
    const long before2 = gromov2_boundary(xi, eta);
    double integral = 0.0;
    for (const auto& [g, wg] : walkn) {
      const BoundaryActionResult gx = boundary_action(spec, g, xi);
      const BoundaryActionResult gy = boundary_action(spec, g, eta);
      const long after2 = gromov2_boundary(gx.image, gy.image);
      const double delta = 0.5 * static_cast<double>(after2 - before2);
      integral += wg * std::exp(-alpha * delta);
    }
    rep.integrals.push_back(integral);
    rep.sup_integral = std::max(rep.sup_integral, integral);
    ++rep.pairs;
  }
  return rep;
}

} // namespace greenwalk
