#include "greenwalk/limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <thread>

#include "greenwalk/errors.hpp"
#include "greenwalk/trajectory.hpp"

namespace greenwalk {

namespace {

int pick_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

int clamp_threads(long total, int threads) {
  return static_cast<int>(std::min<long>(pick_threads(threads), std::max<long>(total, 1)));
}

// runs body(tid, t) for t in [0, total) over nt worker lanes; each index owns
// its output slot, so the result is independent of scheduling
void run_parallel(long total, int nt, const std::function<void(int, long)>& body) {
  if (nt <= 1) {
    for (long t = 0; t < total; ++t) body(0, t);
    return;
  }
  std::vector<std::thread> pool;
  for (int tid = 0; tid < nt; ++tid)
    pool.emplace_back([&, tid] {
      for (long t = tid; t < total; t += nt) body(tid, t);
    });
  for (auto& th : pool) th.join();
}

/// Uniform view over the two walk engines exposing d(e, Z_n).
class DistanceWalk {
public:
  DistanceWalk(const GroupSpec& spec, const StepDistribution& mu, const Metric& metric)
      : lamp_(spec.is_lamplighter()) {
    if (lamp_) {
      if (metric.kind != MetricKind::word)
        throw CapabilityError("only the word metric is available on this group");
      lw_ = std::make_unique<LampWalk>(spec, mu);
    } else {
      ww_ = std::make_unique<WordWalk>(spec, mu, metric.letter_cost);
      weighted_ = metric.has_letter_costs();
    }
  }

  void reset(std::uint64_t seed, std::uint64_t trajectory) {
    if (lamp_) lw_->reset(seed, trajectory);
    else ww_->reset(seed, trajectory);
  }
  void step() { lamp_ ? lw_->step() : ww_->step(); }
  void run_to(long n) { lamp_ ? lw_->run_to(n) : ww_->run_to(n); }
  double distance() const {
    if (lamp_) return static_cast<double>(lw_->length());
    return weighted_ ? ww_->weighted_length() : static_cast<double>(ww_->length());
  }
  const std::vector<std::int16_t>& word() const {
    if (lamp_) throw CapabilityError("lamplighter walks have no reduced word");
    return ww_->word();
  }

private:
  bool lamp_ = false;
  bool weighted_ = false;
  std::unique_ptr<WordWalk> ww_;
  std::unique_ptr<LampWalk> lw_;
};

std::vector<long> geometric_checkpoints(long n) {
  std::vector<long> cps;
  for (long c = std::max<long>(2, n / 64); c < n; c *= 2) cps.push_back(c);
  cps.push_back(n);
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LogFit loglog_fit(const std::vector<long>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long k = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0)) continue;
    const double lx = std::log(static_cast<double>(xs[i]));
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 2) throw StatisticalError("not enough positive points for a log-log fit");
  LogFit f;
  const double det = k * sxx - sx * sx;
  f.slope = (k * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / k;
  return f;
}

std::vector<std::int16_t> reduce_concat(const std::vector<std::int16_t>& a,
                                        const std::vector<std::int16_t>& b) {
  std::vector<std::int16_t> out = a;
  for (std::int16_t s : b) {
    if (!out.empty() && out.back() == (s ^ 1)) out.pop_back();
    else out.push_back(s);
  }
  return out;
}

double horo_weighted(const std::vector<std::int16_t>& g,
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

DriftReport estimate_drift(const GroupSpec& spec, const StepDistribution& mu,
                           const Metric& metric, long n, long trajectories,
                           std::uint64_t seed, int threads) {
  if (n < 4) throw ConfigError("drift estimation needs n >= 4");
  if (trajectories < 2) throw ConfigError("drift estimation needs >= 2 trajectories");
  DriftReport rep;
  rep.n = n;
  rep.trajectories = trajectories;
  rep.checkpoint_ns = geometric_checkpoints(n);
  const std::size_t ncp = rep.checkpoint_ns.size();

  std::vector<double> speeds(static_cast<std::size_t>(trajectories), 0.0);
  std::vector<std::vector<double>> cp(static_cast<std::size_t>(trajectories));
  const int nt = clamp_threads(trajectories, threads);
  std::vector<std::unique_ptr<DistanceWalk>> walks(static_cast<std::size_t>(nt));
  run_parallel(trajectories, nt, [&](int tid, long t) {
    auto& walk = walks[static_cast<std::size_t>(tid)];
    if (!walk) walk = std::make_unique<DistanceWalk>(spec, mu, metric);
    walk->reset(seed, static_cast<std::uint64_t>(t));
    std::vector<double> row(ncp);
    for (std::size_t i = 0; i < ncp; ++i) {
      walk->run_to(rep.checkpoint_ns[i]);
      row[i] = walk->distance();
    }
    speeds[static_cast<std::size_t>(t)] = row.back() / static_cast<double>(n);
    cp[static_cast<std::size_t>(t)] = std::move(row);
  });

  rep.drift = sample_mean(speeds);
  rep.stddev = std::sqrt(sample_variance(speeds));
  rep.ci95 = 1.96 * rep.stddev / std::sqrt(static_cast<double>(trajectories));
  rep.checkpoint_means.assign(ncp, 0.0);
  for (long t = 0; t < trajectories; ++t)
    for (std::size_t i = 0; i < ncp; ++i)
      rep.checkpoint_means[i] += cp[static_cast<std::size_t>(t)][i];
  for (double& v : rep.checkpoint_means) v /= static_cast<double>(trajectories);
  rep.fitted_exponent = loglog_fit(rep.checkpoint_ns, rep.checkpoint_means).slope;
  rep.sublinear = rep.fitted_exponent < 0.9;
  return rep;
}

double drift_formula(const GroupSpec& spec, const StepDistribution& mu,
                     const Metric& metric, const StationaryMeasure& nu) {
  const int L = mu.max_word_length();
  // psi with drift 0 is the raw mean increment; integrating it gives A
  CylinderFunction raw = psi_increment(spec, mu, metric, nu, L, 0.0);
  return nu.integrate(raw);
}

CltReport clt_experiment(const GroupSpec& spec, const StepDistribution& mu,
                         const Metric& metric, long n, long trajectories,
                         double center_drift, double sigma2_ref,
                         std::uint64_t seed, int threads) {
  if (n < 4) throw ConfigError("CLT experiment needs n >= 4");
  if (trajectories < 8) throw ConfigError("CLT experiment needs >= 8 trajectories");
  if (!std::isfinite(center_drift)) throw ConfigError("CLT centering drift must be finite");
  CltReport rep;
  rep.n = n;
  rep.trajectories = trajectories;
  rep.center_drift = center_drift;
  rep.samples.assign(static_cast<std::size_t>(trajectories), 0.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  const int nt = clamp_threads(trajectories, threads);
  std::vector<std::unique_ptr<DistanceWalk>> walks(static_cast<std::size_t>(nt));
  run_parallel(trajectories, nt, [&](int tid, long t) {
    auto& walk = walks[static_cast<std::size_t>(tid)];
    if (!walk) walk = std::make_unique<DistanceWalk>(spec, mu, metric);
    walk->reset(seed, static_cast<std::uint64_t>(t));
    walk->run_to(n);
    rep.samples[static_cast<std::size_t>(t)] =
        (walk->distance() - static_cast<double>(n) * center_drift) / root_n;
  });
  rep.sample_mean = sample_mean(rep.samples);
  rep.sample_variance = sample_variance(rep.samples);
  rep.sigma2_ref = sigma2_ref > 0.0 ? sigma2_ref : rep.sample_variance;
  rep.ks = ks_test_gaussian(rep.samples, 0.0, rep.sigma2_ref);
  return rep;
}

LilSeedTrace lil_statistics(const std::vector<long>& checkpoints,
                            const std::vector<double>& distances,
                            double center_drift, double sigma2) {
  if (checkpoints.size() != distances.size())
    throw ConfigError("checkpoint and distance lists differ in length");
  if (!(sigma2 > 0.0)) throw ConfigError("LIL normalization needs sigma2 > 0");
  LilSeedTrace tr;
  const double sigma = std::sqrt(sigma2);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double nn = static_cast<double>(checkpoints[i]);
    if (checkpoints[i] < 16)
      throw ConfigError("LIL checkpoints must be >= 16 so loglog n > 0");
    const double ll = std::log(std::log(nn));
    const double centered = distances[i] - nn * center_drift;
    const double s2 = centered / (sigma * std::sqrt(2.0 * nn * ll));
    const double s1 = centered / (sigma * std::sqrt(nn * ll));
    tr.stat_sqrt2.push_back(s2);
    tr.stat_sqrt1.push_back(s1);
    tr.running_max_sqrt2 = std::max(tr.running_max_sqrt2, std::abs(s2));
    tr.running_max_sqrt1 = std::max(tr.running_max_sqrt1, std::abs(s1));
  }
  return tr;
}

LilReport lil_experiment(const GroupSpec& spec, const StepDistribution& mu,
                         const Metric& metric, long n_max, long n_min,
                         int n_checkpoints, int seeds, double center_drift,
                         double sigma2, std::uint64_t seed0, int threads) {
  if (n_min < 16) throw ConfigError("LIL needs n_min >= 16 so loglog n > 0");
  if (n_max <= n_min) throw ConfigError("LIL needs n_max > n_min");
  if (n_checkpoints < 2) throw ConfigError("LIL needs >= 2 checkpoints");
  if (seeds < 1) throw ConfigError("LIL needs >= 1 seed");
  LilReport rep;
  const double ratio = std::log(static_cast<double>(n_max) / static_cast<double>(n_min));
  for (int j = 0; j < n_checkpoints; ++j) {
    const double f = static_cast<double>(j) / static_cast<double>(n_checkpoints - 1);
    const long c = std::lround(static_cast<double>(n_min) * std::exp(ratio * f));
    if (rep.checkpoints.empty() || c > rep.checkpoints.back())
      rep.checkpoints.push_back(c);
  }
  rep.seeds.assign(static_cast<std::size_t>(seeds), LilSeedTrace{});
  const int nt = clamp_threads(seeds, threads);
  std::vector<std::unique_ptr<DistanceWalk>> walks(static_cast<std::size_t>(nt));
  run_parallel(seeds, nt, [&](int tid, long s) {
    auto& walk = walks[static_cast<std::size_t>(tid)];
    if (!walk) walk = std::make_unique<DistanceWalk>(spec, mu, metric);
    walk->reset(seed0, static_cast<std::uint64_t>(s));
    std::vector<double> dist;
    dist.reserve(rep.checkpoints.size());
    for (long c : rep.checkpoints) {
      walk->run_to(c);
      dist.push_back(walk->distance());
    }
    rep.seeds[static_cast<std::size_t>(s)] =
        lil_statistics(rep.checkpoints, dist, center_drift, sigma2);
  });
  rep.ensemble_max_sqrt2 = 0.0;
  rep.min_seed_max_sqrt2 = 1e300;
  std::vector<double> last_abs;
  for (const auto& tr : rep.seeds) {
    rep.ensemble_max_sqrt2 = std::max(rep.ensemble_max_sqrt2, tr.running_max_sqrt2);
    rep.min_seed_max_sqrt2 = std::min(rep.min_seed_max_sqrt2, tr.running_max_sqrt2);
    last_abs.push_back(std::abs(tr.stat_sqrt2.back()));
  }
  // wrong centering sends the statistic off to infinity like sqrt(n/loglog n);
  // the median of the final checkpoint separates that cleanly from the
  // bounded fluctuations of a correctly centered walk
  std::nth_element(last_abs.begin(), last_abs.begin() + last_abs.size() / 2,
                   last_abs.end());
  rep.centering_suspect = last_abs[last_abs.size() / 2] > 3.0;
  return rep;
}

MartingaleReport martingale_experiment(const GroupSpec& spec, const StepDistribution& mu,
                                       const Metric& metric, const CylinderFunction& u,
                                       double center_drift, long trajectories,
                                       long steps, int bin_depth, long burnin,
                                       std::uint64_t seed, int threads) {
  if (!spec.is_free())
    throw CapabilityError("the martingale probe needs a free group");
  if (!metric.has_letter_costs())
    throw CapabilityError("the martingale probe needs a letter-cost metric");
  if (trajectories < 1 || steps < 1) throw ConfigError("need trajectories and steps >= 1");
  if (!std::isfinite(center_drift)) throw ConfigError("centering drift must be finite");
  const int m = u.depth();
  const int L = mu.max_word_length();
  if (bin_depth < 1 || bin_depth > m)
    throw ConfigError("bin depth must lie in [1, depth(u)]");

  CylinderBasis bins_basis(spec, bin_depth);
  const std::size_t nbins = bins_basis.count();
  const CylinderBasis& ub = *u.basis;
  const int deg = 2 * spec.rank;

  std::vector<std::vector<std::int16_t>> ginv_words;
  for (const auto& g : mu.support) {
    std::vector<std::int16_t> w;
    for (auto it = g.word.rbegin(); it != g.word.rend(); ++it)
      w.push_back(static_cast<std::int16_t>(*it ^ 1));
    ginv_words.push_back(std::move(w));
  }

  const int nt = clamp_threads(trajectories, threads);
  struct Acc {
    std::vector<long> count;
    std::vector<double> sum, sumsq;
    double bound = 0.0;
  };
  std::vector<Acc> acc(static_cast<std::size_t>(nt));
  for (auto& a : acc) {
    a.count.assign(nbins, 0);
    a.sum.assign(nbins, 0.0);
    a.sumsq.assign(nbins, 0.0);
  }

  // the environment eta must stay deeper than m + L for the whole run; each
  // step can shorten it by at most L letters
  const long depth0 = static_cast<long>(m + L + bin_depth) +
                      (burnin + steps) * static_cast<long>(L) + 8;
  DiscreteSampler sampler(mu.weight);

  run_parallel(trajectories, nt, [&](int tid, long t) {
    Acc& a = acc[static_cast<std::size_t>(tid)];
    SplitRng gen = SplitRng::derive(seed, 0x6d617274696eULL,
                                    static_cast<std::uint64_t>(t));
    SplitRng start = SplitRng::derive(seed, 0x657461ULL, static_cast<std::uint64_t>(t));
    std::vector<std::int16_t> eta;
    eta.reserve(static_cast<std::size_t>(depth0) + 64);
    for (long i = 0; i < depth0; ++i) {
      int s;
      do {
        s = static_cast<int>(start.next() % static_cast<std::uint64_t>(deg));
      } while (!eta.empty() && s == (eta.back() ^ 1));
      eta.push_back(static_cast<std::int16_t>(s));
    }
    for (long k = 0; k < burnin + steps; ++k) {
      const int j = sampler.sample(gen.unit_at(static_cast<std::uint64_t>(k)));
      const std::vector<std::int16_t> next = reduce_concat(ginv_words[static_cast<std::size_t>(j)], eta);
      if (k >= burnin) {
        const double h =
            horo_weighted(mu.support[static_cast<std::size_t>(j)].word, eta,
                          metric.letter_cost);
        const double uw =
            u.values[ub.cell_of(eta.data(), static_cast<std::size_t>(m))];
        const double ugw =
            u.values[ub.cell_of(next.data(), static_cast<std::size_t>(m))];
        const double f = h - center_drift + ugw - uw;
        const std::size_t cell =
            bins_basis.cell_of(eta.data(), static_cast<std::size_t>(bin_depth));
        a.count[cell] += 1;
        a.sum[cell] += f;
        a.sumsq[cell] += f * f;
        a.bound = std::max(a.bound, std::abs(f));
      }
      eta = next;
    }
  });

  MartingaleReport rep;
  rep.bin_depth = bin_depth;
  std::vector<long> count(nbins, 0);
  std::vector<double> sum(nbins, 0.0), sumsq(nbins, 0.0);
  for (const auto& a : acc) {
    rep.increment_bound = std::max(rep.increment_bound, a.bound);
    for (std::size_t c = 0; c < nbins; ++c) {
      count[c] += a.count[c];
      sum[c] += a.sum[c];
      sumsq[c] += a.sumsq[c];
    }
  }
  for (std::size_t c = 0; c < nbins; ++c) {
    MartingaleBin b;
    b.word = bins_basis.word_of(c);
    b.count = count[c];
    rep.samples += count[c];
    if (count[c] >= 2) {
      b.mean = sum[c] / static_cast<double>(count[c]);
      const double var = std::max(
          0.0, (sumsq[c] - static_cast<double>(count[c]) * b.mean * b.mean) /
                   static_cast<double>(count[c] - 1));
      b.se = std::sqrt(var / static_cast<double>(count[c]));
      if (b.se > 0.0) b.tstat = b.mean / b.se;
      if (count[c] >= 30) rep.max_abs_t = std::max(rep.max_abs_t, std::abs(b.tstat));
    }
    rep.bins.push_back(std::move(b));
  }
  return rep;
}

LindebergReport lindeberg_profile(const std::vector<double>& increments,
                                  const std::vector<double>& eps_grid,
                                  const std::vector<long>& n_grid) {
  if (increments.empty()) throw ConfigError("Lindeberg profile needs increments");
  LindebergReport rep;
  rep.eps = eps_grid;
  rep.ns = n_grid;
  for (double v : increments) rep.bound = std::max(rep.bound, std::abs(v));
  const double total = static_cast<double>(increments.size());
  for (double eps : eps_grid) {
    std::vector<double> row;
    long cross = -1;
    for (long n : n_grid) {
      const double cut = eps * std::sqrt(static_cast<double>(n));
      long tail = 0;
      for (double v : increments)
        if (std::abs(v) > cut) ++tail;
      row.push_back(static_cast<double>(tail) / total);
      if (tail == 0 && cross < 0) cross = n;
    }
    rep.tail_fraction.push_back(std::move(row));
    rep.crossover_n.push_back(cross);
  }
  return rep;
}

GrowthReport growth_exponent(const GroupSpec& spec, const StepDistribution& mu,
                             const std::vector<long>& ns, long trajectories,
                             std::uint64_t seed, int threads) {
  if (ns.size() < 2) throw ConfigError("growth fit needs >= 2 checkpoints");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw ConfigError("growth checkpoints must increase");
  if (trajectories < 2) throw ConfigError("growth fit needs >= 2 trajectories");
  GrowthReport rep;
  rep.ns = ns;
  rep.trajectories = trajectories;
  const Metric metric = word_metric(spec);
  std::vector<std::vector<double>> cp(static_cast<std::size_t>(trajectories));
  const int nt = clamp_threads(trajectories, threads);
  std::vector<std::unique_ptr<DistanceWalk>> walks(static_cast<std::size_t>(nt));
  run_parallel(trajectories, nt, [&](int tid, long t) {
    auto& walk = walks[static_cast<std::size_t>(tid)];
    if (!walk) walk = std::make_unique<DistanceWalk>(spec, mu, metric);
    walk->reset(seed, static_cast<std::uint64_t>(t));
    std::vector<double> row;
    row.reserve(ns.size());
    for (long c : ns) {
      walk->run_to(c);
      row.push_back(walk->distance());
    }
    cp[static_cast<std::size_t>(t)] = std::move(row);
  });
  rep.means.assign(ns.size(), 0.0);
  for (long t = 0; t < trajectories; ++t)
    for (std::size_t i = 0; i < ns.size(); ++i)
      rep.means[i] += cp[static_cast<std::size_t>(t)][i];
  for (double& v : rep.means) v /= static_cast<double>(trajectories);
  const LogFit fit = loglog_fit(rep.ns, rep.means);
  rep.exponent = fit.slope;
  rep.intercept = fit.intercept;
  return rep;
}

PositivityReport drift_positivity(const GroupSpec& spec, const StepDistribution& mu,
                                  const Metric& metric, int depth, long n,
                                  long trajectories, std::uint64_t seed, int threads) {
  if (!spec.is_free())
    throw CapabilityError("directional drift buckets need a free group");
  if (depth < 1) throw ConfigError("bucket depth must be >= 1");
  if (n < 4 || trajectories < 8) throw ConfigError("need n >= 4 and >= 8 trajectories");
  CylinderBasis basis(spec, depth);
  const std::size_t cells = basis.count();
  PositivityReport rep;
  rep.depth = depth;
  rep.trajectories = trajectories;

  std::vector<int> cell_of(static_cast<std::size_t>(trajectories), -1);
  std::vector<double> speed(static_cast<std::size_t>(trajectories), 0.0);
  const int nt = clamp_threads(trajectories, threads);
  std::vector<std::unique_ptr<DistanceWalk>> walks(static_cast<std::size_t>(nt));
  run_parallel(trajectories, nt, [&](int tid, long t) {
    auto& walk = walks[static_cast<std::size_t>(tid)];
    if (!walk) walk = std::make_unique<DistanceWalk>(spec, mu, metric);
    walk->reset(seed, static_cast<std::uint64_t>(t));
    walk->run_to(n);
    const auto& w = walk->word();
    if (static_cast<int>(w.size()) >= depth) {
      cell_of[static_cast<std::size_t>(t)] =
          static_cast<int>(basis.cell_of(w.data(), static_cast<std::size_t>(depth)));
      speed[static_cast<std::size_t>(t)] = walk->distance() / static_cast<double>(n);
    }
  });

  std::vector<long> count(cells, 0);
  std::vector<double> sum(cells, 0.0);
  long kept_total = 0;
  for (long t = 0; t < trajectories; ++t) {
    const int c = cell_of[static_cast<std::size_t>(t)];
    if (c < 0) continue;
    count[static_cast<std::size_t>(c)] += 1;
    sum[static_cast<std::size_t>(c)] += speed[static_cast<std::size_t>(t)];
    ++kept_total;
  }
  if (kept_total < trajectories - trajectories / 20)
    throw StatisticalError("too many walks ended inside the bucket radius; "
                           "increase n");
  rep.min_mean = 1e300;
  for (std::size_t c = 0; c < cells; ++c) {
    if (count[c] < 5) continue; // thin buckets carry no evidence either way
    rep.cells.push_back(basis.word_of(c));
    rep.counts.push_back(count[c]);
    const double mean = sum[c] / static_cast<double>(count[c]);
    rep.means.push_back(mean);
    rep.min_mean = std::min(rep.min_mean, mean);
  }
  rep.positive = !rep.means.empty() && rep.min_mean > 0.0;
  if (rep.means.empty()) rep.min_mean = 0.0;
  return rep;
}

} // namespace greenwalk
