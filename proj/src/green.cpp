#include "greenwalk/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "greenwalk/errors.hpp"

namespace greenwalk {

namespace {

// Fits log r_n = log C + n log rho - 1.5 log n on the late nonzero returns
// and turns it into a geometric bound on the remaining tail of G(e,e).
void fit_return_decay(GreenTable& t) {
  const int N = t.truncation;
  std::vector<double> xs, ys;
  for (int n = std::max(2, N / 2); n <= N; ++n) {
    const double r = t.returns[static_cast<std::size_t>(n)];
    if (r > 0.0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(r) + 1.5 * std::log(static_cast<double>(n)));
    }
  }
  if (xs.size() < 3) {
    t.rho_hat = 0.0;
    t.tail_bound = std::numeric_limits<double>::infinity();
    return;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  t.rho_hat = std::exp(slope);
  if (!(t.rho_hat > 0.0) || t.rho_hat >= 1.0) {
    t.tail_bound = std::numeric_limits<double>::infinity();
    return;
  }
  // period of nonzero returns (2 for bipartite walks, else 1)
  const int period = (xs.size() >= 2) ? static_cast<int>(xs[1] - xs[0]) : 1;
  const double r_last = t.returns[static_cast<std::size_t>(static_cast<long>(xs.back()))];
  const double step_ratio = std::pow(t.rho_hat, period);
  // safety factor 3 over the pure geometric sum absorbs the slowly varying
  // polynomial correction
  t.tail_bound = 3.0 * r_last * step_ratio / (1.0 - step_ratio);
}

struct FreeStepper {
  const FreeWordIndex* idx;
  // walks one support word from (i, level); returns npos if any letter exits
  std::pair<std::size_t, int> walk(std::size_t i, int level,
                                   const std::vector<std::int16_t>& word) const {
    for (const std::int16_t s : word) {
      if (level == 0) {
        if (idx->maxlen() < 1) return {FreeWordIndex::npos, 0};
        i = 1 + static_cast<std::size_t>(s);
        level = 1;
        continue;
      }
      const int top = idx->last_letter(i);
      if ((top ^ 1) == s) {
        i = idx->parent(i, level);
        --level;
      } else if (level == idx->maxlen()) {
        return {FreeWordIndex::npos, 0};
      } else {
        i = idx->step(i, level, s);
        ++level;
      }
    }
    return {i, level};
  }
};

int pick_internal_radius(const GroupSpec& spec, int report_radius, int internal_radius,
                         std::size_t cap) {
  if (internal_radius > 0) {
    if (internal_radius < report_radius + 2)
      throw ConfigError("internal radius must exceed the report radius by >= 2");
    return internal_radius;
  }
  int r = report_radius + 7;
  if (spec.is_free()) {
    while (r > report_radius + 2 && free_ball_size(spec.rank, r) > cap) --r;
    if (free_ball_size(spec.rank, r) > cap)
      throw ResourceError("report radius " + std::to_string(report_radius) +
                          " needs an internal ball beyond the support cap");
  } else if (spec.is_lamplighter()) {
    r = std::min(r, 8);
    if (r < report_radius + 2)
      throw CapabilityError("lamplighter kernels are limited to radius 6 reports");
  }
  return r;
}

void build_free_table(GreenTable& t, std::size_t cap) {
  if (free_ball_size(t.spec.rank, t.internal_radius) > cap)
    throw ResourceError("internal ball exceeds the support cap");
  t.index = std::make_shared<FreeWordIndex>(t.spec.rank, t.internal_radius);
  const FreeWordIndex& idx = *t.index;
  const std::size_t size = idx.size();
  FreeStepper stepper{&idx};

  std::vector<double> cur(size, 0.0), next(size, 0.0);
  t.values.assign(size, 0.0);
  cur[0] = 1.0;
  t.values[0] = 1.0;
  t.returns.assign(static_cast<std::size_t>(t.truncation) + 1, 0.0);
  t.leaked.assign(static_cast<std::size_t>(t.truncation) + 1, 0.0);
  t.returns[0] = 1.0;

  const auto& supp = t.mu.support;
  const auto& w = t.mu.weight;
  for (int n = 1; n <= t.truncation; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    double leak = 0.0;
    for (int level = 0; level <= idx.maxlen(); ++level) {
      for (std::size_t i = idx.level_begin(level); i < idx.level_end(level); ++i) {
        const double mass = cur[i];
        if (mass == 0.0) continue;
        for (std::size_t j = 0; j < supp.size(); ++j) {
          const auto [dst, dl] = stepper.walk(i, level, supp[j].word);
          if (dst == FreeWordIndex::npos) {
            leak += mass * w[j];
          } else {
            next[dst] += mass * w[j];
          }
        }
      }
    }
    cur.swap(next);
    for (std::size_t i = 0; i < size; ++i) t.values[i] += cur[i];
    t.returns[static_cast<std::size_t>(n)] = cur[0];
    t.leaked[static_cast<std::size_t>(n)] = leak;
  }
}

void build_generic_table(GreenTable& t, std::size_t cap) {
  BallResult b = ball(t.spec, t.internal_radius, cap);
  t.elements = std::move(b.elements);
  t.slot.reserve(t.elements.size());
  for (std::size_t i = 0; i < t.elements.size(); ++i) t.slot.emplace(t.elements[i], i);

  // precomputed transitions: one slot (or leak = npos) per (state, support)
  const std::size_t S = t.elements.size(), M = t.mu.support.size();
  std::vector<std::size_t> trans(S * M);
  for (std::size_t i = 0; i < S; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      GroupElement y = multiply(t.spec, t.elements[i], t.mu.support[j]);
      const auto it = t.slot.find(y);
      trans[i * M + j] = (it == t.slot.end()) ? FreeWordIndex::npos : it->second;
    }
  }

  std::vector<double> cur(S, 0.0), next(S, 0.0);
  t.gvalues.assign(S, 0.0);
  cur[0] = 1.0;
  t.gvalues[0] = 1.0;
  t.returns.assign(static_cast<std::size_t>(t.truncation) + 1, 0.0);
  t.leaked.assign(static_cast<std::size_t>(t.truncation) + 1, 0.0);
  t.returns[0] = 1.0;

  for (int n = 1; n <= t.truncation; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    double leak = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
      const double mass = cur[i];
      if (mass == 0.0) continue;
      for (std::size_t j = 0; j < M; ++j) {
        const std::size_t dst = trans[i * M + j];
        if (dst == FreeWordIndex::npos) {
          leak += mass * t.mu.weight[j];
        } else {
          next[dst] += mass * t.mu.weight[j];
        }
      }
    }
    cur.swap(next);
    for (std::size_t i = 0; i < S; ++i) t.gvalues[i] += cur[i];
    t.returns[static_cast<std::size_t>(n)] = cur[0];
    t.leaked[static_cast<std::size_t>(n)] = leak;
  }
}

} // namespace

double GreenTable::gee() const {
  return has_index() ? values[0] : gvalues[0];
}

double GreenTable::at(const GroupElement& x) const {
  if (word_length(spec, x) > report_radius)
    throw CapabilityError("element " + format_element(spec, x) +
                          " lies outside the certified ball (radius " +
                          std::to_string(report_radius) + ")");
  if (has_index()) {
    const std::size_t i = index->index_of(x.word);
    if (i == FreeWordIndex::npos)
      throw CapabilityError("element outside the internal ball");
    return values[i];
  }
  const auto it = slot.find(x);
  if (it == slot.end())
    throw CapabilityError("element outside the internal ball");
  return gvalues[it->second];
}

GreenTable green_kernel(const GroupSpec& spec, const StepDistribution& mu,
                        int truncation, int report_radius, int internal_radius,
                        double tol, std::size_t cap) {
  if (truncation < 1) throw ConfigError("truncation must be >= 1");
  if (report_radius < 0) throw ConfigError("report radius must be >= 0");

  GreenTable t;
  t.spec = spec;
  t.mu = mu;
  t.truncation = truncation;
  t.report_radius = report_radius;
  t.internal_radius = pick_internal_radius(spec, report_radius, internal_radius, cap);

  if (spec.is_free()) {
    build_free_table(t, cap);
  } else {
    build_generic_table(t, cap);
  }
  fit_return_decay(t);
  if (tol > 0.0 && !(t.tail_bound <= tol))
    throw AccuracyError("truncation N=" + std::to_string(truncation) +
                        " certifies only " + std::to_string(t.tail_bound) +
                        " at the identity, above the requested " + std::to_string(tol));
  return t;
}

double first_passage(const GroupSpec& spec, const StepDistribution& mu,
                     const GroupElement& target, int truncation,
                     int internal_radius, std::size_t cap) {
  if (is_identity(target)) return 1.0;
  if (truncation < 1) throw ConfigError("truncation must be >= 1");
  const long tlen = word_length(spec, target);
  const int internal =
      pick_internal_radius(spec, static_cast<int>(tlen), internal_radius, cap);

  if (spec.is_free()) {
    FreeWordIndex idx(spec.rank, internal);
    if (free_ball_size(spec.rank, internal) > cap)
      throw ResourceError("internal ball exceeds the support cap");
    const std::size_t size = idx.size();
    const std::size_t goal = idx.index_of(target.word);
    if (goal == FreeWordIndex::npos)
      throw ConfigError("first-passage target outside the internal ball");
    FreeStepper stepper{&idx};
    std::vector<double> cur(size, 0.0), next(size, 0.0);
    cur[0] = 1.0;
    double arrived = 0.0;
    for (int n = 1; n <= truncation; ++n) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int level = 0; level <= idx.maxlen(); ++level) {
        for (std::size_t i = idx.level_begin(level); i < idx.level_end(level); ++i) {
          const double mass = cur[i];
          if (mass == 0.0) continue;
          for (std::size_t j = 0; j < mu.support.size(); ++j) {
            const auto [dst, dl] = stepper.walk(i, level, mu.support[j].word);
            if (dst != FreeWordIndex::npos) next[dst] += mass * mu.weight[j];
          }
        }
      }
      arrived += next[goal];
      next[goal] = 0.0; // absorb: only first visits count
      cur.swap(next);
    }
    return arrived;
  }

  BallResult b = ball(spec, internal, cap);
  std::unordered_map<GroupElement, std::size_t, ElementHash> slot;
  for (std::size_t i = 0; i < b.elements.size(); ++i) slot.emplace(b.elements[i], i);
  const auto goal_it = slot.find(target);
  if (goal_it == slot.end())
    throw ConfigError("first-passage target outside the internal ball");
  const std::size_t goal = goal_it->second;
  const std::size_t S = b.elements.size(), M = mu.support.size();
  std::vector<std::size_t> trans(S * M);
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      GroupElement y = multiply(spec, b.elements[i], mu.support[j]);
      const auto it = slot.find(y);
      trans[i * M + j] = (it == slot.end()) ? FreeWordIndex::npos : it->second;
    }
  std::vector<double> cur(S, 0.0), next(S, 0.0);
  cur[0] = 1.0;
  double arrived = 0.0;
  for (int n = 1; n <= truncation; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < S; ++i) {
      const double mass = cur[i];
      if (mass == 0.0) continue;
      for (std::size_t j = 0; j < M; ++j) {
        const std::size_t dst = trans[i * M + j];
        if (dst != FreeWordIndex::npos) next[dst] += mass * mu.weight[j];
      }
    }
    arrived += next[goal];
    next[goal] = 0.0;
    cur.swap(next);
  }
  return arrived;
}

double green_metric(const GreenTable& t, const GroupElement& x, const GroupElement& y) {
  const GroupElement g = multiply(t.spec, inverse(t.spec, x), y);
  const double v = t.at(g);
  if (!(v > 0.0))
    throw AccuracyError("truncated kernel vanished at " + format_element(t.spec, g) +
                        "; increase the truncation");
  return std::log(t.gee()) - std::log(v);
}

QiFit quasi_isometry_fit(const GreenTable& t) {
  QiFit fit{0.0, 0.0, 0};
  const double log_gee = std::log(t.gee());
  double sxy = 0.0, sxx = 0.0;
  std::vector<std::pair<double, double>> pts; // (d_word, d_green)
  if (t.has_index()) {
    const FreeWordIndex& idx = *t.index;
    for (int level = 1; level <= t.report_radius; ++level) {
      for (std::size_t i = idx.level_begin(level); i < idx.level_end(level); ++i) {
        const double v = t.values[i];
        if (!(v > 0.0))
          throw AccuracyError("truncated kernel vanished inside the report ball");
        pts.push_back({static_cast<double>(level), log_gee - std::log(v)});
      }
    }
  } else {
    for (std::size_t i = 1; i < t.elements.size(); ++i) {
      const long d = word_length(t.spec, t.elements[i]);
      if (d > t.report_radius) continue;
      const double v = t.gvalues[i];
      if (!(v > 0.0))
        throw AccuracyError("truncated kernel vanished inside the report ball");
      pts.push_back({static_cast<double>(d), log_gee - std::log(v)});
    }
  }
  if (pts.empty()) throw ConfigError("quasi-isometry fit needs report radius >= 1");
  for (const auto& [ds, dg] : pts) {
    sxy += ds * dg;
    sxx += ds * ds;
  }
  fit.slope = sxy / sxx;
  for (const auto& [ds, dg] : pts)
    fit.additive = std::max(fit.additive, std::abs(dg - fit.slope * ds));
  fit.points = pts.size();
  return fit;
}

double MartinView::at(const GroupElement& x) const {
  const GroupElement arg = multiply(table->spec, inverse(table->spec, x), pole);
  return table->at(arg) / table->at(pole);
}

MartinView martin_kernel(const GreenTable& t, const GroupElement& y) {
  if (word_length(t.spec, y) > t.report_radius)
    throw CapabilityError("Martin pole outside the certified ball");
  return MartinView{&t, y};
}

HilbertResult hilbert_metric(const MartinView& a, const MartinView& b, int z_radius) {
  if (a.table != b.table)
    throw ConfigError("Hilbert distance needs kernels from one table");
  const GreenTable& t = *a.table;
  const long reach = z_radius + std::max(word_length(t.spec, a.pole),
                                         word_length(t.spec, b.pole));
  if (reach > t.report_radius)
    throw CapabilityError("z-ball radius " + std::to_string(z_radius) +
                          " exceeds the certified ball for these poles");
  HilbertResult res;
  res.beta = -std::numeric_limits<double>::infinity();
  res.alpha = std::numeric_limits<double>::infinity();
  auto consider = [&](const GroupElement& z) {
    const double r = b.at(z) / a.at(z);
    if (r > res.beta) {
      res.beta = r;
      res.arg_sup = z;
    }
    if (r < res.alpha) {
      res.alpha = r;
      res.arg_inf = z;
    }
  };
  if (t.has_index()) {
    const FreeWordIndex& idx = *t.index;
    for (int level = 0; level <= z_radius; ++level)
      for (std::size_t i = idx.level_begin(level); i < idx.level_end(level); ++i) {
        GroupElement z;
        z.word = idx.word_of(i);
        consider(z);
      }
  } else {
    BallResult ballz = ball(t.spec, z_radius);
    for (const auto& z : ballz.elements) consider(z);
  }
  res.distance = 0.5 * std::log(res.beta / res.alpha);
  return res;
}

HilbertGreenReport verify_hilbert_green(const GroupSpec& spec, const StepDistribution& mu,
                                        int pair_radius, int z_radius, int truncation,
                                        int keep_worst) {
  if (!spec.is_free())
    throw CapabilityError("the Hilbert-Green comparison sweep runs on free groups");
  const int report = std::max(pair_radius + z_radius, 2 * pair_radius);
  GreenTable t = green_kernel(spec, mu, truncation, report);
  const FreeWordIndex& idx = *t.index;

  // pole words and z words
  std::vector<std::vector<std::int16_t>> poles, zs;
  for (int level = 0; level <= pair_radius; ++level)
    for (std::size_t i = idx.level_begin(level); i < idx.level_end(level); ++i)
      poles.push_back(idx.word_of(i));
  for (int level = 0; level <= z_radius; ++level)
    for (std::size_t i = idx.level_begin(level); i < idx.level_end(level); ++i)
      zs.push_back(idx.word_of(i));

  // K[p][zi] = G(z^-1 y_p) / G(y_p): precomputing kills all the group
  // multiplications in the pair sweep
  const double log_gee = std::log(t.gee());
  std::vector<std::vector<double>> K(poles.size());
  std::vector<double> g_at_pole(poles.size());
  std::vector<std::int16_t> scratch;
  for (std::size_t p = 0; p < poles.size(); ++p) {
    const auto& y = poles[p];
    g_at_pole[p] = t.values[idx.index_of(y)];
    K[p].resize(zs.size());
    for (std::size_t zi = 0; zi < zs.size(); ++zi) {
      const auto& z = zs[zi];
      // reduced z^-1 y: strip the common prefix, invert what is left of z
      std::size_t c = 0;
      while (c < z.size() && c < y.size() && z[c] == y[c]) ++c;
      scratch.clear();
      for (std::size_t i = z.size(); i > c; --i)
        scratch.push_back(static_cast<std::int16_t>(z[i - 1] ^ 1));
      for (std::size_t i = c; i < y.size(); ++i) scratch.push_back(y[i]);
      K[p][zi] = t.values[idx.index_of(scratch.data(), scratch.size())] / g_at_pole[p];
    }
  }

  HilbertGreenReport rep;
  for (std::size_t pa = 0; pa < poles.size(); ++pa) {
    for (std::size_t pb = pa + 1; pb < poles.size(); ++pb) {
      double beta = -std::numeric_limits<double>::infinity();
      double alpha = std::numeric_limits<double>::infinity();
      const auto& Ka = K[pa];
      const auto& Kb = K[pb];
      for (std::size_t zi = 0; zi < zs.size(); ++zi) {
        const double r = Kb[zi] / Ka[zi];
        beta = std::max(beta, r);
        alpha = std::min(alpha, r);
      }
      const double hil = 0.5 * std::log(beta / alpha);
      // d_G(x, y) = log G(e,e) - log G(x^-1 y)
      const auto& x = poles[pa];
      const auto& y = poles[pb];
      std::size_t c = 0;
      while (c < x.size() && c < y.size() && x[c] == y[c]) ++c;
      scratch.clear();
      for (std::size_t i = x.size(); i > c; --i)
        scratch.push_back(static_cast<std::int16_t>(x[i - 1] ^ 1));
      for (std::size_t i = c; i < y.size(); ++i) scratch.push_back(y[i]);
      const double green =
          log_gee - std::log(t.values[idx.index_of(scratch.data(), scratch.size())]);
      const double dev = std::abs(hil - green);
      ++rep.pairs;
      rep.max_deviation = std::max(rep.max_deviation, dev);
      if (static_cast<int>(rep.worst.size()) < keep_worst ||
          dev > rep.worst.back().deviation) {
        GroupElement ex, ey;
        ex.word = x;
        ey.word = y;
        rep.worst.push_back({ex, ey, hil, green, dev});
        std::sort(rep.worst.begin(), rep.worst.end(),
                  [](const auto& l, const auto& r) { return l.deviation > r.deviation; });
        if (static_cast<int>(rep.worst.size()) > keep_worst) rep.worst.pop_back();
      }
    }
  }
  return rep;
}

NnGreenAnalysis nn_first_passage(const GroupSpec& spec, const StepDistribution& mu,
                                 double tol, int max_iter) {
  if (!spec.is_free())
    throw CapabilityError("nearest-neighbour first-passage analysis needs a free group");
  if (!mu.nearest_neighbour())
    throw CapabilityError("nearest-neighbour first-passage analysis needs a "
                          "single-letter support");
  const int letters = spec.letter_count();
  std::vector<double> w(static_cast<std::size_t>(letters), 0.0);
  for (std::size_t i = 0; i < mu.support.size(); ++i)
    w[static_cast<std::size_t>(mu.support[i].word[0])] = mu.weight[i];
  for (int s = 0; s < letters; ++s)
    if (!(w[static_cast<std::size_t>(s)] > 0.0))
      throw CapabilityError("letter " + spec.letter_label(s) +
                            " carries no mass; the Green costs would degenerate");

  NnGreenAnalysis out;
  out.f.assign(static_cast<std::size_t>(letters), 0.0);
  std::vector<double> nf(static_cast<std::size_t>(letters), 0.0);
  // monotone iteration from zero converges to the minimal solution of
  // f_s = mu(s) + f_s * sum_{t != s} mu(t) f_t
  for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
    double total = 0.0;
    for (int s = 0; s < letters; ++s)
      total += w[static_cast<std::size_t>(s)] * out.f[static_cast<std::size_t>(s)];
    double delta = 0.0;
    for (int s = 0; s < letters; ++s) {
      const double other =
          total - w[static_cast<std::size_t>(s)] * out.f[static_cast<std::size_t>(s)];
      nf[static_cast<std::size_t>(s)] =
          w[static_cast<std::size_t>(s)] + out.f[static_cast<std::size_t>(s)] * other;
      delta = std::max(delta, std::abs(nf[static_cast<std::size_t>(s)] -
                                       out.f[static_cast<std::size_t>(s)]));
    }
    out.f.swap(nf);
    out.residual = delta;
    if (delta <= tol) break;
  }
  if (out.residual > tol)
    throw NumericError("first-passage fixed point did not converge");
  out.total = 0.0;
  for (int s = 0; s < letters; ++s)
    out.total += w[static_cast<std::size_t>(s)] * out.f[static_cast<std::size_t>(s)];
  if (!(out.total < 1.0))
    throw NumericError("first-passage total U >= 1: the walk is not transient here");
  out.gee = 1.0 / (1.0 - out.total);
  out.cost.resize(static_cast<std::size_t>(letters));
  for (int s = 0; s < letters; ++s) {
    if (!(out.f[static_cast<std::size_t>(s)] > 0.0))
      throw NumericError("degenerate first-passage probability");
    out.cost[static_cast<std::size_t>(s)] = -std::log(out.f[static_cast<std::size_t>(s)]);
  }
  return out;
}

} // namespace greenwalk
