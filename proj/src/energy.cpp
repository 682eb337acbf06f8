#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gshs/error.hpp"
#include "gshs/parallel.hpp"
#include "gshs/rng.hpp"
#include "gshs/stats.hpp"

namespace gshs {

FddSample make_fdd(std::vector<double> times, std::size_t dim, std::vector<double> data, std::string label) {
  require(!times.empty(), ErrorKind::InvalidParameter, "f.d.d. sample needs at least one time");
  require(dim >= 1 && data.size() % dim == 0, ErrorKind::DimensionMismatch, "f.d.d. data shape");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(times[i] > times[i - 1], ErrorKind::InvalidParameter, "f.d.d. times must increase");
  FddSample s;
  s.times = std::move(times);
  s.dim = dim;
  s.n = data.size() / dim;
  s.data = std::move(data);
  s.label = std::move(label);
  return s;
}

FddSample position_fdd(const PathEnsemble& paths, const std::vector<double>& times, std::string label) {
  std::vector<std::size_t> idx;
  for (double t : times) idx.push_back(paths.time_index(t));
  const std::size_t d = paths.d;
  const std::size_t dim = d * times.size();
  std::vector<double> data(paths.n_paths * dim);
  for (std::size_t p = 0; p < paths.n_paths; ++p)
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t i = 0; i < d; ++i) data[p * dim + j * d + i] = paths.x(p, idx[j], i);
  return make_fdd(times, dim, std::move(data), label.empty() ? paths.init_label : std::move(label));
}

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// V-statistic from within-group pair sums (unordered pairs) and the total.
double vstat(double total, double wa, double wb, double na, double nb) {
  const double cross = total - wa - wb;
  return 2.0 * cross / (na * nb) - 2.0 * wa / (na * na) - 2.0 * wb / (nb * nb);
}

std::vector<std::vector<std::uint8_t>> permutation_labels(std::size_t na, std::size_t nb, std::size_t n_perm,
                                                          std::uint64_t seed) {
  std::vector<std::vector<std::uint8_t>> out(n_perm);
  for (std::size_t k = 0; k < n_perm; ++k) {
    std::vector<std::uint8_t> lab(na + nb, 0);
    std::fill(lab.begin() + static_cast<std::ptrdiff_t>(na), lab.end(), 1);
    Rng rng(derive_seed(seed, "permutation"), k);
    shuffle(lab.begin(), lab.end(), rng);
    out[k] = std::move(lab);
  }
  return out;
}

}  // namespace

EnergyResult energy_distance(const FddSample& a, const FddSample& b, const EnergyOptions& opts) {
  require(a.dim == b.dim, ErrorKind::DimensionMismatch, "f.d.d. samples differ in dimension");
  require(a.n >= 100 && b.n >= 100, ErrorKind::InvalidParameter, "energy distance needs at least 100 points per sample");
  const std::size_t na = a.n, nb = b.n, N = na + nb, p = a.dim;
  std::vector<double> pooled;
  pooled.reserve(N * p);
  pooled.insert(pooled.end(), a.data.begin(), a.data.end());
  pooled.insert(pooled.end(), b.data.begin(), b.data.end());
  auto row = [&](std::size_t i) { return std::span<const double>(pooled.data() + i * p, p); };
  const auto labels = permutation_labels(na, nb, opts.permutations, opts.seed);
  const std::size_t workers = resolve_workers(opts.workers);
  EnergyResult res;
  res.permutations = opts.permutations;
  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb);

  // Returns the statistic for a labelling (0 = A, 1 = B).
  std::function<double(const std::vector<std::uint8_t>&)> stat_for;
  std::vector<double> D;
  std::vector<std::vector<double>> proj;
  std::vector<std::vector<std::uint32_t>> order;
  double scale = 1.0;

  if (N <= opts.exact_limit) {
    res.exact = true;
    D.assign(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) D[i * N + j] = D[j * N + i] = dist(row(i), row(j));
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) total += D[i * N + j];
    stat_for = [&, total](const std::vector<std::uint8_t>& lab) {
      double wa = 0.0, wb = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double* Di = D.data() + i * N;
        for (std::size_t j = i + 1; j < N; ++j) {
          if (lab[i] != lab[j]) continue;
          (lab[i] ? wb : wa) += Di[j];
        }
      }
      return vstat(total, wa, wb, dna, dnb);
    };
  } else {
    // |z| = E|<theta, z>| / E|theta_1| over uniform directions theta.
    res.exact = false;
    std::vector<std::vector<double>> dirs;
    if (p == 1) {
      dirs.push_back({1.0});
      scale = 1.0;
    } else if (p == 2) {
      const std::size_t K = opts.directions;
      for (std::size_t k = 0; k < K; ++k) {
        double th = (static_cast<double>(k) + 0.5) * std::numbers::pi / static_cast<double>(K);
        dirs.push_back({std::cos(th), std::sin(th)});
      }
      scale = std::numbers::pi / 2.0;
    } else {
      Rng rng(derive_seed(opts.seed, "directions"), p);
      for (std::size_t k = 0; k < std::max<std::size_t>(opts.directions, 4 * p); ++k) {
        std::vector<double> th(p);
        double nrm = 0.0;
        for (auto& c : th) {
          c = rng.normal();
          nrm += c * c;
        }
        for (auto& c : th) c /= std::sqrt(nrm);
        dirs.push_back(std::move(th));
      }
      const double hp = 0.5 * static_cast<double>(p);
      scale = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(hp + 0.5) - std::lgamma(hp));
    }
    const std::size_t K = dirs.size();
    proj.assign(K, std::vector<double>(N));
    order.assign(K, std::vector<std::uint32_t>(N));
    std::vector<double> totals(K, 0.0);
    parallel_for(K, workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        std::vector<double> z(N);
        for (std::size_t i = 0; i < N; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < p; ++j) s += dirs[k][j] * pooled[i * p + j];
          z[i] = s;
        }
        auto& o = order[k];
        std::iota(o.begin(), o.end(), 0u);
        std::stable_sort(o.begin(), o.end(), [&](std::uint32_t i, std::uint32_t j) { return z[i] < z[j]; });
        auto& zs = proj[k];
        double t = 0.0;
        for (std::size_t r = 0; r < N; ++r) {
          zs[r] = z[o[r]];
          t += zs[r] * (2.0 * static_cast<double>(r) - static_cast<double>(N - 1));
        }
        totals[k] = t;
      }
    });
    stat_for = [&, totals, K](const std::vector<std::uint8_t>& lab) {
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const auto& zs = proj[k];
        const auto& o = order[k];
        double wa = 0.0, wb = 0.0, ca = 0.0, cb = 0.0;
        for (std::size_t r = 0; r < N; ++r) {
          const double z = zs[r];
          if (lab[o[r]]) {
            wb += z * (2.0 * cb - (dnb - 1.0));
            cb += 1.0;
          } else {
            wa += z * (2.0 * ca - (dna - 1.0));
            ca += 1.0;
          }
        }
        acc += vstat(totals[k], wa, wb, dna, dnb);
      }
      return scale * acc / static_cast<double>(K);
    };
  }

  std::vector<std::uint8_t> observed(N, 0);
  std::fill(observed.begin() + static_cast<std::ptrdiff_t>(na), observed.end(), 1);
  // Identical samples give exactly zero; rounding would otherwise leave ~1e-16.
  res.statistic = a.data == b.data ? 0.0 : std::max(0.0, stat_for(observed));
  std::vector<double> perm(opts.permutations);
  parallel_for(opts.permutations, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) perm[k] = stat_for(labels[k]);
  });
  std::size_t ge = 0;
  for (double s : perm)
    if (s >= res.statistic) ++ge;
  res.p_value = (1.0 + static_cast<double>(ge)) / (1.0 + static_cast<double>(opts.permutations));
  return res;
}

}  // namespace gshs
