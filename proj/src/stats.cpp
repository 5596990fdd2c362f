#include "contagion/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace contagion {

Histogram histogram(std::span<const double> values, std::size_t bins,
                    std::optional<std::pair<double, double>> range) {
  if (bins < 1) throw std::invalid_argument("bins must be at least 1");
  Histogram h;
  if (range) {
    h.lo = range->first;
    h.hi = range->second;
  } else if (!values.empty()) {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    h.lo = *mn;
    h.hi = *mx;
  }
  if (!(h.hi > h.lo)) bins = 1;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  const double width = bins == 1 && !(h.hi > h.lo) ? 0.0 : (h.hi - h.lo) / double(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = h.lo + width * double(b);
  h.edges[bins] = h.hi;
  for (double v : values) {
    if (v < h.lo || v > h.hi) continue;
    std::size_t b = width > 0.0 ? std::size_t((v - h.lo) / width) : 0;
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    double r = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {
double pearson(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw std::domain_error("correlation undefined for constant input");
  return sab / std::sqrt(saa * sbb);
}
}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("spearman: need at least 3 points");
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("kendall: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("kendall: need at least 2 points");
  long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tie_x;
      } else if (dy == 0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  double denom = std::sqrt(double(concordant + discordant + tie_x) *
                           double(concordant + discordant + tie_y));
  if (denom == 0.0) throw std::domain_error("kendall: constant input");
  return double(concordant - discordant) / denom;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(xs.size() - 1)) / std::sqrt(double(xs.size()));
}

}  // namespace contagion
