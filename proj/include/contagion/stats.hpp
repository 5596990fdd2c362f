#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace contagion {

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

// Equal-width bins over [lo, hi] (data range when not given); the last bin is
// closed. Constant data collapses to a single bin.
Histogram histogram(std::span<const double> values, std::size_t bins,
                    std::optional<std::pair<double, double>> range = std::nullopt);

// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

// Spearman rank correlation; throws std::domain_error on constant input,
// std::invalid_argument on length mismatch or n < 3.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Kendall tau-b; throws std::domain_error when either input is constant.
double kendall_tau(std::span<const double> xs, std::span<const double> ys);

double mean(std::span<const double> xs);
// Standard error of the mean (sample sd / sqrt(n)); 0 for n < 2.
double standard_error(std::span<const double> xs);

}  // namespace contagion
