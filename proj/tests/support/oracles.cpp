#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace szzkit::testing {

namespace {

std::vector<double> mid_ranks(const std::vector<double>& row) {
  std::vector<double> r(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    int less = 0, equal = 0;
    for (double v : row) {
      less += v < row[j];
      equal += v == row[j];
    }
    r[j] = less + (equal + 1) / 2.0;
  }
  return r;
}

double statistic_from_ranks(const std::vector<std::vector<double>>& ranks) {
  const double n = static_cast<double>(ranks.size());
  const double k = static_cast<double>(ranks.front().size());
  double num = 0, sq = 0;
  for (std::size_t j = 0; j < ranks.front().size(); ++j) {
    double rj = 0;
    for (const auto& row : ranks) rj += row[j];
    num += (rj - n * (k + 1) / 2) * (rj - n * (k + 1) / 2);
  }
  for (const auto& row : ranks) {
    for (double r : row) sq += r * r;
  }
  const double den = sq - n * k * (k + 1) * (k + 1) / 4;
  return den <= 1e-12 ? 0.0 : (k - 1) * num / den;
}

}  // namespace

double brute_friedman_statistic(const std::vector<std::vector<double>>& m) {
  std::vector<std::vector<double>> ranks;
  for (const auto& row : m) ranks.push_back(mid_ranks(row));
  return statistic_from_ranks(ranks);
}

double brute_friedman_p(const std::vector<std::vector<double>>& m) {
  std::vector<std::vector<double>> base;
  for (const auto& row : m) base.push_back(mid_ranks(row));
  const double observed = statistic_from_ranks(base);
  const std::size_t n = m.size(), k = m.front().size();
  std::vector<std::size_t> ident(k);
  std::iota(ident.begin(), ident.end(), 0);
  std::vector<std::vector<std::size_t>> perms;
  do perms.push_back(ident);
  while (std::next_permutation(ident.begin(), ident.end()));

  std::vector<std::size_t> choice(n, 0);
  std::vector<std::vector<double>> ranks = base;
  long long hits = 0, total = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) ranks[i][j] = base[i][perms[choice[i]][j]];
    }
    ++total;
    hits += statistic_from_ranks(ranks) >= observed - 1e-9;
    std::size_t i = 0;
    while (i < n && ++choice[i] == perms.size()) choice[i++] = 0;
    if (i == n) break;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

double range_cdf(double w, int k) {
  const auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const auto phi = [](double z) { return std::exp(-z * z / 2) / std::sqrt(2 * M_PI); };
  const int steps = 4000;
  const double lo = -9, hi = 9, h = (hi - lo) / steps;
  double sum = 0;
  for (int i = 0; i <= steps; ++i) {
    const double z = lo + i * h;
    const double f = phi(z) * std::pow(Phi(z + w) - Phi(z), k - 1);
    sum += f * (i == 0 || i == steps ? 1 : (i % 2 ? 4 : 2));
  }
  return k * sum * h / 3;
}

}  // namespace

double studentized_range_q(int k, double alpha) {
  double lo = 0, hi = 10;
  for (int it = 0; it < 100; ++it) {
    const double mid = (lo + hi) / 2;
    (range_cdf(mid, k) < 1 - alpha ? lo : hi) = mid;
  }
  return lo / std::sqrt(2.0);
}

}  // namespace szzkit::testing
