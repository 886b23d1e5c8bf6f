#include "tensorcue/combinatorics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tensorcue {

namespace {

void check_partition_size(int k) {
  if (k < 1) throw std::invalid_argument("partition size must be >= 1");
  if (k > kMaxPartitionSize) {
    throw capacity_error("partition size " + std::to_string(k) + " exceeds cap " +
                         std::to_string(kMaxPartitionSize));
  }
}

SetPartition from_growth_string(const std::vector<int>& labels, int blocks) {
  SetPartition part;
  part.k = static_cast<int>(labels.size());
  part.blocks.resize(blocks);
  for (int i = 0; i < part.k; ++i) part.blocks[labels[i]].push_back(i);
  return part;
}

// Advances a restricted-growth string (a[0] = 0, a[i] <= 1 + max(a[0..i-1]))
// to its lexicographic successor. prefix_max[i] caches max(a[0..i]).
bool next_growth_string(std::vector<int>& a, std::vector<int>& prefix_max) {
  const int k = static_cast<int>(a.size());
  for (int i = k - 1; i > 0; --i) {
    if (a[i] <= prefix_max[i - 1]) {
      ++a[i];
      prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
      for (int j = i + 1; j < k; ++j) {
        a[j] = 0;
        prefix_max[j] = prefix_max[i];
      }
      return true;
    }
  }
  return false;
}

const std::vector<PartitionFamily>& cached_families() {
  static const std::vector<PartitionFamily> families = [] {
    std::vector<PartitionFamily> out;
    for (int k = 1; k <= 8; ++k) out.push_back(set_partitions(k));
    return out;
  }();
  return families;
}

double block_product(const SetPartition& part, std::span<const double> scaled,
                     const KernelOptions& opts) {
  double prod = 1.0;
  std::array<double, 16> buf{};
  for (const auto& block : part.blocks) {
    for (std::size_t i = 0; i < block.size(); ++i) buf[i] = scaled[block[i]];
    prod *= rho_sine<double>(std::span<const double>(buf.data(), block.size()), opts);
    if (prod == 0.0) break;
  }
  return prod;
}

// (1/m^k) m!/(m-p)!, as a product of ratios so nothing overflows.
double superposition_weight(int m, int k, int p) {
  double w = 1.0;
  const double md = m;
  for (int i = 0; i < p; ++i) w *= (md - i) / md;
  return w * std::pow(md, -(k - p));
}

void check_superposition_args(int m, std::span<const double> points, const KernelOptions& opts) {
  if (m < 1) throw std::invalid_argument("rho_superposed_sine: m must be >= 1");
  detail::check_order<double>(static_cast<int>(points.size()), opts);
  for (double x : points) detail::check_finite(x, "rho_superposed_sine");
}

}  // namespace

std::size_t PartitionFamily::size() const {
  std::size_t total = 0;
  for (const auto& group : by_blocks) total += group.size();
  return total;
}

PartitionFamily set_partitions(int k) {
  check_partition_size(k);
  PartitionFamily family;
  family.k = k;
  family.by_blocks.resize(k);
  std::vector<int> a(k, 0);
  std::vector<int> prefix_max(k, 0);
  do {
    const int blocks = prefix_max.back() + 1;
    family.by_blocks[blocks - 1].push_back(from_growth_string(a, blocks));
  } while (next_growth_string(a, prefix_max));
  return family;
}

std::uint64_t stirling2(int k, int p) {
  if (k < 0 || p < 0) throw std::invalid_argument("stirling2: negative argument");
  if (k > 25) throw capacity_error("stirling2: k exceeds 25");
  if (p > k) return 0;
  // S(k, p) = p S(k-1, p) + S(k-1, p-1)
  std::vector<std::uint64_t> row(k + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= k; ++i) {
    for (int j = std::min(i, k); j >= 1; --j) row[j] = j * row[j] + row[j - 1];
    row[0] = 0;
  }
  return row[p];
}

std::uint64_t bell_number(int k) {
  std::uint64_t total = 0;
  for (int p = 0; p <= k; ++p) total += stirling2(k, p);
  return total;
}

double falling_factorial(double x, int p) {
  if (p < 0) throw std::invalid_argument("falling_factorial: p must be >= 0");
  double prod = 1.0;
  for (int i = 0; i < p; ++i) prod *= x - i;
  return prod;
}

std::int64_t falling_factorial(std::int64_t x, int p) {
  if (p < 0) throw std::invalid_argument("falling_factorial: p must be >= 0");
  std::int64_t prod = 1;
  for (int i = 0; i < p; ++i) {
    if (__builtin_mul_overflow(prod, x - i, &prod)) {
      throw std::overflow_error("falling_factorial: int64 overflow");
    }
  }
  return prod;
}

double stirling_identity_residual(int k, double x) {
  check_partition_size(k);
  detail::check_finite(x, "stirling_identity_residual");
  const bool integral = std::trunc(x) == x && std::abs(x) < 1e4;
  if (integral) {
    const auto xi = static_cast<std::int64_t>(x);
    std::int64_t sum = 0;
    for (int p = 1; p <= k; ++p) {
      sum += static_cast<std::int64_t>(stirling2(k, p)) * falling_factorial(xi, p);
    }
    std::int64_t power = 1;
    for (int i = 0; i < k; ++i) power *= xi;
    const std::int64_t diff = sum - power;
    return static_cast<double>(diff < 0 ? -diff : diff);
  }
  double sum = 0.0;
  for (int p = 1; p <= k; ++p) sum += static_cast<double>(stirling2(k, p)) * falling_factorial(x, p);
  return std::abs(sum - std::pow(x, k));
}

double rho_superposed_sine(int m, std::span<const double> points, const KernelOptions& opts) {
  check_superposition_args(m, points, opts);
  const int k = static_cast<int>(points.size());
  if (k > 8) throw capacity_error("rho_superposed_sine: order above 8 is not tabulated");
  std::vector<double> scaled(points.begin(), points.end());
  for (double& x : scaled) x /= m;
  const PartitionFamily& family = cached_families()[k - 1];
  double total = 0.0;
  for (int p = 1; p <= std::min(m, k); ++p) {
    double inner = 0.0;
    for (const SetPartition& part : family.with_blocks(p)) inner += block_product(part, scaled, opts);
    total += superposition_weight(m, k, p) * inner;
  }
  return total;
}

double rho_superposed_pair(int m, double delta) {
  if (m < 1) throw std::invalid_argument("rho_superposed_pair: m must be >= 1");
  const double q = sine_q(delta / m);
  return 1.0 - q * q / m;
}

namespace detail {

namespace {

void insert_element(int next, int k, SetPartition& current, std::vector<SetPartition>& out) {
  if (next == k) {
    out.push_back(current);
    return;
  }
  // indices, not references: the recursion below grows current.blocks
  for (std::size_t b = 0; b < current.blocks.size(); ++b) {
    current.blocks[b].push_back(next);
    insert_element(next + 1, k, current, out);
    current.blocks[b].pop_back();
  }
  current.blocks.push_back({next});
  insert_element(next + 1, k, current, out);
  current.blocks.pop_back();
}

}  // namespace

std::vector<SetPartition> set_partitions_by_insertion(int k) {
  check_partition_size(k);
  std::vector<SetPartition> out;
  SetPartition current;
  current.k = k;
  insert_element(0, k, current, out);
  return out;
}

double rho_superposed_sine_by_insertion(int m, std::span<const double> points,
                                        const KernelOptions& opts) {
  check_superposition_args(m, points, opts);
  const int k = static_cast<int>(points.size());
  std::vector<double> scaled(points.begin(), points.end());
  for (double& x : scaled) x /= m;
  double total = 0.0;
  for (const SetPartition& part : set_partitions_by_insertion(k)) {
    const int p = part.block_count();
    if (p > m) continue;
    total += superposition_weight(m, k, p) * block_product(part, scaled, opts);
  }
  return total;
}

}  // namespace detail

}  // namespace tensorcue
