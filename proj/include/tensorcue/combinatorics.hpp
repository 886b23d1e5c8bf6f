#pragma once

// Set partitions, Stirling/Bell counts and the correlation functions of a
// superposition of independent, rescaled sine processes.

#include <cstdint>
#include <span>
#include <vector>

#include "tensorcue/kernels.hpp"

namespace tensorcue {

// A partition of {0, ..., k-1}. Blocks are sorted internally and ordered by
// their smallest element.
struct SetPartition {
  int k = 0;
  std::vector<std::vector<int>> blocks;

  int block_count() const { return static_cast<int>(blocks.size()); }
  friend bool operator==(const SetPartition&, const SetPartition&) = default;
};

// All partitions of {0, ..., k-1}, grouped by block count:
// by_blocks[p - 1] holds the partitions with exactly p blocks.
struct PartitionFamily {
  int k = 0;
  std::vector<std::vector<SetPartition>> by_blocks;

  std::size_t size() const;
  const std::vector<SetPartition>& with_blocks(int p) const { return by_blocks.at(p - 1); }
};

inline constexpr int kMaxPartitionSize = 12;

// Enumerated through restricted-growth strings; throws capacity_error for k > 12.
PartitionFamily set_partitions(int k);

std::uint64_t stirling2(int k, int p);
std::uint64_t bell_number(int k);

double falling_factorial(double x, int p);
// Exact integer version; throws std::overflow_error when the product leaves int64.
std::int64_t falling_factorial(std::int64_t x, int p);

// |sum_p S(k, p) x^(p falling) - x^k|. Integral x is evaluated in exact
// integer arithmetic.
double stirling_identity_residual(int k, double x);

// k-point function of m Sigma_1 u ... u m Sigma_m, independent sine processes
// each dilated by m (total intensity 1).
double rho_superposed_sine(int m, std::span<const double> points, const KernelOptions& opts = {});

// The k = 2 case, 1 - q(delta / m)^2 / m.
double rho_superposed_pair(int m, double delta);

namespace detail {

// Recursive block-insertion enumeration, independent of the restricted-growth
// path. Used to cross-check set_partitions and rho_superposed_sine.
std::vector<SetPartition> set_partitions_by_insertion(int k);
double rho_superposed_sine_by_insertion(int m, std::span<const double> points,
                                        const KernelOptions& opts = {});

}  // namespace detail

}  // namespace tensorcue
