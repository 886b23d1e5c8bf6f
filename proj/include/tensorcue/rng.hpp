#pragma once

#include <complex>
#include <cstdint>
#include <limits>

namespace tensorcue {

// Counter-based 64-bit stream. Output c of stream (seed, stream_id) is
// mix64(key + (c + 1) * gamma) with key = f(seed, stream_id), so any stream
// can be opened directly without stepping through the others.
//
// Satisfies std::uniform_random_bit_generator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard complex Gaussian, E|z|^2 = 1, by Box-Muller.
  std::complex<double> complex_normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace tensorcue
