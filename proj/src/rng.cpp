#include "tensorcue/rng.hpp"

#include <cmath>
#include <numbers>

namespace tensorcue {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0x6a09e667f3bcc909ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_(mix64(seed + kGamma) ^ mix64(mix64(stream_id ^ kStreamSalt) + kStreamSalt)) {}

RngStream::result_type RngStream::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::complex<double> RngStream::complex_normal() {
  // 1 - u lies in (0, 1], keeping the log finite.
  const double radius = std::sqrt(-std::log(1.0 - uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  return std::polar(radius, angle);
}

}  // namespace tensorcue
