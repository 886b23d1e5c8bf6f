#include <algorithm>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "tensorcue/errors.hpp"
#include "tensorcue/gof.hpp"
#include "tensorcue/rng.hpp"
#include "tensorcue/sampler.hpp"

using namespace tensorcue;
using std::numbers::pi;

namespace {

// Plain Gram-Schmidt QR without the phase fix on R's diagonal. Its output is
// unitary but not Haar distributed.
Eigen::MatrixXcd unfixed_qr_unitary(int n, RngStream& rng) {
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) z(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  return qr.householderQ();
}

struct TraceMoments {
  std::complex<double> mean_trace;
  double mean_sq;
  double se_sq;
};

template <typename Draw>
TraceMoments trace_moments(int samples, Draw draw) {
  std::complex<double> tr_sum = 0.0;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::MatrixXcd u = draw(s);
    const std::complex<double> tr = u.trace();
    tr_sum += tr;
    sum += std::norm(tr);
    sum_sq += std::norm(tr) * std::norm(tr);
  }
  const double mean = sum / samples;
  const double var = sum_sq / samples - mean * mean;
  return {tr_sum / static_cast<double>(samples), mean, std::sqrt(var / samples)};
}

}  // namespace

TEST_CASE("RngStream is deterministic and streams differ") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
  RngStream u(1, 1);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("RngStream complex normals have unit second moment") {
  RngStream rng(9, 0);
  const int n = 200000;
  std::complex<double> sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.complex_normal();
    sum += z;
    sq += std::norm(z);
  }
  CHECK(std::abs(sum / static_cast<double>(n)) < 4.0 / std::sqrt(n));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(4.0 / std::sqrt(n)));
}

TEST_CASE("wrap_angle and PhaseVector") {
  CHECK(wrap_angle(2.0 * pi) == 0.0);
  CHECK(wrap_angle(-pi / 2) == doctest::Approx(1.5 * pi));
  CHECK(wrap_angle(7.0 * pi) == doctest::Approx(pi));
  CHECK_THROWS_AS(PhaseVector({0.1, 7.0}), std::invalid_argument);
  const PhaseVector v({3.0, 1.0, 2.0});
  CHECK(v[0] == 1.0);
  CHECK(v[2] == 3.0);
  const auto w = PhaseVector::from_angles({-0.5, 2.0 * pi + 0.25});
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[1] == doctest::Approx(2.0 * pi - 0.5));
}

TEST_CASE("Haar samples are unitary and deterministic") {
  for (int n : {1, 2, 5, 17, 40}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      RngStream rng(123, s);
      const auto u = sample_haar_unitary(n, rng);
      CHECK(unitarity_residual(u) < 1e-10);
    }
  }
  RngStream a(5, 3), b(5, 3);
  CHECK(sample_haar_unitary(5, a) == sample_haar_unitary(5, b));
  RngStream c(5, 3);
  CHECK_THROWS_AS(sample_haar_unitary(513, c), capacity_error);
  CHECK_THROWS_AS(sample_haar_unitary(0, c), std::invalid_argument);
}

TEST_CASE("U(1) samples are uniform phases") {
  std::vector<double> phases;
  for (std::uint64_t s = 0; s < 6400; ++s) {
    RngStream rng(77, s);
    const auto u = sample_haar_unitary(1, rng);
    CHECK(std::abs(u(0, 0)) == doctest::Approx(1.0));
    phases.push_back(wrap_angle(std::arg(u(0, 0))));
  }
  CHECK(chi_square_p_value(chi_square_uniformity(phases, 32)) > 0.001);
}

TEST_CASE("trace moments identify Haar measure") {
  // E Tr U = 0 and E|Tr U|^2 = 1 for every n.
  for (int n : {2, 10, 30}) {
    const int N = 10000;
    const auto m = trace_moments(N, [&](int s) {
      RngStream rng(2024, s);
      return sample_haar_unitary(n, rng);
    });
    CHECK(std::abs(m.mean_trace) < 4.0 / std::sqrt(N));
    CHECK(std::abs(m.mean_sq - 1.0) < 4.0 * m.se_sq);
  }
}

TEST_CASE("QR without the phase correction fails the moment test") {
  const int N = 4000;
  const auto m = trace_moments(N, [&](int s) {
    RngStream rng(31, s);
    return unfixed_qr_unitary(10, rng);
  });
  CHECK(std::abs(m.mean_sq - 1.0) > 4.0 * m.se_sq);
}

TEST_CASE("left multiplication by a fixed unitary preserves the law") {
  RngStream fixed_rng(999, 0);
  const Eigen::MatrixXcd v = sample_haar_unitary(6, fixed_rng);
  const int N = 8000;
  // Tr(U) and Tr(VU) share the Haar law; compare E|Tr|^2 and E|Tr|^4 (= 2 for n >= 2).
  double s2 = 0.0, s4 = 0.0, t2 = 0.0, t4 = 0.0;
  for (int s = 0; s < N; ++s) {
    RngStream rng(1000, s);
    const auto u = sample_haar_unitary(6, rng);
    const double a = std::norm(u.trace());
    const double b = std::norm((v * u).trace());
    s2 += a; s4 += a * a; t2 += b; t4 += b * b;
  }
  CHECK(std::abs(s2 / N - t2 / N) < 0.1);
  CHECK(s4 / N == doctest::Approx(2.0).epsilon(0.15));
  CHECK(t4 / N == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("eigenphases of known matrices") {
  const auto id = eigenphases(Eigen::MatrixXcd::Identity(3, 3));
  for (double x : id) CHECK(x == 0.0);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = std::polar(1.0, pi / 2);
  d(2, 2) = std::polar(1.0, pi);
  const auto pd = eigenphases(d);
  CHECK(pd[0] == doctest::Approx(0.0));
  CHECK(pd[1] == doctest::Approx(pi / 2));
  CHECK(pd[2] == doctest::Approx(pi));

  const double phi = pi / 3;
  Eigen::MatrixXcd rot(2, 2);
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  const auto pr = eigenphases(rot);
  CHECK(pr[0] == doctest::Approx(pi / 3));
  CHECK(pr[1] == doctest::Approx(2.0 * pi - pi / 3));

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) * 1.01;
  CHECK_THROWS_AS(eigenphases(bad), std::invalid_argument);
}

TEST_CASE("eigenphases reproduce the spectrum and determinant") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    RngStream rng(55, s);
    const auto u = sample_haar_unitary(12, rng);
    const auto ph = eigenphases(u);
    REQUIRE(ph.size() == 12);
    std::complex<double> prod = 1.0;
    for (double x : ph) {
      prod *= std::polar(1.0, x);
      // each e^{ix} is an eigenvalue: U - e^{ix} I is singular
      const Eigen::MatrixXcd shifted = u - std::polar(1.0, x) * Eigen::MatrixXcd::Identity(12, 12);
      const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
      CHECK(svd.singularValues().minCoeff() < 1e-8);
    }
    CHECK(std::abs(std::arg(prod / u.determinant())) < 1e-6);
  }
}

TEST_CASE("sample_cue_phases: determinism, marginal uniformity, n=2 spacing") {
  RngStream a(8, 1), b(8, 1);
  CHECK(sample_cue_phases(7, a) == sample_cue_phases(7, b));

  std::vector<double> pooled;
  double cos_sum = 0.0, dist_sum = 0.0;
  const int N = 4000;
  for (int s = 0; s < N; ++s) {
    RngStream rng(4, s);
    const auto ph = sample_cue_phases(2, rng);
    const double g = ph[1] - ph[0];
    cos_sum += std::cos(g);
    dist_sum += std::min(g, 2.0 * pi - g);
    pooled.insert(pooled.end(), ph.begin(), ph.end());
  }
  // The sorted gap is not the typical gap (the other one covers 0). Use the
  // pair density, proportional to 1 - cos(phi): E cos = -1/2, and the
  // circular distance has mean pi/2 + 2/pi. Both sds ~ 0.7 / sqrt(N) ~ 0.011.
  CHECK(std::abs(cos_sum / N + 0.5) < 0.05);
  CHECK(std::abs(dist_sum / N - (pi / 2 + 2 / pi)) < 0.05);
  CHECK(chi_square_p_value(chi_square_uniformity(pooled, 32)) > 0.01);
}

TEST_CASE("phase law is rotation invariant") {
  // Histogram of raw phases vs phases rotated by a fixed angle: both uniform.
  std::vector<double> raw, rotated;
  for (int s = 0; s < 3000; ++s) {
    RngStream rng(15, s);
    for (double x : sample_cue_phases(5, rng)) {
      raw.push_back(x);
      rotated.push_back(wrap_angle(x + 1.234));
    }
  }
  CHECK(chi_square_p_value(chi_square_uniformity(raw, 16)) > 0.01);
  CHECK(chi_square_p_value(chi_square_uniformity(rotated, 16)) > 0.01);
}
