#include "phasegate/targets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "phasegate/rng.hpp"

namespace phasegate {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ComplexMatrix hadamard2() {
  ComplexMatrix h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

ComplexMatrix hadamard3() {
  ComplexMatrix h(3, 3);
  const double s = 1.0 / std::sqrt(3.0);
  const Complex w = std::polar(1.0, kTwoPi / 3.0);
  h << Complex(s), Complex(s), Complex(s),
       Complex(s), s * w, s * w * w,
       Complex(s), s * w * w, s * w;
  return h;
}

ComplexMatrix dft_target(int n) { return dft_matrix(n); }

ComplexMatrix clock_target(int n) {
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) c(j, j) = std::polar(1.0, kTwoPi * j / n);
  return c;
}

ComplexMatrix haar_random_unitary(int n, std::uint64_t seed) {
  Rng rng(Rng::splitmix64(seed));
  ComplexMatrix z(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) z(r, c) = Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the gauge so the distribution is Haar: scale columns of Q by the
  // phases of R's diagonal.
  for (int c = 0; c < n; ++c) {
    Complex d = r(c, c);
    double m = std::abs(d);
    q.col(c) *= (m > 0.0) ? d / m : Complex(1.0, 0.0);
  }
  return q;
}

ComplexMatrix target_by_name(const std::string& name, int n, std::uint64_t seed) {
  if (name == "identity") return ComplexMatrix::Identity(n, n);
  if (name == "hadamard2") return hadamard2();
  if (name == "hadamard3") return hadamard3();
  if (name == "dft") return dft_target(n);
  if (name == "clock") return clock_target(n);
  if (name == "random-haar") return haar_random_unitary(n, seed);
  throw std::invalid_argument("unknown target name: " + name);
}

}  // namespace phasegate
