#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "phasegate/rng.hpp"
#include "phasegate/targets.hpp"
#include "phasegate/unitary.hpp"

using namespace phasegate;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Brute-force oracle, independent of the library path: naive DFT entries and
// a triple-loop multiplier.
ComplexMatrix naive_dft(int K) {
  ComplexMatrix F(K, K);
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k)
      F(j, k) = std::exp(Complex(0.0, -kTau * j * k / K)) / std::sqrt(double(K));
  return F;
}

ComplexMatrix naive_mul(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix C = ComplexMatrix::Zero(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j)
      for (int k = 0; k < A.cols(); ++k) C(i, j) += A(i, k) * B(k, j);
  return C;
}

ComplexMatrix oracle_compose(const LayerStack& stack) {
  const int K = stack.K;
  ComplexMatrix F = naive_dft(K);
  ComplexMatrix Fh = F.adjoint();
  ComplexMatrix V = ComplexMatrix::Identity(K, K);
  for (const Layer& layer : stack.layers) {
    ComplexMatrix D = ComplexMatrix::Zero(K, K);
    for (int k = 0; k < K; ++k)
      D(k, k) = std::exp(Complex(0.0, layer.phase.phases[k]));
    if (layer.domain == Domain::Spectrum) {
      V = naive_mul(D, V);
    } else {
      V = naive_mul(Fh, naive_mul(D, naive_mul(F, V)));
    }
  }
  return V;
}

LayerStack random_stack(int K, int layers, Rng& rng) {
  LayerStack st;
  st.K = K;
  for (int i = 0; i < layers; ++i) {
    RealVector p(K);
    for (int k = 0; k < K; ++k) p[k] = rng.uniform(-std::numbers::pi, std::numbers::pi);
    st.layers.push_back({i % 2 == 0 ? Domain::Angle : Domain::Spectrum,
                         DiagonalPhase(std::move(p))});
  }
  return st;
}

}  // namespace

TEST_CASE("dft_matrix basics") {
  ComplexMatrix f1 = dft_matrix(1);
  CHECK(f1.rows() == 1);
  CHECK(std::abs(f1(0, 0) - Complex(1.0, 0.0)) < 1e-15);

  ComplexMatrix f2 = dft_matrix(2);
  CHECK((f2 - hadamard2()).cwiseAbs().maxCoeff() < 1e-15);

  ComplexMatrix f4 = dft_matrix(4);
  CHECK((f4 * f4.adjoint() - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
        1e-14);

  CHECK_THROWS_AS(dft_matrix(0), std::invalid_argument);
}

TEST_CASE("compose_stack identity at zero phases") {
  for (int m : {1, 3, 5}) {
    LayerStack st;
    st.K = 8;
    for (int i = 0; i < m; ++i)
      st.layers.push_back({i % 2 == 0 ? Domain::Angle : Domain::Spectrum,
                           DiagonalPhase::zero(8)});
    ComplexMatrix V = compose_stack(st);
    CHECK((V - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("compose_stack matches brute-force oracle") {
  Rng rng(2024);
  LayerStack st = random_stack(4, 3, rng);
  ComplexMatrix got = compose_stack(st);
  ComplexMatrix want = oracle_compose(st);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose_stack rejects malformed stacks") {
  LayerStack st;
  st.K = 4;
  st.layers.push_back({Domain::Angle, DiagonalPhase::zero(4)});
  st.layers.push_back({Domain::Angle, DiagonalPhase::zero(4)});
  CHECK_THROWS_AS(compose_stack(st), std::invalid_argument);

  LayerStack st2;
  st2.K = 4;
  st2.layers.push_back({Domain::Angle, DiagonalPhase::zero(5)});
  CHECK_THROWS_AS(compose_stack(st2), std::invalid_argument);
}

TEST_CASE("spectrum clock layer equals angle-basis rotation") {
  // g(l) = pi*l/4 on charges l = j - K/2 is a clock matrix; the same operator
  // is a rotation by pi/4 (a cyclic shift of K/8 angle bins) conjugated into
  // the spectrum basis.
  const int K = 64, shift = K / 8;
  RealVector g(K);
  for (int j = 0; j < K; ++j) g[j] = std::numbers::pi * (j - K / 2) / 4.0;
  LayerStack st;
  st.K = K;
  st.layers.push_back({Domain::Spectrum, DiagonalPhase(g)});
  ComplexMatrix clock = compose_stack(st);

  ComplexMatrix rot = ComplexMatrix::Zero(K, K);
  for (int k = 0; k < K; ++k) rot(k, (k - shift + K) % K) = 1.0;
  ComplexMatrix F = dft_matrix(K);
  ComplexMatrix conj = F.adjoint() * rot * F;
  CHECK((clock - conj).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clock/rotation duality for random shifts") {
  Rng rng(7);
  const int K = 16;
  ComplexMatrix F = dft_matrix(K);
  for (int trial = 0; trial < 5; ++trial) {
    const int s = 1 + static_cast<int>(rng.bits() % (K - 1));
    RealVector g(K);
    for (int j = 0; j < K; ++j) g[j] = kTau * j * s / K;
    LayerStack st;
    st.K = K;
    st.layers.push_back({Domain::Spectrum, DiagonalPhase(g)});
    ComplexMatrix D = compose_stack(st);
    ComplexMatrix rot = ComplexMatrix::Zero(K, K);
    for (int k = 0; k < K; ++k) rot(k, (k - s + K) % K) = 1.0;
    CHECK((D - F.adjoint() * rot * F).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("compose_stack output is unitary (property)") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int K = 2 + static_cast<int>(rng.bits() % 63);  // up to 64
    const int layers = 1 + 2 * static_cast<int>(rng.bits() % 3);
    LayerStack st = random_stack(K, layers, rng);
    CHECK(unitarity_defect(compose_stack(st)) < 1e-12);
  }
}

TEST_CASE("channel windows") {
  ChannelWindow w = ChannelWindow::centered(64, 3, 2);
  CHECK(w.channel_indices == std::vector<int>{31, 32, 33});
  CHECK(w.window_first() == 29);
  CHECK(w.window_last() == 35);
  CHECK(w.center() == doctest::Approx(32.0));

  ChannelWindow w2 = ChannelWindow::centered(64, 2, 3);
  CHECK(w2.channel_indices == std::vector<int>{32, 33});
  CHECK(w2.center() == doctest::Approx(32.5));

  CHECK_THROWS_AS(ChannelWindow::centered(4, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(ChannelWindow::at(8, 2, 3, 0), std::invalid_argument);
}

TEST_CASE("central_block") {
  ChannelWindow w = ChannelWindow::centered(64, 2, 3);
  ComplexMatrix I = ComplexMatrix::Identity(64, 64);
  CHECK((central_block(I, w) - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);

  ComplexMatrix F = dft_matrix(64);
  ComplexMatrix B = central_block(F, w);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const int j = w.channel_indices[r], k = w.channel_indices[c];
      Complex want = std::exp(Complex(0.0, -kTau * j * k / 64.0)) / 8.0;
      CHECK(std::abs(B(r, c) - want) < 1e-14);
    }

  ChannelWindow ws = ChannelWindow::strided(64, 3, 0, 20, 4);
  CHECK(ws.channel_indices == std::vector<int>{20, 24, 28});
  ComplexMatrix Bs = central_block(F, ws);
  CHECK(std::abs(Bs(1, 2) - F(24, 28)) == 0.0);

  ComplexMatrix small(4, 4);
  CHECK_THROWS_AS(central_block(small, w), std::invalid_argument);
}

TEST_CASE("fidelity") {
  Rng rng(5);
  ComplexMatrix U = haar_random_unitary(3, 42);
  CHECK(fidelity(U, U) == doctest::Approx(1.0).epsilon(1e-12));
  ComplexMatrix phased = std::polar(1.0, 1.234) * U;
  CHECK(fidelity(U, phased) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity(U, 3.7 * phased) == doctest::Approx(1.0).epsilon(1e-12));

  ComplexMatrix X(2, 2);
  X << 0, 1, 1, 0;
  CHECK(fidelity(ComplexMatrix::Identity(2, 2), X) == doctest::Approx(0.0));

  // Symmetry and bounds over random pairs.
  for (int t = 0; t < 10; ++t) {
    ComplexMatrix A(3, 3), B(3, 3);
    for (int i = 0; i < 9; ++i) {
      A(i / 3, i % 3) = Complex(rng.normal(), rng.normal());
      B(i / 3, i % 3) = Complex(rng.normal(), rng.normal());
    }
    const double f_ab = fidelity(A, B), f_ba = fidelity(B, A);
    CHECK(f_ab == doctest::Approx(f_ba).epsilon(1e-12));
    CHECK(f_ab >= 0.0);
    CHECK(f_ab <= 1.0 + 1e-12);
  }

  ComplexMatrix Z = ComplexMatrix::Zero(2, 2);
  CHECK_THROWS_AS(fidelity(Z, X), std::invalid_argument);
  CHECK_THROWS_AS(fidelity(X, ComplexMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("success_probability") {
  CHECK(success_probability(ComplexMatrix::Identity(3, 3)) == doctest::Approx(1.0));
  ComplexMatrix half = (1.0 / std::sqrt(2.0)) * ComplexMatrix::Identity(2, 2);
  CHECK(success_probability(half) == doctest::Approx(0.5));
  ComplexMatrix rect = ComplexMatrix::Zero(2, 3);
  CHECK_THROWS_AS(success_probability(rect), std::invalid_argument);
}

TEST_CASE("probability reaches one only when the window is closed") {
  // Permutation that maps the window onto itself: no leakage.
  const int K = 8;
  ChannelWindow w = ChannelWindow::at(K, 2, 0, 3);
  ComplexMatrix P = ComplexMatrix::Zero(K, K);
  std::vector<int> perm = {1, 0, 2, 4, 3, 5, 6, 7};  // swaps 3<->4
  for (int j = 0; j < K; ++j) P(perm[j], j) = 1.0;
  CHECK(success_probability(central_block(P, w)) == doctest::Approx(1.0));

  // Permutation that maps an encoding channel out of the window: leakage.
  std::vector<int> leak = {3, 1, 2, 0, 4, 5, 6, 7};  // 3 -> 0
  ComplexMatrix Q = ComplexMatrix::Zero(K, K);
  for (int j = 0; j < K; ++j) Q(leak[j], j) = 1.0;
  CHECK(success_probability(central_block(Q, w)) < 1.0);
}

TEST_CASE("phase_test_fidelity") {
  ComplexMatrix U = haar_random_unitary(3, 3);
  Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(3, 3);
  CHECK(phase_test_fidelity(U, ident) == doctest::Approx(1.0));

  Eigen::MatrixXd uniform =
      Eigen::MatrixXd::Constant(3, 3, 1.0 / std::sqrt(3.0));
  CHECK(phase_test_fidelity(U, uniform) == doctest::Approx(1.0 / 3.0));

  Eigen::MatrixXd neg = ident;
  neg(0, 1) = -0.1;
  CHECK_THROWS_AS(phase_test_fidelity(U, neg), std::invalid_argument);
}

TEST_CASE("phase equivalence modulo 2 pi") {
  CHECK(phases_equivalent(0.25, 0.25 + kTau));
  CHECK(phases_equivalent(-std::numbers::pi, std::numbers::pi));
  CHECK_FALSE(phases_equivalent(0.0, 0.5));
}
