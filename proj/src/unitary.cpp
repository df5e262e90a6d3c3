#include "phasegate/unitary.hpp"

#include <cmath>
#include <numbers>

namespace phasegate {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

bool phases_equivalent(double a, double b, double tol) {
  double diff = std::remainder(a - b, kTwoPi);
  return std::abs(diff) <= tol;
}

void LayerStack::validate() const {
  if (K < 1) throw std::invalid_argument("LayerStack: K must be >= 1");
  if (layers.empty()) throw std::invalid_argument("LayerStack: no layers");
  for (size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].phase.dim() != K)
      throw std::invalid_argument("LayerStack: layer dimension mismatch");
    if (i > 0 && layers[i].domain == layers[i - 1].domain)
      throw std::invalid_argument("LayerStack: domains must alternate");
  }
}

ChannelWindow ChannelWindow::centered(int K, int N, int d) {
  return at(K, N, d, K / 2 - (N - 1) / 2);
}

ChannelWindow ChannelWindow::at(int K, int N, int d, int first_encoding) {
  return strided(K, N, d, first_encoding, 1);
}

ChannelWindow ChannelWindow::strided(int K, int N, int d, int first_encoding,
                                     int stride) {
  ChannelWindow w;
  w.K = K;
  w.N = N;
  w.d = d;
  w.stride = stride;
  w.channel_indices.resize(N);
  for (int i = 0; i < N; ++i) w.channel_indices[i] = first_encoding + i * stride;
  w.validate();
  return w;
}

void ChannelWindow::validate() const {
  if (K < 1 || N < 1 || d < 0 || stride < 1)
    throw std::invalid_argument("ChannelWindow: bad dimensions");
  if (static_cast<int>(channel_indices.size()) != N)
    throw std::invalid_argument("ChannelWindow: index count != N");
  if (N + 2 * d > K)
    throw std::invalid_argument("ChannelWindow: N + 2d exceeds K");
  // Working window must fit in 0..K-1 without wraparound.
  if (window_first() < 0 || window_last() >= K)
    throw std::invalid_argument("ChannelWindow: working window leaves 0..K-1");
  for (int i = 1; i < N; ++i)
    if (channel_indices[i] - channel_indices[i - 1] != stride)
      throw std::invalid_argument("ChannelWindow: indices not evenly strided");
}

RealVector ChannelWindow::window_mask() const {
  RealVector m = RealVector::Zero(K);
  for (int j = window_first(); j <= window_last(); ++j) m[j] = 1.0;
  return m;
}

ComplexMatrix dft_matrix(int K) {
  if (K < 1) throw std::invalid_argument("dft_matrix: K must be >= 1");
  ComplexMatrix F(K, K);
  const double norm = 1.0 / std::sqrt(static_cast<double>(K));
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < K; ++k) {
      // Reduce j*k mod K first so large K stays exact.
      long jk = (static_cast<long>(j) * k) % K;
      F(j, k) = std::polar(norm, -kTwoPi * static_cast<double>(jk) / K);
    }
  }
  return F;
}

ComplexMatrix compose_stack(const LayerStack& stack) {
  stack.validate();
  const int K = stack.K;
  const ComplexMatrix F = dft_matrix(K);
  const ComplexMatrix Fh = F.adjoint();
  ComplexMatrix V = ComplexMatrix::Identity(K, K);
  for (const Layer& layer : stack.layers) {
    ComplexVector d = layer.phase.unit_complex();
    if (layer.domain == Domain::Spectrum) {
      V = d.asDiagonal() * V;
    } else {
      V = Fh * (d.asDiagonal() * (F * V));
    }
  }
  return V;
}

ComplexMatrix central_block(const ComplexMatrix& V, const ChannelWindow& w) {
  if (V.rows() != w.K || V.cols() != w.K)
    throw std::invalid_argument("central_block: V is not K x K");
  ComplexMatrix B(w.N, w.N);
  for (int r = 0; r < w.N; ++r)
    for (int c = 0; c < w.N; ++c)
      B(r, c) = V(w.channel_indices[r], w.channel_indices[c]);
  return B;
}

double fidelity(const ComplexMatrix& U, const ComplexMatrix& V) {
  if (U.rows() != V.rows() || U.cols() != V.cols())
    throw std::invalid_argument("fidelity: shape mismatch");
  const double uu = U.squaredNorm();
  const double vv = V.squaredNorm();
  if (uu == 0.0 || vv == 0.0)
    throw std::invalid_argument("fidelity: zero-norm input");
  const Complex t = (U.adjoint() * V).trace();
  return std::norm(t) / (uu * vv);
}

double success_probability(const ComplexMatrix& V_central) {
  if (V_central.rows() != V_central.cols())
    throw std::invalid_argument("success_probability: non-square input");
  return V_central.squaredNorm() / static_cast<double>(V_central.rows());
}

double phase_test_fidelity(const ComplexMatrix& U_target,
                           const Eigen::MatrixXd& measured_amplitudes) {
  const Eigen::Index n = U_target.rows();
  if (measured_amplitudes.rows() != n || measured_amplitudes.cols() != n)
    throw std::invalid_argument("phase_test_fidelity: shape mismatch");
  if ((measured_amplitudes.array() < 0.0).any())
    throw std::invalid_argument("phase_test_fidelity: negative magnitudes");
  const double tr = measured_amplitudes.trace();
  const double ss = measured_amplitudes.squaredNorm();
  if (ss == 0.0)
    throw std::invalid_argument("phase_test_fidelity: all-zero magnitudes");
  return tr * tr / (static_cast<double>(n) * ss);
}

double unitarity_defect(const ComplexMatrix& V) {
  ComplexMatrix G = V.adjoint() * V;
  G -= ComplexMatrix::Identity(V.cols(), V.cols());
  return G.cwiseAbs().maxCoeff();
}

}  // namespace phasegate
