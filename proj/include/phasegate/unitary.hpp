#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace phasegate {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

constexpr double kUnitarityTol = 1e-12;

/// Which basis a diagonal layer acts in. The state vector itself is indexed
/// in the SPECTRUM basis (OAM charge / path index); ANGLE-domain diagonals
/// act by DFT conjugation.
enum class Domain { Angle, Spectrum };

/// Phase-only diagonal operator D = Diag(exp(i*phase_k)). Phases are stored
/// unwrapped; equality is meaningful modulo 2*pi only.
struct DiagonalPhase {
  RealVector phases;

  DiagonalPhase() = default;
  explicit DiagonalPhase(RealVector p) : phases(std::move(p)) {}
  static DiagonalPhase zero(int k) { return DiagonalPhase(RealVector::Zero(k)); }

  int dim() const { return static_cast<int>(phases.size()); }

  ComplexVector unit_complex() const {
    ComplexVector d(phases.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
      d[i] = std::polar(1.0, phases[i]);
    return d;
  }
  ComplexMatrix as_matrix() const {
    return ComplexMatrix(unit_complex().asDiagonal());
  }
};

/// True when two phase angles coincide modulo 2*pi.
bool phases_equivalent(double a, double b, double tol = 1e-12);

struct Layer {
  Domain domain;
  DiagonalPhase phase;
};

/// Ordered stack of diagonal layers over a K-dimensional DFT space.
/// layers[0] acts first on the state. Domains must strictly alternate.
struct LayerStack {
  int K = 0;
  std::vector<Layer> layers;

  void validate() const;
};

/// Embedding geometry: which N channels inside the ambient K-dimensional DFT
/// space carry the encoded state, with d guard channels on each side.
struct ChannelWindow {
  int K = 0;
  int N = 0;
  int d = 0;
  int stride = 1;
  std::vector<int> channel_indices;  // the N encoding indices

  /// Encoding block centered in the DFT space: first index K/2 - (N-1)/2.
  static ChannelWindow centered(int K, int N, int d);
  /// Encoding block starting at an explicit first index.
  static ChannelWindow at(int K, int N, int d, int first_encoding);
  /// Evenly strided encoding indices (parallel-gate extraction).
  static ChannelWindow strided(int K, int N, int d, int first_encoding, int stride);

  int first_encoding() const { return channel_indices.front(); }
  int last_encoding() const { return channel_indices.back(); }
  /// Midpoint of the encoding block (half-integer when N is even).
  double center() const {
    return 0.5 * (channel_indices.front() + channel_indices.back());
  }
  /// Working window = encoding plus guards; [first, last] inclusive.
  int window_first() const { return channel_indices.front() - d * stride; }
  int window_last() const { return channel_indices.back() + d * stride; }
  int window_size() const { return N * stride + 2 * d * stride - (stride - 1); }

  /// 0/1 mask over 0..K-1 selecting the working window.
  RealVector window_mask() const;

  void validate() const;
};

/// Unitary DFT matrix, F[j,k] = exp(-i 2 pi j k / K) / sqrt(K).
ComplexMatrix dft_matrix(int K);

/// Dense product of the stack: ANGLE layers contribute F^H D F, SPECTRUM
/// layers contribute D directly.
ComplexMatrix compose_stack(const LayerStack& stack);

/// N x N submatrix of V restricted to the window's encoding indices.
ComplexMatrix central_block(const ComplexMatrix& V, const ChannelWindow& w);

/// |Tr(U^H V)|^2 / (Tr(U^H U) Tr(V^H V)); invariant under global phase and
/// scaling of either argument.
double fidelity(const ComplexMatrix& U, const ComplexMatrix& V);

/// Tr(V V^H) / N of the central block: fraction of input power that exits in
/// the encoding channels.
double success_probability(const ComplexMatrix& V_central);

/// Fidelity estimate reconstructed from measured output magnitudes
/// |V U^H|, with the diagonal phases of V U^H taken as zero:
/// (sum_a M_aa)^2 / (N * sum_ab M_ab^2).
double phase_test_fidelity(const ComplexMatrix& U_target,
                           const Eigen::MatrixXd& measured_amplitudes);

/// max |(V^H V - I)_jk|, a unitarity defect measure.
double unitarity_defect(const ComplexMatrix& V);

}  // namespace phasegate
