#pragma once

#include <vector>

#include "phasegate/optics.hpp"
#include "phasegate/synthesis.hpp"
#include "phasegate/unitary.hpp"

namespace phasegate {

/// Path-encoding geometry: channels sit at y = n*L in focal planes; adjacent
/// modulation planes are 2f apart, giving the transverse wavevector
/// k_y = pi*L/(lambda*f) per channel.
struct PathLayout {
  double channel_spacing = 2e-3;  // L, meters
  double focal = 0.4;             // f, meters
  double wavelength = 1550e-9;

  double k_y() const {
    return 3.14159265358979323846 * channel_spacing / (wavelength * focal);
  }
  /// Grating period of the fundamental harmonic, 2*lambda*f/L.
  double grating_period() const { return 2.0 * wavelength * focal / channel_spacing; }
};

/// 1-D sampling.
struct PathGrid {
  int samples = 1 << 14;
  double window = 0.16;           // total span, meters
  double envelope_waist = 8e-3;   // Gaussian envelope on the modulation planes

  double pitch() const { return window / samples; }
};

/// Sampled 1-D complex field.
struct PathField {
  double pitch = 0.0;
  double wavelength = 0.0;
  Eigen::ArrayXcd data;
  double clipped_power = 0.0;

  double y(int i) const { return (i - static_cast<int>(data.size()) / 2) * pitch; }
  double power() const { return data.abs2().sum() * pitch; }
};

/// Momentum-space state preparation: sum_n c_n exp(-i n k_y y) under a broad
/// Gaussian envelope; unit power.
PathField path_input_field(const ComplexVector& coeffs,
                           const std::vector<int>& channels,
                           const PathLayout& layout, const PathGrid& grid);

/// Grating profile sum_n A_n sin(n k_y y + theta_n) sampled on the grid.
Eigen::ArrayXd grating_phase(const SineSeries& series, const PathLayout& layout,
                             const PathGrid& grid);

/// Channel-mask profile g(round(y/L)): strips of width L centered on channel
/// positions, with the per-channel phases of `g` (index = path channel).
Eigen::ArrayXd channel_mask(const ChargePhaseMap& g, const PathLayout& layout,
                            const PathGrid& grid);

/// Exact 1-D optical Fourier transform over an effective focal length
/// (2f between modulation planes). direction +1 = forward kernel.
PathField fourier_stage_1d(const PathField& field, double effective_focal,
                           int direction);

/// Hard aperture |y| <= half_width; removed power is accounted.
void apply_aperture(PathField& field, double half_width);

/// Complex channel amplitudes at the readout plane: modulus from the power in
/// each width-L bin, phase from the aperture overlap.
ComplexVector read_channels(const PathField& field,
                            const std::vector<int>& channels, double spacing);

/// Drive every encoding basis state through the sampled three-layer train
/// (grating f1 -> 2f -> channel mask + aperture -> 2f -> grating f2 -> 2f ->
/// readout) and assemble the N x N operator.
ComplexMatrix build_path_operator(const GateParams& params,
                                  const ChannelWindow& window,
                                  const PathLayout& layout,
                                  const PathGrid& grid);

/// Output channel magnitudes sqrt(P_channel / P_total) for inputs |1>..|N>.
Eigen::MatrixXd amplitude_scan(const GateParams& params,
                               const ChannelWindow& window,
                               const PathLayout& layout, const PathGrid& grid);

/// Drive the columns of U^H, record output magnitudes, and evaluate the
/// phase-test fidelity estimate against the target.
double phase_test(const GateParams& params, const ChannelWindow& window,
                  const ComplexMatrix& target, const PathLayout& layout,
                  const PathGrid& grid);

}  // namespace phasegate
