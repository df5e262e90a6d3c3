#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "phasegate/synthesis.hpp"
#include "phasegate/unitary.hpp"

namespace phasegate {

/// Sampling geometry of a simulation plane (square pixels).
struct GridSpec {
  int width = 1080;
  int height = 1080;
  double pitch = 8e-6;         // meters per pixel
  double wavelength = 1550e-9;  // meters
};

/// Sampled 2-D complex optical field. data(iy, ix); the coordinate origin
/// sits on pixel (height/2, width/2).
struct ScalarField {
  int width = 0;
  int height = 0;
  double pitch = 0.0;
  double wavelength = 0.0;
  Eigen::ArrayXXcd data;         // height x width
  double clipped_power = 0.0;    // power removed by band limits so far

  static ScalarField zero(const GridSpec& g);

  double x(int ix) const { return (ix - width / 2) * pitch; }
  double y(int iy) const { return (iy - height / 2) * pitch; }
  /// Total power, sum |E|^2 * pitch^2.
  double power() const;
  GridSpec grid() const { return {width, height, pitch, wavelength}; }
};

/// Real phase pattern (radians) on the same sampling as the field it
/// multiplies; application is exp(i*phase), energy preserving.
struct PhaseMask {
  int width = 0;
  int height = 0;
  double pitch = 0.0;
  Eigen::ArrayXXd phase;  // height x width

  static PhaseMask flat(const GridSpec& g);
};

/// Multiply by exp(+i*phase), or exp(-i*phase) when conjugate is set (the
/// reverse pass through an element).
void apply_mask(ScalarField& field, const PhaseMask& mask,
                bool conjugate = false);

/// Log-polar mode-sorter geometry: unwrap scale a, offset b, stage focal f.
struct SorterParams {
  double a = 0.0;
  double b = 0.0;
  double f = 0.4;

  /// a = W*pitch/(4*pi) so the unwrapped strip spans half the grid width;
  /// b = a; f = 0.4 m.
  static SorterParams defaults(const GridSpec& g);
};

/// Annular-carrier OAM basis: charges ride a shared ring R(r) =
/// exp(-(r-r0)^2/w^2) so the basis is orthonormal in l.
struct OamBasisSpec {
  std::vector<int> charges;
  double ring_radius = 0.0;  // r0, meters
  double ring_width = 0.0;   // w, meters
  int mode_stride = 4;       // charge interval between encoding channels

  /// Ring at 1/4 of the grid half-width, w = r0/4; charges = stride-spaced
  /// lattice of n_channels around anchor.
  static OamBasisSpec defaults(const GridSpec& g, int n_channels, int stride,
                               int anchor_charge);
};

/// Phase per integer OAM charge (or path index); zero outside the stored
/// range. The physical counterpart of ShaperFunction.
struct ChargePhaseMap {
  int first_charge = 0;
  Eigen::VectorXd phases;

  double at(long charge) const {
    const long i = charge - first_charge;
    if (i < 0 || i >= phases.size()) return 0.0;
    return phases[i];
  }
  int last_charge() const {
    return first_charge + static_cast<int>(phases.size()) - 1;
  }
};

/// How abstract window channels map onto physical OAM charges:
/// charge(j) = anchor_charge + stride * (j - first_encoding_index).
struct OamEncodingMap {
  int anchor_charge = 0;
  int stride = 4;
};

/// Spread an abstract shaper over the physical charge lattice.
ChargePhaseMap shaper_on_charges(const ShaperFunction& g,
                                 const ChannelWindow& window,
                                 const OamEncodingMap& map);

// -- field construction and measurement --------------------------------------

ScalarField make_oam_superposition(const ComplexVector& coeffs,
                                   const OamBasisSpec& basis,
                                   const GridSpec& grid);

/// c_l = <mode_l | field> * pitch^2 for every charge in the basis.
ComplexVector mode_match_spectrum(const ScalarField& field,
                                  const OamBasisSpec& basis);

// -- elementary propagation steps ---------------------------------------------

/// Band-limited paraxial angular-spectrum propagation over `distance`
/// (either sign). Throws when more than 1% of the power sits beyond the
/// anti-aliasing band limit; the removed tail is added to clipped_power.
ScalarField propagate(const ScalarField& field, double distance);

/// Thin lens: multiply exp(-i pi (x^2+y^2) / (lambda f)).
ScalarField apply_lens(const ScalarField& field, double focal_length);

/// Exact optical Fourier transform of a 2f stage with focal length f.
/// direction +1 uses the forward kernel exp(-i 2 pi x.u/(lambda f)),
/// direction -1 its inverse. Output pitch becomes lambda*f/(W*pitch).
ScalarField fourier_stage(const ScalarField& field, double focal_length,
                          int direction = +1);

// -- sorter elements ----------------------------------------------------------

/// The two static log-polar elements. Phi1 lives on `grid`; Phi2 on the
/// strip plane one Fourier stage later (pitch lambda*f/(W*pitch)).
std::pair<PhaseMask, PhaseMask> sorter_masks(const SorterParams& params,
                                             const GridSpec& grid);

/// Focal-plane coordinate of charge l along the sorted axis: f*lambda*l/(2*pi*a).
double focus_position(int l, const SorterParams& params, double wavelength);

/// Staircase mask g(round(2 pi a s / (f lambda))) with s the sorted-axis
/// coordinate; strips are one charge wide with boundaries at half-integer
/// charge coordinates.
PhaseMask oam_shaper_mask(const ChargePhaseMap& g, const SorterParams& params,
                          const GridSpec& mask_plane);

/// Radius-independent angular mask f(phi). The lattice form evaluates
/// f_abs(pi - stride*phi), which reproduces the abstract ANGLE layer on a
/// stride-spaced charge lattice.
PhaseMask angular_mask(const std::function<double(double)>& f,
                       const GridSpec& grid);
PhaseMask angular_mask(const SineSeries& series, const GridSpec& grid,
                       int stride);

// -- composite pipelines ------------------------------------------------------

struct PipelineResult {
  ScalarField output;
  /// input, after Phi1, after Phi2, focal before mask, focal after mask,
  /// output.
  std::vector<ScalarField> snapshots;
};

/// Sorter -> focal shaper mask -> reverse sorter.
PipelineResult run_shaper_pipeline(const ScalarField& input,
                                   const ChargePhaseMap& g,
                                   const SorterParams& params);

/// Three diagonal layers: angular f1, spectral shaper g, angular f2.
PipelineResult run_three_layer(const ScalarField& input, const SineSeries& f1,
                               const ChargePhaseMap& g, const SineSeries& f2,
                               int stride, const SorterParams& params);

/// Drive each encoding basis mode through the three-layer setup and
/// mode-match the outputs: the measured N x N operator.
ComplexMatrix extract_three_layer_operator(const GateParams& params,
                                           const ChannelWindow& window,
                                           const OamEncodingMap& map,
                                           const OamBasisSpec& basis,
                                           const GridSpec& grid,
                                           const SorterParams& sorter);

}  // namespace phasegate
