#include "phasegate/optics.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace phasegate {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

void fft2_inplace(Eigen::ArrayXXcd& a, int fftw_sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
  // Eigen arrays are column-major, so in FFTW's row-major view the array has
  // shape (cols, rows).
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan = fftw_plan_dft_2d(static_cast<int>(a.cols()), static_cast<int>(a.rows()),
                            ptr, ptr, fftw_sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_destroy_plan(plan);
  }
}

Eigen::ArrayXXcd roll2(const Eigen::ArrayXXcd& a, int sr, int sc) {
  const int R = static_cast<int>(a.rows()), C = static_cast<int>(a.cols());
  Eigen::ArrayXXcd out(R, C);
  for (int c = 0; c < C; ++c)
    for (int r = 0; r < R; ++r) out((r + sr) % R, (c + sc) % C) = a(r, c);
  return out;
}

Eigen::ArrayXXcd fftshift2(const Eigen::ArrayXXcd& a) {
  return roll2(a, (static_cast<int>(a.rows()) + 1) / 2,
               (static_cast<int>(a.cols()) + 1) / 2);
}

Eigen::ArrayXXcd ifftshift2(const Eigen::ArrayXXcd& a) {
  return roll2(a, static_cast<int>(a.rows()) / 2,
               static_cast<int>(a.cols()) / 2);
}

void check_same_geometry(const ScalarField& f, const PhaseMask& m) {
  if (f.width != m.width || f.height != m.height ||
      std::abs(f.pitch - m.pitch) > 1e-15)
    throw std::invalid_argument("apply_mask: field/mask geometry mismatch");
}

}  // namespace

ScalarField ScalarField::zero(const GridSpec& g) {
  ScalarField f;
  f.width = g.width;
  f.height = g.height;
  f.pitch = g.pitch;
  f.wavelength = g.wavelength;
  f.data = Eigen::ArrayXXcd::Zero(g.height, g.width);
  return f;
}

double ScalarField::power() const {
  return data.abs2().sum() * pitch * pitch;
}

PhaseMask PhaseMask::flat(const GridSpec& g) {
  PhaseMask m;
  m.width = g.width;
  m.height = g.height;
  m.pitch = g.pitch;
  m.phase = Eigen::ArrayXXd::Zero(g.height, g.width);
  return m;
}

void apply_mask(ScalarField& field, const PhaseMask& mask, bool conjugate) {
  check_same_geometry(field, mask);
  const double sign = conjugate ? -1.0 : 1.0;
  for (int ix = 0; ix < field.width; ++ix)
    for (int iy = 0; iy < field.height; ++iy)
      field.data(iy, ix) *= std::polar(1.0, sign * mask.phase(iy, ix));
}

SorterParams SorterParams::defaults(const GridSpec& g) {
  SorterParams p;
  p.a = g.width * g.pitch / (4.0 * kPi);
  p.b = p.a;
  // One grid pixel per unit charge in the sorted focal plane. Larger focal
  // lengths magnify the charge pitch but smear high-l spots by ~l^2 * pitch
  // * (charge pitch) / ring radius, so keep the pitch at one pixel.
  p.f = 2.0 * kPi * p.a * g.pitch / g.wavelength;
  return p;
}

OamBasisSpec OamBasisSpec::defaults(const GridSpec& g, int n_channels,
                                    int stride, int anchor_charge) {
  OamBasisSpec b;
  b.ring_radius = 0.25 * (g.width / 2) * g.pitch;
  b.ring_width = b.ring_radius / 4.0;
  b.mode_stride = stride;
  for (int i = 0; i < n_channels; ++i)
    b.charges.push_back(anchor_charge + i * stride);
  return b;
}

ChargePhaseMap shaper_on_charges(const ShaperFunction& g,
                                 const ChannelWindow& window,
                                 const OamEncodingMap& map) {
  // Each window channel owns a stride-wide block of charges, mirroring an
  // SLM divided into blocks aligned with the channel foci.
  const int half = map.stride / 2;
  const int lo = map.anchor_charge +
                 map.stride * (g.window_start - window.first_encoding()) - half;
  const int hi = map.anchor_charge +
                 map.stride * (g.window_end() - 1 - window.first_encoding()) + half;
  ChargePhaseMap out;
  out.first_charge = lo;
  out.phases = Eigen::VectorXd::Zero(hi - lo + 1);
  for (int l = lo; l <= hi; ++l) {
    const long m = std::lround(static_cast<double>(l - map.anchor_charge) /
                               map.stride);  // nearest lattice channel offset
    const long j = window.first_encoding() + m - g.window_start;
    const long lattice_charge = map.anchor_charge + m * map.stride;
    if (j >= 0 && j < g.window_size() && std::abs(l - lattice_charge) <= half)
      out.phases[l - lo] = g.phases[j];
  }
  return out;
}

ScalarField make_oam_superposition(const ComplexVector& coeffs,
                                   const OamBasisSpec& basis,
                                   const GridSpec& grid) {
  if (coeffs.size() != static_cast<Eigen::Index>(basis.charges.size()))
    throw std::invalid_argument("make_oam_superposition: coefficient count");
  // Azimuthal Nyquist limit at the inner edge of the ring.
  const double r_inner =
      std::max(basis.ring_radius - 2.0 * basis.ring_width, 0.25 * basis.ring_radius);
  for (int l : basis.charges)
    if (std::abs(l) > kPi * r_inner / grid.pitch)
      throw std::invalid_argument(
          "make_oam_superposition: charge beyond angular Nyquist limit");

  ScalarField f = ScalarField::zero(grid);
  double ring_norm2 = 0.0;
  Eigen::ArrayXXd R(grid.height, grid.width), phi(grid.height, grid.width);
  for (int ix = 0; ix < grid.width; ++ix)
    for (int iy = 0; iy < grid.height; ++iy) {
      const double x = f.x(ix), y = f.y(iy);
      const double r = std::hypot(x, y);
      const double dr = (r - basis.ring_radius) / basis.ring_width;
      R(iy, ix) = std::exp(-dr * dr);
      phi(iy, ix) = std::atan2(y, x);
      ring_norm2 += R(iy, ix) * R(iy, ix);
    }
  const double norm = std::sqrt(ring_norm2) * grid.pitch;
  for (size_t ci = 0; ci < basis.charges.size(); ++ci) {
    const Complex c = coeffs[static_cast<Eigen::Index>(ci)] / norm;
    const int l = basis.charges[ci];
    for (int ix = 0; ix < grid.width; ++ix)
      for (int iy = 0; iy < grid.height; ++iy)
        f.data(iy, ix) += c * R(iy, ix) * std::polar(1.0, l * phi(iy, ix));
  }
  return f;
}

ComplexVector mode_match_spectrum(const ScalarField& field,
                                  const OamBasisSpec& basis) {
  const GridSpec grid = field.grid();
  Eigen::ArrayXXd R(grid.height, grid.width), phi(grid.height, grid.width);
  double ring_norm2 = 0.0;
  ScalarField probe = ScalarField::zero(grid);
  for (int ix = 0; ix < grid.width; ++ix)
    for (int iy = 0; iy < grid.height; ++iy) {
      const double x = probe.x(ix), y = probe.y(iy);
      const double r = std::hypot(x, y);
      const double dr = (r - basis.ring_radius) / basis.ring_width;
      R(iy, ix) = std::exp(-dr * dr);
      phi(iy, ix) = std::atan2(y, x);
      ring_norm2 += R(iy, ix) * R(iy, ix);
    }
  const double norm = std::sqrt(ring_norm2) * grid.pitch;
  ComplexVector coeffs(basis.charges.size());
  for (size_t ci = 0; ci < basis.charges.size(); ++ci) {
    const int l = basis.charges[ci];
    Complex acc = 0.0;
    for (int ix = 0; ix < grid.width; ++ix)
      for (int iy = 0; iy < grid.height; ++iy)
        acc += R(iy, ix) * std::polar(1.0, -l * phi(iy, ix)) * field.data(iy, ix);
    coeffs[static_cast<Eigen::Index>(ci)] = acc * grid.pitch * grid.pitch / norm;
  }
  return coeffs;
}

ScalarField propagate(const ScalarField& field, double distance) {
  if (distance == 0.0) return field;
  ScalarField out = field;
  fft2_inplace(out.data, FFTW_FORWARD);

  const int W = field.width, H = field.height;
  const double dnu_x = 1.0 / (W * field.pitch);
  const double dnu_y = 1.0 / (H * field.pitch);
  const double lam = field.wavelength;
  const double z = distance;
  // Anti-aliasing band limit of the sampled quadratic transfer function.
  const double nu_lim_x = 1.0 / (2.0 * lam * std::abs(z) * dnu_x);
  const double nu_lim_y = 1.0 / (2.0 * lam * std::abs(z) * dnu_y);

  const double total = out.data.abs2().sum();
  double removed = 0.0;
  const Complex carrier = std::polar(1.0, kTwoPi * z / lam);
  for (int ix = 0; ix < W; ++ix) {
    const int mx = ix <= W / 2 ? ix : ix - W;
    const double nx = mx * dnu_x;
    for (int iy = 0; iy < H; ++iy) {
      const int my = iy <= H / 2 ? iy : iy - H;
      const double ny = my * dnu_y;
      if (std::abs(nx) > nu_lim_x || std::abs(ny) > nu_lim_y) {
        removed += std::norm(out.data(iy, ix));
        out.data(iy, ix) = 0.0;
        continue;
      }
      out.data(iy, ix) *=
          carrier * std::polar(1.0, -kPi * lam * z * (nx * nx + ny * ny));
    }
  }
  if (total > 0.0 && removed / total > 1e-2)
    throw std::runtime_error(
        "propagate: sampling violation, " + std::to_string(100.0 * removed / total) +
        "% of power beyond the band limit");
  fft2_inplace(out.data, FFTW_BACKWARD);
  out.data /= static_cast<double>(W) * H;
  if (total > 0.0)
    out.clipped_power += removed / total * field.power();
  return out;
}

ScalarField apply_lens(const ScalarField& field, double focal_length) {
  if (std::isinf(focal_length)) return field;
  if (focal_length == 0.0)
    throw std::invalid_argument("apply_lens: zero focal length");
  ScalarField out = field;
  const double scale = -kPi / (field.wavelength * focal_length);
  for (int ix = 0; ix < field.width; ++ix) {
    const double x = field.x(ix);
    for (int iy = 0; iy < field.height; ++iy) {
      const double y = field.y(iy);
      out.data(iy, ix) *= std::polar(1.0, scale * (x * x + y * y));
    }
  }
  return out;
}

ScalarField fourier_stage(const ScalarField& field, double focal_length,
                          int direction) {
  if (field.width != field.height)
    throw std::invalid_argument("fourier_stage: grid must be square");
  if (field.width % 2 != 0)
    throw std::invalid_argument("fourier_stage: grid size must be even");
  if (focal_length <= 0.0)
    throw std::invalid_argument("fourier_stage: focal length must be > 0");
  const int W = field.width;
  const double lam_f = field.wavelength * focal_length;

  ScalarField out = field;
  out.data = ifftshift2(out.data);
  fft2_inplace(out.data, direction > 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  out.data = fftshift2(out.data);

  const double p2 = field.pitch * field.pitch;
  const Complex unit_const =
      direction > 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
  out.data *= unit_const * (p2 / lam_f);
  out.pitch = lam_f / (W * field.pitch);
  return out;
}

std::pair<PhaseMask, PhaseMask> sorter_masks(const SorterParams& params,
                                             const GridSpec& grid) {
  const double lam_f = grid.wavelength * params.f;
  PhaseMask phi1 = PhaseMask::flat(grid);
  const double c1 = kTwoPi * params.a / lam_f;
  for (int ix = 0; ix < grid.width; ++ix) {
    const double x = (ix - grid.width / 2) * grid.pitch;
    for (int iy = 0; iy < grid.height; ++iy) {
      const double y = (iy - grid.height / 2) * grid.pitch;
      const double r = std::hypot(x, y);
      if (r == 0.0) {
        phi1.phase(iy, ix) = 0.0;  // coordinate singularity, sub-tolerance
        continue;
      }
      phi1.phase(iy, ix) =
          c1 * (y * std::atan2(y, x) - x * std::log(r / params.b) + x);
    }
  }

  GridSpec strip = grid;
  strip.pitch = lam_f / (grid.width * grid.pitch);
  PhaseMask phi2 = PhaseMask::flat(strip);
  const double c2 = -kTwoPi * params.a * params.b / lam_f;
  for (int ix = 0; ix < strip.width; ++ix) {
    const double u = (ix - strip.width / 2) * strip.pitch;
    for (int iy = 0; iy < strip.height; ++iy) {
      const double v = (iy - strip.height / 2) * strip.pitch;
      phi2.phase(iy, ix) = c2 * std::exp(-u / params.a) * std::cos(v / params.a);
    }
  }
  return {std::move(phi1), std::move(phi2)};
}

double focus_position(int l, const SorterParams& params, double wavelength) {
  return params.f * wavelength * l / (kTwoPi * params.a);
}

PhaseMask oam_shaper_mask(const ChargePhaseMap& g, const SorterParams& params,
                          const GridSpec& mask_plane) {
  PhaseMask m = PhaseMask::flat(mask_plane);
  const double charge_per_meter =
      kTwoPi * params.a / (params.f * mask_plane.wavelength);
  for (int iy = 0; iy < mask_plane.height; ++iy) {
    // Charges separate along the sorted (angle-conjugate) axis.
    const double s = (iy - mask_plane.height / 2) * mask_plane.pitch;
    const double value = g.at(std::lround(charge_per_meter * s));
    for (int ix = 0; ix < mask_plane.width; ++ix) m.phase(iy, ix) = value;
  }
  return m;
}

PhaseMask angular_mask(const std::function<double(double)>& f,
                       const GridSpec& grid) {
  PhaseMask m = PhaseMask::flat(grid);
  for (int ix = 0; ix < grid.width; ++ix) {
    const double x = (ix - grid.width / 2) * grid.pitch;
    for (int iy = 0; iy < grid.height; ++iy) {
      const double y = (iy - grid.height / 2) * grid.pitch;
      m.phase(iy, ix) = f(std::atan2(y, x));
    }
  }
  return m;
}

PhaseMask angular_mask(const SineSeries& series, const GridSpec& grid,
                       int stride) {
  return angular_mask(
      [&series, stride](double phi) { return series.eval(kPi - stride * phi); },
      grid);
}

PipelineResult run_shaper_pipeline(const ScalarField& input,
                                   const ChargePhaseMap& g,
                                   const SorterParams& params) {
  auto [phi1, phi2] = sorter_masks(params, input.grid());
  PipelineResult res;
  res.snapshots.push_back(input);

  ScalarField E = input;
  apply_mask(E, phi1);
  res.snapshots.push_back(E);

  E = fourier_stage(E, params.f, +1);  // unwrapped strip plane
  apply_mask(E, phi2);
  res.snapshots.push_back(E);

  E = fourier_stage(E, params.f, +1);  // sorted focal plane
  res.snapshots.push_back(E);
  PhaseMask shaper = oam_shaper_mask(g, params, E.grid());
  apply_mask(E, shaper);
  res.snapshots.push_back(E);

  // Reverse sorter: the exact inverse of the unwrap stage (conjugated
  // elements traversed in the opposite order).
  E = fourier_stage(E, params.f, -1);  // back to the strip plane
  apply_mask(E, phi2, true);
  E = fourier_stage(E, params.f, -1);  // back to the ring plane
  apply_mask(E, phi1, true);
  res.snapshots.push_back(E);
  res.output = std::move(E);
  return res;
}

PipelineResult run_three_layer(const ScalarField& input, const SineSeries& f1,
                               const ChargePhaseMap& g, const SineSeries& f2,
                               int stride, const SorterParams& params) {
  ScalarField E = input;
  apply_mask(E, angular_mask(f1, input.grid(), stride));
  PipelineResult pipe = run_shaper_pipeline(E, g, params);
  apply_mask(pipe.output, angular_mask(f2, pipe.output.grid(), stride));

  PipelineResult res;
  res.snapshots = {input, pipe.snapshots[1], pipe.snapshots[2],
                   pipe.snapshots[3], pipe.snapshots[4], pipe.output};
  res.output = std::move(pipe.output);
  return res;
}

ComplexMatrix extract_three_layer_operator(const GateParams& params,
                                           const ChannelWindow& window,
                                           const OamEncodingMap& map,
                                           const OamBasisSpec& basis,
                                           const GridSpec& grid,
                                           const SorterParams& sorter) {
  if (params.angle_series.size() != 2 || params.shapers.size() != 1)
    throw std::invalid_argument(
        "extract_three_layer_operator: expects a three-layer parameter set");
  const int N = window.N;
  if (static_cast<int>(basis.charges.size()) != N)
    throw std::invalid_argument("extract_three_layer_operator: basis size != N");
  for (int i = 0; i < N; ++i)
    if (basis.charges[i] != map.anchor_charge + i * map.stride)
      throw std::invalid_argument(
          "extract_three_layer_operator: basis charges do not match the map");

  const ChargePhaseMap g = shaper_on_charges(params.shapers[0], window, map);
  ComplexMatrix V(N, N);
  for (int col = 0; col < N; ++col) {
    ComplexVector coeffs = ComplexVector::Zero(N);
    coeffs[col] = 1.0;
    ScalarField in = make_oam_superposition(coeffs, basis, grid);
    PipelineResult run = run_three_layer(in, params.angle_series[0], g,
                                         params.angle_series[1], map.stride,
                                         sorter);
    V.col(col) = mode_match_spectrum(run.output, basis);
  }
  return V;
}

}  // namespace phasegate
