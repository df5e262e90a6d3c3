#include "phasegate/path.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace phasegate {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex g_fftw_mutex_1d;

void fft_inplace(Eigen::ArrayXcd& a, int fftw_sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex_1d);
    plan = fftw_plan_dft_1d(static_cast<int>(a.size()), ptr, ptr, fftw_sign,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex_1d);
    fftw_destroy_plan(plan);
  }
}

Eigen::ArrayXcd roll(const Eigen::ArrayXcd& a, int s) {
  const int n = static_cast<int>(a.size());
  Eigen::ArrayXcd out(n);
  for (int i = 0; i < n; ++i) out((i + s) % n) = a(i);
  return out;
}

// The path channels live at positive multiples of L after the first stage but
// at mirrored positions after the third; reading at -nL undoes the mirror.
int channel_row(const PathField& f, int n, double spacing, double sign) {
  const int c = static_cast<int>(f.data.size()) / 2;
  return c + static_cast<int>(std::lround(sign * n * spacing / f.pitch));
}

}  // namespace

PathField path_input_field(const ComplexVector& coeffs,
                           const std::vector<int>& channels,
                           const PathLayout& layout, const PathGrid& grid) {
  if (coeffs.size() != static_cast<Eigen::Index>(channels.size()))
    throw std::invalid_argument("path_input_field: coefficient count");
  const double ky = layout.k_y();
  const double nyquist = kPi / grid.pitch();
  for (int n : channels)
    if (std::abs(n) * ky > 0.5 * nyquist)
      throw std::invalid_argument("path_input_field: channel beyond Nyquist");
  PathField f;
  f.pitch = grid.pitch();
  f.wavelength = layout.wavelength;
  f.data = Eigen::ArrayXcd::Zero(grid.samples);
  for (int i = 0; i < grid.samples; ++i) {
    const double y = f.y(i);
    const double env = std::exp(-(y * y) / (grid.envelope_waist * grid.envelope_waist));
    Complex acc = 0.0;
    for (size_t m = 0; m < channels.size(); ++m)
      acc += coeffs[static_cast<Eigen::Index>(m)] *
             std::polar(1.0, -channels[m] * ky * y);
    f.data[i] = env * acc;
  }
  const double p = f.power();
  if (p <= 0.0) throw std::invalid_argument("path_input_field: empty state");
  f.data /= std::sqrt(p);
  return f;
}

Eigen::ArrayXd grating_phase(const SineSeries& series, const PathLayout& layout,
                             const PathGrid& grid) {
  Eigen::ArrayXd phase(grid.samples);
  const double ky = layout.k_y();
  for (int i = 0; i < grid.samples; ++i) {
    const double y = (i - grid.samples / 2) * grid.pitch();
    phase[i] = series.eval(ky * y);
  }
  return phase;
}

Eigen::ArrayXd channel_mask(const ChargePhaseMap& g, const PathLayout& layout,
                            const PathGrid& grid) {
  Eigen::ArrayXd phase(grid.samples);
  for (int i = 0; i < grid.samples; ++i) {
    const double y = (i - grid.samples / 2) * grid.pitch();
    phase[i] = g.at(std::lround(y / layout.channel_spacing));
  }
  return phase;
}

PathField fourier_stage_1d(const PathField& field, double effective_focal,
                           int direction) {
  const int n = static_cast<int>(field.data.size());
  if (n % 2 != 0)
    throw std::invalid_argument("fourier_stage_1d: sample count must be even");
  const double lam_f = field.wavelength * effective_focal;
  PathField out = field;
  out.data = roll(out.data, n / 2);  // ifftshift (even n)
  fft_inplace(out.data, direction > 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  out.data = roll(out.data, n / 2);
  const Complex unit_const =
      direction > 0 ? std::polar(1.0, -kPi / 4.0) : std::polar(1.0, kPi / 4.0);
  out.data *= unit_const * (field.pitch / std::sqrt(lam_f));
  out.pitch = lam_f / (n * field.pitch);
  return out;
}

void apply_aperture(PathField& field, double half_width) {
  double removed = 0.0;
  for (Eigen::Index i = 0; i < field.data.size(); ++i) {
    if (std::abs(field.y(static_cast<int>(i))) > half_width) {
      removed += std::norm(field.data[i]);
      field.data[i] = 0.0;
    }
  }
  field.clipped_power += removed * field.pitch;
}

ComplexVector read_channels(const PathField& field,
                            const std::vector<int>& channels, double spacing) {
  ComplexVector out(channels.size());
  const int n = static_cast<int>(field.data.size());
  for (size_t m = 0; m < channels.size(); ++m) {
    const double center = channels[m] * spacing;
    double power = 0.0;
    Complex overlap = 0.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(field.y(i) - center) > 0.5 * spacing) continue;
      power += std::norm(field.data[i]) * field.pitch;
      overlap += field.data[i] * field.pitch;
    }
    const double mag = std::sqrt(power);
    out[static_cast<Eigen::Index>(m)] =
        (std::abs(overlap) > 0.0) ? mag * overlap / std::abs(overlap)
                                  : Complex(mag, 0.0);
  }
  return out;
}

namespace {

struct PathTrain {
  Eigen::ArrayXd grating1, grating3, mask;
  double aperture_half = 0.0;
  std::vector<int> encoding;  // path channel indices of the encoding block
};

// SLM1 carries f1 sampled as f1(k_y y + pi); SLM3 carries f2 mirrored,
// f2(pi - k_y y); both reproduce the abstract ANGLE layers on path channels
// n = j - K/2. The readout plane is mirrored (channel n at y = -nL).
PathTrain make_train(const GateParams& params, const ChannelWindow& window,
                     const PathLayout& layout, const PathGrid& grid) {
  if (params.angle_series.size() != 2 || params.shapers.size() != 1)
    throw std::invalid_argument("path train expects a three-layer parameter set");
  const int k_half = window.K / 2;
  PathTrain t;
  const double ky = layout.k_y();
  t.grating1.resize(grid.samples);
  t.grating3.resize(grid.samples);
  for (int i = 0; i < grid.samples; ++i) {
    const double y = (i - grid.samples / 2) * grid.pitch();
    t.grating1[i] = params.angle_series[0].eval(ky * y + kPi);
    t.grating3[i] = params.angle_series[1].eval(kPi - ky * y);
  }
  OamEncodingMap unit_map{window.first_encoding() - k_half, 1};
  ChargePhaseMap g = shaper_on_charges(params.shapers[0], window, unit_map);
  t.mask = channel_mask(g, layout, grid);
  t.aperture_half =
      (std::max(std::abs(window.window_first() - k_half),
                std::abs(window.window_last() - k_half)) + 0.5) *
      layout.channel_spacing;
  for (int idx : window.channel_indices) t.encoding.push_back(idx - k_half);
  return t;
}

PathField drive(const PathTrain& t, const ComplexVector& coeffs,
                const std::vector<int>& channels, const PathLayout& layout,
                const PathGrid& grid) {
  PathField E = path_input_field(coeffs, channels, layout, grid);
  for (int i = 0; i < grid.samples; ++i)
    E.data[i] *= std::polar(1.0, t.grating1[i]);
  E = fourier_stage_1d(E, 2.0 * layout.focal, -1);
  apply_aperture(E, t.aperture_half);
  for (int i = 0; i < grid.samples; ++i)
    E.data[i] *= std::polar(1.0, t.mask[i]);
  E = fourier_stage_1d(E, 2.0 * layout.focal, -1);
  for (int i = 0; i < grid.samples; ++i)
    E.data[i] *= std::polar(1.0, t.grating3[i]);
  E = fourier_stage_1d(E, 2.0 * layout.focal, -1);
  return E;
}

}  // namespace

ComplexMatrix build_path_operator(const GateParams& params,
                                  const ChannelWindow& window,
                                  const PathLayout& layout,
                                  const PathGrid& grid) {
  PathTrain t = make_train(params, window, layout, grid);
  const int N = window.N;
  ComplexMatrix V(N, N);
  std::vector<int> mirrored;  // readout plane is mirrored
  for (int n : t.encoding) mirrored.push_back(-n);
  for (int col = 0; col < N; ++col) {
    ComplexVector e = ComplexVector::Zero(N);
    e[col] = 1.0;
    PathField out = drive(t, e, t.encoding, layout, grid);
    V.col(col) = read_channels(out, mirrored, layout.channel_spacing);
  }
  return V;
}

Eigen::MatrixXd amplitude_scan(const GateParams& params,
                               const ChannelWindow& window,
                               const PathLayout& layout, const PathGrid& grid) {
  PathTrain t = make_train(params, window, layout, grid);
  const int N = window.N;
  Eigen::MatrixXd S(N, N);
  std::vector<int> mirrored;
  for (int n : t.encoding) mirrored.push_back(-n);
  for (int col = 0; col < N; ++col) {
    ComplexVector e = ComplexVector::Zero(N);
    e[col] = 1.0;
    PathField out = drive(t, e, t.encoding, layout, grid);
    const double total = out.power();
    ComplexVector c = read_channels(out, mirrored, layout.channel_spacing);
    for (int row = 0; row < N; ++row)
      S(row, col) = std::abs(c[row]) / std::sqrt(total);
  }
  return S;
}

double phase_test(const GateParams& params, const ChannelWindow& window,
                  const ComplexMatrix& target, const PathLayout& layout,
                  const PathGrid& grid) {
  PathTrain t = make_train(params, window, layout, grid);
  const int N = window.N;
  if (target.rows() != N || target.cols() != N)
    throw std::invalid_argument("phase_test: target shape");
  Eigen::MatrixXd measured(N, N);
  std::vector<int> mirrored;
  for (int n : t.encoding) mirrored.push_back(-n);
  const ComplexMatrix drive_states = target.adjoint();
  for (int col = 0; col < N; ++col) {
    ComplexVector psi = drive_states.col(col);
    PathField out = drive(t, psi, t.encoding, layout, grid);
    ComplexVector c = read_channels(out, mirrored, layout.channel_spacing);
    for (int row = 0; row < N; ++row) measured(row, col) = std::abs(c[row]);
  }
  return phase_test_fidelity(target, measured);
}

}  // namespace phasegate
