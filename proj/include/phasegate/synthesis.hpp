#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phasegate/unitary.hpp"

namespace phasegate {

/// Truncated sine expansion f(phi) = sum_n A_n sin(n phi + theta_n),
/// n = 1..p, with A_n in [0, m*pi) and theta_n in [0, 2*pi).
struct SineSeries {
  double bound_multiplier = 1.0;  // m
  Eigen::VectorXd amplitudes;     // A_n
  Eigen::VectorXd phase_offsets;  // theta_n

  static SineSeries zero(int harmonics, double m = 1.0);

  int harmonics() const { return static_cast<int>(amplitudes.size()); }
  double amplitude_bound() const;
  double eval(double angle) const;
  void validate() const;
};

/// Per-channel spectral phases over a working window; channels outside the
/// window carry zero phase.
struct ShaperFunction {
  int window_start = 0;
  Eigen::VectorXd phases;

  int window_size() const { return static_cast<int>(phases.size()); }
  int window_end() const { return window_start + window_size(); }  // exclusive
  double center() const { return window_start + 0.5 * (window_size() - 1); }
  RealVector to_dense(int K) const;
};

enum class BoundaryPolicy { Open, Filtered };

/// Synthesis problem statement: which target, where it is embedded, how many
/// layers, and what happens to amplitude beyond the guard bands.
struct GateSpec {
  ComplexMatrix target;  // N x N unitary
  ChannelWindow window;
  int layer_count = 3;  // odd; stack begins and ends with an ANGLE layer
  BoundaryPolicy policy = BoundaryPolicy::Open;
  double fidelity_floor = 0.999;

  int angle_layer_count() const { return (layer_count + 1) / 2; }
  int spectrum_layer_count() const { return layer_count / 2; }
  void validate() const;
};

/// Free parameters of one stack: one sine series per ANGLE layer, one shaper
/// per SPECTRUM layer, interleaved as ANGLE, SPECTRUM, ANGLE, ...
struct GateParams {
  std::vector<SineSeries> angle_series;
  std::vector<ShaperFunction> shapers;
};

struct GateMetrics {
  ComplexMatrix central;  // N x N block on the encoding channels
  double fidelity = 0.0;
  double probability = 0.0;
};

struct OptimizeConfig {
  int restarts = 32;
  std::uint64_t seed = 0;
  int harmonics = 3;              // p
  double bound_multiplier = 0.0;  // m; 0 selects max(1, N-1)
  int max_iterations = 250;       // L-BFGS budget per penalty round
  std::vector<double> penalty_schedule = {1e2, 1e3, 1e4, 1e5, 1e6};
  double feasibility_margin = 1e-4;
  bool include_zero_start = true;  // restart 0 = all-zero parameters
};

struct OptimizationResult {
  GateParams params;
  double fidelity = 0.0;     // recomputed from params via evaluate_gate
  double probability = 0.0;  // recomputed from params via evaluate_gate
  int restarts_used = 0;
  int best_restart = -1;
  bool converged = false;  // a feasible point (fidelity >= floor) was found
};

/// Phase bins phi_k = 2 pi k / K - pi, k = 0..K-1.
DiagonalPhase sample_angular_diagonal(const SineSeries& series, int K);

/// Assemble the alternating LayerStack for these parameters (no projectors;
/// policy handling lives in evaluate_gate).
LayerStack build_stack(const GateParams& params, const GateSpec& spec);

/// Compose the stack (with window projectors under FILTERED), extract the
/// central block and score it against the target.
GateMetrics evaluate_gate(const GateParams& params, const GateSpec& spec);

/// Multi-start penalized quasi-Newton search: maximize success probability
/// subject to fidelity >= spec.fidelity_floor. Deterministic given the seed.
OptimizationResult optimize(const GateSpec& spec, const OptimizeConfig& config);

enum class SweepMode { Reoptimize, FixedParams };

struct SweepPoint {
  int d = 0;
  BoundaryPolicy policy = BoundaryPolicy::Open;
  double fidelity = 0.0;
  double probability = 0.0;
  bool feasible = false;
};

/// Fidelity/probability as a function of guard-band count. Reoptimize mode
/// re-runs the optimizer per d; FixedParams re-evaluates fixed_params.
std::vector<SweepPoint> guard_band_sweep(const GateSpec& spec,
                                         const std::vector<int>& d_values,
                                         SweepMode mode,
                                         const OptimizeConfig& config,
                                         const GateParams* fixed_params = nullptr);

/// Copy the shaper pattern so its window center lands on each requested
/// center (integer translations). Windows must not overlap.
ShaperFunction replicate_parallel(const ShaperFunction& g,
                                  const std::vector<double>& centers);

/// Same as replicate_parallel but overlapping copies add their phases
/// (the convolution semantics); used for crosstalk studies.
ShaperFunction replicate_summing(const ShaperFunction& g,
                                 const std::vector<double>& centers);

struct CrosstalkPoint {
  int separation = 0;  // channels between replica encoding blocks
  double fidelity_low = 0.0;
  double fidelity_high = 0.0;
  double worst_fidelity = 0.0;
  double off_block_mass = 0.0;  // cross-replica power fraction
};

/// Dual-replica operator quality as the separation between the two encoding
/// blocks shrinks. Angle layers are reused unchanged; the shaper is
/// replicated (summing on overlap).
std::vector<CrosstalkPoint> crosstalk_vs_separation(
    const GateParams& base, const GateSpec& spec,
    const std::vector<int>& separations);

/// Fold negative amplitudes into phase offsets, clamp amplitudes to the m*pi
/// bound and wrap angles into their canonical ranges.
GateParams canonicalize(const GateParams& params);

/// sum A^2 + sum g^2 over canonical parameters; the smoothness tie-breaker.
double parameter_norm(const GateParams& params);

namespace detail {

/// Number of raw optimizer parameters for a spec at `harmonics` per series.
int parameter_count(const GateSpec& spec, int harmonics);

/// The penalized objective minimized inside optimize(), with its analytic
/// gradient. Exposed so tests can compare against finite differences.
double penalty_objective(const GateSpec& spec, int harmonics, double m,
                         double lambda, const Eigen::VectorXd& x,
                         Eigen::VectorXd& grad);

}  // namespace detail

}  // namespace phasegate
