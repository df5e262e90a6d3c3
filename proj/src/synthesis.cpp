#include "phasegate/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phasegate/lbfgs.hpp"
#include "phasegate/rng.hpp"

namespace phasegate {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

double wrap_pi(double a) {
  double r = std::remainder(a, kTwoPi);
  return r;  // in (-pi, pi]
}

}  // namespace

SineSeries SineSeries::zero(int harmonics, double m) {
  SineSeries s;
  s.bound_multiplier = m;
  s.amplitudes = Eigen::VectorXd::Zero(harmonics);
  s.phase_offsets = Eigen::VectorXd::Zero(harmonics);
  return s;
}

double SineSeries::amplitude_bound() const { return bound_multiplier * kPi; }

double SineSeries::eval(double angle) const {
  double v = 0.0;
  for (int n = 0; n < harmonics(); ++n)
    v += amplitudes[n] * std::sin((n + 1) * angle + phase_offsets[n]);
  return v;
}

void SineSeries::validate() const {
  if (amplitudes.size() != phase_offsets.size())
    throw std::invalid_argument("SineSeries: amplitude/phase count mismatch");
  if (bound_multiplier <= 0.0)
    throw std::invalid_argument("SineSeries: bound multiplier must be > 0");
  for (int n = 0; n < harmonics(); ++n) {
    if (amplitudes[n] < 0.0 || amplitudes[n] >= amplitude_bound())
      throw std::invalid_argument("SineSeries: amplitude outside [0, m*pi)");
    if (phase_offsets[n] < 0.0 || phase_offsets[n] >= kTwoPi)
      throw std::invalid_argument("SineSeries: phase offset outside [0, 2pi)");
  }
}

RealVector ShaperFunction::to_dense(int K) const {
  RealVector g = RealVector::Zero(K);
  for (int i = 0; i < window_size(); ++i) {
    int j = window_start + i;
    if (j < 0 || j >= K)
      throw std::invalid_argument("ShaperFunction: window leaves 0..K-1");
    g[j] = phases[i];
  }
  return g;
}

void GateSpec::validate() const {
  window.validate();
  if (window.stride != 1)
    throw std::invalid_argument("GateSpec: synthesis window must be contiguous");
  if (target.rows() != window.N || target.cols() != window.N)
    throw std::invalid_argument("GateSpec: target shape != N x N");
  if (unitarity_defect(target) > 1e-10)
    throw std::invalid_argument("GateSpec: target is not unitary");
  if (layer_count < 3 || layer_count % 2 == 0)
    throw std::invalid_argument("GateSpec: layer count must be odd and >= 3");
  if (fidelity_floor <= 0.0 || fidelity_floor > 1.0)
    throw std::invalid_argument("GateSpec: fidelity floor outside (0, 1]");
}

DiagonalPhase sample_angular_diagonal(const SineSeries& series, int K) {
  if (K < 2) throw std::invalid_argument("sample_angular_diagonal: K < 2");
  RealVector phases(K);
  for (int k = 0; k < K; ++k) phases[k] = series.eval(kTwoPi * k / K - kPi);
  return DiagonalPhase(std::move(phases));
}

LayerStack build_stack(const GateParams& params, const GateSpec& spec) {
  const int K = spec.window.K;
  LayerStack stack;
  stack.K = K;
  size_t ia = 0, is = 0;
  for (int layer = 0; layer < spec.layer_count; ++layer) {
    if (layer % 2 == 0) {
      stack.layers.push_back(
          {Domain::Angle, sample_angular_diagonal(params.angle_series.at(ia++), K)});
    } else {
      stack.layers.push_back(
          {Domain::Spectrum,
           DiagonalPhase(params.shapers.at(is++).to_dense(K))});
    }
  }
  return stack;
}

// ---------------------------------------------------------------------------
// Internal evaluator. The state is propagated as the N columns of the
// operator restricted to the encoding inputs; that is all the metrics need
// and it keeps each evaluation at O(M K^2 N).

namespace {

struct Workspace {
  int K = 0;
  int N = 0;
  ComplexMatrix F, Fh;       // DFT and its adjoint
  RealVector phi_bins;       // angle-bin centers
  RealVector window_mask;    // 0/1 over channels (FILTERED projector)
  bool filtered = false;
  std::vector<int> channels;
  ComplexMatrix target;      // N x N
  double target_norm2 = 0.0;

  explicit Workspace(const GateSpec& spec) {
    K = spec.window.K;
    N = spec.window.N;
    F = dft_matrix(K);
    Fh = F.adjoint();
    phi_bins.resize(K);
    for (int k = 0; k < K; ++k) phi_bins[k] = kTwoPi * k / K - kPi;
    filtered = spec.policy == BoundaryPolicy::Filtered;
    window_mask = spec.window.window_mask();
    channels = spec.window.channel_indices;
    target = spec.target;
    target_norm2 = target.squaredNorm();
  }

  void project(ComplexMatrix& S) const {
    if (!filtered) return;
    for (int k = 0; k < K; ++k)
      if (window_mask[k] == 0.0) S.row(k).setZero();
  }
};

// Dense per-layer phase vectors, ANGLE layers first-and-alternating.
struct LayerPhases {
  std::vector<RealVector> phases;  // one K-vector per layer
};

struct ForwardTrace {
  // Post-diagonal activations v_i per layer (needed for the adjoint pass),
  // and the final central block with its scalar metrics.
  std::vector<ComplexMatrix> v;
  ComplexMatrix Vc;
  Complex trace_overlap;  // <target, Vc>_F
  double block_norm2 = 0.0;
  double fidelity = 0.0;
  double probability = 0.0;
};

ForwardTrace forward_pass(const Workspace& ws, const LayerPhases& lp,
                          bool keep_trace) {
  const int K = ws.K, N = ws.N;
  ForwardTrace tr;
  ComplexMatrix S = ComplexMatrix::Zero(K, N);
  for (int c = 0; c < N; ++c) S(ws.channels[c], c) = 1.0;
  ws.project(S);
  if (keep_trace) tr.v.resize(lp.phases.size());
  for (size_t i = 0; i < lp.phases.size(); ++i) {
    const RealVector& psi = lp.phases[i];
    const bool angle = (i % 2 == 0);
    ComplexMatrix u = angle ? ComplexMatrix(ws.F * S) : std::move(S);
    for (int k = 0; k < K; ++k) u.row(k) *= std::polar(1.0, psi[k]);
    if (keep_trace) tr.v[i] = u;
    S = angle ? ComplexMatrix(ws.Fh * u) : std::move(u);
    ws.project(S);
  }
  tr.Vc.resize(N, N);
  for (int r = 0; r < N; ++r) tr.Vc.row(r) = S.row(ws.channels[r]);
  tr.trace_overlap = (ws.target.adjoint() * tr.Vc).trace();
  tr.block_norm2 = tr.Vc.squaredNorm();
  tr.probability = tr.block_norm2 / N;
  tr.fidelity = std::norm(tr.trace_overlap) / (ws.target_norm2 * tr.block_norm2);
  return tr;
}

// Parameter vector layout: per ANGLE layer [A_1..A_p, th_1..th_p], then per
// SPECTRUM layer the window phases.
struct ParamLayout {
  int harmonics = 0;
  int n_angle = 0;
  int window_size = 0;
  int window_start = 0;
  int n_spectrum = 0;
  int size() const { return n_angle * 2 * harmonics + n_spectrum * window_size; }
  int angle_offset(int i) const { return i * 2 * harmonics; }
  int spectrum_offset(int i) const {
    return n_angle * 2 * harmonics + i * window_size;
  }
};

LayerPhases phases_from_vector(const Workspace& ws, const ParamLayout& lay,
                               const Eigen::VectorXd& x) {
  LayerPhases lp;
  lp.phases.resize(lay.n_angle + lay.n_spectrum);
  int ia = 0, is = 0;
  for (size_t i = 0; i < lp.phases.size(); ++i) {
    RealVector psi = RealVector::Zero(ws.K);
    if (i % 2 == 0) {
      const int off = lay.angle_offset(ia++);
      for (int k = 0; k < ws.K; ++k) {
        double v = 0.0;
        for (int n = 0; n < lay.harmonics; ++n)
          v += x[off + n] * std::sin((n + 1) * ws.phi_bins[k] + x[off + lay.harmonics + n]);
        psi[k] = v;
      }
    } else {
      const int off = lay.spectrum_offset(is++);
      for (int j = 0; j < lay.window_size; ++j)
        psi[lay.window_start + j] = x[off + j];
    }
    lp.phases[i] = std::move(psi);
  }
  return lp;
}

struct PenaltyObjective {
  const Workspace* ws;
  ParamLayout lay;
  double lambda = 0.0;
  double floor = 0.999;
  double amp_bound = kPi;       // m*pi
  double barrier_weight = 1e3;
  bool fidelity_only = false;   // feasibility-restoration mode

  // Returns the value to minimize; fills grad.
  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    LayerPhases lp = phases_from_vector(*ws, lay, x);
    ForwardTrace tr = forward_pass(*ws, lp, true);

    const int K = ws->K, N = ws->N;
    const double s = tr.block_norm2;
    const double fid = tr.fidelity;

    // Maximized objective O and its cotangent on the central block.
    double w_fid, w_s;
    double value;
    if (fidelity_only) {
      value = -fid;
      w_fid = 1.0;
      w_s = 0.0;
    } else {
      const double viol = std::max(0.0, floor - fid);
      value = -(tr.probability - lambda * viol * viol);
      w_fid = 2.0 * lambda * viol;
      w_s = 1.0 / N;
    }
    const double a = w_s - w_fid * fid / s;
    ComplexMatrix G = a * tr.Vc +
                      (w_fid * tr.trace_overlap / (ws->target_norm2 * s)) * ws->target;

    // Adjoint pass: cotangent convention dO = 2 Re <C, dX>.
    ComplexMatrix C = ComplexMatrix::Zero(K, N);
    for (int r = 0; r < N; ++r) C.row(ws->channels[r]) = G.row(r);
    ws->project(C);

    grad.setZero(lay.size());
    RealVector gpsi(K);
    int ia = lay.n_angle, is = lay.n_spectrum;
    for (int i = static_cast<int>(lp.phases.size()) - 1; i >= 0; --i) {
      const bool angle = (i % 2 == 0);
      ComplexMatrix Cv = angle ? ComplexMatrix(ws->F * C) : std::move(C);
      for (int k = 0; k < K; ++k)
        gpsi[k] = -2.0 * (tr.v[i].row(k).cwiseProduct(Cv.row(k).conjugate()))
                             .sum()
                             .imag();
      if (angle) {
        const int off = lay.angle_offset(--ia);
        for (int n = 0; n < lay.harmonics; ++n) {
          double gA = 0.0, gT = 0.0;
          const double A = x[off + n], th = x[off + lay.harmonics + n];
          for (int k = 0; k < K; ++k) {
            const double arg = (n + 1) * ws->phi_bins[k] + th;
            gA += gpsi[k] * std::sin(arg);
            gT += gpsi[k] * A * std::cos(arg);
          }
          grad[off + n] = gA;
          grad[off + lay.harmonics + n] = gT;
        }
      } else {
        const int off = lay.spectrum_offset(--is);
        for (int j = 0; j < lay.window_size; ++j)
          grad[off + j] = gpsi[lay.window_start + j];
      }
      // Pull the cotangent through the diagonal and (for angle layers) the
      // surrounding DFTs.
      for (int k = 0; k < K; ++k) Cv.row(k) *= std::polar(1.0, -lp.phases[i][k]);
      C = angle ? ComplexMatrix(ws->Fh * Cv) : std::move(Cv);
      ws->project(C);
    }
    // We accumulated the gradient of the maximized objective; flip it.
    grad = -grad;

    // Soft barrier keeping amplitudes inside [-(m*pi), m*pi]; negative values
    // are folded into the phase offset at canonicalization.
    for (int i = 0; i < lay.n_angle; ++i) {
      const int off = lay.angle_offset(i);
      for (int n = 0; n < lay.harmonics; ++n) {
        const double A = x[off + n];
        const double excess = std::abs(A) - amp_bound;
        if (excess > 0.0) {
          value += barrier_weight * excess * excess;
          grad[off + n] += 2.0 * barrier_weight * excess * (A >= 0.0 ? 1.0 : -1.0);
        }
      }
    }
    return value;
  }
};

GateParams params_from_vector(const GateSpec& spec, const ParamLayout& lay,
                              const Eigen::VectorXd& x, double m) {
  GateParams p;
  for (int i = 0; i < lay.n_angle; ++i) {
    SineSeries s;
    s.bound_multiplier = m;
    s.amplitudes = x.segment(lay.angle_offset(i), lay.harmonics);
    s.phase_offsets = x.segment(lay.angle_offset(i) + lay.harmonics, lay.harmonics);
    p.angle_series.push_back(std::move(s));
  }
  for (int i = 0; i < lay.n_spectrum; ++i) {
    ShaperFunction g;
    g.window_start = lay.window_start;
    g.phases = x.segment(lay.spectrum_offset(i), lay.window_size);
    p.shapers.push_back(std::move(g));
  }
  (void)spec;
  return p;
}

ParamLayout make_layout(const GateSpec& spec, int harmonics) {
  ParamLayout lay;
  lay.harmonics = harmonics;
  lay.n_angle = spec.angle_layer_count();
  lay.n_spectrum = spec.spectrum_layer_count();
  lay.window_start = spec.window.window_first();
  lay.window_size = spec.window.window_last() - spec.window.window_first() + 1;
  return lay;
}

}  // namespace

namespace detail {

int parameter_count(const GateSpec& spec, int harmonics) {
  return make_layout(spec, harmonics).size();
}

double penalty_objective(const GateSpec& spec, int harmonics, double m,
                         double lambda, const Eigen::VectorXd& x,
                         Eigen::VectorXd& grad) {
  Workspace ws(spec);
  PenaltyObjective obj;
  obj.ws = &ws;
  obj.lay = make_layout(spec, harmonics);
  obj.lambda = lambda;
  obj.floor = spec.fidelity_floor;
  obj.amp_bound = m * kPi;
  return obj(x, grad);
}

}  // namespace detail

GateMetrics evaluate_gate(const GateParams& params, const GateSpec& spec) {
  spec.validate();
  if (static_cast<int>(params.angle_series.size()) != spec.angle_layer_count() ||
      static_cast<int>(params.shapers.size()) != spec.spectrum_layer_count())
    throw std::invalid_argument("evaluate_gate: parameter count mismatch");
  Workspace ws(spec);
  LayerPhases lp;
  size_t ia = 0, is = 0;
  for (int layer = 0; layer < spec.layer_count; ++layer) {
    if (layer % 2 == 0)
      lp.phases.push_back(sample_angular_diagonal(params.angle_series[ia++], ws.K).phases);
    else
      lp.phases.push_back(params.shapers[is++].to_dense(ws.K));
  }
  ForwardTrace tr = forward_pass(ws, lp, false);
  GateMetrics m;
  m.central = tr.Vc;
  m.fidelity = tr.fidelity;
  m.probability = tr.probability;
  return m;
}

GateParams canonicalize(const GateParams& params) {
  GateParams out = params;
  for (SineSeries& s : out.angle_series) {
    const double bound = s.amplitude_bound() * (1.0 - 1e-12);
    for (int n = 0; n < s.harmonics(); ++n) {
      double A = s.amplitudes[n], th = s.phase_offsets[n];
      if (A < 0.0) {  // A sin(x + th) == -A sin(x + th + pi)
        A = -A;
        th += kPi;
      }
      s.amplitudes[n] = std::min(A, bound);
      s.phase_offsets[n] = wrap_two_pi(th);
    }
  }
  for (ShaperFunction& g : out.shapers)
    for (int j = 0; j < g.window_size(); ++j) g.phases[j] = wrap_pi(g.phases[j]);
  return out;
}

double parameter_norm(const GateParams& params) {
  double nrm = 0.0;
  for (const SineSeries& s : params.angle_series) nrm += s.amplitudes.squaredNorm();
  for (const ShaperFunction& g : params.shapers) nrm += g.phases.squaredNorm();
  return nrm;
}

OptimizationResult optimize(const GateSpec& spec, const OptimizeConfig& config) {
  spec.validate();
  Workspace ws(spec);
  const double m = config.bound_multiplier > 0.0
                       ? config.bound_multiplier
                       : std::max(1.0, static_cast<double>(spec.window.N - 1));
  ParamLayout lay = make_layout(spec, config.harmonics);

  PenaltyObjective obj;
  obj.ws = &ws;
  obj.lay = lay;
  obj.floor = spec.fidelity_floor + config.feasibility_margin;
  obj.amp_bound = m * kPi;

  LbfgsOptions lopts;
  lopts.max_iterations = config.max_iterations;

  struct Candidate {
    Eigen::VectorXd x;
    double fidelity = -1.0, probability = -1.0, norm = 0.0;
    bool feasible = false;
  };
  std::optional<Candidate> best;
  auto better = [&](const Candidate& a, const Candidate& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.feasible) {
      if (std::abs(a.probability - b.probability) > 1e-12)
        return a.probability > b.probability;
      return a.norm < b.norm;
    }
    return a.fidelity > b.fidelity;
  };

  int best_restart = -1;
  for (int restart = 0; restart < config.restarts; ++restart) {
    Eigen::VectorXd x(lay.size());
    if (restart == 0 && config.include_zero_start) {
      x.setZero();
    } else {
      Rng rng = Rng::derive(config.seed, static_cast<std::uint64_t>(restart));
      for (int i = 0; i < lay.n_angle; ++i) {
        const int off = lay.angle_offset(i);
        for (int n = 0; n < lay.harmonics; ++n) {
          x[off + n] = rng.uniform(0.0, m * kPi);
          x[off + lay.harmonics + n] = rng.uniform(0.0, kTwoPi);
        }
      }
      for (int i = 0; i < lay.n_spectrum; ++i) {
        const int off = lay.spectrum_offset(i);
        for (int j = 0; j < lay.window_size; ++j)
          x[off + j] = rng.uniform(-kPi, kPi);
      }
    }

    for (double lambda : config.penalty_schedule) {
      obj.lambda = lambda;
      obj.fidelity_only = false;
      x = lbfgs_minimize([&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
            return obj(p, g);
          }, x, lopts).x;
    }
    // Feasibility restoration: if the penalty rounds left the fidelity short,
    // chase fidelity alone, then re-tighten with the stiffest penalty.
    {
      LayerPhases lp = phases_from_vector(ws, lay, x);
      if (forward_pass(ws, lp, false).fidelity < obj.floor) {
        obj.fidelity_only = true;
        x = lbfgs_minimize([&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
              return obj(p, g);
            }, x, lopts).x;
        obj.fidelity_only = false;
        obj.lambda = config.penalty_schedule.back();
        x = lbfgs_minimize([&](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
              return obj(p, g);
            }, x, lopts).x;
      }
    }

    // Score the canonicalized parameters, exactly as they will be reported.
    GateParams cand_params = canonicalize(params_from_vector(spec, lay, x, m));
    GateMetrics met = evaluate_gate(cand_params, spec);
    Candidate cand;
    cand.x = x;
    cand.fidelity = met.fidelity;
    cand.probability = met.probability;
    cand.norm = parameter_norm(cand_params);
    cand.feasible = met.fidelity >= spec.fidelity_floor;
    if (!best || better(cand, *best)) {
      best = cand;
      best_restart = restart;
    }
  }

  OptimizationResult res;
  res.params = canonicalize(params_from_vector(spec, lay, best->x, m));
  GateMetrics met = evaluate_gate(res.params, spec);
  res.fidelity = met.fidelity;
  res.probability = met.probability;
  res.restarts_used = config.restarts;
  res.best_restart = best_restart;
  res.converged = best->feasible;
  return res;
}

std::vector<SweepPoint> guard_band_sweep(const GateSpec& spec,
                                         const std::vector<int>& d_values,
                                         SweepMode mode,
                                         const OptimizeConfig& config,
                                         const GateParams* fixed_params) {
  if (mode == SweepMode::FixedParams && fixed_params == nullptr)
    throw std::invalid_argument("guard_band_sweep: fixed mode needs parameters");
  std::vector<SweepPoint> curve;
  for (int d : d_values) {
    GateSpec s = spec;
    s.window = ChannelWindow::at(spec.window.K, spec.window.N, d,
                                 spec.window.first_encoding());
    SweepPoint pt;
    pt.d = d;
    pt.policy = spec.policy;
    if (mode == SweepMode::Reoptimize) {
      OptimizationResult r = optimize(s, config);
      pt.fidelity = r.fidelity;
      pt.probability = r.probability;
      pt.feasible = r.converged;
    } else {
      GateMetrics met = evaluate_gate(*fixed_params, s);
      pt.fidelity = met.fidelity;
      pt.probability = met.probability;
      pt.feasible = met.fidelity >= spec.fidelity_floor;
    }
    curve.push_back(pt);
  }
  return curve;
}

namespace {

ShaperFunction replicate_impl(const ShaperFunction& g,
                              const std::vector<double>& centers,
                              bool allow_overlap) {
  if (centers.empty())
    throw std::invalid_argument("replicate: no centers given");
  const double base = g.center();
  std::vector<int> shifts;
  for (double c : centers) {
    const double sh = c - base;
    const double rounded = std::round(sh);
    if (std::abs(sh - rounded) > 1e-9)
      throw std::invalid_argument("replicate: center requires non-integer shift");
    shifts.push_back(static_cast<int>(rounded));
  }
  std::vector<int> order(shifts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return shifts[a] < shifts[b]; });
  if (!allow_overlap) {
    for (size_t i = 1; i < order.size(); ++i)
      if (shifts[order[i]] - shifts[order[i - 1]] < g.window_size())
        throw std::invalid_argument("replicate_parallel: windows overlap");
  }
  const int lo = g.window_start + shifts[order.front()];
  const int hi = g.window_start + shifts[order.back()] + g.window_size();
  ShaperFunction out;
  out.window_start = lo;
  out.phases = Eigen::VectorXd::Zero(hi - lo);
  for (int sh : shifts)
    for (int j = 0; j < g.window_size(); ++j)
      out.phases[g.window_start + sh + j - lo] += g.phases[j];
  return out;
}

}  // namespace

ShaperFunction replicate_parallel(const ShaperFunction& g,
                                  const std::vector<double>& centers) {
  return replicate_impl(g, centers, false);
}

ShaperFunction replicate_summing(const ShaperFunction& g,
                                 const std::vector<double>& centers) {
  return replicate_impl(g, centers, true);
}

std::vector<CrosstalkPoint> crosstalk_vs_separation(
    const GateParams& base, const GateSpec& spec,
    const std::vector<int>& separations) {
  spec.validate();
  const int K = spec.window.K;
  const int N = spec.window.N;
  const ShaperFunction& g = base.shapers.at(0);
  std::vector<CrosstalkPoint> curve;
  for (int sep : separations) {
    if (sep < 1) throw std::invalid_argument("crosstalk: separation must be >= 1");
    // Two replicas placed symmetrically: encoding blocks end/start `sep`
    // channels apart.
    const int first_lo = K / 2 - (sep + 1) / 2 - (N - 1);
    const int first_hi = first_lo + (N - 1) + sep;
    ChannelWindow w_lo = ChannelWindow::at(K, N, spec.window.d, first_lo);
    ChannelWindow w_hi = ChannelWindow::at(K, N, spec.window.d, first_hi);
    const double half_span = 0.5 * (g.window_size() - 1);
    ShaperFunction dual = replicate_summing(
        g, {w_lo.window_first() + half_span, w_hi.window_first() + half_span});

    GateParams dual_params = base;
    dual_params.shapers[0] = dual;
    LayerStack stack = build_stack(dual_params, spec);
    ComplexMatrix V = compose_stack(stack);

    CrosstalkPoint pt;
    pt.separation = sep;
    pt.fidelity_low = fidelity(spec.target, central_block(V, w_lo));
    pt.fidelity_high = fidelity(spec.target, central_block(V, w_hi));
    pt.worst_fidelity = std::min(pt.fidelity_low, pt.fidelity_high);

    double off = 0.0, total = 0.0;
    for (int r = 0; r < 2 * N; ++r) {
      const int row = r < N ? w_lo.channel_indices[r] : w_hi.channel_indices[r - N];
      for (int c = 0; c < 2 * N; ++c) {
        const int col = c < N ? w_lo.channel_indices[c] : w_hi.channel_indices[c - N];
        const double p = std::norm(V(row, col));
        total += p;
        if ((r < N) != (c < N)) off += p;
      }
    }
    pt.off_block_mass = total > 0.0 ? off / total : 0.0;
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace phasegate
