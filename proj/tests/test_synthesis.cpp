#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phasegate/rng.hpp"
#include "phasegate/synthesis.hpp"
#include "phasegate/targets.hpp"

using namespace phasegate;

namespace {

constexpr double kPi = std::numbers::pi;

GateSpec make_spec(const ComplexMatrix& target, int d,
                   BoundaryPolicy policy = BoundaryPolicy::Open) {
  GateSpec spec;
  spec.target = target;
  spec.window = ChannelWindow::centered(64, static_cast<int>(target.rows()), d);
  spec.policy = policy;
  return spec;
}

OptimizeConfig quick_config(std::uint64_t seed, int restarts = 8) {
  OptimizeConfig cfg;
  cfg.seed = seed;
  cfg.restarts = restarts;
  return cfg;
}

// One H2 optimization shared by several tests below.
const OptimizationResult& optimized_h2() {
  static const OptimizationResult res = [] {
    return optimize(make_spec(hadamard2(), 3), quick_config(7));
  }();
  return res;
}

}  // namespace

TEST_CASE("sample_angular_diagonal") {
  SineSeries zero = SineSeries::zero(3);
  DiagonalPhase flat = sample_angular_diagonal(zero, 8);
  CHECK(flat.phases.cwiseAbs().maxCoeff() == 0.0);

  SineSeries s = SineSeries::zero(1);
  s.amplitudes[0] = kPi;
  DiagonalPhase d = sample_angular_diagonal(s, 4);
  // bins at -pi, -pi/2, 0, pi/2
  CHECK(d.phases[0] == doctest::Approx(kPi * std::sin(-kPi)).epsilon(1e-12));
  CHECK(d.phases[1] == doctest::Approx(-kPi));
  CHECK(d.phases[2] == doctest::Approx(0.0));
  CHECK(d.phases[3] == doctest::Approx(kPi));
}

TEST_CASE("sine series validation") {
  SineSeries s = SineSeries::zero(3, 1.0);
  CHECK_NOTHROW(s.validate());
  s.amplitudes[1] = kPi;  // == m*pi is outside [0, m*pi)
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.amplitudes[1] = 0.5;
  s.phase_offsets[0] = -0.1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("evaluate_gate identity at zero parameters") {
  GateSpec spec = make_spec(ComplexMatrix::Identity(3, 3), 2);
  GateParams p;
  p.angle_series = {SineSeries::zero(3), SineSeries::zero(3)};
  ShaperFunction g;
  g.window_start = spec.window.window_first();
  g.phases = Eigen::VectorXd::Zero(7);
  p.shapers = {g};
  GateMetrics met = evaluate_gate(p, spec);
  CHECK(met.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(met.probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate_gate matches compose_stack under OPEN") {
  Rng rng(99);
  GateSpec spec = make_spec(hadamard3(), 2);
  GateParams p;
  for (int i = 0; i < 2; ++i) {
    SineSeries s = SineSeries::zero(3, 2.0);
    for (int n = 0; n < 3; ++n) {
      s.amplitudes[n] = rng.uniform(0.0, 2.0);
      s.phase_offsets[n] = rng.uniform(0.0, 2.0 * kPi);
    }
    p.angle_series.push_back(s);
  }
  ShaperFunction g;
  g.window_start = spec.window.window_first();
  g.phases = Eigen::VectorXd::Zero(7);
  for (int j = 0; j < 7; ++j) g.phases[j] = rng.uniform(-kPi, kPi);
  p.shapers = {g};

  GateMetrics met = evaluate_gate(p, spec);
  ComplexMatrix V = compose_stack(build_stack(p, spec));
  ComplexMatrix block = central_block(V, spec.window);
  CHECK((met.central - block).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(met.fidelity == doctest::Approx(fidelity(spec.target, block)).epsilon(1e-12));
  CHECK(met.probability == doctest::Approx(success_probability(block)).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  GateSpec spec = make_spec(hadamard3(), 2, BoundaryPolicy::Filtered);
  const int n = detail::parameter_count(spec, 3);
  Rng rng(31);
  for (int point = 0; point < 10; ++point) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-2.0, 2.0);
    Eigen::VectorXd grad(n);
    const double lambda = 50.0;
    detail::penalty_objective(spec, 3, 2.0, lambda, x, grad);

    const double h = 1e-6;
    Eigen::VectorXd dummy(n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fp = detail::penalty_objective(spec, 3, 2.0, lambda, xp, dummy);
      const double fm = detail::penalty_objective(spec, 3, 2.0, lambda, xm, dummy);
      const double fd = (fp - fm) / (2.0 * h);
      const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      CHECK(std::abs(grad[i] - fd) / scale < 1e-4);
    }
  }
}

TEST_CASE("optimize keeps the identity target at zero parameters") {
  GateSpec spec = make_spec(ComplexMatrix::Identity(3, 3), 2);
  OptimizationResult res = optimize(spec, quick_config(3, 2));
  CHECK(res.converged);
  CHECK(res.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.best_restart == 0);
  for (const SineSeries& s : res.params.angle_series)
    CHECK(s.amplitudes.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("optimize is deterministic for a fixed seed") {
  GateSpec spec = make_spec(hadamard2(), 2);
  OptimizeConfig cfg = quick_config(12345, 3);
  OptimizationResult a = optimize(spec, cfg);
  OptimizationResult b = optimize(spec, cfg);
  REQUIRE(a.params.angle_series.size() == b.params.angle_series.size());
  for (size_t i = 0; i < a.params.angle_series.size(); ++i) {
    CHECK(a.params.angle_series[i].amplitudes == b.params.angle_series[i].amplitudes);
    CHECK(a.params.angle_series[i].phase_offsets ==
          b.params.angle_series[i].phase_offsets);
  }
  for (size_t i = 0; i < a.params.shapers.size(); ++i)
    CHECK(a.params.shapers[i].phases == b.params.shapers[i].phases);
  CHECK(a.fidelity == b.fidelity);
  CHECK(a.probability == b.probability);
}

TEST_CASE("optimized H2 meets the paper's operating point") {
  const OptimizationResult& res = optimized_h2();
  CHECK(res.converged);
  CHECK(res.fidelity >= 0.999);
  CHECK(res.probability >= 0.97);
  // Feasibility soundness: re-evaluate from scratch.
  GateMetrics met = evaluate_gate(res.params, make_spec(hadamard2(), 3));
  CHECK(met.fidelity >= 0.999);
  CHECK(met.fidelity == doctest::Approx(res.fidelity).epsilon(1e-12));
  // Canonical ranges hold on the reported parameters.
  for (const SineSeries& s : res.params.angle_series) CHECK_NOTHROW(s.validate());
}

TEST_CASE("FILTERED d=0 destroys leakage that OPEN recycles") {
  const OptimizationResult& res = optimized_h2();
  GateSpec open3 = make_spec(hadamard2(), 3, BoundaryPolicy::Open);
  GateSpec filt0 = make_spec(hadamard2(), 0, BoundaryPolicy::Filtered);
  const double p_open = evaluate_gate(res.params, open3).probability;
  const double p_filt = evaluate_gate(res.params, filt0).probability;
  CHECK(p_filt < p_open);
}

TEST_CASE("fixed-parameter sweep: OPEN is d-independent, FILTERED monotone") {
  const OptimizationResult& res = optimized_h2();
  std::vector<int> ds = {0, 1, 2, 3, 4, 6};
  GateSpec open_spec = make_spec(hadamard2(), 3, BoundaryPolicy::Open);
  auto open_curve = guard_band_sweep(open_spec, ds, SweepMode::FixedParams,
                                     quick_config(1), &res.params);
  for (const SweepPoint& pt : open_curve) {
    CHECK(pt.fidelity == doctest::Approx(open_curve.front().fidelity).epsilon(1e-12));
    CHECK(pt.probability ==
          doctest::Approx(open_curve.front().probability).epsilon(1e-12));
  }

  GateSpec filt_spec = make_spec(hadamard2(), 3, BoundaryPolicy::Filtered);
  auto filt_curve = guard_band_sweep(filt_spec, ds, SweepMode::FixedParams,
                                     quick_config(1), &res.params);
  for (size_t i = 1; i < filt_curve.size(); ++i)
    CHECK(filt_curve[i].probability >= filt_curve[i - 1].probability - 1e-9);
}

TEST_CASE("replicate_parallel") {
  const OptimizationResult& res = optimized_h2();
  const ShaperFunction& g = res.params.shapers[0];

  SUBCASE("single center at the original position is a no-op") {
    ShaperFunction same = replicate_parallel(g, {g.center()});
    CHECK(same.window_start == g.window_start);
    CHECK((same.phases - g.phases).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("overlapping windows are rejected") {
    CHECK_THROWS_AS(replicate_parallel(g, {g.center(), g.center() + 2.0}),
                    std::invalid_argument);
  }

  SUBCASE("non-integer shifts are rejected") {
    CHECK_THROWS_AS(replicate_parallel(g, {g.center() + 10.5}),
                    std::invalid_argument);
  }

  SUBCASE("translated replica reproduces the original gate exactly") {
    GateSpec base = make_spec(hadamard2(), 3);
    const int shift = -9;
    ShaperFunction moved = replicate_parallel(g, {g.center() + shift});
    GateParams p = res.params;
    p.shapers[0] = moved;
    ChannelWindow w = ChannelWindow::at(64, 2, 3,
                                        base.window.first_encoding() + shift);
    ComplexMatrix V = compose_stack(build_stack(p, base));
    const double f_shifted = fidelity(hadamard2(), central_block(V, w));
    GateMetrics met = evaluate_gate(res.params, base);
    CHECK(f_shifted == doctest::Approx(met.fidelity).epsilon(1e-12));
  }
}

TEST_CASE("dual replicas: independent when separated, degraded when close") {
  const OptimizationResult& res = optimized_h2();
  GateSpec spec = make_spec(hadamard2(), 3);
  auto curve = crosstalk_vs_separation(res.params, spec, {1, 10});
  CHECK(curve[1].worst_fidelity >= 0.999);
  CHECK(curve[0].worst_fidelity < 0.99);
  CHECK(curve[1].off_block_mass < 1e-3);
}

TEST_CASE("canonicalize folds signs and wraps angles") {
  GateParams p;
  SineSeries s = SineSeries::zero(2, 1.0);
  s.amplitudes << -0.5, 4.0;  // negative and above the bound
  s.phase_offsets << 0.25, 7.0;
  p.angle_series = {s};
  GateParams c = canonicalize(p);
  CHECK(c.angle_series[0].amplitudes[0] == doctest::Approx(0.5));
  CHECK(c.angle_series[0].phase_offsets[0] == doctest::Approx(0.25 + kPi));
  CHECK(c.angle_series[0].amplitudes[1] < kPi);
  CHECK(c.angle_series[0].phase_offsets[1] ==
        doctest::Approx(7.0 - 2.0 * kPi));
  CHECK_NOTHROW(c.angle_series[0].validate());

  // Sign folding leaves the sampled modulation unchanged.
  DiagonalPhase before = sample_angular_diagonal(s, 16);
  SineSeries folded = c.angle_series[0];
  folded.amplitudes[1] = s.amplitudes[1];  // undo the clamp, not the fold
  DiagonalPhase after = sample_angular_diagonal(folded, 16);
  CHECK((before.phases - after.phases).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gate spec validation") {
  GateSpec spec = make_spec(hadamard2(), 2);
  CHECK_NOTHROW(spec.validate());
  spec.layer_count = 4;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.layer_count = 3;
  spec.target(0, 0) = 2.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}
