#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "slowlight/metrics.hpp"
#include "slowlight/simulation.hpp"
#include "test_support.hpp"

using namespace slowlight;
using slowlight::testing::rb_cell;

namespace {

const double kCarrier = nm_to_omega(788.4);

TransferFunction tf_from(const SampledGrid& grid, auto&& fn) {
  TransferFunction tf{grid, kCarrier, true, std::vector<complex>(grid.size())};
  for (std::size_t k = 0; k < grid.size(); ++k) tf.samples[k] = fn(grid.omega(k));
  return tf;
}

// Si(x) by composite Simpson on sin(t)/t.
double sine_integral(double x) {
  const int n = 200000;
  const double h = x / n;
  const auto f = [](double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; };
  double s = f(0.0) + f(x);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Metrics, IdentityGivesZero) {
  const PulseRecipe r{PulseShape::sinc, 250e-15, kCarrier};
  const auto grid = grid_for(r, 0.0);
  const auto p = make_sinc(r.t0, r.carrier, grid);
  EXPECT_NEAR(fractional_delay(p, p), 0.0, 1e-15);
  EXPECT_NEAR(fractional_broadening(p, p), 0.0, 1e-15);
}

TEST(Metrics, LinearPhaseDelayOfThreeWidths) {
  const double t0 = 250e-15;
  const SampledGrid grid(1 << 14, t0 / 16.0);
  const auto p = make_gaussian(t0, kCarrier, grid);
  const double tau = 3.0 * t0;
  const auto tf = tf_from(grid, [&](double w) { return std::polar(0.8, w * tau); });
  const auto out = propagate(p, tf);
  EXPECT_NEAR(fractional_delay(p, out), 3.0, 1e-3);
  EXPECT_NEAR(fractional_broadening(p, out), 0.0, 1e-3);
  const auto d = distortion(tf, spectral_band(p, 0.5));
  EXPECT_LT(d.amplitude, 1e-12);
  EXPECT_LT(d.phase, 1e-12);
}

TEST(Distortion, QuadraticPhaseClosedForm) {
  const SampledGrid grid(4096, 10e-15);
  const double beta = 3e-26;
  const auto tf = tf_from(grid, [&](double w) { return std::polar(1.0, beta * w * w); });
  const double half = 200 * grid.angular_step() + 0.5 * grid.angular_step();
  const auto d = distortion(tf, {-half, half});
  // Residual of w^2 about its LS line on symmetric points w_j: slope is zero and the
  // intercept is mean(w^2), so the RMS residual is sqrt(mean(w^4) - mean(w^2)^2).
  double m2 = 0.0, m4 = 0.0;
  int count = 0;
  for (int j = -200; j <= 200; ++j) {
    const double w = j * grid.angular_step();
    m2 += w * w;
    m4 += w * w * w * w;
    ++count;
  }
  m2 /= count;
  m4 /= count;
  const double expected = beta * std::sqrt(m4 - m2 * m2) / kTwoPi;
  EXPECT_NEAR(d.phase / expected, 1.0, 1e-9);
  EXPECT_LT(d.amplitude, 1e-15);
}

TEST(Distortion, InvariantUnderScaleAndLinearPhase) {
  const auto cell = rb_cell(320.0);
  const SampledGrid grid(4096, 20e-15);
  const auto base = transfer_function(cell, grid, kCarrier);
  const FrequencyBand band{-kTwoPi * 2e12, kTwoPi * 2e12};
  const auto d0 = distortion(base, band);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double scale = u(rng);
    const double tau = (u(rng) - 2.5) * 1e-12;
    const double phi0 = u(rng);
    auto tf = base;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      tf.samples[k] *= std::polar(scale, phi0 + grid.omega(k) * tau);
    }
    const auto d = distortion(tf, band);
    EXPECT_NEAR(d.amplitude, d0.amplitude, 1e-12 + 1e-9 * d0.amplitude);
    EXPECT_NEAR(d.phase, d0.phase, 1e-12 + 1e-9 * d0.phase);
  }
}

TEST(Distortion, BandContract) {
  const SampledGrid grid(256, 10e-15);
  const auto tf = tf_from(grid, [](double) { return complex(1.0); });
  EXPECT_THROW(distortion(tf, {grid.omega(0) * 2.0, 0.0}), ContractError);
  EXPECT_THROW(distortion(tf, {0.0, 0.5 * grid.angular_step()}), ContractError);
}

TEST(Leakage, UndistortedSincMatchesQuadrature) {
  const PulseRecipe r{PulseShape::sinc, 250e-15, kCarrier};
  const auto grid = grid_for(r, 0.0);
  const auto p = make_sinc(r.t0, r.carrier, grid);
  // Energy of sinc^2 outside the first nulls: 1 - (2/pi) Si(2 pi).
  const double oracle = 1.0 - 2.0 / std::numbers::pi * sine_integral(kTwoPi);
  EXPECT_NEAR(oracle, 1.0 - kSincMainLobeFraction, 1e-10);
  EXPECT_NEAR(oracle, 0.0972, 1e-4);
  const double leak = power_leakage(p, p);
  EXPECT_NEAR(leak, oracle, 2e-3);
  EXPECT_NEAR(leak, 0.10, 0.01);
}

TEST(Leakage, ScaleAndShiftInvariant) {
  const PulseRecipe r{PulseShape::sinc, 250e-15, nm_to_omega(787.0)};
  const auto cell = rb_cell(294.0);
  const auto report = simulate(cell, r);
  auto scaled = report.output;
  for (auto& v : scaled.samples) v *= complex(0.0, 3.7);
  EXPECT_NEAR(power_leakage(report.input, scaled), report.leakage, 1e-12);
  auto shifted = report.output;
  std::rotate(shifted.samples.begin(), shifted.samples.begin() + 123, shifted.samples.end());
  EXPECT_NEAR(power_leakage(report.input, shifted), report.leakage, 1e-12);

  auto in_scaled = report.input;
  for (auto& v : in_scaled.samples) v *= 2.5;
  EXPECT_NEAR(power_leakage(in_scaled, in_scaled), power_leakage(report.input, report.input), 1e-12);
}

TEST(Leakage, GaussianFallbackWindow) {
  const SampledGrid grid(1 << 14, 250e-15 / 32.0);
  const auto p = make_gaussian(250e-15, kCarrier, grid);
  const auto window = channel_window(p.intensity());
  EXPECT_FALSE(window.from_minima);
  EXPECT_NEAR(power_leakage(p, p), 1.0 - kSincMainLobeFraction, 1e-4);
  EXPECT_THROW(channel_window(p.intensity(), LeakageOptions{false}), MetricUndefinedError);
}

TEST(Leakage, WindowScanIsExhaustive) {
  std::vector<double> y{0, 1, 0, 0, 5, 5, 0, 2, 2, 2};
  EXPECT_NEAR(max_window_fraction(y, 2), 10.0 / 17.0, 1e-15);
  EXPECT_NEAR(max_window_fraction(y, 3), 10.0 / 17.0, 1e-15);
  EXPECT_NEAR(max_window_fraction(y, 4), 12.0 / 17.0, 1e-15);
  EXPECT_THROW(max_window_fraction(y, 11), ContractError);
}

TEST(Metrics, UndefinedWhenNoHalfMaximum) {
  const SampledGrid grid(64, 1e-15);
  PulseEnvelope flat{grid, kCarrier, std::vector<complex>(64, complex(1.0))};
  EXPECT_THROW(measure_intensity(flat), MetricUndefinedError);
  PulseEnvelope zero{grid, kCarrier, std::vector<complex>(64)};
  EXPECT_THROW(measure_intensity(zero), MetricUndefinedError);
}

TEST(Report, FieldsAreConsistent) {
  const auto cell = rb_cell(300.0);
  for (auto shape : {PulseShape::gaussian, PulseShape::sinc}) {
    const PulseRecipe r{shape, 250e-15, find_gvd_zero_between_lines(cell)};
    const auto rep = simulate(cell, r);
    EXPECT_NEAR(rep.fractional_delay, rep.delay / rep.t0, 1e-15);
    EXPECT_NEAR(rep.fractional_broadening, (rep.output_fwhm - rep.t0) / rep.t0, 1e-15);
    EXPECT_GT(rep.fractional_broadening, -1.0);
    for (double f : {rep.leakage, rep.absorbed}) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
    EXPECT_LE(rep.output.energy(), rep.input.energy() * (1.0 + 1e-12));
    const auto j = to_json(rep);
    EXPECT_EQ(j.at("fractional_delay").get<double>(), rep.fractional_delay);
    EXPECT_EQ(j.at("leakage").get<double>(), rep.leakage);
  }
}
