/*
 * Copyright 2026 The Hotspot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hotspot/impute.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "hotspot/synthgen.h"
#include "test_util.h"

namespace hotspot::impute {
namespace {

using testing::make_dataset;

TEST(FilterSectors, DropsSectorWithMostlyMissingWeek) {
  auto ds = make_dataset(3, 4 * kHoursPerWeek, 2, 1.0);
  // Sector 1: 60% of week 3 missing (hours and KPIs).
  const std::size_t start = 3 * kHoursPerWeek;
  const std::size_t cells = kHoursPerWeek * 2 * 6 / 10;
  for (std::size_t c = 0; c < cells; ++c) {
    ds.missing(1, start + c / 2, c % 2) = 1;
    ds.kpi(1, start + c / 2, c % 2) = NAN;
  }
  const auto r = filter_sectors(ds);
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(r.discarded, (std::vector<std::size_t>{1}));
  EXPECT_EQ(r.data.n_sectors(), 2u);
}

TEST(FilterSectors, ExactlyHalfIsRetained) {
  auto ds = make_dataset(1, 3 * kHoursPerWeek, 3, 1.0);
  // Every other hour fully missing: every 168-hour window is exactly 50%.
  for (std::size_t j = 0; j < ds.m_hours(); j += 2) {
    for (std::size_t k = 0; k < 3; ++k) {
      ds.missing(0, j, k) = 1;
      ds.kpi(0, j, k) = NAN;
    }
  }
  EXPECT_TRUE(filter_sectors(ds).discarded.empty());
  // One more missing cell tips some window over.
  ds.missing(0, 1, 0) = 1;
  EXPECT_EQ(filter_sectors(ds).discarded.size(), 1u);
}

TEST(FilterSectors, UnalignedWindowCounts) {
  // 100 fully missing hours at the end of week 0 and 100 at the start of
  // week 1: each calendar week is < 60% missing but a straddling window is
  // entirely missing.
  auto ds = make_dataset(1, 2 * kHoursPerWeek, 1, 1.0);
  for (std::size_t j = kHoursPerWeek - 84; j < kHoursPerWeek + 84; ++j) ds.missing(0, j, 0) = 1;
  EXPECT_EQ(filter_sectors(ds).discarded.size(), 1u);
}

TEST(FilterSectors, CleanSectorRetained) {
  const auto ds = make_dataset(2, kHoursPerWeek, 1, 0.5);
  EXPECT_TRUE(filter_sectors(ds).discarded.empty());
}

TEST(Normalization, RoundTripAndConstantKpi) {
  auto ds = make_dataset(2, 48, 2, 3.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(10.0, 4.0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 48; ++j) ds.kpi(i, j, 0) = nd(rng);
  ds.missing(0, 3, 0) = 1;
  ds.kpi(0, 3, 0) = NAN;
  const auto norm = NormalizationState::fit(ds);
  EXPECT_FALSE(norm.constant[0]);
  EXPECT_TRUE(norm.constant[1]);
  EXPECT_EQ(norm.std[1], 1.0);
  auto z = ds;
  norm.apply(z);
  double mean = 0.0, var = 0.0;
  int cnt = 0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 48; ++j)
      if (!z.missing(i, j, 0)) mean += z.kpi(i, j, 0), ++cnt;
  mean /= cnt;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 48; ++j)
      if (!z.missing(i, j, 0)) var += (z.kpi(i, j, 0) - mean) * (z.kpi(i, j, 0) - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var / cnt, 1.0, 1e-12);
  EXPECT_TRUE(std::isnan(z.kpi(0, 3, 0)));
  norm.invert(z);
  for (std::size_t idx = 0; idx < ds.kpi.size(); ++idx) {
    if (ds.missing.data()[idx]) continue;
    EXPECT_NEAR(z.kpi.data()[idx], ds.kpi.data()[idx], 1e-10);
  }
}

Matrix<double> column(std::vector<double> v) {
  Matrix<double> m(v.size(), 1);
  m.data() = std::move(v);
  return m;
}

TEST(CorruptSlice, CarryForwardByHand) {
  const auto values = column({1.0, NAN, NAN, 4.0});
  BoolMatrix miss(4, 1);
  miss(1, 0) = miss(2, 0) = 1;
  std::mt19937_64 rng(1);
  const auto cs = corrupt_slice(values, miss, 0.0, rng);
  EXPECT_EQ(cs.values.data(), (std::vector<double>{1.0, 1.0, 1.0, 4.0}));
  EXPECT_EQ(cs.observed.data(), (std::vector<std::uint8_t>{1, 0, 0, 1}));
  EXPECT_EQ(cs.substituted, 0u);
}

TEST(CorruptSlice, LeadingGapIsBackFilled) {
  const auto values = column({NAN, NAN, 2.0, NAN});
  BoolMatrix miss(4, 1);
  miss(0, 0) = miss(1, 0) = miss(3, 0) = 1;
  std::mt19937_64 rng(1);
  EXPECT_EQ(corrupt_slice(values, miss, 0.0, rng).values.data(),
            (std::vector<double>{2.0, 2.0, 2.0, 2.0}));
}

TEST(CorruptSlice, IdentityWithoutMissingOrCorruption) {
  Matrix<double> values(10, 3);
  for (std::size_t e = 0; e < 30; ++e) values.data()[e] = 0.1 * e;
  std::mt19937_64 rng(1);
  const auto cs = corrupt_slice(values, BoolMatrix(10, 3), 0.0, rng);
  EXPECT_EQ(cs.values, values);
}

TEST(CorruptSlice, HalfOfObservedAreSubstituted) {
  Matrix<double> values(kHoursPerWeek, 3);
  BoolMatrix miss(kHoursPerWeek, 3);
  for (std::size_t e = 0; e < values.data().size(); ++e) {
    values.data()[e] = static_cast<double>(e);  // all distinct
    if (e % 7 == 0) {
      miss.data()[e] = 1;
      values.data()[e] = NAN;
    }
  }
  std::size_t observed = 0;
  for (auto m : miss.data()) observed += !m;
  std::mt19937_64 rng(9);
  const auto cs = corrupt_slice(values, miss, 0.5, rng);
  EXPECT_EQ(cs.substituted, observed / 2);
  // Every observed entry whose value changed was substituted.
  std::size_t changed = 0;
  for (std::size_t e = 0; e < values.data().size(); ++e) {
    if (!miss.data()[e]) changed += cs.values.data()[e] != values.data()[e];
    EXPECT_TRUE(std::isfinite(cs.values.data()[e]));
  }
  EXPECT_EQ(changed, observed / 2);
}

TEST(CorruptSlice, AllMissingKpiThrows) {
  Matrix<double> values(4, 2, 1.0);
  BoolMatrix miss(4, 2);
  for (std::size_t j = 0; j < 4; ++j) miss(j, 1) = 1;
  std::mt19937_64 rng(1);
  EXPECT_THROW(corrupt_slice(values, miss, 0.0, rng), DataError);
}

AutoencoderSpec tiny_spec(std::size_t width, std::size_t layers = 4) {
  AutoencoderSpec s;
  s.input_width = width;
  s.encoder_layers = layers;
  return s;
}

TEST(AutoencoderSpec, MirroredHalvingWidths) {
  EXPECT_EQ(tiny_spec(8).layer_widths(),
            (std::vector<std::size_t>{8, 4, 2, 1, 1, 1, 2, 4, 8}));
  const auto w = AutoencoderSpec::for_kpis(21).layer_widths();
  EXPECT_EQ(w, (std::vector<std::size_t>{3528, 1764, 882, 441, 220, 441, 882, 1764, 3528}));
}

TEST(Forward, ZeroNetworkGivesZeroOutput) {
  const auto net = Autoencoder::zeros(tiny_spec(16));
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(16, -1.0, 1.0);
  EXPECT_TRUE(forward(net, x).isZero(0.0));
}

TEST(Forward, UnitSlopeIsLinear) {
  std::mt19937_64 rng(3);
  auto net = Autoencoder::initialize(tiny_spec(8, 2), rng);
  std::fill(net.slopes.begin(), net.slopes.end(), 1.0);
  // With identity activations the network is affine: f(a+b) - f(b) = f(a) - f(0).
  Eigen::VectorXd a = Eigen::VectorXd::Random(8), b = Eigen::VectorXd::Random(8);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(8);
  const Eigen::VectorXd lhs = forward(net, Eigen::VectorXd(a + b)) - forward(net, b);
  const Eigen::VectorXd rhs = forward(net, a) - forward(net, zero);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Forward, NonFiniteActivationThrows) {
  std::mt19937_64 rng(3);
  const auto net = Autoencoder::initialize(tiny_spec(8), rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
  x(2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(forward(net, x), DataError);
}

// Central finite differences on every parameter of a random network.
double max_gradient_error(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto net = Autoencoder::initialize(tiny_spec(8), rng);
  std::uniform_real_distribution<double> u(-0.5, 0.5), us(0.05, 0.6);
  for (auto& b : net.biases)
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = u(rng);
  for (auto& s : net.slopes) s = us(rng);
  const Eigen::Index B = 5;
  Eigen::MatrixXd x(8, B), t(8, B), m(8, B);
  for (Eigen::Index c = 0; c < B; ++c)
    for (Eigen::Index r = 0; r < 8; ++r) {
      x(r, c) = 2.0 * u(rng);
      t(r, c) = 2.0 * u(rng);
      m(r, c) = u(rng) > -0.3 ? 1.0 : 0.0;
    }
  const auto g = backward(net, forward(net, x), t, m);
  auto loss = [&](const Autoencoder& n) { return masked_mse(forward(n, x).output(), t, m); };
  const double eps = 1e-6;
  double worst = 0.0;
  auto check = [&](double& p, double analytic) {
    const double saved = p;
    p = saved + eps;
    const double up = loss(net);
    p = saved - eps;
    const double down = loss(net);
    p = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic) / scale);
  };
  for (std::size_t i = 0; i < net.n_layers(); ++i) {
    for (Eigen::Index e = 0; e < net.weights[i].size(); ++e)
      check(net.weights[i].data()[e], g.weights[i].data()[e]);
    for (Eigen::Index e = 0; e < net.biases[i].size(); ++e)
      check(net.biases[i].data()[e], g.biases[i].data()[e]);
  }
  for (std::size_t i = 0; i < net.slopes.size(); ++i) check(net.slopes[i], g.slopes[i]);
  return worst;
}

class GradientCheck : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  EXPECT_LT(max_gradient_error(GetParam()), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Seeds, GradientCheck, ::testing::Range<std::uint64_t>(1, 11));

TEST(RmsProp, ZeroGradientAndZeroRateAreNoOps) {
  std::mt19937_64 rng(4);
  const auto net = Autoencoder::initialize(tiny_spec(8), rng);
  auto a = net;
  RmsProp opt(a, 1e-2, 0.99, 1e-8);
  auto zero = Autoencoder::zeros(tiny_spec(8));
  opt.step(a, zero);
  for (std::size_t i = 0; i < net.n_layers(); ++i) EXPECT_EQ(a.weights[i], net.weights[i]);
  EXPECT_EQ(a.slopes, net.slopes);

  auto b = net;
  RmsProp frozen(b, 0.0, 0.99, 1e-8);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 4);
  const auto cache = forward(b, x);
  frozen.step(b, backward(b, cache, x, Eigen::MatrixXd::Ones(8, 4)));
  for (std::size_t i = 0; i < net.n_layers(); ++i) EXPECT_EQ(b.weights[i], net.weights[i]);
}

synth::GeneratedData small_generated(std::size_t l = 4) {
  synth::GeneratorConfig cfg;
  cfg.n_sectors = 30;
  cfg.m_weeks = 4;
  cfg.l_kpis = l;
  cfg.seed = 11;
  return synth::generate_dataset(cfg);
}

TEST(Train, LossTraceLengthAndRateZero) {
  const auto g = small_generated();
  auto spec = AutoencoderSpec::for_kpis(4);
  spec.epochs = 1;
  spec.batch_size = 16;
  spec.learning_rate = 0.0;
  auto z = g.dataset;
  NormalizationState::fit(z).apply(z);
  const auto r = train_autoencoder(z, spec, 1);
  EXPECT_EQ(r.batches_per_epoch, 30u * 4u / 16u);
  EXPECT_EQ(r.loss_trace.size(), 7u);
  std::mt19937_64 init_rng(derive_seed(1, 0x696e6974));
  const auto init = Autoencoder::initialize(spec, init_rng);
  for (std::size_t i = 0; i < init.n_layers(); ++i) EXPECT_EQ(r.net.weights[i], init.weights[i]);
}

TEST(Train, LossDecreasesOnNoiselessData) {
  synth::GeneratorConfig cfg;
  cfg.n_sectors = 30;
  cfg.m_weeks = 4;
  cfg.l_kpis = 4;
  cfg.noise_std = 0.0;
  cfg.seed = 12;
  const auto g = synth::generate_dataset(cfg);
  auto spec = AutoencoderSpec::for_kpis(4);
  spec.epochs = 40;
  spec.batch_size = 32;
  spec.learning_rate = 1e-3;
  auto z = g.dataset;
  NormalizationState::fit(z).apply(z);
  const auto r = train_autoencoder(z, spec, 2);
  auto avg = [&](std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t b = from; b < to; ++b) s += r.loss_trace[b];
    return s / static_cast<double>(to - from);
  };
  const std::size_t n = r.loss_trace.size();
  EXPECT_LT(avg(n - 10, n), avg(0, 10));
}

TEST(Train, DeterministicForSeed) {
  const auto g = small_generated();
  auto spec = AutoencoderSpec::for_kpis(4);
  spec.epochs = 2;
  spec.batch_size = 16;
  auto z = g.dataset;
  NormalizationState::fit(z).apply(z);
  const auto a = train_autoencoder(z, spec, 3);
  const auto b = train_autoencoder(z, spec, 3);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
}

ImputationModel quick_model(const core::KpiDataset& ds) {
  auto spec = AutoencoderSpec::for_kpis(ds.l_kpis());
  spec.epochs = 1;
  spec.batch_size = 16;
  return fit_imputation_model(ds, spec, 4);
}

TEST(Impute, NoMissingIsIdentity) {
  synth::GeneratorConfig cfg;
  cfg.n_sectors = 10;
  cfg.m_weeks = 2;
  cfg.l_kpis = 4;
  cfg.missingness = synth::MissingnessConfig::none();
  const auto g = synth::generate_dataset(cfg);
  const auto model = quick_model(g.dataset);
  const auto out = impute_missing(g.dataset, model);
  EXPECT_EQ(0, std::memcmp(out.kpi.data().data(), g.dataset.kpi.data().data(),
                           out.kpi.size() * sizeof(double)));
}

TEST(Impute, OnlyMissingEntriesChange) {
  const auto g = small_generated();
  const auto model = quick_model(g.dataset);
  for (std::size_t threads : {1u, 3u}) {
    const auto out = impute_missing(g.dataset, model, threads);
    EXPECT_EQ(out.missing_count(), 0u);
    for (std::size_t idx = 0; idx < out.kpi.size(); ++idx) {
      if (g.dataset.missing.data()[idx]) {
        EXPECT_TRUE(std::isfinite(out.kpi.data()[idx]));
      } else {
        EXPECT_EQ(std::memcmp(&out.kpi.data()[idx], &g.dataset.kpi.data()[idx], sizeof(double)), 0);
      }
    }
  }
  EXPECT_EQ(impute_missing(g.dataset, model, 1).kpi, impute_missing(g.dataset, model, 4).kpi);
}

TEST(Impute, SingleMissingPoint) {
  synth::GeneratorConfig cfg;
  cfg.n_sectors = 4;
  cfg.m_weeks = 2;
  cfg.l_kpis = 4;
  cfg.missingness = synth::MissingnessConfig::none();
  auto ds = synth::generate_dataset(cfg).dataset;
  const auto model = quick_model(ds);
  auto holed = ds;
  holed.missing(2, 200, 1) = 1;
  holed.kpi(2, 200, 1) = NAN;
  const auto out = impute_missing(holed, model);
  for (std::size_t idx = 0; idx < out.kpi.size(); ++idx) {
    if (idx == (2 * out.m_hours() + 200) * 4 + 1) {
      EXPECT_TRUE(std::isfinite(out.kpi.data()[idx]));
    } else {
      EXPECT_EQ(out.kpi.data()[idx], ds.kpi.data()[idx]);
    }
  }
}

TEST(CarryForwardImpute, FillsFromPreviousHour) {
  auto ds = make_dataset(1, 6, 1, 0.0);
  for (std::size_t j = 0; j < 6; ++j) ds.kpi(0, j, 0) = static_cast<double>(j);
  ds.missing(0, 0, 0) = ds.missing(0, 3, 0) = ds.missing(0, 4, 0) = 1;
  const auto out = carry_forward_impute(ds);
  std::vector<double> got;
  for (std::size_t j = 0; j < 6; ++j) got.push_back(out.kpi(0, j, 0));
  EXPECT_EQ(got, (std::vector<double>{1, 1, 2, 2, 2, 5}));
}

TEST(Serialization, RoundTripIsExact) {
  const auto g = small_generated();
  const auto model = quick_model(g.dataset);
  std::stringstream buf;
  save_model(model, buf);
  const auto back = load_model(buf);
  ASSERT_EQ(back.net.n_layers(), model.net.n_layers());
  for (std::size_t i = 0; i < model.net.n_layers(); ++i) {
    EXPECT_EQ(back.net.weights[i], model.net.weights[i]);
    EXPECT_EQ(back.net.biases[i], model.net.biases[i]);
  }
  EXPECT_EQ(back.net.slopes, model.net.slopes);
  EXPECT_EQ(back.norm.mean, model.norm.mean);
  EXPECT_EQ(impute_missing(g.dataset, back).kpi, impute_missing(g.dataset, model).kpi);
  // First bytes: magic then version 1 little-endian.
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 8), std::string("HSAE\x01\x00\x00\x00", 8));
}

TEST(Serialization, RejectsGarbage) {
  std::stringstream bad("not a model");
  EXPECT_THROW(load_model(bad), DataError);
  std::stringstream truncated(std::string("HSAE\x01\x00\x00\x00\x04", 9));
  EXPECT_THROW(load_model(truncated), DataError);
}

}  // namespace
}  // namespace hotspot::impute
