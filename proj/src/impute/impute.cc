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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "hotspot/binary_io.h"

namespace hotspot::impute {

FilterResult filter_sectors(const core::KpiDataset& data) {
  const std::size_t m = data.m_hours();
  const std::size_t l = data.l_kpis();
  require(m > 0 && m % kHoursPerWeek == 0,
          "sector filtering needs a whole number of weeks");
  FilterResult out;
  std::vector<std::size_t> per_hour(m);
  // Compare counts, not fractions: missing / (168 l) > 1/2.
  const std::size_t limit = kHoursPerWeek * l;
  for (std::size_t i = 0; i < data.n_sectors(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto f = data.missing.fiber(i, j);
      per_hour[j] = static_cast<std::size_t>(std::count(f.begin(), f.end(), 1));
    }
    std::size_t window = std::accumulate(per_hour.begin(),
                                         per_hour.begin() + kHoursPerWeek,
                                         std::size_t{0});
    bool drop = 2 * window > limit;
    for (std::size_t j = kHoursPerWeek; j < m && !drop; ++j) {
      window += per_hour[j];
      window -= per_hour[j - kHoursPerWeek];
      drop = 2 * window > limit;
    }
    (drop ? out.discarded : out.kept).push_back(i);
  }
  out.data = core::select_sectors(data, out.kept);
  return out;
}

NormalizationState NormalizationState::fit(const core::KpiDataset& data) {
  const std::size_t l = data.l_kpis();
  NormalizationState s;
  s.mean.assign(l, 0.0);
  s.std.assign(l, 1.0);
  s.constant.assign(l, 0);
  std::vector<double> sum(l, 0.0), count(l, 0.0);
  const auto& v = data.kpi.data();
  const auto& miss = data.missing.data();
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (miss[idx]) continue;
    sum[idx % l] += v[idx];
    count[idx % l] += 1.0;
  }
  for (std::size_t k = 0; k < l; ++k) s.mean[k] = count[k] > 0 ? sum[k] / count[k] : 0.0;
  // Second pass for a stable variance.
  std::vector<double> ss(l, 0.0);
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (miss[idx]) continue;
    const double d = v[idx] - s.mean[idx % l];
    ss[idx % l] += d * d;
  }
  for (std::size_t k = 0; k < l; ++k) {
    const double sd = count[k] > 0 ? std::sqrt(ss[k] / count[k]) : 0.0;
    if (sd > 0.0 && std::isfinite(sd)) {
      s.std[k] = sd;
    } else {
      s.constant[k] = 1;
    }
  }
  return s;
}

void NormalizationState::apply(core::KpiDataset& data) const {
  require(data.l_kpis() == l_kpis(), "normalization KPI count mismatch");
  auto& v = data.kpi.data();
  const std::size_t l = l_kpis();
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (!data.missing.data()[idx]) v[idx] = normalize(idx % l, v[idx]);
  }
}

void NormalizationState::invert(core::KpiDataset& data) const {
  require(data.l_kpis() == l_kpis(), "normalization KPI count mismatch");
  auto& v = data.kpi.data();
  const std::size_t l = l_kpis();
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (!data.missing.data()[idx]) v[idx] = denormalize(idx % l, v[idx]);
  }
}

bool carry_forward(std::span<double> series, std::span<const std::uint8_t> missing,
                   std::size_t stride) {
  const std::size_t n = series.size() / stride + (series.size() % stride ? 1 : 0);
  std::size_t first = n;
  for (std::size_t t = 0; t < n; ++t) {
    if (!missing[t * stride]) {
      first = t;
      break;
    }
  }
  if (first == n) return false;
  for (std::size_t t = 0; t < first; ++t) series[t * stride] = series[first * stride];
  double last = series[first * stride];
  for (std::size_t t = first + 1; t < n; ++t) {
    if (missing[t * stride]) {
      series[t * stride] = last;
    } else {
      last = series[t * stride];
    }
  }
  return true;
}

CorruptedSlice corrupt_slice(const Matrix<double>& values,
                             const BoolMatrix& missing,
                             double corruption_fraction, std::mt19937_64& rng) {
  require(values.rows() == missing.rows() && values.cols() == missing.cols(),
          "slice and mask shapes differ");
  require(corruption_fraction >= 0.0 && corruption_fraction <= 1.0,
          "corruption fraction must lie in [0, 1]");
  const std::size_t hours = values.rows();
  const std::size_t l = values.cols();
  CorruptedSlice out;
  out.values = values;
  out.observed = BoolMatrix(hours, l);
  BoolMatrix drop = missing;

  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < l; ++k) {
    std::vector<std::size_t> seen;
    for (std::size_t j = 0; j < hours; ++j) {
      if (!missing(j, k)) {
        out.observed(j, k) = 1;
        seen.push_back(j * l + k);
      }
    }
    if (seen.empty()) throw DataError("KPI " + std::to_string(k) + " has no observed value in slice");
    // One randomly kept anchor per KPI keeps the refill well defined.
    if (corruption_fraction > 0.0) {
      const std::size_t anchor = std::uniform_int_distribution<std::size_t>(0, seen.size() - 1)(rng);
      for (std::size_t s = 0; s < seen.size(); ++s) {
        if (s != anchor) candidates.push_back(seen[s]);
      }
    }
  }
  if (corruption_fraction > 0.0) {
    std::size_t total_observed = 0;
    for (auto o : out.observed.data()) total_observed += o;
    const std::size_t target = std::min(
        candidates.size(),
        static_cast<std::size_t>(std::floor(corruption_fraction * static_cast<double>(total_observed))));
    // Partial Fisher-Yates.
    for (std::size_t s = 0; s < target; ++s) {
      const std::size_t r = std::uniform_int_distribution<std::size_t>(s, candidates.size() - 1)(rng);
      std::swap(candidates[s], candidates[r]);
      drop.data()[candidates[s]] = 1;
    }
    out.substituted = target;
  }
  for (std::size_t k = 0; k < l; ++k) {
    carry_forward(std::span<double>(out.values.data().data() + k, (hours - 1) * l + 1),
                  std::span<const std::uint8_t>(drop.data().data() + k, (hours - 1) * l + 1), l);
  }
  return out;
}

AutoencoderSpec AutoencoderSpec::for_kpis(std::size_t l_kpis) {
  AutoencoderSpec s;
  s.input_width = kHoursPerWeek * l_kpis;
  return s;
}

std::vector<std::size_t> AutoencoderSpec::layer_widths() const {
  std::vector<std::size_t> w{input_width};
  for (std::size_t i = 0; i < encoder_layers; ++i) w.push_back(std::max<std::size_t>(1, w.back() / 2));
  for (std::size_t i = encoder_layers; i-- > 0;) w.push_back(w[i]);
  return w;
}

void AutoencoderSpec::validate() const {
  require(input_width >= 1, "autoencoder input width must be positive");
  require(encoder_layers >= 1, "autoencoder needs at least one encoder layer");
  require(batch_size >= 1, "batch size must be positive");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning rate must be >= 0");
  require(rmsprop_smoothing >= 0.0 && rmsprop_smoothing < 1.0, "RMSprop smoothing must lie in [0, 1)");
  require(rmsprop_epsilon > 0.0, "RMSprop epsilon must be positive");
  require(corruption_fraction >= 0.0 && corruption_fraction <= 1.0, "corruption fraction must lie in [0, 1]");
}

std::size_t Autoencoder::parameter_count() const {
  std::size_t n = slopes.size();
  for (std::size_t i = 0; i < weights.size(); ++i) n += weights[i].size() + biases[i].size();
  return n;
}

Autoencoder Autoencoder::zeros(const AutoencoderSpec& spec) {
  spec.validate();
  const auto w = spec.layer_widths();
  Autoencoder net;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    net.weights.push_back(Eigen::MatrixXd::Zero(w[i + 1], w[i]));
    net.biases.push_back(Eigen::VectorXd::Zero(w[i + 1]));
  }
  net.slopes.assign(w.size() - 2, 0.0);
  return net;
}

Autoencoder Autoencoder::initialize(const AutoencoderSpec& spec, std::mt19937_64& rng) {
  Autoencoder net = zeros(spec);
  for (auto& W : net.weights) {
    // Uniform(-a, a) with a = sqrt(6 / fan_in): unit gain for ReLU-like units.
    const double a = std::sqrt(6.0 / static_cast<double>(W.cols()));
    std::uniform_real_distribution<double> u(-a, a);
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
      for (Eigen::Index r = 0; r < W.rows(); ++r) W(r, c) = u(rng);
    }
  }
  std::fill(net.slopes.begin(), net.slopes.end(), spec.initial_slope);
  return net;
}

namespace {

void check_finite(const Eigen::MatrixXd& m, std::size_t layer) {
  if (!m.allFinite()) {
    throw DataError("non-finite activation at layer " + std::to_string(layer) +
                    " (max |a| = " + std::to_string(m.cwiseAbs().maxCoeff()) + ")");
  }
}

}  // namespace

ForwardCache forward(const Autoencoder& net, const Eigen::MatrixXd& input) {
  require(input.rows() == static_cast<Eigen::Index>(net.input_width()),
          "input width does not match the network");
  ForwardCache c;
  c.post.push_back(input);
  const std::size_t L = net.n_layers();
  for (std::size_t i = 0; i < L; ++i) {
    Eigen::MatrixXd z = net.weights[i] * c.post.back();
    z.colwise() += net.biases[i];
    check_finite(z, i);
    Eigen::MatrixXd a = z;
    if (i + 1 < L) {
      const double s = net.slopes[i];
      a = z.unaryExpr([s](double v) { return v > 0.0 ? v : s * v; });
    }
    c.pre.push_back(std::move(z));
    c.post.push_back(std::move(a));
  }
  return c;
}

Eigen::VectorXd forward(const Autoencoder& net, const Eigen::VectorXd& input) {
  Eigen::MatrixXd m = input;
  return forward(net, m).output().col(0);
}

double masked_mse(const Eigen::MatrixXd& output, const Eigen::MatrixXd& target,
                  const Eigen::MatrixXd& mask) {
  const double count = mask.sum();
  if (count <= 0.0) return 0.0;
  return (mask.array() * (output - target).array().square()).sum() / count;
}

Gradients backward(const Autoencoder& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& target, const Eigen::MatrixXd& mask) {
  const std::size_t L = net.n_layers();
  Gradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  g.slopes.assign(net.slopes.size(), 0.0);
  const double count = mask.sum();
  Eigen::MatrixXd delta;  // dLoss / d post-activation of the current layer
  if (count > 0.0) {
    delta = (2.0 / count) * (mask.array() * (cache.output() - target).array()).matrix();
  } else {
    delta = Eigen::MatrixXd::Zero(cache.output().rows(), cache.output().cols());
  }
  for (std::size_t i = L; i-- > 0;) {
    const Eigen::MatrixXd& z = cache.pre[i];
    if (i + 1 < L) {
      const double s = net.slopes[i];
      g.slopes[i] = (z.array() < 0.0).select(z.array() * delta.array(), 0.0).sum();
      delta = (z.array() > 0.0).select(delta.array(), s * delta.array()).matrix();
    }
    g.weights[i] = delta * cache.post[i].transpose();
    g.biases[i] = delta.rowwise().sum();
    if (i > 0) delta = net.weights[i].transpose() * delta;
  }
  return g;
}

RmsProp::RmsProp(const Autoencoder& net, double learning_rate, double smoothing,
                 double epsilon)
    : lr_(learning_rate), rho_(smoothing), eps_(epsilon) {
  sq_.slopes.assign(net.slopes.size(), 0.0);
  for (std::size_t i = 0; i < net.n_layers(); ++i) {
    sq_.weights.push_back(Eigen::MatrixXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
    sq_.biases.push_back(Eigen::VectorXd::Zero(net.biases[i].size()));
  }
}

void RmsProp::step(Autoencoder& net, const Gradients& g) {
  const double rho = rho_, lr = lr_, eps = eps_;
  auto update = [&](auto& p, auto& v, const auto& grad) {
    v.array() = rho * v.array() + (1.0 - rho) * grad.array().square();
    p.array() -= lr * grad.array() / (v.array().sqrt() + eps);
  };
  for (std::size_t i = 0; i < net.n_layers(); ++i) {
    update(net.weights[i], sq_.weights[i], g.weights[i]);
    update(net.biases[i], sq_.biases[i], g.biases[i]);
  }
  for (std::size_t i = 0; i < net.slopes.size(); ++i) {
    sq_.slopes[i] = rho * sq_.slopes[i] + (1.0 - rho) * g.slopes[i] * g.slopes[i];
    net.slopes[i] -= lr * g.slopes[i] / (std::sqrt(sq_.slopes[i]) + eps);
  }
}

std::size_t batches_per_epoch(std::size_t n_sectors, std::size_t m_weeks,
                              std::size_t batch_size) {
  require(batch_size >= 1, "batch size must be positive");
  return std::max<std::size_t>(1, n_sectors * m_weeks / batch_size);
}

namespace {

// Week slice (168 x l) of sector i starting at hour 168 * week.
void extract_week(const core::KpiDataset& data, std::size_t i, std::size_t week,
                  Matrix<double>& values, BoolMatrix& missing) {
  const std::size_t l = data.l_kpis();
  const std::size_t offset = week * kHoursPerWeek * l;
  const auto src = data.kpi.sector(i).subspan(offset, kHoursPerWeek * l);
  const auto msk = data.missing.sector(i).subspan(offset, kHoursPerWeek * l);
  std::copy(src.begin(), src.end(), values.data().begin());
  std::copy(msk.begin(), msk.end(), missing.data().begin());
}

// Carry-forward fill for inference; a KPI never observed in the week falls
// back to 0, the normalized KPI mean.
void fill_for_inference(Matrix<double>& values, const BoolMatrix& missing) {
  const std::size_t hours = values.rows(), l = values.cols();
  for (std::size_t k = 0; k < l; ++k) {
    std::span<double> col(values.data().data() + k, (hours - 1) * l + 1);
    if (!carry_forward(col, std::span<const std::uint8_t>(missing.data().data() + k, (hours - 1) * l + 1), l)) {
      for (std::size_t j = 0; j < hours; ++j) values(j, k) = 0.0;
    }
  }
}

}  // namespace

TrainResult train_autoencoder(const core::KpiDataset& normalized,
                              const AutoencoderSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = normalized.n_sectors();
  const std::size_t mw = normalized.m_weeks();
  const std::size_t l = normalized.l_kpis();
  require(n >= 1 && mw >= 1, "training needs at least one sector-week");
  require(spec.input_width == kHoursPerWeek * l, "autoencoder width must be 168 * l");

  std::mt19937_64 init_rng(derive_seed(seed, 0x696e6974));
  TrainResult out;
  out.net = Autoencoder::initialize(spec, init_rng);
  out.batches_per_epoch = batches_per_epoch(n, mw, spec.batch_size);
  RmsProp opt(out.net, spec.learning_rate, spec.rmsprop_smoothing, spec.rmsprop_epsilon);

  const std::size_t W = spec.input_width;
  const std::size_t B = spec.batch_size;
  Eigen::MatrixXd input(W, B), target(W, B), mask(W, B);
  Matrix<double> values(kHoursPerWeek, l);
  BoolMatrix missing(kHoursPerWeek, l);
  const std::size_t total = spec.epochs * out.batches_per_epoch;
  out.loss_trace.reserve(total);
  for (std::size_t b = 0; b < total; ++b) {
    const std::uint64_t batch_seed = derive_seed(seed, b);
    std::mt19937_64 rng(batch_seed);
    std::uniform_int_distribution<std::size_t> pick_i(0, n - 1), pick_j(0, mw - 1);
    for (std::size_t s = 0; s < B; ++s) {
      // Redraw slices that have a KPI with no observation at all.
      CorruptedSlice cs;
      for (int attempt = 0;; ++attempt) {
        extract_week(normalized, pick_i(rng), pick_j(rng), values, missing);
        try {
          cs = corrupt_slice(values, missing, spec.corruption_fraction, rng);
          break;
        } catch (const DataError&) {
          if (attempt > 1000) throw DataError("no usable week slice for training");
        }
      }
      for (std::size_t e = 0; e < W; ++e) {
        input(e, s) = cs.values.data()[e];
        const bool obs = cs.observed.data()[e];
        mask(e, s) = obs ? 1.0 : 0.0;
        target(e, s) = obs ? values.data()[e] : 0.0;
      }
    }
    ForwardCache cache;
    try {
      cache = forward(out.net, input);
    } catch (const DataError& e) {
      throw DataError(std::string("training diverged at batch ") + std::to_string(b) +
                      " (seed " + std::to_string(batch_seed) + "): " + e.what());
    }
    const double loss = masked_mse(cache.output(), target, mask);
    if (!std::isfinite(loss)) {
      throw DataError("training diverged at batch " + std::to_string(b) + " (seed " +
                      std::to_string(batch_seed) + ")");
    }
    out.loss_trace.push_back(loss);
    opt.step(out.net, backward(out.net, cache, target, mask));
  }
  return out;
}

ImputationModel fit_imputation_model(const core::KpiDataset& data,
                                     AutoencoderSpec spec, std::uint64_t seed,
                                     std::vector<double>* loss_trace) {
  ImputationModel model;
  spec.input_width = kHoursPerWeek * data.l_kpis();
  model.spec = spec;
  model.norm = NormalizationState::fit(data);
  core::KpiDataset z = data;
  model.norm.apply(z);
  auto trained = train_autoencoder(z, spec, seed);
  model.net = std::move(trained.net);
  if (loss_trace) *loss_trace = std::move(trained.loss_trace);
  return model;
}

core::KpiDataset impute_missing(const core::KpiDataset& data,
                                const ImputationModel& model, std::size_t threads) {
  const std::size_t l = data.l_kpis();
  require(model.norm.l_kpis() == l, "model KPI count does not match the data");
  require(model.net.input_width() == kHoursPerWeek * l, "model width does not match the data");
  require(data.m_hours() % kHoursPerWeek == 0, "imputation needs a whole number of weeks");
  core::KpiDataset out = data;
  const std::size_t n = data.n_sectors(), mw = data.m_weeks();

  auto work = [&](std::size_t begin, std::size_t end) {
    Matrix<double> values(kHoursPerWeek, l);
    BoolMatrix missing(kHoursPerWeek, l);
    Eigen::VectorXd input(kHoursPerWeek * l);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t w = 0; w < mw; ++w) {
        extract_week(data, i, w, values, missing);
        if (std::find(missing.data().begin(), missing.data().end(), 1) == missing.data().end()) continue;
        for (std::size_t e = 0; e < values.data().size(); ++e) {
          if (!missing.data()[e]) values.data()[e] = model.norm.normalize(e % l, values.data()[e]);
        }
        fill_for_inference(values, missing);
        for (std::size_t e = 0; e < values.data().size(); ++e) input(e) = values.data()[e];
        const Eigen::VectorXd rec = forward(model.net, input);
        for (std::size_t j = 0; j < kHoursPerWeek; ++j) {
          for (std::size_t k = 0; k < l; ++k) {
            if (missing(j, k)) {
              out.kpi(i, w * kHoursPerWeek + j, k) = model.norm.denormalize(k, rec(j * l + k));
            }
          }
        }
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  std::fill(out.missing.data().begin(), out.missing.data().end(), 0);
  return out;
}

core::KpiDataset carry_forward_impute(const core::KpiDataset& data) {
  core::KpiDataset out = data;
  const auto norm = NormalizationState::fit(data);
  const std::size_t m = data.m_hours(), l = data.l_kpis();
  for (std::size_t i = 0; i < data.n_sectors(); ++i) {
    auto s = out.kpi.sector(i);
    auto msk = data.missing.sector(i);
    for (std::size_t k = 0; k < l; ++k) {
      std::span<double> col(s.data() + k, (m - 1) * l + 1);
      if (!carry_forward(col, msk.subspan(k, (m - 1) * l + 1), l)) {
        for (std::size_t j = 0; j < m; ++j) out.kpi(i, j, k) = norm.mean[k];
      }
    }
  }
  std::fill(out.missing.data().begin(), out.missing.data().end(), 0);
  return out;
}

namespace {
constexpr char kMagic[] = "HSAE";
constexpr std::uint32_t kVersion = 1;
}  // namespace

// Layout (all little-endian): magic "HSAE", u32 version, u64 encoder layers,
// u64 input width, f64 x {lr, smoothing, epsilon, corruption, initial slope},
// u64 batch size, u64 epochs, normalization {f64s mean, f64s std, f64s
// constant}, then per layer f64s weights (column-major), f64s biases, and
// finally f64s slopes.
void save_model(const ImputationModel& model, std::ostream& out) {
  io::BinaryWriter w(out);
  w.header(kMagic, kVersion);
  const auto& s = model.spec;
  w.u64(s.encoder_layers);
  w.u64(s.input_width);
  for (double v : {s.learning_rate, s.rmsprop_smoothing, s.rmsprop_epsilon,
                   s.corruption_fraction, s.initial_slope}) {
    w.f64(v);
  }
  w.u64(s.batch_size);
  w.u64(s.epochs);
  w.f64s(model.norm.mean);
  w.f64s(model.norm.std);
  w.f64s(std::vector<double>(model.norm.constant.begin(), model.norm.constant.end()));
  for (std::size_t i = 0; i < model.net.n_layers(); ++i) {
    const auto& W = model.net.weights[i];
    w.f64s(std::vector<double>(W.data(), W.data() + W.size()));
    const auto& b = model.net.biases[i];
    w.f64s(std::vector<double>(b.data(), b.data() + b.size()));
  }
  w.f64s(model.net.slopes);
}

ImputationModel load_model(std::istream& in) {
  io::BinaryReader r(in);
  const auto version = r.header(kMagic);
  if (version != kVersion) throw DataError("unsupported autoencoder file version " + std::to_string(version));
  ImputationModel m;
  auto& s = m.spec;
  s.encoder_layers = r.u64();
  s.input_width = r.u64();
  s.learning_rate = r.f64();
  s.rmsprop_smoothing = r.f64();
  s.rmsprop_epsilon = r.f64();
  s.corruption_fraction = r.f64();
  s.initial_slope = r.f64();
  s.batch_size = r.u64();
  s.epochs = r.u64();
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw DataError(std::string("corrupt autoencoder file: ") + e.what());
  }
  m.norm.mean = r.f64s();
  m.norm.std = r.f64s();
  const auto flags = r.f64s();
  m.norm.constant.assign(flags.begin(), flags.end());
  if (m.norm.mean.size() * kHoursPerWeek != s.input_width || m.norm.std.size() != m.norm.mean.size() ||
      flags.size() != m.norm.mean.size()) {
    throw DataError("corrupt autoencoder file: normalization size");
  }
  m.net = Autoencoder::zeros(s);
  for (std::size_t i = 0; i < m.net.n_layers(); ++i) {
    auto& W = m.net.weights[i];
    const auto wv = r.f64s();
    const auto bv = r.f64s();
    if (wv.size() != static_cast<std::size_t>(W.size()) ||
        bv.size() != static_cast<std::size_t>(m.net.biases[i].size())) {
      throw DataError("corrupt autoencoder file: layer " + std::to_string(i) + " size");
    }
    std::copy(wv.begin(), wv.end(), W.data());
    std::copy(bv.begin(), bv.end(), m.net.biases[i].data());
  }
  const auto slopes = r.f64s();
  if (slopes.size() != m.net.slopes.size()) throw DataError("corrupt autoencoder file: slopes");
  m.net.slopes = slopes;
  return m;
}

void save_model(const ImputationModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  save_model(model, out);
}

ImputationModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return load_model(in);
}

}  // namespace hotspot::impute
