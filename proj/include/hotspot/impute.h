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

// Sector filtering and missing-value imputation with a stacked denoising
// autoencoder trained on week-long slices.

#ifndef HOTSPOT_IMPUTE_H_
#define HOTSPOT_IMPUTE_H_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hotspot/core.h"

namespace hotspot::impute {

struct FilterResult {
  core::KpiDataset data;
  std::vector<std::size_t> kept;       // original sector indices
  std::vector<std::size_t> discarded;  // original sector indices
};

// Drops every sector with more than half of its values missing in at least
// one window of 168 consecutive hours. Windows slide hour by hour, so the
// aligned calendar weeks are a subset of the windows checked.
FilterResult filter_sectors(const core::KpiDataset& data);

// Per-KPI z-normalization over the non-missing values. A KPI with zero
// spread (or no observations) gets std 1 and is flagged constant.
struct NormalizationState {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<std::uint8_t> constant;

  static NormalizationState fit(const core::KpiDataset& data);
  std::size_t l_kpis() const { return mean.size(); }
  double normalize(std::size_t k, double v) const { return (v - mean[k]) / std[k]; }
  double denormalize(std::size_t k, double z) const { return z * std[k] + mean[k]; }
  // In place; missing entries stay NaN.
  void apply(core::KpiDataset& data) const;
  void invert(core::KpiDataset& data) const;
};

struct CorruptedSlice {
  Matrix<double> values;  // hours x l, fully populated
  BoolMatrix observed;    // originally non-missing entries (loss mask)
  std::size_t substituted = 0;  // observed entries replaced by corruption
};

// Replaces the missing entries of a (hours x l) slice with the previous
// observed value of the same KPI (leading gaps take the first observed
// value). When `corruption_fraction` > 0, floor(fraction * observed)
// observed entries are also dropped and refilled the same way, keeping at
// least one observed value per KPI. Throws DataError on an all-missing KPI.
CorruptedSlice corrupt_slice(const Matrix<double>& values,
                             const BoolMatrix& missing,
                             double corruption_fraction, std::mt19937_64& rng);

// Carry-forward fill of a single series in place; entries flagged in
// `missing` are overwritten. Returns false when nothing was observed.
bool carry_forward(std::span<double> series, std::span<const std::uint8_t> missing,
                   std::size_t stride = 1);

struct AutoencoderSpec {
  std::size_t input_width = 0;
  std::size_t encoder_layers = 4;
  std::size_t batch_size = 128;
  std::size_t epochs = 50;
  double learning_rate = 1e-4;
  double rmsprop_smoothing = 0.99;
  double rmsprop_epsilon = 1e-8;
  double corruption_fraction = 0.5;
  double initial_slope = 0.25;

  // Week-slice network for l KPIs: input width 168 * l.
  static AutoencoderSpec for_kpis(std::size_t l_kpis);
  // Widths of every layer boundary, input to output:
  // [W, W/2, ..., W/2^L, ..., W/2, W].
  std::vector<std::size_t> layer_widths() const;
  void validate() const;
};

// Dense layers with a learnable negative slope (PReLU) after every layer
// except the last, which is linear.
struct Autoencoder {
  std::vector<Eigen::MatrixXd> weights;  // weights[i]: out x in
  std::vector<Eigen::VectorXd> biases;
  std::vector<double> slopes;            // one per hidden layer

  std::size_t n_layers() const { return weights.size(); }
  std::size_t input_width() const { return weights.empty() ? 0 : weights.front().cols(); }
  std::size_t parameter_count() const;

  static Autoencoder initialize(const AutoencoderSpec& spec, std::mt19937_64& rng);
  static Autoencoder zeros(const AutoencoderSpec& spec);
};

// Activations retained for the backward pass; one column per sample.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
  std::vector<Eigen::MatrixXd> post;  // post[0] = input, post[i+1] = layer i output
  const Eigen::MatrixXd& output() const { return post.back(); }
};

using Gradients = Autoencoder;

// Throws DataError naming the layer if an activation is not finite.
ForwardCache forward(const Autoencoder& net, const Eigen::MatrixXd& input);
Eigen::VectorXd forward(const Autoencoder& net, const Eigen::VectorXd& input);

// Masked mean squared error: sum over mask of (out - target)^2 divided by
// the number of masked entries.
double masked_mse(const Eigen::MatrixXd& output, const Eigen::MatrixXd& target,
                  const Eigen::MatrixXd& mask);

// Gradient of masked_mse with respect to every parameter.
Gradients backward(const Autoencoder& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& target, const Eigen::MatrixXd& mask);

class RmsProp {
 public:
  RmsProp(const Autoencoder& net, double learning_rate, double smoothing,
          double epsilon);
  void step(Autoencoder& net, const Gradients& grads);

 private:
  double lr_;
  double rho_;
  double eps_;
  Gradients sq_;
};

struct TrainResult {
  Autoencoder net;
  std::vector<double> loss_trace;  // one masked MSE per batch
  std::size_t batches_per_epoch = 0;
};

// Batches per epoch: max(1, n * m_weeks / batch_size).
std::size_t batches_per_epoch(std::size_t n_sectors, std::size_t m_weeks,
                              std::size_t batch_size);

// Trains on z-normalized data. Each batch draws `batch_size` week slices
// K[i, week j] with i and j uniform, corrupts them and takes one RMSprop
// step on the masked reconstruction loss. Batch b uses the seed
// derive_seed(seed, b); a non-finite loss throws DataError naming it.
TrainResult train_autoencoder(const core::KpiDataset& normalized,
                              const AutoencoderSpec& spec, std::uint64_t seed);

struct ImputationModel {
  AutoencoderSpec spec;
  NormalizationState norm;
  Autoencoder net;
};

// Fits normalization, trains and bundles the result.
ImputationModel fit_imputation_model(const core::KpiDataset& data,
                                     AutoencoderSpec spec, std::uint64_t seed,
                                     std::vector<double>* loss_trace = nullptr);

// Replaces missing entries by the de-normalized reconstruction of their
// carry-forward-filled week slice; observed entries are copied bit for bit
// and the mask is cleared. Sectors are processed on `threads` workers.
core::KpiDataset impute_missing(const core::KpiDataset& data,
                                const ImputationModel& model,
                                std::size_t threads = 1);

// Comparison baseline: carry-forward over each sector's full series, leading
// gaps back-filled, never-observed KPIs set to the KPI mean.
core::KpiDataset carry_forward_impute(const core::KpiDataset& data);

void save_model(const ImputationModel& model, std::ostream& out);
ImputationModel load_model(std::istream& in);
void save_model(const ImputationModel& model, const std::string& path);
ImputationModel load_model(const std::string& path);

}  // namespace hotspot::impute

#endif  // HOTSPOT_IMPUTE_H_
