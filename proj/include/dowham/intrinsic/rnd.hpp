// Copyright 2026 The dowham Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "dowham/gridworld/world.hpp"
#include "dowham/rng.hpp"

namespace dowham::intrinsic {

struct RndConfig {
  int hidden = 128;
  int output = 64;
  double learning_rate = 1e-3;
  double reward_clip = 10.0;
  double epsilon = 1e-8;
};

/// Flattened observation: (kind, color, door) per view cell scaled to [0, 1], then carried (kind, color).
inline Eigen::VectorXd observation_features(const gridworld::Observation& obs) {
  constexpr int kCells = gridworld::Observation::kSize * gridworld::Observation::kSize;
  Eigen::VectorXd x(3 * kCells + 2);
  for (int i = 0; i < kCells; ++i) {
    const auto& v = obs.view[static_cast<std::size_t>(i)];
    x(3 * i) = static_cast<double>(v.kind) / 7.0;
    x(3 * i + 1) = static_cast<double>(v.color) / 6.0;
    x(3 * i + 2) = static_cast<double>(v.door_state) / 3.0;
  }
  x(3 * kCells) = obs.carried ? static_cast<double>(obs.carried->kind) / 7.0 : 0.0;
  x(3 * kCells + 1) = obs.carried ? static_cast<double>(obs.carried->color) / 6.0 : 0.0;
  return x;
}

inline constexpr int kObservationFeatures = 3 * 49 + 2;

/// Two-layer ReLU network: out = W2 * relu(W1 * x + b1) + b2.
struct TwoLayerNet {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  TwoLayerNet() = default;
  TwoLayerNet(int in, int hidden, int out, Rng& rng)
      : w1(hidden, in), b1(Eigen::VectorXd::Zero(hidden)), w2(out, hidden), b2(Eigen::VectorXd::Zero(out)) {
    const double s1 = 1.0 / std::sqrt(static_cast<double>(in));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (Eigen::Index c = 0; c < w1.cols(); ++c) {
      for (Eigen::Index r = 0; r < w1.rows(); ++r) w1(r, c) = s1 * rng.normal();
    }
    for (Eigen::Index c = 0; c < w2.cols(); ++c) {
      for (Eigen::Index r = 0; r < w2.rows(); ++r) w2(r, c) = s2 * rng.normal();
    }
  }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    return w2 * (w1 * x + b1).cwiseMax(0.0) + b2;
  }
};

/// Running mean / variance (Welford).
class RunningMoments {
 public:
  void push(double v) {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Random network distillation: a trainable predictor regresses a frozen
/// random target; the normalized prediction error is the novelty reward.
class RndState {
 public:
  RndState(std::uint64_t seed, RndConfig cfg = {}) : cfg_(cfg) {
    Rng target_rng(derive_seed(seed, 1));
    Rng predictor_rng(derive_seed(seed, 2));
    target_ = TwoLayerNet(kObservationFeatures, cfg.hidden, cfg.output, target_rng);
    predictor_ = TwoLayerNet(kObservationFeatures, cfg.hidden, cfg.output, predictor_rng);
  }

  /// Test hook: start the predictor as an exact copy of the target.
  void copy_target_into_predictor() { predictor_ = target_; }

  /// Mean squared error between target and predictor outputs.
  double prediction_error(const Eigen::VectorXd& x) const {
    return (target_.forward(x) - predictor_.forward(x)).squaredNorm() / static_cast<double>(cfg_.output);
  }

  /// Error for `obs`, normalized by the running std and clipped to [0, clip];
  /// then one SGD step on the predictor.
  double reward(const gridworld::Observation& obs) {
    const Eigen::VectorXd x = observation_features(obs);
    const Eigen::VectorXd target = target_.forward(x);
    const Eigen::VectorXd pre = predictor_.w1 * x + predictor_.b1;
    const Eigen::VectorXd h = pre.cwiseMax(0.0);
    const Eigen::VectorXd out = predictor_.w2 * h + predictor_.b2;
    const Eigen::VectorXd diff = out - target;
    const double error = diff.squaredNorm() / static_cast<double>(cfg_.output);

    moments_.push(error);
    const double scale = std::max(moments_.stddev(), cfg_.epsilon);
    const double r = std::clamp(error / scale, 0.0, cfg_.reward_clip);

    const Eigen::VectorXd d_out = (2.0 / static_cast<double>(cfg_.output)) * diff;
    const Eigen::VectorXd d_pre = (predictor_.w2.transpose() * d_out).cwiseProduct(
        (pre.array() > 0.0).cast<double>().matrix());
    predictor_.w2.noalias() -= cfg_.learning_rate * d_out * h.transpose();
    predictor_.b2.noalias() -= cfg_.learning_rate * d_out;
    predictor_.w1.noalias() -= cfg_.learning_rate * d_pre * x.transpose();
    predictor_.b1.noalias() -= cfg_.learning_rate * d_pre;
    return r;
  }

  const TwoLayerNet& target() const { return target_; }
  const TwoLayerNet& predictor() const { return predictor_; }
  const RunningMoments& moments() const { return moments_; }
  const RndConfig& config() const { return cfg_; }

 private:
  RndConfig cfg_;
  TwoLayerNet target_;
  TwoLayerNet predictor_;
  RunningMoments moments_;
};

inline double rnd_reward(RndState& rnd, const gridworld::Observation& obs) { return rnd.reward(obs); }

}  // namespace dowham::intrinsic
