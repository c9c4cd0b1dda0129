// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Skip-gram with negative sampling, shared by node embeddings and
// paragraph vectors.
//
// For an input vector v, a positive output vector u+ and negatives u-_k:
//   loss = softplus(-v.u+) + sum_k softplus(v.u-_k)

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "andis/common.hpp"

namespace andis {

struct SgnsConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  // The rate decays linearly to learning_rate * min_rate_fraction.
  double min_rate_fraction = 1e-4;
  double unigram_power = 0.75;

  void Validate() const {
    if (dim == 0) Fail(ErrorCode::kConfig, "sgns: dim must be positive");
    if (window == 0) Fail(ErrorCode::kConfig, "sgns: window must be positive");
    if (epochs == 0) Fail(ErrorCode::kConfig, "sgns: epochs must be positive");
    if (!(learning_rate > 0)) Fail(ErrorCode::kConfig, "sgns: learning rate must be positive");
  }
};

// Loss of one (input, positive, negatives) example; optionally accumulates
// gradients with respect to each vector.
inline double SgnsLoss(std::span<const double> in, std::span<const double> pos,
                       const std::vector<std::span<const double>>& negs, std::span<double> grad_in = {},
                       std::span<double> grad_pos = {}, const std::vector<std::span<double>>& grad_negs = {}) {
  const double sp = Dot(in, pos);
  double loss = Softplus(-sp);
  const bool want = !grad_in.empty();
  if (want) {
    const double g = Sigmoid(sp) - 1.0;
    Axpy(g, pos, grad_in);
    Axpy(g, in, grad_pos);
  }
  for (std::size_t k = 0; k < negs.size(); ++k) {
    const double sn = Dot(in, negs[k]);
    loss += Softplus(sn);
    if (want) {
      const double g = Sigmoid(sn);
      Axpy(g, negs[k], grad_in);
      Axpy(g, in, grad_negs[k]);
    }
  }
  return loss;
}

// Samples ids proportionally to count^power.
class UnigramSampler {
 public:
  UnigramSampler() = default;
  UnigramSampler(const std::vector<std::uint64_t>& counts, double power) {
    cumulative_.reserve(counts.size());
    double total = 0;
    for (std::uint64_t c : counts) {
      total += c ? std::pow(static_cast<double>(c), power) : 0.0;
      cumulative_.push_back(total);
    }
    if (total <= 0) Fail(ErrorCode::kInvalidArgument, "unigram sampler over an empty vocabulary");
  }

  std::size_t Sample(Rng& rng) const {
    const double x = rng.Uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

// Input and output embedding tables with in-place SGD updates.
class SgnsTables {
 public:
  SgnsTables() = default;

  // Inputs start uniform in (-0.5/dim, 0.5/dim); outputs start at zero.
  SgnsTables(std::size_t inputs, std::size_t outputs, std::size_t dim, Rng& rng)
      : dim_(dim), in_(inputs * dim), out_(outputs * dim, 0.0), grad_(dim) {
    for (double& x : in_) x = (rng.Uniform() - 0.5) / static_cast<double>(dim);
  }

  static SgnsTables FromData(std::size_t dim, std::vector<double> inputs, std::vector<double> outputs) {
    if (dim == 0 || inputs.size() % dim || outputs.size() % dim) {
      Fail(ErrorCode::kShapeMismatch, "embedding tables are not a multiple of the dimension");
    }
    SgnsTables t;
    t.dim_ = dim;
    t.in_ = std::move(inputs);
    t.out_ = std::move(outputs);
    t.grad_.assign(dim, 0.0);
    return t;
  }

  std::size_t dim() const { return dim_; }
  std::size_t num_inputs() const { return dim_ ? in_.size() / dim_ : 0; }
  std::size_t num_outputs() const { return dim_ ? out_.size() / dim_ : 0; }

  std::span<double> in(std::size_t i) { return {in_.data() + i * dim_, dim_}; }
  std::span<const double> in(std::size_t i) const { return {in_.data() + i * dim_, dim_}; }
  std::span<double> out(std::size_t i) { return {out_.data() + i * dim_, dim_}; }
  std::span<const double> out(std::size_t i) const { return {out_.data() + i * dim_, dim_}; }
  const std::vector<double>& inputs() const { return in_; }
  const std::vector<double>& outputs() const { return out_; }

  // One SGD step on (input row, positive output row) with negatives drawn
  // from `sampler`; negatives equal to the positive are skipped. Returns the
  // example loss before the update.
  double Step(std::size_t input, std::size_t target, const UnigramSampler& sampler,
              std::size_t negatives, double lr, Rng& rng) {
    std::span<double> v = in(input);
    std::fill(grad_.begin(), grad_.end(), 0.0);
    double loss = 0;
    auto update = [&](std::size_t row, double label) {
      std::span<double> u = out(row);
      const double s = Dot(v, u);
      loss += label > 0 ? Softplus(-s) : Softplus(s);
      const double g = (Sigmoid(s) - label) * lr;
      Axpy(g, u, grad_);
      Axpy(-g, v, u);
    };
    update(target, 1.0);
    for (std::size_t k = 0; k < negatives; ++k) {
      const std::size_t neg = sampler.Sample(rng);
      if (neg == target) continue;
      update(neg, 0.0);
    }
    Axpy(-1.0, grad_, v);
    return loss;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> in_;
  std::vector<double> out_;
  std::vector<double> grad_;
};

// Linearly decaying rate after `done` of `total` steps.
inline double DecayedRate(const SgnsConfig& c, std::uint64_t done, std::uint64_t total) {
  const double frac = total ? 1.0 - static_cast<double>(done) / static_cast<double>(total) : 1.0;
  return c.learning_rate * std::max(c.min_rate_fraction, frac);
}

struct SgnsReport {
  std::vector<double> epoch_loss;  // mean example loss per epoch
  std::uint64_t examples = 0;
};

// Skip-gram over id sequences: each position predicts the ids within
// `window` positions on either side. Ids index both tables.
inline SgnsReport TrainSkipGramSequences(SgnsTables& tables, const std::vector<std::vector<std::size_t>>& seqs,
                                         const SgnsConfig& config, Rng& rng) {
  config.Validate();
  std::vector<std::uint64_t> counts(tables.num_outputs(), 0);
  std::uint64_t tokens = 0;
  for (const auto& s : seqs) {
    for (std::size_t id : s) {
      if (id >= counts.size()) Fail(ErrorCode::kInvalidArgument, "sequence id out of range");
      ++counts[id];
    }
    tokens += s.size();
  }
  if (tokens == 0) Fail(ErrorCode::kInvalidArgument, "skip-gram over an empty corpus");
  UnigramSampler sampler(counts, config.unigram_power);
  SgnsReport report;
  const std::uint64_t total = tokens * config.epochs;
  std::uint64_t done = 0;
  for (std::size_t e = 0; e < config.epochs; ++e) {
    double sum = 0;
    std::uint64_t n = 0;
    for (const auto& s : seqs) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double lr = DecayedRate(config, done++, total);
        const std::size_t lo = i > config.window ? i - config.window : 0;
        const std::size_t hi = std::min(s.size(), i + config.window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
          if (j == i) continue;
          sum += tables.Step(s[i], s[j], sampler, config.negatives, lr, rng);
          ++n;
        }
      }
    }
    report.epoch_loss.push_back(n ? sum / static_cast<double>(n) : 0.0);
    report.examples += n;
  }
  return report;
}

}  // namespace andis
