#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "urex/model.hpp"

namespace urex {

enum class OptimizerKind { Adam, AdaGrad };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);
std::string_view coupling_name(PosteriorCoupling coupling);
PosteriorCoupling parse_coupling(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam / AdaGrad over ModelParamsT. Entity rows are updated lazily: only the
/// rows present in the gradient move, and their moment estimates are only
/// advanced on those steps.
template <typename Scalar>
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, const ModelParamsT<Scalar>& params) : config_(config) {
    auto zeros = ModelParamsT<Scalar>::zeros(params.n_relations(), params.feature_dim(),
                                             params.n_entities(), params.dim());
    first_ = zeros;
    second_ = std::move(zeros);
  }

  double learning_rate() const { return config_.learning_rate; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

  /// Applies one step. With `update_classifier` false, W and b stay fixed.
  void step(ModelParamsT<Scalar>& p, const ModelGradientsT<Scalar>& g, bool update_classifier = true) {
    ++t_;
    if (update_classifier) {
      apply(p.W, g.W, first_.W, second_.W);
      apply(p.b, g.b, first_.b, second_.b);
    }
    for (std::size_t r = 0; r < p.A.size(); ++r) apply(p.A[r], g.A[r], first_.A[r], second_.A[r]);
    for (const auto& [id, grow] : g.E) {
      auto row = p.E.row(id);
      auto m = first_.E.row(id);
      auto v = second_.E.row(id);
      apply(row, grow.transpose(), m, v);
    }
  }

 private:
  template <typename P, typename G, typename M, typename V>
  void apply(P&& param, const G& grad, M&& m, V&& v) {
    const Scalar lr = Scalar(config_.learning_rate);
    const Scalar eps = Scalar(config_.epsilon);
    if (config_.kind == OptimizerKind::AdaGrad) {
      v.array() += grad.array().square();
      param.array() -= lr * grad.array() / (v.array().sqrt() + eps);
      return;
    }
    const Scalar b1 = Scalar(config_.beta1);
    const Scalar b2 = Scalar(config_.beta2);
    m = b1 * m + (Scalar(1) - b1) * grad;
    v.array() = b2 * v.array() + (Scalar(1) - b2) * grad.array().square();
    const Scalar c1 = Scalar(1) - std::pow(b1, Scalar(t_));
    const Scalar c2 = Scalar(1) - std::pow(b2, Scalar(t_));
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }

  OptimizerConfig config_;
  ModelParamsT<Scalar> first_;
  ModelParamsT<Scalar> second_;
  long long t_ = 0;
};

}  // namespace urex
