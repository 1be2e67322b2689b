#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "urex/features.hpp"
#include "urex/random.hpp"

namespace urex {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Posterior over the c relation slots for one instance.
template <typename Scalar>
using RelationPosterior = VectorX<Scalar>;

/// EType+ parameters.
///
/// The relation classifier is a single softmax layer `q = softmax(W x + b)`
/// over a multi-hot feature vector x. The link predictor scores an entity
/// pair under relation r as `E[h]^T A_r E[t]` with one entity table shared by
/// both argument positions.
template <typename Scalar>
struct ModelParamsT {
  MatrixX<Scalar> W;               // c x feature_dim
  VectorX<Scalar> b;               // c
  MatrixX<Scalar> E;               // n_entities x d, one row per entity
  std::vector<MatrixX<Scalar>> A;  // c matrices of d x d

  Eigen::Index n_relations() const { return W.rows(); }
  Eigen::Index feature_dim() const { return W.cols(); }
  Eigen::Index n_entities() const { return E.rows(); }
  Eigen::Index dim() const { return E.cols(); }

  static ModelParamsT zeros(Eigen::Index c, Eigen::Index feature_dim, Eigen::Index n_entities,
                            Eigen::Index d) {
    ModelParamsT p;
    p.W = MatrixX<Scalar>::Zero(c, feature_dim);
    p.b = VectorX<Scalar>::Zero(c);
    p.E = MatrixX<Scalar>::Zero(n_entities, d);
    p.A.assign(static_cast<std::size_t>(c), MatrixX<Scalar>::Zero(d, d));
    return p;
  }

  /// W and b start at zero; E and A are drawn from U(-1/sqrt(d), 1/sqrt(d)).
  /// With `zero_relations` the A_r start at zero instead.
  static ModelParamsT init(Eigen::Index c, Eigen::Index feature_dim, Eigen::Index n_entities,
                           Eigen::Index d, Rng& rng, bool zero_relations = false) {
    auto p = zeros(c, feature_dim, n_entities, d);
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(d));
    auto draw = [&] { return scale * Scalar(2 * uniform01(rng) - 1); };
    for (Eigen::Index i = 0; i < p.E.rows(); ++i)
      for (Eigen::Index j = 0; j < d; ++j) p.E(i, j) = draw();
    if (!zero_relations) {
      for (auto& a : p.A)
        for (Eigen::Index i = 0; i < d; ++i)
          for (Eigen::Index j = 0; j < d; ++j) a(i, j) = draw();
    }
    return p;
  }

  bool all_finite() const {
    if (!W.allFinite() || !b.allFinite() || !E.allFinite()) return false;
    for (const auto& a : A)
      if (!a.allFinite()) return false;
    return true;
  }
};

using ModelParams = ModelParamsT<double>;

/// Gradient container mirroring ModelParamsT. Entity rows are stored sparsely
/// since a minibatch touches only a few of them.
template <typename Scalar>
struct ModelGradientsT {
  MatrixX<Scalar> W;
  VectorX<Scalar> b;
  std::map<Eigen::Index, VectorX<Scalar>> E;
  std::vector<MatrixX<Scalar>> A;

  static ModelGradientsT zeros_like(const ModelParamsT<Scalar>& p) {
    ModelGradientsT g;
    g.W = MatrixX<Scalar>::Zero(p.W.rows(), p.W.cols());
    g.b = VectorX<Scalar>::Zero(p.b.size());
    g.A.assign(p.A.size(), MatrixX<Scalar>::Zero(p.dim(), p.dim()));
    return g;
  }

  VectorX<Scalar>& entity_row(Eigen::Index id, Eigen::Index d) {
    auto [it, inserted] = E.try_emplace(id);
    if (inserted) it->second = VectorX<Scalar>::Zero(d);
    return it->second;
  }
};

using ModelGradients = ModelGradientsT<double>;

/// Per-term loss values. `total` excludes the L2 penalty, which is reported
/// separately in `l2_penalty`.
struct LossBreakdown {
  double link_nll_pos = 0.0;
  double link_nll_neg = 0.0;
  double l_s = 0.0;
  double l_d = 0.0;
  double total = 0.0;
  double l2_penalty = 0.0;
};

/// Negative entity ids for one instance: `head` replaces the head argument,
/// `tail` replaces the tail argument.
struct Negatives {
  std::vector<Eigen::Index> head;
  std::vector<Eigen::Index> tail;
};

inline constexpr double kProbFloor = 1e-12;

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

// p log p with p clamped at kProbFloor inside the log, and its derivative.
template <typename Scalar>
Scalar plogp(Scalar p) {
  using std::log;
  return p * log(p > Scalar(kProbFloor) ? p : Scalar(kProbFloor));
}

template <typename Scalar>
Scalar plogp_grad(Scalar p) {
  using std::log;
  return p > Scalar(kProbFloor) ? log(p) + Scalar(1) : log(Scalar(kProbFloor));
}

template <typename Scalar>
void check_entity(const ModelParamsT<Scalar>& p, Eigen::Index id) {
  if (id < 0 || id >= p.n_entities()) {
    throw std::out_of_range("entity id " + std::to_string(id) + " outside [0, " +
                            std::to_string(p.n_entities()) + ")");
  }
}

}  // namespace detail

template <typename Scalar>
VectorX<Scalar> softmax(const VectorX<Scalar>& logits) {
  const VectorX<Scalar> e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

/// Classifier logits `W x + b` for a multi-hot x.
template <typename Scalar>
VectorX<Scalar> classifier_logits(const ModelParamsT<Scalar>& p, const SparseFeatureVector& x) {
  if (x.dimension != p.feature_dim()) {
    throw std::invalid_argument("feature dimension " + std::to_string(x.dimension) +
                                " does not match classifier width " +
                                std::to_string(p.feature_dim()));
  }
  VectorX<Scalar> logits = p.b;
  for (int j : x.indices) logits += p.W.col(j);
  return logits;
}

template <typename Scalar>
RelationPosterior<Scalar> classifier_posterior(const ModelParamsT<Scalar>& p,
                                               const SparseFeatureVector& x) {
  return softmax<Scalar>(classifier_logits(p, x));
}

/// Posterior-weighted relation matrix `sum_r q_r A_r`.
template <typename Scalar>
MatrixX<Scalar> expected_relation(const ModelParamsT<Scalar>& p,
                                  const RelationPosterior<Scalar>& q) {
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(p.dim(), p.dim());
  for (Eigen::Index r = 0; r < q.size(); ++r) {
    if (q(r) != Scalar(0)) m += q(r) * p.A[static_cast<std::size_t>(r)];
  }
  return m;
}

/// Expected score `sum_r q_r E[h]^T A_r E[t]`.
template <typename Scalar>
Scalar link_score(const ModelParamsT<Scalar>& p, Eigen::Index head, Eigen::Index tail,
                  const RelationPosterior<Scalar>& q) {
  detail::check_entity(p, head);
  detail::check_entity(p, tail);
  if (q.size() != p.n_relations()) throw std::invalid_argument("posterior size mismatch");
  return p.E.row(head).dot(expected_relation(p, q) * p.E.row(tail).transpose());
}

/// Gradients of one instance's link loss. `E` and `A` accumulate into a
/// shared container; `posterior` receives dL/dq for this instance.
template <typename Scalar>
struct LinkGradientSink {
  ModelGradientsT<Scalar>* params = nullptr;
  VectorX<Scalar>* posterior = nullptr;
  Scalar weight = Scalar(1);
};

namespace detail {

inline void check_negatives(const Negatives& negatives, std::size_t k) {
  if (negatives.head.size() != k || negatives.tail.size() != k) {
    throw std::invalid_argument("expected " + std::to_string(k) +
                                " negatives per position, got " +
                                std::to_string(negatives.head.size()) + "/" +
                                std::to_string(negatives.tail.size()));
  }
}

}  // namespace detail

/// Link loss with the posterior expectation taken over scores:
/// s = sum_r q_r E[h]^T A_r E[t], then the sigmoid losses of `link_loss`.
template <typename Scalar>
std::pair<Scalar, Scalar> link_loss_expected_score(const ModelParamsT<Scalar>& p, Eigen::Index head,
                                    Eigen::Index tail, const RelationPosterior<Scalar>& q,
                                    const Negatives& negatives, std::size_t k,
                                    const LinkGradientSink<Scalar>& sink = {}) {
  detail::check_negatives(negatives, k);
  detail::check_entity(p, head);
  detail::check_entity(p, tail);
  for (auto id : negatives.head) detail::check_entity(p, id);
  for (auto id : negatives.tail) detail::check_entity(p, id);
  if (q.size() != p.n_relations()) throw std::invalid_argument("posterior size mismatch");

  const auto d = p.dim();
  const MatrixX<Scalar> m = expected_relation(p, q);
  const VectorX<Scalar> u_h = p.E.row(head).transpose();
  const VectorX<Scalar> u_t = p.E.row(tail).transpose();
  const VectorX<Scalar> m_ut = m * u_t;               // scores x^T M u_t
  const VectorX<Scalar> mt_uh = m.transpose() * u_h;  // scores u_h^T M y

  // The positive pair is scored once and counted for both positions.
  const Scalar pos_score = u_h.dot(m_ut);
  const Scalar pos_loss = Scalar(2) * detail::softplus(-pos_score);
  Scalar neg_loss = Scalar(0);

  const bool want_grad = sink.params != nullptr || sink.posterior != nullptr;
  // Weighted sums of the varying argument within each group:
  //   group 1 pairs (x, u_t): x in {u_h} + head negatives
  //   group 2 pairs (u_h, y): y in tail negatives
  VectorX<Scalar> x_sum;
  VectorX<Scalar> y_sum;
  std::vector<Scalar> g_head(k);
  std::vector<Scalar> g_tail(k);
  const Scalar g_pos = Scalar(-2) * detail::sigmoid(-pos_score);
  if (want_grad) {
    x_sum = g_pos * u_h;
    y_sum = VectorX<Scalar>::Zero(d);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const Scalar s = p.E.row(negatives.head[j]).dot(m_ut);
    neg_loss += detail::softplus(s);
    if (want_grad) {
      g_head[j] = detail::sigmoid(s);
      x_sum += g_head[j] * p.E.row(negatives.head[j]).transpose();
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    const Scalar s = mt_uh.dot(p.E.row(negatives.tail[j]));
    neg_loss += detail::softplus(s);
    if (want_grad) {
      g_tail[j] = detail::sigmoid(s);
      y_sum += g_tail[j] * p.E.row(negatives.tail[j]).transpose();
    }
  }
  if (!want_grad) return {pos_loss, neg_loss};

  const Scalar w = sink.weight;
  // d(loss)/dM = x_sum u_t^T + u_h y_sum^T; the score for relation r is
  // <A_r, dM> and dA_r = q_r dM.
  if (sink.posterior != nullptr) {
    auto& dq = *sink.posterior;
    dq.resize(q.size());
    for (Eigen::Index r = 0; r < q.size(); ++r) {
      const auto& a = p.A[static_cast<std::size_t>(r)];
      dq(r) = w * (x_sum.dot(a * u_t) + u_h.dot(a * y_sum));
    }
  }
  if (sink.params != nullptr) {
    auto& g = *sink.params;
    const MatrixX<Scalar> dm = x_sum * u_t.transpose() + u_h * y_sum.transpose();
    for (Eigen::Index r = 0; r < q.size(); ++r) {
      if (q(r) != Scalar(0)) g.A[static_cast<std::size_t>(r)] += (w * q(r)) * dm;
    }
    g.entity_row(head, d) += w * (g_pos * m_ut + m * y_sum);
    g.entity_row(tail, d) += w * (m.transpose() * x_sum);
    for (std::size_t j = 0; j < k; ++j) {
      g.entity_row(negatives.head[j], d) += (w * g_head[j]) * m_ut;
      g.entity_row(negatives.tail[j], d) += (w * g_tail[j]) * mt_uh;
    }
  }
  return {pos_loss, neg_loss};
}

/// Link loss with the posterior expectation taken over per-relation losses:
/// sum_r q_r loss_r, where loss_r scores every pair with A_r alone.
template <typename Scalar>
std::pair<Scalar, Scalar> link_loss_expected_loss(const ModelParamsT<Scalar>& p, Eigen::Index head,
                                                  Eigen::Index tail, const RelationPosterior<Scalar>& q,
                                                  const Negatives& negatives, std::size_t k,
                                                  const LinkGradientSink<Scalar>& sink = {}) {
  detail::check_negatives(negatives, k);
  detail::check_entity(p, head);
  detail::check_entity(p, tail);
  for (auto id : negatives.head) detail::check_entity(p, id);
  for (auto id : negatives.tail) detail::check_entity(p, id);
  if (q.size() != p.n_relations()) throw std::invalid_argument("posterior size mismatch");

  const auto d = p.dim();
  const VectorX<Scalar> u_h = p.E.row(head).transpose();
  const VectorX<Scalar> u_t = p.E.row(tail).transpose();
  const bool want_params = sink.params != nullptr;
  if (sink.posterior != nullptr) sink.posterior->setZero(q.size());

  VectorX<Scalar> du_h;
  VectorX<Scalar> du_t;
  std::vector<VectorX<Scalar>> du_nh;
  std::vector<VectorX<Scalar>> du_nt;
  if (want_params) {
    du_h = VectorX<Scalar>::Zero(d);
    du_t = VectorX<Scalar>::Zero(d);
    du_nh.assign(k, VectorX<Scalar>::Zero(d));
    du_nt.assign(k, VectorX<Scalar>::Zero(d));
  }
  std::vector<Scalar> g_head(k);
  std::vector<Scalar> g_tail(k);
  Scalar pos_total = Scalar(0);
  Scalar neg_total = Scalar(0);

  for (Eigen::Index r = 0; r < q.size(); ++r) {
    const Scalar qr = q(r);
    if (qr == Scalar(0) && sink.posterior == nullptr) continue;
    const auto& a = p.A[static_cast<std::size_t>(r)];
    const VectorX<Scalar> a_ut = a * u_t;
    const VectorX<Scalar> at_uh = a.transpose() * u_h;

    const Scalar pos_score = u_h.dot(a_ut);
    const Scalar pos_loss = Scalar(2) * detail::softplus(-pos_score);
    const Scalar g_pos = Scalar(-2) * detail::sigmoid(-pos_score);
    Scalar neg_loss = Scalar(0);
    VectorX<Scalar> x_sum = g_pos * u_h;
    VectorX<Scalar> y_sum = VectorX<Scalar>::Zero(d);
    for (std::size_t j = 0; j < k; ++j) {
      const Scalar s = p.E.row(negatives.head[j]).dot(a_ut);
      neg_loss += detail::softplus(s);
      g_head[j] = detail::sigmoid(s);
      x_sum += g_head[j] * p.E.row(negatives.head[j]).transpose();
    }
    for (std::size_t j = 0; j < k; ++j) {
      const Scalar s = at_uh.dot(p.E.row(negatives.tail[j]));
      neg_loss += detail::softplus(s);
      g_tail[j] = detail::sigmoid(s);
      y_sum += g_tail[j] * p.E.row(negatives.tail[j]).transpose();
    }
    pos_total += qr * pos_loss;
    neg_total += qr * neg_loss;
    if (sink.posterior != nullptr) (*sink.posterior)(r) = sink.weight * (pos_loss + neg_loss);
    if (want_params && qr != Scalar(0)) {
      const Scalar wq = sink.weight * qr;
      sink.params->A[static_cast<std::size_t>(r)] +=
          wq * (x_sum * u_t.transpose() + u_h * y_sum.transpose());
      du_h += wq * (g_pos * a_ut + a * y_sum);
      du_t += wq * (a.transpose() * x_sum);
      for (std::size_t j = 0; j < k; ++j) {
        du_nh[j] += (wq * g_head[j]) * a_ut;
        du_nt[j] += (wq * g_tail[j]) * at_uh;
      }
    }
  }
  if (want_params) {
    auto& g = *sink.params;
    g.entity_row(head, d) += du_h;
    g.entity_row(tail, d) += du_t;
    for (std::size_t j = 0; j < k; ++j) {
      g.entity_row(negatives.head[j], d) += du_nh[j];
      g.entity_row(negatives.tail[j], d) += du_nt[j];
    }
  }
  return {pos_total, neg_total};
}

/// How the relation posterior enters the link predictor.
enum class PosteriorCoupling {
  /// loss of the posterior-averaged score sum_r q_r psi_r (default).
  ExpectedScore,
  /// sum_r q_r loss_r: the reconstruction term of a discrete-state
  /// autoencoder; linear in q and so favours confident posteriors.
  ExpectedLoss,
};

/// Negative-sampling link loss for one instance, summed over both argument
/// positions:
///
///   sum_{i in {head, tail}}  -log sig(s(e_i, e_-i)) - sum_k log sig(-s(n_k, e_-i))
///
/// where the k-th negative replaces position i. Returns {positive, negative}
/// terms; gradients (scaled by `sink.weight`) are accumulated when requested,
/// including dL/dq so the classifier trains through the link predictor.
template <typename Scalar>
std::pair<Scalar, Scalar> link_loss(const ModelParamsT<Scalar>& p, Eigen::Index head,
                                    Eigen::Index tail, const RelationPosterior<Scalar>& q,
                                    const Negatives& negatives, std::size_t k,
                                    PosteriorCoupling coupling,
                                    const LinkGradientSink<Scalar>& sink = {}) {
  if (coupling == PosteriorCoupling::ExpectedLoss) {
    return link_loss_expected_loss(p, head, tail, q, negatives, k, sink);
  }
  return link_loss_expected_score(p, head, tail, q, negatives, k, sink);
}

/// Mean posterior entropy over the batch (natural log). Columns of `q` are
/// posteriors. `grad`, when given, receives dL/dq with the same shape.
template <typename Scalar>
Scalar skewness_loss(const MatrixX<Scalar>& q, MatrixX<Scalar>* grad = nullptr) {
  if (q.cols() == 0) throw std::invalid_argument("skewness_loss on an empty batch");
  const Scalar inv_b = Scalar(1) / Scalar(q.cols());
  Scalar h = Scalar(0);
  if (grad) grad->resize(q.rows(), q.cols());
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      h -= detail::plogp(q(r, j));
      if (grad) (*grad)(r, j) = -inv_b * detail::plogp_grad(q(r, j));
    }
  }
  return h * inv_b;
}

/// KL(mean posterior || uniform) = ln c - H(mean posterior).
template <typename Scalar>
Scalar dispersion_loss(const MatrixX<Scalar>& q, MatrixX<Scalar>* grad = nullptr) {
  using std::log;
  if (q.cols() == 0) throw std::invalid_argument("dispersion_loss on an empty batch");
  const Scalar inv_b = Scalar(1) / Scalar(q.cols());
  const VectorX<Scalar> mean = q.rowwise().sum() * inv_b;
  Scalar neg_h = Scalar(0);
  for (Eigen::Index r = 0; r < mean.size(); ++r) neg_h += detail::plogp(mean(r));
  if (grad) {
    VectorX<Scalar> g(mean.size());
    for (Eigen::Index r = 0; r < mean.size(); ++r) g(r) = inv_b * detail::plogp_grad(mean(r));
    *grad = g.replicate(1, q.cols());
  }
  return log(Scalar(q.rows())) + neg_h;
}

/// One training example: classifier input, the entity pair, and its negatives.
struct BatchItem {
  const SparseFeatureVector* features = nullptr;
  Eigen::Index head = 0;
  Eigen::Index tail = 0;
  Negatives negatives;
};

struct ObjectiveWeights {
  double alpha = 0.0;  // skewness coefficient
  double beta = 0.0;   // dispersion coefficient
  double l2 = 0.0;
  std::size_t k = 0;   // negatives per position
  PosteriorCoupling coupling = PosteriorCoupling::ExpectedScore;
};

template <typename Scalar>
Scalar l2_norm_sq_rows(const MatrixX<Scalar>& e, const std::map<Eigen::Index, VectorX<Scalar>>& rows) {
  Scalar s = Scalar(0);
  for (const auto& [id, _] : rows) s += e.row(id).squaredNorm();
  return s;
}

/// Minibatch objective of EType+:
///
///   mean_x link_loss(x) + alpha L_s + beta L_d
///   + l2 (|W|^2 + |b|^2 + sum_r |A_r|^2 + sum over batch entity rows |E_e|^2)
///
/// Gradients w.r.t. every parameter block are written to `grad` when given,
/// with the classifier trained through the posterior pathway.
template <typename Scalar>
LossBreakdown batch_objective(const ModelParamsT<Scalar>& p, std::span<const BatchItem> batch,
                              const ObjectiveWeights& weights,
                              ModelGradientsT<Scalar>* grad = nullptr) {
  if (batch.empty()) throw std::invalid_argument("empty minibatch");
  const auto c = p.n_relations();
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Scalar inv_b = Scalar(1) / Scalar(n);

  MatrixX<Scalar> q(c, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    q.col(j) = classifier_posterior(p, *batch[static_cast<std::size_t>(j)].features);
  }

  if (grad) *grad = ModelGradientsT<Scalar>::zeros_like(p);
  MatrixX<Scalar> dq = MatrixX<Scalar>::Zero(c, n);
  Scalar pos = Scalar(0);
  Scalar neg = Scalar(0);
  VectorX<Scalar> dq_x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& item = batch[static_cast<std::size_t>(j)];
    LinkGradientSink<Scalar> sink;
    if (grad) sink = {grad, &dq_x, inv_b};
    const auto [lp, ln] = link_loss<Scalar>(p, item.head, item.tail, q.col(j), item.negatives,
                                            weights.k, weights.coupling, sink);
    pos += lp;
    neg += ln;
    if (grad) dq.col(j) = dq_x;
  }

  MatrixX<Scalar> ds;
  MatrixX<Scalar> dd;
  const Scalar ls = skewness_loss<Scalar>(q, grad ? &ds : nullptr);
  const Scalar ld = dispersion_loss<Scalar>(q, grad ? &dd : nullptr);

  LossBreakdown out;
  out.link_nll_pos = static_cast<double>(pos * inv_b);
  out.link_nll_neg = static_cast<double>(neg * inv_b);
  out.l_s = static_cast<double>(ls);
  out.l_d = static_cast<double>(ld);
  out.total = out.link_nll_pos + out.link_nll_neg + weights.alpha * out.l_s + weights.beta * out.l_d;

  const Scalar l2 = Scalar(weights.l2);
  if (weights.l2 != 0.0) {
    // Entity rows touched by the batch; the map keys are the support of dE.
    std::map<Eigen::Index, VectorX<Scalar>> touched;
    for (const auto& item : batch) {
      touched.try_emplace(item.head);
      touched.try_emplace(item.tail);
      for (auto id : item.negatives.head) touched.try_emplace(id);
      for (auto id : item.negatives.tail) touched.try_emplace(id);
    }
    Scalar norm = p.W.squaredNorm() + p.b.squaredNorm() + l2_norm_sq_rows(p.E, touched);
    for (const auto& a : p.A) norm += a.squaredNorm();
    out.l2_penalty = static_cast<double>(l2 * norm);
    if (grad) {
      grad->W += Scalar(2) * l2 * p.W;
      grad->b += Scalar(2) * l2 * p.b;
      for (std::size_t r = 0; r < p.A.size(); ++r) grad->A[r] += Scalar(2) * l2 * p.A[r];
      for (const auto& [id, _] : touched) {
        grad->entity_row(id, p.dim()) += Scalar(2) * l2 * p.E.row(id).transpose();
      }
    }
  }

  if (grad) {
    const MatrixX<Scalar> total_dq = dq + Scalar(weights.alpha) * ds + Scalar(weights.beta) * dd;
    for (Eigen::Index j = 0; j < n; ++j) {
      // Softmax Jacobian-vector product.
      const VectorX<Scalar> qj = q.col(j);
      const Scalar centre = qj.dot(total_dq.col(j));
      const VectorX<Scalar> dz = (qj.array() * (total_dq.col(j).array() - centre)).matrix();
      grad->b += dz;
      for (int f : batch[static_cast<std::size_t>(j)].features->indices) grad->W.col(f) += dz;
    }
  }
  return out;
}

/// Objective with a fixed posterior per instance; only E and A are trained.
/// The L2 term covers the relation matrices and the batch entity rows.
template <typename Scalar>
LossBreakdown fixed_posterior_objective(const ModelParamsT<Scalar>& p,
                                        std::span<const BatchItem> batch,
                                        std::span<const RelationPosterior<Scalar>> posteriors,
                                        const ObjectiveWeights& weights,
                                        ModelGradientsT<Scalar>* grad = nullptr) {
  if (batch.empty()) throw std::invalid_argument("empty minibatch");
  if (posteriors.size() != batch.size()) throw std::invalid_argument("posterior count mismatch");
  const Scalar inv_b = Scalar(1) / Scalar(batch.size());
  if (grad) *grad = ModelGradientsT<Scalar>::zeros_like(p);
  Scalar pos = Scalar(0);
  Scalar neg = Scalar(0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    LinkGradientSink<Scalar> sink;
    if (grad) sink = {grad, nullptr, inv_b};
    const auto [lp, ln] = link_loss<Scalar>(p, batch[j].head, batch[j].tail, posteriors[j],
                                            batch[j].negatives, weights.k, weights.coupling, sink);
    pos += lp;
    neg += ln;
  }
  LossBreakdown out;
  out.link_nll_pos = static_cast<double>(pos * inv_b);
  out.link_nll_neg = static_cast<double>(neg * inv_b);
  out.total = out.link_nll_pos + out.link_nll_neg;
  if (weights.l2 != 0.0) {
    const Scalar l2 = Scalar(weights.l2);
    std::map<Eigen::Index, VectorX<Scalar>> touched;
    for (const auto& item : batch) {
      touched.try_emplace(item.head);
      touched.try_emplace(item.tail);
      for (auto id : item.negatives.head) touched.try_emplace(id);
      for (auto id : item.negatives.tail) touched.try_emplace(id);
    }
    Scalar norm = l2_norm_sq_rows(p.E, touched);
    for (const auto& a : p.A) norm += a.squaredNorm();
    out.l2_penalty = static_cast<double>(l2 * norm);
    if (grad) {
      for (std::size_t r = 0; r < p.A.size(); ++r) grad->A[r] += Scalar(2) * l2 * p.A[r];
      for (const auto& [id, _] : touched) {
        grad->entity_row(id, p.dim()) += Scalar(2) * l2 * p.E.row(id).transpose();
      }
    }
  }
  return out;
}

/// Index of the largest posterior entry; ties go to the lowest index.
template <typename Scalar>
Eigen::Index argmax_relation(const RelationPosterior<Scalar>& q) {
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < q.size(); ++r) {
    if (q(r) > q(best)) best = r;
  }
  return best;
}

}  // namespace urex
