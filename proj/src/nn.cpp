#include "smeme/nn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smeme/rng.hpp"

namespace smeme::nn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void apply_activation(Activation act, MatrixXd& z) {
  switch (act) {
    case Activation::Tanh:
      z = z.array().tanh();
      break;
    case Activation::Silu:
      z = z.array() / (1.0 + (-z.array()).exp());
      break;
    case Activation::Identity:
      break;
  }
}

// Derivative in terms of the pre-activation z and the activation value a.
MatrixXd activation_grad(Activation act, const MatrixXd& z, const MatrixXd& a) {
  switch (act) {
    case Activation::Tanh:
      return 1.0 - a.array().square();
    case Activation::Silu: {
      auto sig = 1.0 / (1.0 + (-z.array()).exp());
      return sig * (1.0 + z.array() * (1.0 - sig));
    }
    case Activation::Identity:
      return MatrixXd::Ones(z.rows(), z.cols());
  }
  return MatrixXd();
}

}  // namespace

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "silu") return Activation::Silu;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Silu: return "silu";
    case Activation::Identity: return "identity";
  }
  return "?";
}

TimeEmbedding time_embedding_from_string(const std::string& s) {
  if (s == "scalar-append") return TimeEmbedding::ScalarAppend;
  if (s == "sinusoidal") return TimeEmbedding::Sinusoidal;
  throw std::invalid_argument("unknown time embedding: " + s);
}

std::string to_string(TimeEmbedding e) {
  return e == TimeEmbedding::ScalarAppend ? "scalar-append" : "sinusoidal";
}

int NetworkSpec::time_dim() const {
  return time_embedding == TimeEmbedding::ScalarAppend ? 1 : 2 * frequencies;
}

std::vector<int> NetworkSpec::layer_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(hidden_layers.size() + 2);
  sizes.push_back(input_dim);
  for (int h : hidden_layers) sizes.push_back(h);
  sizes.push_back(output_dim);
  return sizes;
}

NetworkSpec make_spec(int state_dim, std::vector<int> hidden, int output_dim, Activation act,
                      TimeEmbedding emb, int frequencies) {
  NetworkSpec spec;
  spec.hidden_layers = std::move(hidden);
  spec.output_dim = output_dim;
  spec.activation = act;
  spec.time_embedding = emb;
  spec.frequencies = frequencies;
  spec.input_dim = state_dim + spec.time_dim();
  validate(spec);
  return spec;
}

void validate(const NetworkSpec& spec) {
  if (spec.output_dim <= 0) throw std::invalid_argument("output_dim must be positive");
  if (spec.state_dim() <= 0) throw std::invalid_argument("input_dim too small for the time embedding");
  if (spec.time_embedding == TimeEmbedding::Sinusoidal && spec.frequencies <= 0)
    throw std::invalid_argument("sinusoidal embedding needs at least one frequency");
  for (int h : spec.hidden_layers)
    if (h <= 0) throw std::invalid_argument("hidden layer sizes must be positive");
}

std::size_t param_count(const NetworkSpec& spec) {
  auto sizes = spec.layer_sizes();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
    n += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  return n;
}

Parameters init_network(const NetworkSpec& spec, std::uint64_t seed) {
  validate(spec);
  auto sizes = spec.layer_sizes();
  Parameters params = Parameters::Zero(static_cast<Index>(param_count(spec)));
  RngStream rng(seed);
  Index off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Index fan_in = sizes[l];
    Index fan_out = sizes[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Index i = 0; i < fan_out * fan_in; ++i) params[off + i] = scale * rng.normal();
    off += fan_out * fan_in;
    off += fan_out;  // biases stay zero
  }
  return params;
}

Eigen::MatrixXd embed(const NetworkSpec& spec, const Eigen::Ref<const MatrixXd>& X,
                      const Eigen::Ref<const Eigen::RowVectorXd>& t) {
  const Index d = spec.state_dim();
  const Index n = X.cols();
  if (X.rows() != d) throw std::invalid_argument("embed: state dimension mismatch");
  if (t.size() != n) throw std::invalid_argument("embed: time vector length mismatch");
  MatrixXd e(spec.input_dim, n);
  e.topRows(d) = X;
  if (spec.time_embedding == TimeEmbedding::ScalarAppend) {
    e.row(d) = t;
  } else {
    for (int j = 0; j < spec.frequencies; ++j) {
      const double freq = 2.0 * std::numbers::pi * static_cast<double>(1 << j);
      e.row(d + 2 * j) = (freq * t.array()).sin();
      e.row(d + 2 * j + 1) = (freq * t.array()).cos();
    }
  }
  return e;
}

Eigen::MatrixXd forward_batch(const Parameters& params, const NetworkSpec& spec,
                              const Eigen::Ref<const MatrixXd>& X,
                              const Eigen::Ref<const Eigen::RowVectorXd>& t, ForwardCache* cache) {
  if (static_cast<std::size_t>(params.size()) != param_count(spec))
    throw std::invalid_argument("forward: parameter count does not match the spec");
  auto sizes = spec.layer_sizes();
  const std::size_t n_layers = sizes.size() - 1;

  MatrixXd a = embed(spec, X, t);
  if (cache) {
    cache->acts.assign(1, a);
    cache->zs.clear();
  }
  Index off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Index fan_in = sizes[l];
    const Index fan_out = sizes[l + 1];
    RowMajorMap W(params.data() + off, fan_out, fan_in);
    off += fan_out * fan_in;
    Eigen::Map<const Eigen::VectorXd> b(params.data() + off, fan_out);
    off += fan_out;
    MatrixXd z = (W * a).colwise() + b;
    if (l + 1 < n_layers) {
      if (cache) cache->zs.push_back(z);
      apply_activation(spec.activation, z);
      if (cache) cache->acts.push_back(z);
    }
    a = std::move(z);
  }
  if (!a.allFinite()) throw std::runtime_error("forward: non-finite network output");
  return a;
}

Eigen::VectorXd forward(const Parameters& params, const NetworkSpec& spec,
                        const Eigen::Ref<const Eigen::VectorXd>& x, double t) {
  Eigen::RowVectorXd tv(1);
  tv[0] = t;
  return forward_batch(params, spec, x, tv, nullptr).col(0);
}

void backward_batch(const Parameters& params, const NetworkSpec& spec, const ForwardCache& cache,
                    const Eigen::Ref<const MatrixXd>& cotangent, Parameters* grad_out,
                    Eigen::MatrixXd* input_cotangent) {
  auto sizes = spec.layer_sizes();
  const std::size_t n_layers = sizes.size() - 1;
  if (cotangent.rows() != spec.output_dim)
    throw std::invalid_argument("backward: cotangent dimension mismatch");

  // Parameter offsets per layer.
  std::vector<Index> w_off(n_layers), b_off(n_layers);
  Index off = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    w_off[l] = off;
    off += static_cast<Index>(sizes[l + 1]) * sizes[l];
    b_off[l] = off;
    off += sizes[l + 1];
  }
  if (grad_out && grad_out->size() != params.size())
    grad_out->setZero(params.size());

  MatrixXd delta = cotangent;
  for (std::size_t li = n_layers; li-- > 0;) {
    const Index fan_in = sizes[li];
    const Index fan_out = sizes[li + 1];
    RowMajorMap W(params.data() + w_off[li], fan_out, fan_in);
    const MatrixXd& a_prev = cache.acts[li];
    if (grad_out) {
      RowMajorMutMap gW(grad_out->data() + w_off[li], fan_out, fan_in);
      gW.noalias() += delta * a_prev.transpose();
      Eigen::Map<Eigen::VectorXd> gb(grad_out->data() + b_off[li], fan_out);
      gb.noalias() += delta.rowwise().sum();
    }
    const bool need_upstream = li > 0 || input_cotangent != nullptr;
    if (!need_upstream) break;
    MatrixXd up = W.transpose() * delta;
    if (li > 0) {
      up.array() *= activation_grad(spec.activation, cache.zs[li - 1], cache.acts[li]).array();
      delta = std::move(up);
    } else if (input_cotangent) {
      *input_cotangent = std::move(up);
    }
  }
}

std::pair<double, Parameters> grad_params(const Parameters& params, const NetworkSpec& spec,
                                          const LossBatch& batch) {
  const Index n = batch.x.cols();
  if (n == 0) throw std::invalid_argument("grad_params: empty batch");
  if (!batch.x.allFinite() || !batch.t.allFinite() || !batch.target.allFinite() ||
      !batch.weight.allFinite())
    throw std::invalid_argument("grad_params: NaN in inputs");
  if (batch.t.size() != n || batch.target.cols() != n || batch.weight.size() != n)
    throw std::invalid_argument("grad_params: inconsistent batch shapes");

  ForwardCache cache;
  MatrixXd y = forward_batch(params, spec, batch.x, batch.t, &cache);
  MatrixXd resid = y - batch.target;
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = inv_n * (resid.array().square().colwise().sum().transpose() * batch.weight.array()).sum();
  MatrixXd cot = resid * (2.0 * inv_n * batch.weight).asDiagonal();
  Parameters grad = Parameters::Zero(params.size());
  backward_batch(params, spec, cache, cot, &grad, nullptr);
  return {loss, std::move(grad)};
}

Eigen::MatrixXd input_vjp_batch(const Parameters& params, const NetworkSpec& spec,
                                const Eigen::Ref<const MatrixXd>& X,
                                const Eigen::Ref<const Eigen::RowVectorXd>& t,
                                const Eigen::Ref<const MatrixXd>& cotangent) {
  if (cotangent.rows() != spec.output_dim || cotangent.cols() != X.cols())
    throw std::invalid_argument("input_vjp: cotangent shape mismatch");
  ForwardCache cache;
  forward_batch(params, spec, X, t, &cache);
  MatrixXd embed_cot;
  backward_batch(params, spec, cache, cotangent, nullptr, &embed_cot);
  // Time-feature coordinates carry no state dependence; drop them.
  return embed_cot.topRows(spec.state_dim());
}

Eigen::VectorXd input_vjp(const Parameters& params, const NetworkSpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                          const Eigen::Ref<const Eigen::VectorXd>& cotangent) {
  Eigen::RowVectorXd tv(1);
  tv[0] = t;
  return input_vjp_batch(params, spec, x, tv, cotangent).col(0);
}

AdamState make_adam(std::size_t n_params, double lr, double beta1, double beta2, double eps) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(static_cast<Index>(n_params));
  s.v = Eigen::VectorXd::Zero(static_cast<Index>(n_params));
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  return s;
}

void adam_step(AdamState& state, Parameters& params, const Eigen::Ref<const Eigen::VectorXd>& grad) {
  if (grad.size() != params.size() || state.m.size() != params.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v.array().matrix() + (1.0 - state.beta2) * grad.array().square().matrix();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= state.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

}  // namespace smeme::nn
