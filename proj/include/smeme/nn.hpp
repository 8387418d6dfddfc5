#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smeme::nn {

enum class Activation { Tanh, Silu, Identity };
enum class TimeEmbedding { ScalarAppend, Sinusoidal };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);
TimeEmbedding time_embedding_from_string(const std::string& s);
std::string to_string(TimeEmbedding e);

/// Dense feed-forward network description. The network consumes an embedded
/// input of size `input_dim` = state dimension + time-feature dimension and
/// predicts a vector of size `output_dim`.
struct NetworkSpec {
  int input_dim = 0;
  std::vector<int> hidden_layers;
  int output_dim = 0;
  Activation activation = Activation::Tanh;
  TimeEmbedding time_embedding = TimeEmbedding::Sinusoidal;
  int frequencies = 8;  // sinusoidal frequency count k; features are 2k wide

  int time_dim() const;
  int state_dim() const { return input_dim - time_dim(); }
  /// [input_dim, hidden..., output_dim]
  std::vector<int> layer_sizes() const;

  bool operator==(const NetworkSpec&) const = default;
};

/// Convenience constructor that derives input_dim from the state dimension
/// and the chosen time embedding.
NetworkSpec make_spec(int state_dim, std::vector<int> hidden, int output_dim,
                      Activation act = Activation::Tanh,
                      TimeEmbedding emb = TimeEmbedding::Sinusoidal, int frequencies = 8);

/// Throws std::invalid_argument on inconsistent specs. Degenerate networks
/// with no hidden layer are accepted (pure linear map); config parsing is
/// stricter and requires at least one hidden layer.
void validate(const NetworkSpec& spec);

/// Flat parameter vector. Layout: for each linear layer l in order,
/// weights W_l row-major (fan_out x fan_in), then biases b_l.
using Parameters = Eigen::VectorXd;

std::size_t param_count(const NetworkSpec& spec);

/// Weights ~ N(0, 1/fan_in), biases exactly zero; deterministic in seed.
Parameters init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Embedded input for a batch: states X (state_dim x n), normalized times
/// t in [0,1] (one per column).
Eigen::MatrixXd embed(const NetworkSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::RowVectorXd>& t);

/// Per-layer activations kept for the backward pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> acts;  // acts[0] = embedded input
  std::vector<Eigen::MatrixXd> zs;    // pre-activations of hidden layers
};

Eigen::MatrixXd forward_batch(const Parameters& params, const NetworkSpec& spec,
                              const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::RowVectorXd>& t,
                              ForwardCache* cache = nullptr);

Eigen::VectorXd forward(const Parameters& params, const NetworkSpec& spec,
                        const Eigen::Ref<const Eigen::VectorXd>& x, double t);

/// Reverse pass for a batch. `cotangent` is output_dim x n. Accumulates the
/// parameter gradient (summed over columns) into grad_out when non-null and
/// writes embed-space input cotangents when non-null.
void backward_batch(const Parameters& params, const NetworkSpec& spec, const ForwardCache& cache,
                    const Eigen::Ref<const Eigen::MatrixXd>& cotangent, Parameters* grad_out,
                    Eigen::MatrixXd* input_cotangent);

/// One training example for the weighted squared-error loss.
struct LossBatch {
  Eigen::MatrixXd x;       // state_dim x n
  Eigen::RowVectorXd t;    // n
  Eigen::MatrixXd target;  // output_dim x n
  Eigen::VectorXd weight;  // n
};

/// loss = (1/n) sum_i w_i * ||f(x_i, t_i) - y_i||^2  (mean over the batch).
/// Returns (loss, d loss / d params).
std::pair<double, Parameters> grad_params(const Parameters& params, const NetworkSpec& spec,
                                          const LossBatch& batch);

/// cotangent^T * d forward / d x, restricted to the state coordinates.
Eigen::VectorXd input_vjp(const Parameters& params, const NetworkSpec& spec,
                          const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                          const Eigen::Ref<const Eigen::VectorXd>& cotangent);

/// Batched input VJP with one cotangent per column; returns state_dim x n.
Eigen::MatrixXd input_vjp_batch(const Parameters& params, const NetworkSpec& spec,
                                const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::RowVectorXd>& t,
                                const Eigen::Ref<const Eigen::MatrixXd>& cotangent);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(std::size_t n_params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                    double eps = 1e-8);

/// Standard bias-corrected Adam update; mutates params and state in place
/// (AdamState is single-owner).
void adam_step(AdamState& state, Parameters& params, const Eigen::Ref<const Eigen::VectorXd>& grad);

}  // namespace smeme::nn
