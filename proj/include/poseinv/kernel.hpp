#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "poseinv/invariants.hpp"

namespace poseinv {

/// A finite set of pose points carrying per-node features and a strictly
/// positive node weight (the discrete measure of the convolution).
struct PoseGraph {
    std::vector<PosePoint> nodes;
    Eigen::MatrixXd features;  // node_count x channels
    Eigen::VectorXd weights;   // node_count, all > 0

    PoseGraph(std::vector<PosePoint> nodes_in, Eigen::MatrixXd features_in,
              Eigen::VectorXd weights_in);

    int node_count() const { return static_cast<int>(nodes.size()); }
    int channels() const { return static_cast<int>(features.cols()); }
};

/// Kernel parametrization: a feedforward network over an invariant feature
/// vector, with a stored affine input standardization. Hidden layers use the
/// smooth ramp x * sigmoid(x); the output layer is linear and is reshaped to
/// a c_out x c_in matrix.
struct MlpKernel {
    std::vector<int> layer_sizes;  // [input, hidden..., c_out * c_in]
    int c_out = 1;
    int c_in = 1;
    std::string activation = "silu";

    std::vector<Eigen::MatrixXd> weights;  // weights[l]: layer_sizes[l+1] x layer_sizes[l]
    std::vector<Eigen::VectorXd> biases;   // biases[l]: layer_sizes[l+1]

    Eigen::VectorXd input_shift;  // subtracted from raw inputs
    Eigen::VectorXd input_scale;  // divides shifted inputs, entries > 0

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }

    /// Uniform Glorot initialization, zero biases, identity standardization.
    static MlpKernel random_init(int input_dim, const std::vector<int>& hidden, int c_out,
                                 int c_in, std::uint64_t seed);

    void validate() const;
};

/// Intermediate layer values of a batched forward pass, kept for backprop.
struct MlpForwardCache {
    Eigen::MatrixXd input;                    // standardized, rows = samples
    std::vector<Eigen::MatrixXd> pre;         // pre-activation per layer
    std::vector<Eigen::MatrixXd> post;        // post-activation per layer
};

/// Batched evaluation: each row of `raw` is one un-standardized invariant
/// vector; the result has one row of output_dim values per input row.
Eigen::MatrixXd mlp_forward(const MlpKernel& k, const Eigen::MatrixXd& raw,
                            MlpForwardCache* cache = nullptr);

/// Single-sample evaluation reshaped to the kernel matrix (c_out x c_in).
Eigen::MatrixXd mlp_eval(const MlpKernel& k, const Eigen::VectorXd& invariants);

struct MlpGradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static MlpGradients zeros_like(const MlpKernel& k);
    void accumulate(const MlpGradients& other);
    void scale(double s);
};

/// Vector-Jacobian product: given d(loss)/d(output) per row, accumulates
/// d(loss)/d(parameters) into grads.
void mlp_backward(const MlpKernel& k, const MlpForwardCache& cache,
                  const Eigen::MatrixXd& upstream, MlpGradients& grads);

/// All ordered node pairs (i, j) in lexicographic order, one row of raw
/// invariant features each (row index i * N + j).
Eigen::MatrixXd pair_invariant_matrix(const PoseGraph& graph, InvariantCollection collection);

/// Discrete equivariant convolution:
///   out(i, a) = sum_j sum_b K(i, j)[a, b] * f(j, b) * w(j)
/// with K the kernel evaluated on the invariants of (node_i, node_j) and the
/// sum over j running in node order. Nodes and weights pass through.
PoseGraph convolve(const PoseGraph& graph, const MlpKernel& k, InvariantCollection collection);

/// Run configuration for training and the expressivity experiment.
struct ExperimentConfig {
    std::uint64_t seed = 7;
    int graph_count = 200;
    int node_count = 8;
    double witness_fraction = 0.2;   // share of each graph's nodes planted as witnesses
    std::vector<int> hidden = {64, 64};
    double learning_rate = 0.05;
    double momentum = 0.9;
    int epochs = 2000;
    double train_fraction = 0.8;
    double box_half = 5.0;
    InvariantCollection collection = InvariantCollection::universal;

    enum class Target { separation, self_distill };
    Target target = Target::separation;

    void validate() const;
};

struct TrainExample {
    PoseGraph graph;
    Eigen::MatrixXd targets;  // node_count x c_out
};

struct TrainResult {
    MlpKernel kernel;
    std::vector<double> loss_history;  // epochs + 1 entries; [0] is the initial loss
};

/// Mean and standard deviation of each invariant over all ordered node pairs
/// of the dataset (std floored at 1 where the column is constant).
std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_input_standardization(
    const std::vector<TrainExample>& data, InvariantCollection collection);

/// Full-batch gradient descent (fixed learning rate, classical momentum) on
/// the mean squared error of per-node convolution outputs against targets.
/// Input standardization is fitted on `data` and stored in the kernel.
/// Throws NonFiniteLoss if the loss leaves the finite range.
TrainResult train_kernel(const ExperimentConfig& cfg, const std::vector<TrainExample>& data);

/// Mean squared error of the kernel's convolution outputs over a dataset.
double dataset_mse(const MlpKernel& k, const std::vector<TrainExample>& data,
                   InvariantCollection collection);

/// Flat text model format: one header line (sizes, activation, output shape),
/// then the standardization and parameters one value per line, 17 significant
/// digits. Round-trips doubles exactly.
void save_kernel(const MlpKernel& k, std::ostream& out);
void save_kernel_file(const MlpKernel& k, const std::string& path);
MlpKernel load_kernel(std::istream& in);
MlpKernel load_kernel_file(const std::string& path);

}  // namespace poseinv
