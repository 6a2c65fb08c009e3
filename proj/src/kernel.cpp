#include "poseinv/kernel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "poseinv/errors.hpp"
#include "poseinv/format.hpp"
#include "poseinv/random.hpp"

namespace poseinv {

namespace {

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_grad(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

}  // namespace

PoseGraph::PoseGraph(std::vector<PosePoint> nodes_in, Eigen::MatrixXd features_in,
                     Eigen::VectorXd weights_in)
    : nodes(std::move(nodes_in)), features(std::move(features_in)), weights(std::move(weights_in)) {
    const auto n = static_cast<Eigen::Index>(nodes.size());
    if (features.rows() != n)
        throw std::invalid_argument("PoseGraph: feature rows != node count");
    if (weights.size() != n)
        throw std::invalid_argument("PoseGraph: weight count != node count");
    if (features.size() > 0 && !features.allFinite())
        throw std::invalid_argument("PoseGraph: non-finite feature");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(weights(i) > 0.0) || !std::isfinite(weights(i)))
            throw std::invalid_argument("PoseGraph: weights must be strictly positive");
}

MlpKernel MlpKernel::random_init(int input_dim, const std::vector<int>& hidden, int c_out,
                                 int c_in, std::uint64_t seed) {
    MlpKernel k;
    k.c_out = c_out;
    k.c_in = c_in;
    k.layer_sizes.push_back(input_dim);
    for (int h : hidden) k.layer_sizes.push_back(h);
    k.layer_sizes.push_back(c_out * c_in);

    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < k.layer_sizes.size(); ++l) {
        const int fan_in = k.layer_sizes[l];
        const int fan_out = k.layer_sizes[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i)
            for (int j = 0; j < fan_in; ++j) w(i, j) = rng.uniform(-bound, bound);
        k.weights.push_back(std::move(w));
        k.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }

    k.input_shift = Eigen::VectorXd::Zero(input_dim);
    k.input_scale = Eigen::VectorXd::Ones(input_dim);
    k.validate();
    return k;
}

void MlpKernel::validate() const {
    if (layer_sizes.size() < 2) throw std::invalid_argument("MlpKernel: need at least two layer sizes");
    for (int s : layer_sizes)
        if (s <= 0) throw std::invalid_argument("MlpKernel: non-positive layer size");
    if (c_out <= 0 || c_in <= 0) throw std::invalid_argument("MlpKernel: non-positive channel count");
    if (c_out * c_in != layer_sizes.back())
        throw std::invalid_argument("MlpKernel: output layer size != c_out * c_in");
    if (weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size())
        throw std::invalid_argument("MlpKernel: parameter count mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l])
            throw std::invalid_argument("MlpKernel: weight shape mismatch at layer " + std::to_string(l));
        if (biases[l].size() != layer_sizes[l + 1])
            throw std::invalid_argument("MlpKernel: bias shape mismatch at layer " + std::to_string(l));
        if (!weights[l].allFinite() || !biases[l].allFinite())
            throw std::invalid_argument("MlpKernel: non-finite parameter at layer " + std::to_string(l));
    }
    if (input_shift.size() != layer_sizes.front() || input_scale.size() != layer_sizes.front())
        throw std::invalid_argument("MlpKernel: standardization size mismatch");
    for (Eigen::Index i = 0; i < input_scale.size(); ++i)
        if (!(input_scale(i) > 0.0)) throw std::invalid_argument("MlpKernel: non-positive input scale");
    if (activation != "silu") throw std::invalid_argument("MlpKernel: unknown activation " + activation);
}

Eigen::MatrixXd mlp_forward(const MlpKernel& k, const Eigen::MatrixXd& raw,
                            MlpForwardCache* cache) {
    if (raw.cols() != k.input_dim())
        throw std::invalid_argument("mlp_forward: input width " + std::to_string(raw.cols()) +
                                    " != kernel input dim " + std::to_string(k.input_dim()));

    Eigen::MatrixXd a =
        (raw.rowwise() - k.input_shift.transpose()).array().rowwise() /
        k.input_scale.transpose().array();
    if (cache) {
        cache->input = a;
        cache->pre.clear();
        cache->post.clear();
    }

    const int layers = k.layer_count();
    for (int l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = a * k.weights[l].transpose();
        z.rowwise() += k.biases[l].transpose();
        if (cache) cache->pre.push_back(z);
        if (l + 1 < layers) {
            a = z.unaryExpr([](double x) { return silu(x); });
        } else {
            a = std::move(z);  // linear output layer
        }
        if (cache) cache->post.push_back(a);
    }
    return a;
}

Eigen::MatrixXd mlp_eval(const MlpKernel& k, const Eigen::VectorXd& invariants) {
    const Eigen::MatrixXd out = mlp_forward(k, invariants.transpose());
    // Row-major reshape of the output row into c_out x c_in.
    Eigen::MatrixXd m(k.c_out, k.c_in);
    for (int a = 0; a < k.c_out; ++a)
        for (int b = 0; b < k.c_in; ++b) m(a, b) = out(0, a * k.c_in + b);
    return m;
}

MlpGradients MlpGradients::zeros_like(const MlpKernel& k) {
    MlpGradients g;
    for (int l = 0; l < k.layer_count(); ++l) {
        g.weights.push_back(Eigen::MatrixXd::Zero(k.weights[l].rows(), k.weights[l].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(k.biases[l].size()));
    }
    return g;
}

void MlpGradients::accumulate(const MlpGradients& other) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += other.weights[l];
        biases[l] += other.biases[l];
    }
}

void MlpGradients::scale(double s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] *= s;
        biases[l] *= s;
    }
}

void mlp_backward(const MlpKernel& k, const MlpForwardCache& cache,
                  const Eigen::MatrixXd& upstream, MlpGradients& grads) {
    const int layers = k.layer_count();
    Eigen::MatrixXd delta = upstream;  // d loss / d pre-activation of the output layer

    for (int l = layers - 1; l >= 0; --l) {
        const Eigen::MatrixXd& below = (l == 0) ? cache.input : cache.post[l - 1];
        grads.weights[l].noalias() += delta.transpose() * below;
        grads.biases[l] += delta.colwise().sum().transpose();
        if (l > 0) {
            Eigen::MatrixXd back = delta * k.weights[l];
            delta = back.cwiseProduct(
                cache.pre[l - 1].unaryExpr([](double x) { return silu_grad(x); }));
        }
    }
}

Eigen::MatrixXd pair_invariant_matrix(const PoseGraph& graph, InvariantCollection collection) {
    const int n = graph.node_count();
    const int d = invariant_dim(collection);
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(n) * n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            raw.row(static_cast<Eigen::Index>(i) * n + j) =
                invariant_vector(PosePair{graph.nodes[i], graph.nodes[j]}, collection).transpose();
    return raw;
}

namespace {

/// out(i, a) = sum_j sum_b K(i*N+j, a*c_in+b) * weighted_f(j, b), j ascending.
/// weighted_f carries the features pre-multiplied by the node weights so the
/// training path and convolve() share the exact same arithmetic.
Eigen::MatrixXd reduce_pairs(const Eigen::MatrixXd& kernel_rows,
                             const Eigen::MatrixXd& weighted_f, int n, int c_out, int c_in) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, c_out);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Eigen::Index row = static_cast<Eigen::Index>(i) * n + j;
            for (int a = 0; a < c_out; ++a) {
                double acc = 0.0;
                for (int b = 0; b < c_in; ++b)
                    acc += kernel_rows(row, a * c_in + b) * weighted_f(j, b);
                out(i, a) += acc;
            }
        }
    return out;
}

Eigen::MatrixXd weighted_features(const PoseGraph& graph) {
    return graph.features.array().colwise() * graph.weights.array();
}

}  // namespace

PoseGraph convolve(const PoseGraph& graph, const MlpKernel& k, InvariantCollection collection) {
    if (k.input_dim() != invariant_dim(collection))
        throw std::invalid_argument("convolve: kernel input dim does not match the collection");
    if (k.c_in != graph.channels())
        throw std::invalid_argument("convolve: kernel c_in does not match graph channels");

    if (graph.node_count() == 0)
        return PoseGraph(graph.nodes, Eigen::MatrixXd(0, k.c_out), graph.weights);

    const Eigen::MatrixXd kernel_rows = mlp_forward(k, pair_invariant_matrix(graph, collection));
    return PoseGraph(graph.nodes,
                     reduce_pairs(kernel_rows, weighted_features(graph), graph.node_count(),
                                  k.c_out, k.c_in),
                     graph.weights);
}

void ExperimentConfig::validate() const {
    if (graph_count <= 0) throw std::invalid_argument("config: graph_count must be positive");
    if (node_count <= 0) throw std::invalid_argument("config: node_count must be positive");
    if (epochs < 0) throw std::invalid_argument("config: epochs must be non-negative");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("config: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("config: momentum in [0, 1)");
    if (!(witness_fraction >= 0.0 && witness_fraction <= 1.0))
        throw std::invalid_argument("config: witness_fraction in [0, 1]");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0))
        throw std::invalid_argument("config: train_fraction in (0, 1]");
    if (!(box_half > 0.0)) throw std::invalid_argument("config: box_half must be positive");
    for (int h : hidden)
        if (h <= 0) throw std::invalid_argument("config: hidden sizes must be positive");
}

namespace {

struct GraphBatch {
    Eigen::MatrixXd raw;        // N^2 x d invariant rows
    Eigen::MatrixXd weighted_f; // N x c_in, features scaled by node weight
    Eigen::MatrixXd targets;    // N x c_out
    int n;
};

}  // namespace

TrainResult train_kernel(const ExperimentConfig& cfg, const std::vector<TrainExample>& data) {
    cfg.validate();
    if (data.empty()) throw std::invalid_argument("train_kernel: empty dataset");

    const int d = invariant_dim(cfg.collection);
    const int c_in = data.front().graph.channels();
    const int c_out = static_cast<int>(data.front().targets.cols());
    if (c_in <= 0 || c_out <= 0)
        throw std::invalid_argument("train_kernel: need at least one feature and target channel");

    std::vector<GraphBatch> batches;
    long total_outputs = 0;
    for (const TrainExample& ex : data) {
        if (ex.graph.channels() != c_in || ex.targets.cols() != c_out ||
            ex.targets.rows() != ex.graph.node_count())
            throw std::invalid_argument("train_kernel: inconsistent example dimensions");
        GraphBatch b;
        b.n = ex.graph.node_count();
        b.raw = pair_invariant_matrix(ex.graph, cfg.collection);
        b.weighted_f = weighted_features(ex.graph);
        b.targets = ex.targets;
        total_outputs += static_cast<long>(b.n) * c_out;
        batches.push_back(std::move(b));
    }
    if (total_outputs == 0) throw std::invalid_argument("train_kernel: no node outputs to fit");

    // Per-dataset affine standardization of the kernel inputs, stored with
    // the model. Without it the squared-distance channel dominates.
    const auto [mean, scale] = fit_input_standardization(data, cfg.collection);

    MlpKernel kernel = MlpKernel::random_init(d, cfg.hidden, c_out, c_in, cfg.seed);
    kernel.input_shift = mean;
    kernel.input_scale = scale;

    MlpGradients velocity = MlpGradients::zeros_like(kernel);
    std::vector<double> history;
    history.reserve(cfg.epochs + 1);

    const double inv_count = 1.0 / static_cast<double>(total_outputs);

    auto epoch_pass = [&](bool update) {
        double sse = 0.0;
        MlpGradients grads = MlpGradients::zeros_like(kernel);
        for (const GraphBatch& b : batches) {
            MlpForwardCache cache;
            const Eigen::MatrixXd kernel_rows = mlp_forward(kernel, b.raw, update ? &cache : nullptr);
            const Eigen::MatrixXd residual =
                reduce_pairs(kernel_rows, b.weighted_f, b.n, c_out, c_in) - b.targets;
            sse += residual.array().square().sum();
            if (!update) continue;

            // d loss / d kernel_rows: each pair row (i, j) feeds output row i
            // through the weighted features of node j.
            Eigen::MatrixXd upstream(kernel_rows.rows(), kernel_rows.cols());
            for (int i = 0; i < b.n; ++i)
                for (int j = 0; j < b.n; ++j) {
                    const Eigen::Index row = static_cast<Eigen::Index>(i) * b.n + j;
                    for (int a = 0; a < c_out; ++a)
                        for (int bb = 0; bb < c_in; ++bb)
                            upstream(row, a * c_in + bb) =
                                2.0 * inv_count * residual(i, a) * b.weighted_f(j, bb);
                }
            mlp_backward(kernel, cache, upstream, grads);
        }
        const double mse = sse * inv_count;
        if (!std::isfinite(mse))
            throw NonFiniteLoss("train_kernel: loss " + fmt17(mse) + " at epoch " +
                                std::to_string(history.size()) + " (learning rate " +
                                fmt17(cfg.learning_rate) + ")");
        if (update) {
            for (std::size_t l = 0; l < kernel.weights.size(); ++l) {
                velocity.weights[l] = cfg.momentum * velocity.weights[l] + grads.weights[l];
                velocity.biases[l] = cfg.momentum * velocity.biases[l] + grads.biases[l];
                kernel.weights[l] -= cfg.learning_rate * velocity.weights[l];
                kernel.biases[l] -= cfg.learning_rate * velocity.biases[l];
            }
        }
        return mse;
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) history.push_back(epoch_pass(true));
    history.push_back(epoch_pass(false));  // final loss; sole entry when epochs == 0

    return TrainResult{std::move(kernel), std::move(history)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_input_standardization(
    const std::vector<TrainExample>& data, InvariantCollection collection) {
    const int d = invariant_dim(collection);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
    long total_pairs = 0;
    std::vector<Eigen::MatrixXd> raws;
    raws.reserve(data.size());
    for (const TrainExample& ex : data) {
        raws.push_back(pair_invariant_matrix(ex.graph, collection));
        sum += raws.back().colwise().sum().transpose();
        total_pairs += raws.back().rows();
    }
    if (total_pairs == 0)
        return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};

    const Eigen::VectorXd mean = sum / static_cast<double>(total_pairs);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
    for (const Eigen::MatrixXd& raw : raws)
        var +=
            (raw.rowwise() - mean.transpose()).array().square().colwise().sum().matrix().transpose();
    var /= static_cast<double>(total_pairs);

    Eigen::VectorXd scale(d);
    for (int i = 0; i < d; ++i) scale(i) = var(i) > 1e-24 ? std::sqrt(var(i)) : 1.0;
    return {mean, scale};
}

double dataset_mse(const MlpKernel& k, const std::vector<TrainExample>& data,
                   InvariantCollection collection) {
    double sse = 0.0;
    long count = 0;
    for (const TrainExample& ex : data) {
        const PoseGraph out = convolve(ex.graph, k, collection);
        sse += (out.features - ex.targets).array().square().sum();
        count += static_cast<long>(ex.targets.size());
    }
    return count == 0 ? 0.0 : sse / static_cast<double>(count);
}

void save_kernel(const MlpKernel& k, std::ostream& out) {
    out << "mlpkernel v1 " << k.activation << ' ' << k.c_out << ' ' << k.c_in << ' '
        << k.layer_sizes.size();
    for (int s : k.layer_sizes) out << ' ' << s;
    out << '\n';
    for (Eigen::Index i = 0; i < k.input_shift.size(); ++i) out << fmt17(k.input_shift(i)) << '\n';
    for (Eigen::Index i = 0; i < k.input_scale.size(); ++i) out << fmt17(k.input_scale(i)) << '\n';
    for (int l = 0; l < k.layer_count(); ++l) {
        const Eigen::MatrixXd& w = k.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) out << fmt17(w(i, j)) << '\n';
        for (Eigen::Index i = 0; i < k.biases[l].size(); ++i) out << fmt17(k.biases[l](i)) << '\n';
    }
}

void save_kernel_file(const MlpKernel& k, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_kernel(k, out);
}

namespace {

double read_value(std::istream& in, const char* what) {
    std::string token;
    if (!(in >> token)) throw std::runtime_error(std::string("model file: missing ") + what);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("model file: bad number for ") + what + ": " + token);
    }
    if (used != token.size() || !std::isfinite(v))
        throw std::runtime_error(std::string("model file: bad number for ") + what + ": " + token);
    return v;
}

}  // namespace

MlpKernel load_kernel(std::istream& in) {
    std::string magic, version;
    MlpKernel k;
    std::size_t n_sizes = 0;
    if (!(in >> magic >> version >> k.activation >> k.c_out >> k.c_in >> n_sizes))
        throw std::runtime_error("model file: bad header");
    if (magic != "mlpkernel" || version != "v1")
        throw std::runtime_error("model file: unknown format " + magic + " " + version);
    if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error("model file: bad layer count");
    k.layer_sizes.resize(n_sizes);
    for (std::size_t i = 0; i < n_sizes; ++i) {
        if (!(in >> k.layer_sizes[i]) || k.layer_sizes[i] <= 0 || k.layer_sizes[i] > 1000000)
            throw std::runtime_error("model file: bad layer size");
    }

    const int d = k.layer_sizes.front();
    k.input_shift.resize(d);
    k.input_scale.resize(d);
    for (int i = 0; i < d; ++i) k.input_shift(i) = read_value(in, "input shift");
    for (int i = 0; i < d; ++i) k.input_scale(i) = read_value(in, "input scale");

    for (std::size_t l = 0; l + 1 < k.layer_sizes.size(); ++l) {
        Eigen::MatrixXd w(k.layer_sizes[l + 1], k.layer_sizes[l]);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = read_value(in, "weight");
        Eigen::VectorXd b(k.layer_sizes[l + 1]);
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = read_value(in, "bias");
        k.weights.push_back(std::move(w));
        k.biases.push_back(std::move(b));
    }
    k.validate();
    return k;
}

MlpKernel load_kernel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_kernel(in);
}

}  // namespace poseinv
