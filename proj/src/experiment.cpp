#include "poseinv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "poseinv/random.hpp"

namespace poseinv {

namespace {

// The two witness configurations in canonical position. Both share the first
// node; the second differs only in orientation, which is exactly what the
// three-invariant features cannot see.
PosePair witness_config(bool unit_increment) {
    const Vec3 e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
    const PosePoint first(Vec3::Zero(), UnitVec3(e3));
    const PosePoint second(e1, UnitVec3(unit_increment ? e1 : e2));
    return PosePair{first, second};
}

Eigen::MatrixXd graph_targets(const std::vector<PosePoint>& nodes, const Eigen::VectorXd& w) {
    const int n = static_cast<int>(nodes.size());
    Eigen::MatrixXd y(n, 1);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += (nodes[j].x - nodes[i].x).dot(nodes[j].n.vec()) * w(j);
        y(i, 0) = acc;
    }
    return y;
}

}  // namespace

SeparationDataset make_separation_dataset(std::uint64_t seed, int n_graphs, int n_nodes,
                                          double witness_fraction, double box_half) {
    if (n_graphs <= 0 || n_nodes <= 0)
        throw std::invalid_argument("make_separation_dataset: counts must be positive");

    int plant_pairs = 0;
    if (n_nodes >= 2 && witness_fraction > 0.0) {
        plant_pairs = static_cast<int>(std::llround(witness_fraction * n_nodes / 2.0));
        plant_pairs = std::clamp(plant_pairs, 1, n_nodes / 2);
    }

    SeparationDataset out;
    out.node_count = n_nodes;
    Rng rng(seed);

    for (int g = 0; g < n_graphs; ++g) {
        std::vector<PosePoint> nodes;
        nodes.reserve(n_nodes);

        for (int k = 0; k < plant_pairs; ++k) {
            const bool unit = ((g + k) % 2) == 1;
            const EuclideanTransform move = random_transform(rng, box_half);
            const PosePair planted = act_on_pair(move, witness_config(unit));
            out.plantings.push_back(WitnessPlanting{g, static_cast<int>(nodes.size()),
                                                    static_cast<int>(nodes.size()) + 1, unit});
            nodes.push_back(planted.p1);
            nodes.push_back(planted.p2);
        }
        while (static_cast<int>(nodes.size()) < n_nodes) nodes.push_back(random_pose(rng, box_half));

        const Eigen::MatrixXd features = Eigen::MatrixXd::Ones(n_nodes, 1);
        const Eigen::VectorXd weights =
            Eigen::VectorXd::Constant(n_nodes, 1.0 / static_cast<double>(n_nodes));
        Eigen::MatrixXd targets = graph_targets(nodes, weights);
        out.examples.push_back(TrainExample{PoseGraph(std::move(nodes), features, weights),
                                            std::move(targets)});
    }
    return out;
}

double collision_floor_mse(const SeparationDataset& data, int graph_begin, int graph_end) {
    if (graph_begin < 0 || graph_end > static_cast<int>(data.examples.size()) ||
        graph_begin >= graph_end)
        return 0.0;

    // Pair slots sharing a kernel input, with the target increment each slot
    // should contribute. Key 0: the feature point shared by both forward
    // slots and the zero-variant's reversed slot. Key 1: the unit-variant's
    // reversed slot, which lands on a feature point of its own.
    std::map<int, std::vector<std::pair<double, double>>> groups;  // value, node weight
    for (const WitnessPlanting& p : data.plantings) {
        if (p.graph_index < graph_begin || p.graph_index >= graph_end) continue;
        const Eigen::VectorXd& w = data.examples[p.graph_index].graph.weights;
        if (p.unit_increment) {
            groups[0].push_back({1.0, w(p.node_b)});  // forward slot, increment 1
            groups[1].push_back({0.0, w(p.node_a)});  // reversed slot
        } else {
            groups[0].push_back({0.0, w(p.node_b)});
            groups[0].push_back({0.0, w(p.node_a)});
        }
    }

    // Weighted mean-minimizer per group: the single kernel value v on the
    // shared feature point that minimizes sum_s (v - value_s)^2 * w_s^2.
    double sse = 0.0;
    for (const auto& [key, slots] : groups) {
        (void)key;
        double num = 0.0, den = 0.0;
        for (const auto& [value, w] : slots) {
            num += w * w * value;
            den += w * w;
        }
        const double v = den > 0.0 ? num / den : 0.0;
        for (const auto& [value, w] : slots) sse += (v - value) * (v - value) * w * w;
    }

    long outputs = 0;
    for (int g = graph_begin; g < graph_end; ++g)
        outputs += data.examples[g].targets.size();
    return outputs == 0 ? 0.0 : sse / static_cast<double>(outputs);
}

namespace {

CollectionOutcome train_collection(const ExperimentConfig& base, InvariantCollection collection,
                                   std::uint64_t init_seed,
                                   const std::vector<TrainExample>& train,
                                   const std::vector<TrainExample>& test) {
    ExperimentConfig cfg = base;
    cfg.collection = collection;
    cfg.seed = init_seed;
    TrainResult result = train_kernel(cfg, train);

    CollectionOutcome out;
    out.initial_loss = result.loss_history.front();
    out.final_train_mse = result.loss_history.back();
    out.test_mse = test.empty() ? out.final_train_mse
                                : dataset_mse(result.kernel, test, collection);
    out.loss_history = std::move(result.loss_history);
    out.model = std::move(result.kernel);
    return out;
}

}  // namespace

SeparationOutcome run_separation_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.node_count < 2)
        throw std::invalid_argument("separation experiment needs at least two nodes per graph");

    const SeparationDataset data = make_separation_dataset(
        cfg.seed, cfg.graph_count, cfg.node_count, cfg.witness_fraction, cfg.box_half);

    const int train_count = std::clamp(
        static_cast<int>(std::llround(cfg.train_fraction * cfg.graph_count)), 1, cfg.graph_count);
    const std::vector<TrainExample> train(data.examples.begin(),
                                          data.examples.begin() + train_count);
    const std::vector<TrainExample> test(data.examples.begin() + train_count,
                                         data.examples.end());

    SeparationOutcome out;
    out.train_graphs = train_count;
    out.test_graphs = cfg.graph_count - train_count;
    out.floor_train = collision_floor_mse(data, 0, train_count);
    out.floor_test = out.test_graphs > 0 ? collision_floor_mse(data, train_count, cfg.graph_count)
                                         : out.floor_train;

    out.universal =
        train_collection(cfg, InvariantCollection::universal, cfg.seed + 1, train, test);
    out.ponita = train_collection(cfg, InvariantCollection::ponita, cfg.seed + 2, train, test);

    out.universal_below_ponita = out.universal.test_mse < out.ponita.test_mse;
    out.ponita_above_floor = out.ponita.test_mse >= 0.9 * out.floor_test;
    return out;
}

namespace {

DistillOutcome distill_collection(const ExperimentConfig& base, InvariantCollection collection,
                                  std::uint64_t teacher_seed, std::uint64_t student_seed,
                                  const SeparationDataset& data) {
    // Frozen teacher with dataset-fitted input standardization; the student
    // must recover its outputs from scratch.
    MlpKernel teacher = MlpKernel::random_init(invariant_dim(collection), base.hidden, 1, 1,
                                               teacher_seed);
    const auto [shift, scale] = fit_input_standardization(data.examples, collection);
    teacher.input_shift = shift;
    teacher.input_scale = scale;

    std::vector<TrainExample> task;
    task.reserve(data.examples.size());
    for (const TrainExample& ex : data.examples)
        task.push_back(TrainExample{ex.graph, convolve(ex.graph, teacher, collection).features});

    ExperimentConfig cfg = base;
    cfg.collection = collection;
    cfg.seed = student_seed;
    TrainResult result = train_kernel(cfg, task);

    DistillOutcome out;
    out.initial_loss = result.loss_history.front();
    out.final_loss = result.loss_history.back();
    out.ratio = out.initial_loss > 0.0 ? out.final_loss / out.initial_loss : 0.0;
    out.passed = out.final_loss < 1e-2 * out.initial_loss;
    out.model = std::move(result.kernel);
    return out;
}

}  // namespace

SelfDistillOutcome run_self_distill_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const SeparationDataset data = make_separation_dataset(
        cfg.seed, cfg.graph_count, cfg.node_count, cfg.witness_fraction, cfg.box_half);

    SelfDistillOutcome out;
    out.universal = distill_collection(cfg, InvariantCollection::universal, cfg.seed + 10,
                                       cfg.seed + 1, data);
    out.ponita = distill_collection(cfg, InvariantCollection::ponita, cfg.seed + 20, cfg.seed + 2,
                                    data);
    return out;
}

}  // namespace poseinv
