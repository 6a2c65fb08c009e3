// poseinv: CLI for Euclidean pair invariants on position-orientation space.
//
// Subcommands: invariants, verify, counterexample, experiment, reconstruct,
// align. All reports are CSV on stdout (one header row, 17-significant-digit
// decimals); diagnostics and warnings go to stderr. Reports are byte-identical
// across runs for a fixed seed and flag set.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "poseinv/errors.hpp"
#include "poseinv/experiment.hpp"
#include "poseinv/format.hpp"
#include "poseinv/posegraph_io.hpp"
#include "poseinv/random.hpp"
#include "poseinv/verify.hpp"

namespace {

using namespace poseinv;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;

std::vector<std::pair<int, int>> parse_pair_list(const std::string& spec, int node_count) {
    // "i,j;k,l" -> ordered node index pairs.
    std::vector<std::pair<int, int>> pairs;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto comma = item.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--pairs: expected 'i,j' entries, got '" + item + "'");
        const int i = std::stoi(item.substr(0, comma));
        const int j = std::stoi(item.substr(comma + 1));
        if (i < 0 || j < 0 || i >= node_count || j >= node_count)
            throw std::invalid_argument("--pairs: node index out of range in '" + item + "'");
        pairs.emplace_back(i, j);
    }
    return pairs;
}

int cmd_invariants(const std::string& file, const std::string& collection,
                   const std::string& pair_spec) {
    const PoseGraph graph = read_posegraph_file(file, &std::cerr);
    const bool universal = collection == "universal";

    std::vector<std::pair<int, int>> pairs;
    if (!pair_spec.empty()) {
        pairs = parse_pair_list(pair_spec, graph.node_count());
    } else {
        for (int i = 0; i < graph.node_count(); ++i)
            for (int j = 0; j < graph.node_count(); ++j) pairs.emplace_back(i, j);
    }

    std::cout << (universal ? "i,j,i1,i2,i3,i4\n" : "i,j,j1,j2,j3\n");
    for (const auto& [i, j] : pairs) {
        const PosePair pr{graph.nodes[i], graph.nodes[j]};
        std::cout << i << ',' << j;
        if (universal) {
            const UniversalInvariants u = universal_invariants(pr);
            std::cout << ',' << fmt17(u.i1) << ',' << fmt17(u.i2) << ',' << fmt17(u.i3) << ','
                      << fmt17(u.i4);
        } else {
            const PonitaInvariants p = ponita_invariants(pr);
            std::cout << ',' << fmt17(p.j1) << ',' << fmt17(p.j2) << ',' << fmt17(p.j3);
        }
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_verify(const std::string& suite, int trials, std::uint64_t seed) {
    std::vector<SuiteResult> results;
    if (suite == "all") {
        results = run_all_suites(trials, seed);
    } else if (suite == "invariance") {
        results = {run_invariance_suite(trials, seed)};
    } else if (suite == "representer") {
        results = {run_representer_suite(trials, seed)};
    } else if (suite == "rank") {
        results = {run_rank_suite(trials, seed)};
    } else if (suite == "equivariance") {
        results = {run_equivariance_suite(trials, seed)};
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }

    bool all_passed = true;
    std::cout << "suite,trials,seed,tolerance,worst,pass\n";
    for (const SuiteResult& r : results) {
        std::cout << r.suite << ',' << r.trials << ',' << r.seed << ',' << fmt17(r.tolerance)
                  << ',' << fmt17(r.worst) << ',' << (r.passed ? 1 : 0) << '\n';
        all_passed = all_passed && r.passed;
    }
    return all_passed ? kExitOk : kExitCheckFailed;
}

void print_pose_rows(const char* name, const PosePoint& p, const PosePoint& q) {
    auto fmt_pose = [](const PosePoint& pt) {
        return fmt17(pt.x.x()) + ' ' + fmt17(pt.x.y()) + ' ' + fmt17(pt.x.z()) + ' ' +
               fmt17(pt.n.vec().x()) + ' ' + fmt17(pt.n.vec().y()) + ' ' + fmt17(pt.n.vec().z());
    };
    std::cout << "pose," << name << ',' << fmt_pose(p) << ',' << fmt_pose(q) << ",\n";
}

int cmd_counterexample(std::optional<std::uint64_t> transform_seed, double perturb) {
    auto [pair_p, pair_q] = counterexample_witness();

    if (perturb != 0.0) {
        // Nudge the second orientation of the q-pair off its witness value;
        // the orbits stay distinct, so the alignment verdict must not change.
        const Vec3 n = pair_q.p2.n.vec() + perturb * Vec3(0, 0, 1);
        pair_q = PosePair{pair_q.p1, PosePoint(pair_q.p2.x, UnitVec3(n))};
    }
    if (transform_seed) {
        Rng rng(*transform_seed);
        const EuclideanTransform g = random_transform(rng);
        pair_p = act_on_pair(g, pair_p);
        pair_q = act_on_pair(g, pair_q);
    }

    std::cout << "record,name,pair_p,pair_q,pass\n";
    std::cout << "meta,transform_seed,"
              << (transform_seed ? std::to_string(*transform_seed) : std::string("-")) << ",,\n";
    std::cout << "meta,perturb," << fmt17(perturb) << ",,\n";
    print_pose_rows("first", pair_p.p1, pair_q.p1);
    print_pose_rows("second", pair_p.p2, pair_q.p2);

    const PonitaInvariants jp = ponita_invariants(pair_p);
    const PonitaInvariants jq = ponita_invariants(pair_q);
    const UniversalInvariants up = universal_invariants(pair_p);
    const UniversalInvariants uq = universal_invariants(pair_q);

    std::cout << "invariant,ponita_j1," << fmt17(jp.j1) << ',' << fmt17(jq.j1) << ",\n";
    std::cout << "invariant,ponita_j2," << fmt17(jp.j2) << ',' << fmt17(jq.j2) << ",\n";
    std::cout << "invariant,ponita_j3," << fmt17(jp.j3) << ',' << fmt17(jq.j3) << ",\n";
    std::cout << "invariant,universal_i1," << fmt17(up.i1) << ',' << fmt17(uq.i1) << ",\n";
    std::cout << "invariant,universal_i2," << fmt17(up.i2) << ',' << fmt17(uq.i2) << ",\n";
    std::cout << "invariant,universal_i3," << fmt17(up.i3) << ',' << fmt17(uq.i3) << ",\n";
    std::cout << "invariant,universal_i4," << fmt17(up.i4) << ',' << fmt17(uq.i4) << ",\n";

    bool all_pass = true;

    // Fact 1: the three-invariant features collide (skipped when perturbed,
    // since the perturbation deliberately moves them apart).
    if (perturb == 0.0) {
        const double tol = transform_seed ? 1e-9 : 1e-12;
        const double diff = std::max(
            {std::abs(jp.j1 - jq.j1), std::abs(jp.j2 - jq.j2), std::abs(jp.j3 - jq.j3)});
        const bool ok = diff <= tol;
        all_pass = all_pass && ok;
        std::cout << "check,ponita_collision," << fmt17(diff) << ',' << fmt17(tol) << ','
                  << (ok ? 1 : 0) << '\n';
    } else {
        std::cout << "check,ponita_collision,,,skip\n";
    }

    // Fact 2: the universal i2 separates the pairs.
    bool sep_ok;
    if (!transform_seed && perturb == 0.0) {
        sep_ok = up.i2 == 0.0 && uq.i2 == 1.0;  // exact in the canonical frame
    } else {
        sep_ok = std::abs(up.i2 - uq.i2) >= 0.5;
    }
    all_pass = all_pass && sep_ok;
    std::cout << "check,universal_i2_separation," << fmt17(up.i2) << ',' << fmt17(uq.i2) << ','
              << (sep_ok ? 1 : 0) << '\n';

    // Fact 3: no Euclidean transform maps one pair to the other.
    const AlignmentResult alignment = align_pairs(pair_p, pair_q);
    const bool none_ok = !alignment.transform.has_value();
    all_pass = all_pass && none_ok;
    std::cout << "check,alignment," << (alignment.transform ? "found" : "none") << ','
              << fmt17(alignment.residual) << ',' << (none_ok ? 1 : 0) << '\n';

    return all_pass ? kExitOk : kExitCheckFailed;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    nlohmann::json j;
    in >> j;

    ExperimentConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.graph_count = j.value("graphs", cfg.graph_count);
    cfg.node_count = j.value("nodes", cfg.node_count);
    cfg.witness_fraction = j.value("witness_fraction", cfg.witness_fraction);
    cfg.hidden = j.value("hidden", cfg.hidden);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.momentum = j.value("momentum", cfg.momentum);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
    cfg.box_half = j.value("box_half", cfg.box_half);
    const std::string target = j.value("target", std::string("separation"));
    if (target == "separation") {
        cfg.target = ExperimentConfig::Target::separation;
    } else if (target == "self-distill") {
        cfg.target = ExperimentConfig::Target::self_distill;
    } else {
        throw std::invalid_argument("config: unknown target '" + target + "'");
    }
    return cfg;
}

void print_config_rows(const ExperimentConfig& cfg) {
    std::cout << "metric,collection,value\n";
    std::cout << "seed,," << cfg.seed << '\n';
    std::cout << "graph_count,," << cfg.graph_count << '\n';
    std::cout << "node_count,," << cfg.node_count << '\n';
    std::cout << "witness_fraction,," << fmt17(cfg.witness_fraction) << '\n';
    std::cout << "epochs,," << cfg.epochs << '\n';
    std::cout << "learning_rate,," << fmt17(cfg.learning_rate) << '\n';
    std::cout << "momentum,," << fmt17(cfg.momentum) << '\n';
    std::cout << "train_fraction,," << fmt17(cfg.train_fraction) << '\n';
    std::cout << "box_half,," << fmt17(cfg.box_half) << '\n';
    std::ostringstream hidden;
    for (std::size_t i = 0; i < cfg.hidden.size(); ++i)
        hidden << (i ? " " : "") << cfg.hidden[i];
    std::cout << "hidden,," << hidden.str() << '\n';
    std::cout << "target,,"
              << (cfg.target == ExperimentConfig::Target::separation ? "separation"
                                                                     : "self-distill")
              << '\n';
}

int cmd_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    print_config_rows(cfg);

    if (cfg.target == ExperimentConfig::Target::self_distill) {
        const SelfDistillOutcome out = run_self_distill_experiment(cfg);
        for (const auto& [name, r] :
             {std::pair<const char*, const DistillOutcome&>{"universal", out.universal},
              {"ponita", out.ponita}}) {
            std::cout << "initial_loss," << name << ',' << fmt17(r.initial_loss) << '\n';
            std::cout << "final_loss," << name << ',' << fmt17(r.final_loss) << '\n';
            std::cout << "loss_ratio," << name << ',' << fmt17(r.ratio) << '\n';
            std::cout << "check_distill_below_1e-2," << name << ',' << (r.passed ? 1 : 0) << '\n';
            const std::string path = out_dir + "/model_distill_" + name + ".txt";
            save_kernel_file(r.model, path);
            std::cout << "model_file," << name << ',' << path << '\n';
        }
        return kExitOk;
    }

    const SeparationOutcome out = run_separation_experiment(cfg);
    std::cout << "train_graphs,," << out.train_graphs << '\n';
    std::cout << "test_graphs,," << out.test_graphs << '\n';
    for (const auto& [name, r] :
         {std::pair<const char*, const CollectionOutcome&>{"universal", out.universal},
          {"ponita", out.ponita}}) {
        std::cout << "initial_loss," << name << ',' << fmt17(r.initial_loss) << '\n';
        std::cout << "final_train_mse," << name << ',' << fmt17(r.final_train_mse) << '\n';
        std::cout << "test_mse," << name << ',' << fmt17(r.test_mse) << '\n';
        const std::string path = out_dir + "/model_" + std::string(name) + ".txt";
        save_kernel_file(r.model, path);
        std::cout << "model_file," << name << ',' << path << '\n';
    }
    std::cout << "collision_floor_train,," << fmt17(out.floor_train) << '\n';
    std::cout << "collision_floor_test,," << fmt17(out.floor_test) << '\n';
    std::cout << "test_mse_ratio_universal_over_ponita,,"
              << fmt17(out.ponita.test_mse > 0.0 ? out.universal.test_mse / out.ponita.test_mse
                                                 : 0.0)
              << '\n';
    std::cout << "check_universal_below_ponita,," << (out.universal_below_ponita ? 1 : 0) << '\n';
    std::cout << "check_ponita_above_floor,," << (out.ponita_above_floor ? 1 : 0) << '\n';
    return kExitOk;
}

int cmd_reconstruct(double i1, double i2, double i3, double i4) {
    const UniversalInvariants inv{i1, i2, i3, i4};
    const PosePair pr = representer(inv);  // throws UnrealizableTuple if impossible
    const UniversalInvariants back = universal_invariants(pr);

    std::cout << "name,value\n";
    std::cout << "realizable,1\n";
    const auto vec_rows = [](const char* prefix, const Vec3& v) {
        std::cout << prefix << "_x," << fmt17(v.x()) << '\n';
        std::cout << prefix << "_y," << fmt17(v.y()) << '\n';
        std::cout << prefix << "_z," << fmt17(v.z()) << '\n';
    };
    vec_rows("x1", pr.p1.x);
    vec_rows("n1", pr.p1.n.vec());
    vec_rows("x2", pr.p2.x);
    vec_rows("n2", pr.p2.n.vec());
    std::cout << "roundtrip_i1," << fmt17(back.i1) << '\n';
    std::cout << "roundtrip_i2," << fmt17(back.i2) << '\n';
    std::cout << "roundtrip_i3," << fmt17(back.i3) << '\n';
    std::cout << "roundtrip_i4," << fmt17(back.i4) << '\n';
    const double mismatch = std::max({std::abs(back.i1 - i1), std::abs(back.i2 - i2),
                                      std::abs(back.i3 - i3), std::abs(back.i4 - i4)});
    std::cout << "max_invariant_mismatch," << fmt17(mismatch) << '\n';
    return kExitOk;
}

int cmd_align(const std::string& file, const std::string& pair_a, const std::string& pair_b) {
    const PoseGraph graph = read_posegraph_file(file, &std::cerr);
    const auto a = parse_pair_list(pair_a, graph.node_count());
    const auto b = parse_pair_list(pair_b, graph.node_count());
    if (a.size() != 1 || b.size() != 1)
        throw std::invalid_argument("--pair-a/--pair-b each take exactly one 'i,j' pair");

    const PosePair pra{graph.nodes[a[0].first], graph.nodes[a[0].second]};
    const PosePair prb{graph.nodes[b[0].first], graph.nodes[b[0].second]};
    const AlignmentResult result = align_pairs(pra, prb);

    std::cout << "name,value\n";
    std::cout << "found," << (result.transform ? 1 : 0) << '\n';
    std::cout << "residual," << fmt17(result.residual) << '\n';
    std::cout << "tolerance," << fmt17(kAlignmentTol) << '\n';
    if (result.transform) {
        const EuclideanTransform& g = *result.transform;
        std::cout << "t_x," << fmt17(g.t.x()) << '\n';
        std::cout << "t_y," << fmt17(g.t.y()) << '\n';
        std::cout << "t_z," << fmt17(g.t.z()) << '\n';
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                std::cout << "q_" << r << c << ',' << fmt17(g.Q.matrix()(r, c)) << '\n';
    }
    return kExitOk;  // "no alignment" is a valid outcome, not an error
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Euclidean pair invariants on position-orientation space: two kernel feature\n"
        "collections (the universal four and the classic three), Gram-matrix\n"
        "reconstruction, orbit alignment, differential rank certification, and a\n"
        "desk-scale expressivity experiment for invariant-kernel convolutions.\n\n"
        "Reports are CSV on stdout; warnings and errors go to stderr. Exit codes:\n"
        "0 success, 1 failed check or aborted run, 2 unusable input."};
    app.require_subcommand(1);

    // invariants
    std::string inv_file, inv_collection = "universal", inv_pairs;
    auto* inv = app.add_subcommand(
        "invariants",
        "Per-pair invariants of a pose-graph file as CSV.\n"
        "Columns: i,j,i1,i2,i3,i4 (universal) or i,j,j1,j2,j3 (ponita).\n"
        "Default pair set: all ordered pairs (i,j) in lexicographic order.");
    inv->add_option("file", inv_file, "pose-graph file (posegraph v1)")->required();
    inv->add_option("--collection", inv_collection, "universal | ponita")
        ->check(CLI::IsMember({"universal", "ponita"}));
    inv->add_option("--pairs", inv_pairs, "explicit pair list 'i,j;k,l;...'");

    // verify
    std::string verify_suite = "all";
    int verify_trials = 1000;
    std::uint64_t verify_seed = 7;
    auto* verify = app.add_subcommand(
        "verify",
        "Run property suites against fresh random draws.\n"
        "Columns: suite,trials,seed,tolerance,worst,pass. Exit 1 on any failure.\n"
        "worst is the max residual (invariance/representer/equivariance) or the\n"
        "smallest fourth-singular-value margin over the rank threshold (rank).");
    verify->add_option("--suite", verify_suite, "invariance | representer | rank | equivariance | all")
        ->check(CLI::IsMember({"invariance", "representer", "rank", "equivariance", "all"}));
    verify->add_option("--trials", verify_trials, "random draws per suite")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed, "random seed");

    // counterexample
    std::uint64_t ce_seed = 0;
    bool ce_seed_set = false;
    double ce_perturb = 0.0;
    auto* ce = app.add_subcommand(
        "counterexample",
        "The two pose pairs on which the three-invariant collection collides while\n"
        "the universal i2 separates them; verifies the collision, the separation,\n"
        "and that no alignment exists. Columns: record,name,pair_p,pair_q,pass.");
    ce->add_option("--transform-seed", ce_seed, "move both pairs by a common random transform")
        ->each([&](const std::string&) { ce_seed_set = true; });
    ce->add_option("--perturb", ce_perturb, "nudge the second orientation of the q-pair");

    // experiment
    std::string exp_config, exp_out_dir = ".", exp_target;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    int exp_epochs = -1, exp_graphs = -1, exp_nodes = -1;
    double exp_lr = 0.0;
    auto* exp = app.add_subcommand(
        "experiment",
        "Train one kernel per invariant collection on the planted-witness separation\n"
        "task (or the self-distillation sanity task) and report train/test MSE, the\n"
        "analytic collision floor, and the check outcomes.\n"
        "Columns: metric,collection,value. Exit 1 if the loss turns non-finite.");
    exp->add_option("--config", exp_config, "JSON config file (flags override it)");
    exp->add_option("--seed", exp_seed, "random seed")
        ->each([&](const std::string&) { exp_seed_set = true; });
    exp->add_option("--graphs", exp_graphs, "number of graphs");
    exp->add_option("--nodes", exp_nodes, "nodes per graph");
    exp->add_option("--epochs", exp_epochs, "training epochs");
    exp->add_option("--lr", exp_lr, "learning rate");
    exp->add_option("--target", exp_target, "separation | self-distill")
        ->check(CLI::IsMember({"separation", "self-distill"}));
    exp->add_option("--out-dir", exp_out_dir, "directory for saved models");

    // reconstruct
    double r_i1 = 0.0, r_i2 = 0.0, r_i3 = 0.0, r_i4 = 0.0;
    auto* rec = app.add_subcommand(
        "reconstruct",
        "Build a pose pair attaining the given invariant values (Gram factorization),\n"
        "with the round-trip invariants of the result. Columns: name,value.\n"
        "Exit 1 if the tuple is unrealizable.");
    rec->add_option("--i1", r_i1, "displacement . n1")->required();
    rec->add_option("--i2", r_i2, "displacement . n2")->required();
    rec->add_option("--i3", r_i3, "squared distance")->required();
    rec->add_option("--i4", r_i4, "n1 . n2")->required();

    // align
    std::string al_file, al_pair_a, al_pair_b;
    auto* al = app.add_subcommand(
        "align",
        "Find a Euclidean transform mapping pair A onto pair B (node index pairs\n"
        "from a pose-graph file), reflections allowed. Columns: name,value.\n"
        "'found,0' is a valid outcome and still exits 0.");
    al->add_option("file", al_file, "pose-graph file")->required();
    al->add_option("--pair-a", al_pair_a, "node pair 'i,j'")->required();
    al->add_option("--pair-b", al_pair_b, "node pair 'k,l'")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (inv->parsed()) return cmd_invariants(inv_file, inv_collection, inv_pairs);
        if (verify->parsed()) return cmd_verify(verify_suite, verify_trials, verify_seed);
        if (ce->parsed())
            return cmd_counterexample(
                ce_seed_set ? std::optional<std::uint64_t>(ce_seed) : std::nullopt, ce_perturb);
        if (exp->parsed()) {
            ExperimentConfig cfg = exp_config.empty() ? ExperimentConfig{} : load_config(exp_config);
            if (exp_seed_set) cfg.seed = exp_seed;
            if (exp_graphs >= 0) cfg.graph_count = exp_graphs;
            if (exp_nodes >= 0) cfg.node_count = exp_nodes;
            if (exp_epochs >= 0) cfg.epochs = exp_epochs;
            if (exp_lr > 0.0) cfg.learning_rate = exp_lr;
            if (!exp_target.empty())
                cfg.target = exp_target == "separation" ? ExperimentConfig::Target::separation
                                                        : ExperimentConfig::Target::self_distill;
            cfg.validate();
            return cmd_experiment(cfg, exp_out_dir);
        }
        if (rec->parsed()) return cmd_reconstruct(r_i1, r_i2, r_i3, r_i4);
        if (al->parsed()) return cmd_align(al_file, al_pair_a, al_pair_b);
    } catch (const PoseGraphParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const UnrealizableTuple& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const NonFiniteLoss& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitOk;
}
