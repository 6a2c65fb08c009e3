#include "poseinv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poseinv/kernel.hpp"
#include "poseinv/random.hpp"

namespace poseinv {

namespace {

double max_abs_diff(const UniversalInvariants& a, const UniversalInvariants& b) {
    return std::max({std::abs(a.i1 - b.i1), std::abs(a.i2 - b.i2), std::abs(a.i3 - b.i3),
                     std::abs(a.i4 - b.i4)});
}

double max_abs_diff(const PonitaInvariants& a, const PonitaInvariants& b) {
    return std::max({std::abs(a.j1 - b.j1), std::abs(a.j2 - b.j2), std::abs(a.j3 - b.j3)});
}

}  // namespace

SuiteResult run_invariance_suite(int trials, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const PosePair pr = random_pair(rng);
        const EuclideanTransform g = random_transform(rng);
        const PosePair moved = act_on_pair(g, pr);
        worst = std::max(worst, max_abs_diff(universal_invariants(pr), universal_invariants(moved)));
        worst = std::max(worst, max_abs_diff(ponita_invariants(pr), ponita_invariants(moved)));
    }
    return SuiteResult{"invariance", trials, seed, kInvarianceSuiteTol, worst,
                       worst <= kInvarianceSuiteTol};
}

SuiteResult run_representer_suite(int trials, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const PosePair pr = random_pair(rng);
        const UniversalInvariants inv = universal_invariants(pr);
        const PosePair rebuilt = representer(inv);
        worst = std::max(worst, align_pairs(rebuilt, pr).residual);
        worst = std::max(worst, max_abs_diff(universal_invariants(rebuilt), inv));
    }
    return SuiteResult{"representer", trials, seed, kRepresenterSuiteTol, worst,
                       worst <= kRepresenterSuiteTol};
}

std::vector<PosePair> degenerate_rank_fixtures() {
    const Vec3 e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
    const PosePoint base(Vec3(0.5, -1.0, 2.0), UnitVec3(e3));
    return {
        // Coincident positions: the squared-distance row vanishes.
        PosePair{base, base},
        // Equal orientations: the n1.n2 row vanishes on the tangent space.
        PosePair{PosePoint(Vec3::Zero(), UnitVec3(e3)), PosePoint(Vec3(1, 2, 0), UnitVec3(e3))},
        // Displacement and both orientations collinear.
        PosePair{PosePoint(Vec3::Zero(), UnitVec3(e3)), PosePoint(e3, UnitVec3(e3))},
    };
}

SuiteResult run_rank_suite(int trials, std::uint64_t seed) {
    Rng rng(seed);
    bool ok = true;
    // Margin: fourth singular value over the rank threshold; > 1 means a
    // confident rank 4. Random pairs land on the spanning-frame set almost
    // surely, so each must certify full rank.
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const JacobianReport report = jacobian_report(random_pair(rng));
        const double threshold = kRankRelTol * std::max(report.singular_values(0), 1.0);
        worst_margin = std::min(worst_margin, report.singular_values(3) / threshold);
        if (report.rank != 4 || !report.frame_is_basis) ok = false;
    }
    for (const PosePair& pr : degenerate_rank_fixtures()) {
        const JacobianReport report = jacobian_report(pr);
        if (report.rank > 3 || report.frame_is_basis) ok = false;
    }
    return SuiteResult{"rank", trials, seed, 1.0, worst_margin, ok && worst_margin > 1.0};
}

SuiteResult run_equivariance_suite(int trials, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    const int n = 8;
    for (int t = 0; t < trials; ++t) {
        std::vector<PosePoint> nodes;
        Eigen::MatrixXd features(n, 1);
        Eigen::VectorXd weights(n);
        for (int i = 0; i < n; ++i) {
            nodes.push_back(random_pose(rng));
            features(i, 0) = rng.uniform(-1.0, 1.0);
            weights(i) = rng.uniform(0.1, 1.0);
        }
        const PoseGraph graph(nodes, features, weights);
        const EuclideanTransform g = random_transform(rng);

        std::vector<PosePoint> moved_nodes;
        for (const PosePoint& p : nodes) moved_nodes.push_back(act_on_pose(g, p));
        const PoseGraph moved(moved_nodes, features, weights);

        for (const InvariantCollection c :
             {InvariantCollection::universal, InvariantCollection::ponita}) {
            const MlpKernel k =
                MlpKernel::random_init(invariant_dim(c), {8, 8}, 1, 1, seed + 1000 + t);
            const Eigen::MatrixXd out = convolve(graph, k, c).features;
            const Eigen::MatrixXd out_moved = convolve(moved, k, c).features;
            worst = std::max(worst, (out - out_moved).cwiseAbs().maxCoeff());
        }
    }
    return SuiteResult{"equivariance", trials, seed, kEquivarianceSuiteTol, worst,
                       worst <= kEquivarianceSuiteTol};
}

std::vector<SuiteResult> run_all_suites(int trials, std::uint64_t seed) {
    return {run_invariance_suite(trials, seed), run_representer_suite(trials, seed),
            run_rank_suite(trials, seed), run_equivariance_suite(trials, seed)};
}

}  // namespace poseinv
