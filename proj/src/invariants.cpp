#include "poseinv/invariants.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "poseinv/errors.hpp"

namespace poseinv {

UniversalInvariants universal_invariants(const PosePair& pr) {
    const Vec3 dx = pr.p2.x - pr.p1.x;
    return UniversalInvariants{
        dx.dot(pr.p1.n.vec()),
        dx.dot(pr.p2.n.vec()),
        dx.dot(dx),
        pr.p1.n.dot(pr.p2.n),
    };
}

PonitaInvariants ponita_invariants(const PosePair& pr) {
    const Vec3 dx = pr.p2.x - pr.p1.x;
    const double j1 = dx.dot(pr.p1.n.vec());
    const double j2 = (dx - j1 * pr.p1.n.vec()).norm();
    // The angle arccos(n1 . n2), evaluated as atan2(|n1 x n2|, n1 . n2).
    // arccos itself loses ~sqrt(eps) at collinear orientations (every self
    // pair of a graph sits there), which would break the equivariance budget;
    // atan2 is stable on the whole sphere and never needs clamping.
    const double sine = pr.p1.n.vec().cross(pr.p2.n.vec()).norm();
    const double cosine = pr.p1.n.dot(pr.p2.n);
    return PonitaInvariants{j1, j2, std::atan2(sine, cosine)};
}

GramMatrix::GramMatrix(const UniversalInvariants& inv) {
    m_ << 1.0, inv.i4, inv.i1,
        inv.i4, 1.0, inv.i2,
        inv.i1, inv.i2, inv.i3;
}

double GramMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Mat3> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

GramMatrix gram_matrix(const UniversalInvariants& inv) { return GramMatrix(inv); }

bool is_realizable(const UniversalInvariants& inv) {
    return gram_matrix(inv).min_eigenvalue() >= -kRealizableEigTol;
}

PosePair representer(const UniversalInvariants& inv) {
    if (!is_realizable(inv))
        throw UnrealizableTuple("representer: Gram matrix is not positive semidefinite");

    // G = V diag(l) V^T with negatives clamped; the columns of diag(sqrt l) V^T
    // reproduce G as their pairwise dot products.
    const GramMatrix g = gram_matrix(inv);
    Eigen::SelfAdjointEigenSolver<Mat3> es(g.matrix());
    Vec3 lambda = es.eigenvalues();
    for (int i = 0; i < 3; ++i) lambda(i) = std::max(lambda(i), 0.0);
    const Mat3 factor = lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

    const Vec3 v1 = factor.col(0);
    const Vec3 v2 = factor.col(1);
    const Vec3 v3 = factor.col(2);
    if (v1.norm() < kDegenerateColumnNorm || v2.norm() < kDegenerateColumnNorm)
        throw DegenerateOrientation("representer: orientation column collapsed");

    return PosePair{PosePoint(Vec3::Zero(), UnitVec3(v1)), PosePoint(v3, UnitVec3(v2))};
}

AlignmentResult align_pairs(const PosePair& a, const PosePair& b) {
    // Frame vectors whose Gram matrix the invariants determine.
    const Vec3 fa[3] = {a.p1.n.vec(), a.p2.n.vec(), a.p2.x - a.p1.x};
    const Vec3 fb[3] = {b.p1.n.vec(), b.p2.n.vec(), b.p2.x - b.p1.x};

    // Orthogonal Procrustes over all of O(3): Q = U V^T from the SVD of
    // sum_i fb_i fa_i^T. No determinant correction; reflections are group
    // elements here, and forcing det +1 would miss mirror-related pairs.
    Mat3 m = Mat3::Zero();
    for (int i = 0; i < 3; ++i) m += fb[i] * fa[i].transpose();
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 q = svd.matrixU() * svd.matrixV().transpose();

    const Vec3 t = b.p1.x - q * a.p1.x;

    double residual = 0.0;
    residual = std::max(residual, (q * a.p1.x + t - b.p1.x).norm());
    residual = std::max(residual, (q * a.p2.x + t - b.p2.x).norm());
    residual = std::max(residual, (q * a.p1.n.vec() - b.p1.n.vec()).norm());
    residual = std::max(residual, (q * a.p2.n.vec() - b.p2.n.vec()).norm());

    AlignmentResult out{std::nullopt, residual};
    if (residual <= kAlignmentTol) out.transform = EuclideanTransform(t, OrthoMat3(q));
    return out;
}

std::optional<EuclideanTransform> find_alignment(const PosePair& a, const PosePair& b) {
    return align_pairs(a, b).transform;
}

std::pair<PosePair, PosePair> counterexample_witness() {
    const Vec3 e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
    const PosePair p{PosePoint(Vec3::Zero(), UnitVec3(e3)), PosePoint(e1, UnitVec3(e2))};
    const PosePair q{PosePoint(Vec3::Zero(), UnitVec3(e3)), PosePoint(e1, UnitVec3(e1))};
    return {p, q};
}

int invariant_dim(InvariantCollection c) {
    return c == InvariantCollection::universal ? 4 : 3;
}

Eigen::VectorXd invariant_vector(const PosePair& pr, InvariantCollection c) {
    if (c == InvariantCollection::universal) {
        const UniversalInvariants u = universal_invariants(pr);
        Eigen::VectorXd v(4);
        v << u.i1, u.i2, u.i3, u.i4;
        return v;
    }
    const PonitaInvariants p = ponita_invariants(pr);
    Eigen::VectorXd v(3);
    v << p.j1, p.j2, p.j3;
    return v;
}

}  // namespace poseinv
