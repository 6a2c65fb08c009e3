#include "poseinv/calculus.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

#include "poseinv/errors.hpp"

namespace poseinv {

double tangency_defect(const PosePair& base, const TangentPair& v) {
    const double d1 = std::abs(v.dn1.dot(base.p1.n.vec()));
    const double d2 = std::abs(v.dn2.dot(base.p2.n.vec()));
    return std::max(d1, d2);
}

std::array<Vec3, 2> orthonormal_completion(const UnitVec3& n) {
    // Standard axis least aligned with n, then Gram-Schmidt.
    const Vec3& nv = n.vec();
    int axis = 0;
    double best = std::abs(nv(0));
    for (int k = 1; k < 3; ++k) {
        if (std::abs(nv(k)) < best) {
            best = std::abs(nv(k));
            axis = k;
        }
    }
    const Vec3 e = Vec3::Unit(axis);
    const Vec3 u = (e - e.dot(nv) * nv).normalized();
    const Vec3 w = nv.cross(u);
    return {u, w};
}

TangentBasis tangent_basis(const PosePair& pr) {
    TangentBasis basis{pr, {}};
    const Vec3 zero = Vec3::Zero();
    const auto c1 = orthonormal_completion(pr.p1.n);
    const auto c2 = orthonormal_completion(pr.p2.n);

    int slot = 0;
    for (int k = 0; k < 3; ++k) basis.directions[slot++] = TangentPair{Vec3::Unit(k), zero, zero, zero};
    for (const Vec3& u : c1) basis.directions[slot++] = TangentPair{zero, u, zero, zero};
    for (int k = 0; k < 3; ++k) basis.directions[slot++] = TangentPair{zero, zero, Vec3::Unit(k), zero};
    for (const Vec3& u : c2) basis.directions[slot++] = TangentPair{zero, zero, zero, u};
    return basis;
}

std::array<double, 4> differential(const PosePair& pr, const TangentPair& v) {
    const double defect = tangency_defect(pr, v);
    if (defect > kTangencyCheckTol)
        throw TangencyViolation("differential: tangency defect " + std::to_string(defect));

    const Vec3 dx = pr.p2.x - pr.p1.x;
    const Vec3 rel = v.dx2 - v.dx1;
    const Vec3& n1 = pr.p1.n.vec();
    const Vec3& n2 = pr.p2.n.vec();

    return {
        rel.dot(n1) + dx.dot(v.dn1),
        rel.dot(n2) + dx.dot(v.dn2),
        2.0 * rel.dot(dx),
        v.dn1.dot(n2) + n1.dot(v.dn2),
    };
}

bool frame_is_basis(const PosePair& pr) {
    Mat3 frame;
    frame.col(0) = pr.p2.x - pr.p1.x;
    frame.col(1) = pr.p1.n.vec();
    frame.col(2) = pr.p2.n.vec();
    return std::abs(frame.determinant()) > kFrameDetTol;
}

JacobianReport jacobian_report(const PosePair& pr) {
    JacobianReport report{pr, {}, {}, 0, false};
    const TangentBasis basis = tangent_basis(pr);
    for (int j = 0; j < 10; ++j) {
        const auto d = differential(pr, basis.directions[j]);
        for (int i = 0; i < 4; ++i) report.matrix(i, j) = d[i];
    }

    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 10>> svd(report.matrix);
    report.singular_values = svd.singularValues();

    const double threshold = kRankRelTol * std::max(report.singular_values(0), 1.0);
    report.rank = 0;
    for (int i = 0; i < 4; ++i)
        if (report.singular_values(i) > threshold) ++report.rank;

    report.frame_is_basis = frame_is_basis(pr);
    return report;
}

}  // namespace poseinv
