#include "poseinv/geometry.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace poseinv {

bool all_finite(const Vec3& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

bool all_finite(const Mat3& m) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!std::isfinite(m(i, j))) return false;
    return true;
}

UnitVec3::UnitVec3(const Vec3& v) {
    if (!all_finite(v)) throw std::invalid_argument("UnitVec3: non-finite input");
    const double norm = v.norm();
    if (norm < kMinOrientationNorm)
        throw std::invalid_argument("UnitVec3: input norm below " +
                                    std::to_string(kMinOrientationNorm));
    // Inputs already on the sphere keep their bits (file round-trips stay
    // exact); anything else is normalized onto it.
    v_ = std::abs(norm - 1.0) <= kUnitNormTol ? v : Vec3(v / norm);
}

PosePoint::PosePoint(const Vec3& position, const UnitVec3& orientation)
    : x(position), n(orientation) {
    if (!all_finite(x)) throw std::invalid_argument("PosePoint: non-finite position");
}

OrthoMat3::OrthoMat3(const Mat3& m) : m_(m) {
    if (!all_finite(m)) throw std::invalid_argument("OrthoMat3: non-finite entries");
    const double defect = (m.transpose() * m - Mat3::Identity()).norm();
    if (defect > kOrthogonalityTol)
        throw std::invalid_argument("OrthoMat3: ||Q^T Q - I||_F = " + std::to_string(defect));
    const double det = m.determinant();
    if (std::abs(std::abs(det) - 1.0) > kOrthogonalityTol)
        throw std::invalid_argument("OrthoMat3: |det| != 1, det = " + std::to_string(det));
}

OrthoMat3 OrthoMat3::identity() { return OrthoMat3(Mat3::Identity()); }

double OrthoMat3::det_sign() const { return m_.determinant() < 0.0 ? -1.0 : 1.0; }

EuclideanTransform::EuclideanTransform(const Vec3& translation, const OrthoMat3& orthogonal)
    : t(translation), Q(orthogonal) {
    if (!all_finite(t)) throw std::invalid_argument("EuclideanTransform: non-finite translation");
}

EuclideanTransform EuclideanTransform::identity() {
    return EuclideanTransform(Vec3::Zero(), OrthoMat3::identity());
}

EuclideanTransform group_product(const EuclideanTransform& g2, const EuclideanTransform& g1) {
    return EuclideanTransform(g2.t + g2.Q.matrix() * g1.t,
                              OrthoMat3(g2.Q.matrix() * g1.Q.matrix()));
}

EuclideanTransform group_inverse(const EuclideanTransform& g) {
    const Mat3 qt = g.Q.matrix().transpose();
    return EuclideanTransform(-(qt * g.t), OrthoMat3(qt));
}

PosePoint act_on_pose(const EuclideanTransform& g, const PosePoint& p) {
    return PosePoint(g.t + g.Q.matrix() * p.x, UnitVec3(g.Q.matrix() * p.n.vec()));
}

PosePair act_on_pair(const EuclideanTransform& g, const PosePair& pr) {
    return PosePair{act_on_pose(g, pr.p1), act_on_pose(g, pr.p2)};
}

}  // namespace poseinv
