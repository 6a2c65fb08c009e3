#pragma once

#include <Eigen/Core>

namespace poseinv {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Validation tolerances for the geometric types.
inline constexpr double kUnitNormTol = 1e-12;        // stored unit vectors satisfy |norm - 1| <= this
inline constexpr double kMinOrientationNorm = 1e-8;  // below this, normalization is refused
inline constexpr double kOrthogonalityTol = 1e-10;   // Frobenius tolerance on Q^T Q - I

bool all_finite(const Vec3& v);
bool all_finite(const Mat3& m);

/// A direction on the unit sphere. The constructor normalizes its input and
/// rejects non-finite or near-zero vectors rather than guessing a direction.
class UnitVec3 {
public:
    explicit UnitVec3(const Vec3& v);

    const Vec3& vec() const { return v_; }
    double dot(const Vec3& other) const { return v_.dot(other); }
    double dot(const UnitVec3& other) const { return v_.dot(other.v_); }

private:
    Vec3 v_;
};

/// A point of position-orientation space: a position in R^3 with a unit
/// orientation vector attached.
struct PosePoint {
    Vec3 x;
    UnitVec3 n;

    PosePoint(const Vec3& position, const UnitVec3& orientation);
};

/// An ordered pair of pose points, the domain of the pair invariants.
struct PosePair {
    PosePoint p1;
    PosePoint p2;
};

/// A 3x3 orthogonal matrix (rotation or reflection). The constructor enforces
/// Q^T Q = I to kOrthogonalityTol and |det Q| = 1.
class OrthoMat3 {
public:
    explicit OrthoMat3(const Mat3& m);

    static OrthoMat3 identity();

    const Mat3& matrix() const { return m_; }
    /// +1 or -1: which component of O(3) the matrix lies in.
    double det_sign() const;

private:
    Mat3 m_;
};

/// An element (t, Q) of the Euclidean group: an orthogonal map followed by a
/// translation. Covers both rotations and reflections.
struct EuclideanTransform {
    Vec3 t;
    OrthoMat3 Q;

    EuclideanTransform(const Vec3& translation, const OrthoMat3& orthogonal);
    static EuclideanTransform identity();
};

/// Group product (t2 + Q2 t1, Q2 Q1); applying the result equals applying g1
/// then g2.
EuclideanTransform group_product(const EuclideanTransform& g2, const EuclideanTransform& g1);

/// Inverse element: product in either order gives the identity.
EuclideanTransform group_inverse(const EuclideanTransform& g);

/// Action on a pose point: (t, Q) acting on (x, n) gives (t + Q x, Q n).
PosePoint act_on_pose(const EuclideanTransform& g, const PosePoint& p);

/// Componentwise action on a pair.
PosePair act_on_pair(const EuclideanTransform& g, const PosePair& pr);

}  // namespace poseinv
