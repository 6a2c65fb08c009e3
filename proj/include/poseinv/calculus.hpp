#pragma once

#include <Eigen/Core>
#include <array>

#include "poseinv/geometry.hpp"

namespace poseinv {

inline constexpr double kTangencyCheckTol = 1e-8;  // differential() rejects beyond this
inline constexpr double kRankRelTol = 1e-8;        // singular values below tol*max(s1,1) count as 0
inline constexpr double kFrameDetTol = 1e-10;      // |det| threshold for the spanning-frame test

/// A velocity of a pose pair: position rates are free, orientation rates must
/// be orthogonal to the respective orientations.
struct TangentPair {
    Vec3 dx1;
    Vec3 dn1;
    Vec3 dx2;
    Vec3 dn2;
};

/// Max tangency defect |dn . n| over both slots.
double tangency_defect(const PosePair& base, const TangentPair& v);

/// Ten orthonormal tangent directions at a base pair: three position axes per
/// slot plus two completions of each orientation.
struct TangentBasis {
    PosePair base;
    std::array<TangentPair, 10> directions;
};

/// Two unit vectors completing n to an orthonormal frame. Deterministic: the
/// first is built from the standard axis least aligned with n, the second is
/// their cross product.
std::array<Vec3, 2> orthonormal_completion(const UnitVec3& n);

TangentBasis tangent_basis(const PosePair& pr);

/// Directional derivatives of the four invariants:
///   d i1 = (dx2 - dx1) . n1 + (x2 - x1) . dn1
///   d i2 = (dx2 - dx1) . n2 + (x2 - x1) . dn2
///   d i3 = 2 (dx2 - dx1) . (x2 - x1)
///   d i4 = dn1 . n2 + n1 . dn2
/// Throws TangencyViolation if the velocity's tangency defect exceeds
/// kTangencyCheckTol.
std::array<double, 4> differential(const PosePair& pr, const TangentPair& v);

/// True iff (x2 - x1, n1, n2) span R^3, i.e. |det| of the frame exceeds
/// kFrameDetTol. On this set the four differentials have full rank.
bool frame_is_basis(const PosePair& pr);

/// The 4x10 matrix of differentials over the tangent basis, its singular
/// values (descending), the derived rank, and the frame test.
struct JacobianReport {
    PosePair base;
    Eigen::Matrix<double, 4, 10> matrix;
    Eigen::Vector4d singular_values;
    int rank;
    bool frame_is_basis;
};

JacobianReport jacobian_report(const PosePair& pr);

}  // namespace poseinv
