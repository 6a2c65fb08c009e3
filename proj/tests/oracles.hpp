// Test-only oracles, independent of the library's analytic code paths.
#pragma once

#include <array>
#include <cmath>

#include "poseinv/calculus.hpp"
#include "poseinv/invariants.hpp"
#include "poseinv/random.hpp"

namespace poseinv::testing {

/// First-order retraction along a tangent: step the positions linearly and
/// pull the stepped orientations back onto the sphere.
inline PosePair step_along(const PosePair& pr, const TangentPair& v, double h) {
    return PosePair{PosePoint(pr.p1.x + h * v.dx1, UnitVec3(pr.p1.n.vec() + h * v.dn1)),
                    PosePoint(pr.p2.x + h * v.dx2, UnitVec3(pr.p2.n.vec() + h * v.dn2))};
}

/// Central finite differences of the four invariants along the curve above.
inline std::array<double, 4> finite_difference_differential(const PosePair& pr,
                                                            const TangentPair& v,
                                                            double h = 1e-6) {
    const UniversalInvariants plus = universal_invariants(step_along(pr, v, h));
    const UniversalInvariants minus = universal_invariants(step_along(pr, v, -h));
    const double s = 1.0 / (2.0 * h);
    return {(plus.i1 - minus.i1) * s, (plus.i2 - minus.i2) * s, (plus.i3 - minus.i3) * s,
            (plus.i4 - minus.i4) * s};
}

/// Random tangent at a pair: free position rates, orientation rates projected
/// onto the tangent planes.
inline TangentPair random_tangent(Rng& rng, const PosePair& pr) {
    auto project = [](const Vec3& raw, const UnitVec3& n) {
        return Vec3(raw - raw.dot(n.vec()) * n.vec());
    };
    const Vec3 raw1 = rng.box_point(1.0);
    const Vec3 raw2 = rng.box_point(1.0);
    return TangentPair{rng.box_point(1.0), project(raw1, pr.p1.n), rng.box_point(1.0),
                       project(raw2, pr.p2.n)};
}

/// |a - b| <= tol * max(1, |b|): relative at large scale, absolute near zero.
inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace poseinv::testing
