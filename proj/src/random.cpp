#include "poseinv/random.hpp"

#include <cmath>

namespace poseinv {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double Rng::uniform() {
    // 53 high bits -> [0, 1) on the double grid.
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

Vec3 Rng::box_point(double half_extent) {
    const double x = uniform(-half_extent, half_extent);
    const double y = uniform(-half_extent, half_extent);
    const double z = uniform(-half_extent, half_extent);
    return Vec3(x, y, z);
}

UnitVec3 Rng::unit_vector() {
    while (true) {
        const double a = normal();
        const double b = normal();
        const double c = normal();
        const Vec3 v(a, b, c);
        if (v.norm() >= kMinOrientationNorm) return UnitVec3(v);
    }
}

OrthoMat3 random_rotation(Rng& rng) {
    // Uniform unit quaternion (4 Gaussians normalized) -> SO(3).
    double w, x, y, z, norm;
    do {
        w = rng.normal();
        x = rng.normal();
        y = rng.normal();
        z = rng.normal();
        norm = std::sqrt(w * w + x * x + y * y + z * z);
    } while (norm < kMinOrientationNorm);
    w /= norm;
    x /= norm;
    y /= norm;
    z /= norm;

    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
        2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
        2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
    return OrthoMat3(r);
}

OrthoMat3 random_orthogonal(Rng& rng) {
    Mat3 r = random_rotation(rng).matrix();
    if (rng.bernoulli()) r.col(0) = -r.col(0);
    return OrthoMat3(r);
}

PosePoint random_pose(Rng& rng, double box_half) {
    return PosePoint(rng.box_point(box_half), rng.unit_vector());
}

PosePair random_pair(Rng& rng, double box_half) {
    PosePoint p1 = random_pose(rng, box_half);
    PosePoint p2 = random_pose(rng, box_half);
    return PosePair{p1, p2};
}

EuclideanTransform random_transform(Rng& rng, double box_half) {
    const Vec3 t = rng.box_point(box_half);
    return EuclideanTransform(t, random_orthogonal(rng));
}

}  // namespace poseinv
