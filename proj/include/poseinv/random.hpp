#pragma once

#include <cstdint>
#include <random>

#include "poseinv/geometry.hpp"

namespace poseinv {

/// Deterministic pseudo-random source. All derived draws (uniform, normal,
/// sphere, orthogonal group) are built from mt19937_64 output with fixed
/// arithmetic, so a fixed seed reproduces the sequence bit-for-bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (two uniforms per value).
    double normal();

    bool bernoulli(double p = 0.5);

    /// Uniform point in the cube [-half_extent, half_extent]^3.
    Vec3 box_point(double half_extent);

    /// Uniform direction on the sphere (normalized Gaussian triple).
    UnitVec3 unit_vector();

private:
    std::mt19937_64 gen_;
};

/// Haar-uniform rotation from a uniform unit quaternion.
OrthoMat3 random_rotation(Rng& rng);

/// Haar-uniform element of O(3): a uniform rotation whose first column is
/// sign-flipped with probability 1/2, covering both components.
OrthoMat3 random_orthogonal(Rng& rng);

PosePoint random_pose(Rng& rng, double box_half = 5.0);
PosePair random_pair(Rng& rng, double box_half = 5.0);
EuclideanTransform random_transform(Rng& rng, double box_half = 5.0);

}  // namespace poseinv
