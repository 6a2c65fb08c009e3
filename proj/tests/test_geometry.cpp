#include <doctest.h>

#include <cmath>
#include <limits>

#include "poseinv/geometry.hpp"
#include "poseinv/random.hpp"

using namespace poseinv;

namespace {

double transform_distance(const EuclideanTransform& a, const EuclideanTransform& b) {
    return std::max((a.t - b.t).norm(), (a.Q.matrix() - b.Q.matrix()).norm());
}

double pose_distance(const PosePoint& a, const PosePoint& b) {
    return std::max((a.x - b.x).norm(), (a.n.vec() - b.n.vec()).norm());
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("identity is neutral for the product") {
    Rng rng(1);
    const EuclideanTransform e = EuclideanTransform::identity();
    for (int t = 0; t < 1000; ++t) {
        const EuclideanTransform g = random_transform(rng);
        CHECK(transform_distance(group_product(e, g), g) <= 1e-15);
        CHECK(transform_distance(group_product(g, e), g) <= 1e-15);
    }
}

TEST_CASE("pure translations add") {
    const EuclideanTransform a(Vec3(1, 2, 3), OrthoMat3::identity());
    const EuclideanTransform b(Vec3(-4, 0.5, 7), OrthoMat3::identity());
    const EuclideanTransform ab = group_product(a, b);
    CHECK((ab.t - Vec3(-3, 2.5, 10)).norm() == 0.0);
    CHECK((ab.Q.matrix() - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("inverse round-trips to the identity") {
    Rng rng(2);
    const EuclideanTransform e = EuclideanTransform::identity();
    CHECK(transform_distance(group_inverse(e), e) == 0.0);

    const EuclideanTransform shift(Vec3(3, -1, 2), OrthoMat3::identity());
    CHECK((group_inverse(shift).t - Vec3(-3, 1, -2)).norm() == 0.0);

    for (int t = 0; t < 1000; ++t) {
        const EuclideanTransform g = random_transform(rng);
        CHECK(transform_distance(group_product(g, group_inverse(g)), e) <= 1e-12);
        CHECK(transform_distance(group_product(group_inverse(g), g), e) <= 1e-12);
    }
}

TEST_CASE("product is associative") {
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const EuclideanTransform a = random_transform(rng);
        const EuclideanTransform b = random_transform(rng);
        const EuclideanTransform c = random_transform(rng);
        CHECK(transform_distance(group_product(group_product(a, b), c),
                                 group_product(a, group_product(b, c))) <= 1e-12);
    }
}

TEST_CASE("action: identity, point reflection, compatibility") {
    Rng rng(4);
    const PosePoint p(Vec3(1, 0, 0), UnitVec3(Vec3(0, 0, 1)));
    CHECK(pose_distance(act_on_pose(EuclideanTransform::identity(), p), p) == 0.0);

    const EuclideanTransform reflect(Vec3::Zero(), OrthoMat3(-Mat3::Identity()));
    const PosePoint reflected = act_on_pose(reflect, p);
    CHECK((reflected.x - Vec3(-1, 0, 0)).norm() == 0.0);
    CHECK((reflected.n.vec() - Vec3(0, 0, -1)).norm() == 0.0);

    for (int t = 0; t < 1000; ++t) {
        const EuclideanTransform g1 = random_transform(rng);
        const EuclideanTransform g2 = random_transform(rng);
        const PosePoint q = random_pose(rng);
        CHECK(pose_distance(act_on_pose(group_product(g2, g1), q),
                            act_on_pose(g2, act_on_pose(g1, q))) <= 1e-12);
    }
}

TEST_CASE("pair action applies both slots") {
    Rng rng(5);
    const PosePair pr = random_pair(rng);
    CHECK(pose_distance(act_on_pair(EuclideanTransform::identity(), pr).p1, pr.p1) == 0.0);

    const EuclideanTransform g = random_transform(rng);
    const PosePair moved = act_on_pair(g, pr);
    CHECK(pose_distance(moved.p1, act_on_pose(g, pr.p1)) == 0.0);
    CHECK(pose_distance(moved.p2, act_on_pose(g, pr.p2)) == 0.0);
}

TEST_CASE("action keeps orientations on the sphere") {
    Rng rng(6);
    for (int t = 0; t < 500; ++t) {
        const PosePoint moved = act_on_pose(random_transform(rng), random_pose(rng));
        CHECK(std::abs(moved.n.vec().norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("constructors reject invalid input") {
    Mat3 skewed = Mat3::Identity();
    skewed(0, 1) = 1e-6;
    CHECK_THROWS_AS(OrthoMat3{skewed}, std::invalid_argument);
    CHECK_THROWS_AS(UnitVec3(Vec3(1e-9, 0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(UnitVec3(Vec3(std::numeric_limits<double>::quiet_NaN(), 0, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(PosePoint(Vec3(std::numeric_limits<double>::infinity(), 0, 0),
                              UnitVec3(Vec3(0, 0, 1))),
                    std::invalid_argument);

    // Barely inside the tolerance still passes.
    Mat3 ok = Mat3::Identity();
    ok(0, 0) = 1.0 + 1e-11;
    CHECK_NOTHROW(OrthoMat3{ok});
}

TEST_CASE("UnitVec3 normalizes") {
    const UnitVec3 n(Vec3(0, 3, 4));
    CHECK((n.vec() - Vec3(0, 0.6, 0.8)).norm() <= 1e-15);
}

TEST_CASE("sampling is reproducible for a fixed seed") {
    Rng a(42), b(42);
    for (int t = 0; t < 100; ++t) {
        const EuclideanTransform ga = random_transform(a);
        const EuclideanTransform gb = random_transform(b);
        CHECK(ga.t == gb.t);
        CHECK(ga.Q.matrix() == gb.Q.matrix());
        const PosePoint pa = random_pose(a);
        const PosePoint pb = random_pose(b);
        CHECK(pa.x == pb.x);
        CHECK(pa.n.vec() == pb.n.vec());
    }
}

TEST_CASE("orientation samples average to zero" * doctest::timeout(60)) {
    Rng rng(7);
    Vec3 sum = Vec3::Zero();
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) sum += rng.unit_vector().vec();
    const Vec3 mean = sum / draws;
    CHECK(std::abs(mean.x()) < 0.02);
    CHECK(std::abs(mean.y()) < 0.02);
    CHECK(std::abs(mean.z()) < 0.02);
}

TEST_CASE("orthogonal sampling covers both components evenly" * doctest::timeout(60)) {
    Rng rng(8);
    const int draws = 100000;
    int reflections = 0;
    for (int t = 0; t < draws; ++t) {
        const OrthoMat3 q = random_orthogonal(rng);
        CHECK((q.matrix().transpose() * q.matrix() - Mat3::Identity()).norm() <= 1e-10);
        if (q.det_sign() < 0) ++reflections;
    }
    const double fraction = static_cast<double>(reflections) / draws;
    CHECK(std::abs(fraction - 0.5) < 0.01);
}

TEST_CASE("positions stay inside the sampling box") {
    Rng rng(9);
    for (int t = 0; t < 1000; ++t) {
        const PosePoint p = random_pose(rng, 2.5);
        CHECK(p.x.cwiseAbs().maxCoeff() <= 2.5);
    }
}

}  // TEST_SUITE
