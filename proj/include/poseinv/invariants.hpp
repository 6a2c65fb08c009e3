#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>

#include "poseinv/geometry.hpp"

namespace poseinv {

// Tolerances of this module.
inline constexpr double kRealizableEigTol = 1e-10;  // Gram eigenvalues may dip this far below 0
inline constexpr double kAlignmentTol = 1e-8;       // max residual accepted as "same orbit"
inline constexpr double kDegenerateColumnNorm = 1e-6;

/// The four pair invariants, in order:
///   i1 = (x2 - x1) . n1        [length]
///   i2 = (x2 - x1) . n2        [length]
///   i3 = (x2 - x1) . (x2 - x1) [length^2, the squared distance]
///   i4 = n1 . n2               [dimensionless]
/// Every Euclidean invariant of a pose pair is a function of these.
struct UniversalInvariants {
    double i1;
    double i2;
    double i3;
    double i4;
};

/// The three-invariant collection used by prior position-orientation
/// convolution architectures:
///   j1 = (x2 - x1) . n1
///   j2 = || (x2 - x1) - j1 n1 ||  (>= 0)
///   j3 = arccos(n1 . n2)          (in [0, pi])
/// Not universal: see counterexample_witness().
struct PonitaInvariants {
    double j1;
    double j2;
    double j3;
};

/// Gram matrix of the vectors (n1, n2, x2 - x1):
///   [ 1   i4  i1 ]
///   [ i4  1   i2 ]
///   [ i1  i2  i3 ]
/// Positive semidefinite exactly when some pose pair realizes the tuple.
class GramMatrix {
public:
    explicit GramMatrix(const UniversalInvariants& inv);

    const Mat3& matrix() const { return m_; }
    double min_eigenvalue() const;

private:
    Mat3 m_;
};

UniversalInvariants universal_invariants(const PosePair& pr);
PonitaInvariants ponita_invariants(const PosePair& pr);
GramMatrix gram_matrix(const UniversalInvariants& inv);

/// True iff the Gram matrix is positive semidefinite (eigenvalues above
/// -kRealizableEigTol), i.e. some pose pair attains the tuple.
bool is_realizable(const UniversalInvariants& inv);

/// Builds a pose pair attaining the given invariants: factor the Gram matrix
/// by symmetric eigendecomposition (negative eigenvalues clamped to zero),
/// read the three vectors off the factor, place x1 at the origin.
///
/// Throws UnrealizableTuple if is_realizable fails, DegenerateOrientation if
/// factorization yields a near-zero orientation column.
PosePair representer(const UniversalInvariants& inv);

/// Procrustes fit over the full orthogonal group (reflections allowed)
/// mapping a's frame vectors onto b's, with t chosen to match positions.
/// residual is the max deviation over both positions and both orientations;
/// transform is set iff residual <= kAlignmentTol.
struct AlignmentResult {
    std::optional<EuclideanTransform> transform;
    double residual;
};

AlignmentResult align_pairs(const PosePair& a, const PosePair& b);

/// Some g with g * a = b (within kAlignmentTol), or nullopt when the pairs
/// lie on different orbits.
std::optional<EuclideanTransform> find_alignment(const PosePair& a, const PosePair& b);

/// The two pose pairs witnessing that the three-invariant collection is not
/// universal: ((0,e3),(e1,e2)) and ((0,e3),(e1,e1)). Their PonitaInvariants
/// coincide at (0, 1, pi/2) while the universal i2 is 0 on the first and 1 on
/// the second, so no Euclidean transform maps one to the other.
std::pair<PosePair, PosePair> counterexample_witness();

/// Selector for the kernel input features.
enum class InvariantCollection { universal, ponita };

int invariant_dim(InvariantCollection c);
Eigen::VectorXd invariant_vector(const PosePair& pr, InvariantCollection c);

}  // namespace poseinv
