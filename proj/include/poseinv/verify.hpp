#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poseinv/calculus.hpp"
#include "poseinv/invariants.hpp"

namespace poseinv {

// Suite tolerances.
inline constexpr double kInvarianceSuiteTol = 1e-9;    // componentwise invariance defect
inline constexpr double kRepresenterSuiteTol = 1e-8;   // alignment residual and invariant mismatch
inline constexpr double kEquivarianceSuiteTol = 1e-9;  // convolution feature discrepancy

/// Outcome of one property suite. `worst` is the quantity the suite bounds:
/// a max residual for the residual suites, the smallest fourth-singular-value
/// margin (sigma_4 / rank threshold) for the rank suite.
struct SuiteResult {
    std::string suite;
    int trials;
    std::uint64_t seed;
    double tolerance;
    double worst;
    bool passed;
};

/// Both invariant collections are constant along orbits: max componentwise
/// change under random group elements stays below tolerance.
SuiteResult run_invariance_suite(int trials, std::uint64_t seed);

/// Reconstruction round-trip: the representer of a random pair's invariants
/// aligns back onto the pair, and its invariants match the inputs.
SuiteResult run_representer_suite(int trials, std::uint64_t seed);

/// Random pairs give differential rank 4; the constructed degenerate fixtures
/// (coincident positions, equal orientations, collinear frame) give rank <= 3.
SuiteResult run_rank_suite(int trials, std::uint64_t seed);

/// Convolution with an invariant-fed kernel commutes with the group action.
SuiteResult run_equivariance_suite(int trials, std::uint64_t seed);

std::vector<SuiteResult> run_all_suites(int trials, std::uint64_t seed);

/// The degenerate pose pairs used by the rank suite (all off the spanning-
/// frame set, each with a forced dependency among the differentials).
std::vector<PosePair> degenerate_rank_fixtures();

}  // namespace poseinv
