#pragma once

#include <iosfwd>
#include <string>

#include "poseinv/kernel.hpp"

namespace poseinv {

// Orientation norm handling on read: deviations up to kOrientationWarnTol are
// re-normalized silently, up to kOrientationRejectTol with a warning, beyond
// that the file is rejected.
inline constexpr double kOrientationWarnTol = 1e-10;
inline constexpr double kOrientationRejectTol = 1e-6;

/// Line-oriented text format:
///   posegraph v1 <N> <C>
///   x y z nx ny nz w f1 ... fC     (N lines, whitespace-separated decimals)
/// Written with 17 significant digits so doubles round-trip exactly.
void write_posegraph(const PoseGraph& graph, std::ostream& out);
void write_posegraph_file(const PoseGraph& graph, const std::string& path);

/// Parses the format above. Throws PoseGraphParseError (with the 1-based
/// line number) on malformed input; orientation-norm warnings go to `warn`
/// when given.
PoseGraph read_posegraph(std::istream& in, std::ostream* warn = nullptr);
PoseGraph read_posegraph_file(const std::string& path, std::ostream* warn = nullptr);

}  // namespace poseinv
