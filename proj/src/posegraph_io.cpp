#include "poseinv/posegraph_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "poseinv/errors.hpp"
#include "poseinv/format.hpp"

namespace poseinv {

void write_posegraph(const PoseGraph& graph, std::ostream& out) {
    out << "posegraph v1 " << graph.node_count() << ' ' << graph.channels() << '\n';
    for (int i = 0; i < graph.node_count(); ++i) {
        const PosePoint& p = graph.nodes[i];
        out << fmt17(p.x.x()) << ' ' << fmt17(p.x.y()) << ' ' << fmt17(p.x.z()) << ' '
            << fmt17(p.n.vec().x()) << ' ' << fmt17(p.n.vec().y()) << ' ' << fmt17(p.n.vec().z())
            << ' ' << fmt17(graph.weights(i));
        for (int c = 0; c < graph.channels(); ++c) out << ' ' << fmt17(graph.features(i, c));
        out << '\n';
    }
}

void write_posegraph_file(const PoseGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_posegraph(graph, out);
}

namespace {

std::vector<double> parse_numbers(const std::string& line, int line_no) {
    std::vector<double> values;
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw PoseGraphParseError(line_no, "not a number: '" + token + "'");
        }
        if (used != token.size())
            throw PoseGraphParseError(line_no, "trailing characters in '" + token + "'");
        if (!std::isfinite(v))
            throw PoseGraphParseError(line_no, "non-finite value: '" + token + "'");
        values.push_back(v);
    }
    return values;
}

}  // namespace

PoseGraph read_posegraph(std::istream& in, std::ostream* warn) {
    std::string line;
    if (!std::getline(in, line)) throw PoseGraphParseError(1, "empty input");

    std::istringstream header(line);
    std::string magic, version;
    long n = -1, c = -1;
    if (!(header >> magic >> version >> n >> c) || magic != "posegraph" || version != "v1")
        throw PoseGraphParseError(1, "expected header 'posegraph v1 <N> <C>'");
    if (n < 0 || c < 1) throw PoseGraphParseError(1, "need N >= 0 and C >= 1");

    std::vector<PosePoint> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    Eigen::MatrixXd features(n, c);
    Eigen::VectorXd weights(n);

    for (long i = 0; i < n; ++i) {
        const int line_no = static_cast<int>(i) + 2;
        if (!std::getline(in, line))
            throw PoseGraphParseError(line_no, "expected " + std::to_string(n) +
                                                   " node lines, file ended after " +
                                                   std::to_string(i));
        const std::vector<double> v = parse_numbers(line, line_no);
        if (static_cast<long>(v.size()) != 7 + c)
            throw PoseGraphParseError(line_no, "expected " + std::to_string(7 + c) +
                                                   " values, got " + std::to_string(v.size()));

        const Vec3 x(v[0], v[1], v[2]);
        const Vec3 raw_n(v[3], v[4], v[5]);
        const double norm_dev = std::abs(raw_n.norm() - 1.0);
        if (norm_dev > kOrientationRejectTol)
            throw PoseGraphParseError(line_no, "orientation norm deviates from 1 by " +
                                                   fmt17(norm_dev));
        if (norm_dev > kOrientationWarnTol && warn)
            *warn << "warning: line " << line_no << ": orientation norm off by " << fmt17(norm_dev)
                  << ", re-normalizing\n";

        if (!(v[6] > 0.0)) throw PoseGraphParseError(line_no, "weight must be strictly positive");

        nodes.emplace_back(x, UnitVec3(raw_n));
        weights(i) = v[6];
        for (long ch = 0; ch < c; ++ch) features(i, ch) = v[7 + ch];
    }
    return PoseGraph(std::move(nodes), std::move(features), std::move(weights));
}

PoseGraph read_posegraph_file(const std::string& path, std::ostream* warn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_posegraph(in, warn);
}

}  // namespace poseinv
