#pragma once

#include <stdexcept>
#include <string>

namespace poseinv {

/// Requested a reconstruction from an invariant tuple whose Gram matrix is
/// not positive semidefinite; no pose pair realizes it.
class UnrealizableTuple : public std::runtime_error {
public:
    explicit UnrealizableTuple(const std::string& what) : std::runtime_error(what) {}
};

/// Gram factorization produced a near-zero orientation column. Cannot happen
/// for realizable tuples with unit diagonal; guards numerical corruption.
class DegenerateOrientation : public std::runtime_error {
public:
    explicit DegenerateOrientation(const std::string& what) : std::runtime_error(what) {}
};

/// A velocity handed to the differential violates the tangency constraint
/// (orientation rate not orthogonal to the orientation).
class TangencyViolation : public std::runtime_error {
public:
    explicit TangencyViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Training loss left the finite range; carries the offending epoch/value.
class NonFiniteLoss : public std::runtime_error {
public:
    explicit NonFiniteLoss(const std::string& what) : std::runtime_error(what) {}
};

/// A pose-graph file failed to parse; carries the 1-based line number.
class PoseGraphParseError : public std::runtime_error {
public:
    PoseGraphParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace poseinv
