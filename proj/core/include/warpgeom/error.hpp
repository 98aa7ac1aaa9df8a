#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace warpgeom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed warping-function text. `offset` is a byte offset into the source.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::string message, std::vector<std::string> expected = {})
        : Error("parse error at offset " + std::to_string(offset) + ": " + message),
          offset_(offset),
          message_(std::move(message)),
          expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& detail() const noexcept { return message_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::string message_;
    std::vector<std::string> expected_;
};

/// Evaluation outside the domain of an expression or operation (ln of a
/// nonpositive number, radius outside (0, Λ), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// An iterative or adaptive method stopped before reaching its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// The computational window of a mesh does not cover the requested radius.
class CoverageError : public Error {
public:
    CoverageError(const std::string& what, double radius) : Error(what), radius_(radius) {}
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

/// Malformed mesh input or a mesh that violates TriMesh invariants.
class MeshError : public Error {
public:
    MeshError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class NonManifoldError : public MeshError {
public:
    NonManifoldError(const std::string& what, std::vector<std::pair<int, int>> edges)
        : MeshError(what), edges_(std::move(edges)) {}
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }

private:
    std::vector<std::pair<int, int>> edges_;
};

}  // namespace warpgeom
