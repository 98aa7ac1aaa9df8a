#pragma once

#include <span>
#include <vector>

namespace warpgeom {

/// Compressed sparse row matrix.
struct CsrMatrix {
    int rows = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> cols;
    std::vector<double> values;

    void multiply(std::span<const double> x, std::span<double> y) const;
    double diagonal(int i) const;
    double at(int i, int j) const;
    std::size_t nonzeros() const { return values.size(); }
};

/// Triplet accumulator; duplicates are summed, columns sorted per row.
class CsrBuilder {
public:
    explicit CsrBuilder(int rows) : rows_(rows) {}
    void add(int i, int j, double v) { triplets_.push_back({i, j, v}); }
    CsrMatrix build() const;

private:
    struct Triplet {
        int i, j;
        double v;
    };
    int rows_;
    std::vector<Triplet> triplets_;
};

struct SolverConfig {
    double rel_tol = 1e-10;
    int max_iterations = 50000;
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems. `x0` may be
/// empty (zero start). Throws ConvergenceError with the final residual.
CgResult conjugate_gradient(const CsrMatrix& A, std::span<const double> b, std::span<const double> x0 = {},
                            const SolverConfig& cfg = {});

}  // namespace warpgeom
