#include "warpgeom/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "warpgeom/error.hpp"

namespace warpgeom {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < rows; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[cols[k]];
        y[i] = s;
    }
}

double CsrMatrix::at(int i, int j) const {
    auto first = cols.begin() + row_ptr[i];
    auto last = cols.begin() + row_ptr[i + 1];
    auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? values[static_cast<std::size_t>(it - cols.begin())] : 0.0;
}

double CsrMatrix::diagonal(int i) const { return at(i, i); }

CsrMatrix CsrBuilder::build() const {
    std::vector<Triplet> t = triplets_;
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    CsrMatrix m;
    m.rows = rows_;
    m.row_ptr.assign(static_cast<std::size_t>(rows_) + 1, 0);
    for (std::size_t k = 0; k < t.size();) {
        std::size_t e = k;
        double sum = 0.0;
        while (e < t.size() && t[e].i == t[k].i && t[e].j == t[k].j) sum += t[e++].v;
        m.cols.push_back(t[k].j);
        m.values.push_back(sum);
        m.row_ptr[static_cast<std::size_t>(t[k].i) + 1] += 1;
        k = e;
    }
    for (int i = 0; i < rows_; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
}

CgResult conjugate_gradient(const CsrMatrix& A, std::span<const double> b, std::span<const double> x0,
                            const SolverConfig& cfg) {
    const std::size_t n = static_cast<std::size_t>(A.rows);
    CgResult out;
    out.x.assign(n, 0.0);
    if (!x0.empty()) std::copy(x0.begin(), x0.end(), out.x.begin());

    std::vector<double> inv_diag(n), r(n), z(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = A.diagonal(static_cast<int>(i));
        if (!(d > 0.0)) throw PreconditionError("conjugate_gradient: nonpositive diagonal entry");
        inv_diag[i] = 1.0 / d;
    }
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) {
        std::fill(out.x.begin(), out.x.end(), 0.0);
        return out;
    }

    A.multiply(out.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    auto residual = [&] {
        double s = 0.0;
        for (double v : r) s += v * v;
        return std::sqrt(s) / bnorm;
    };
    double rel = residual();
    if (rel <= cfg.rel_tol) {
        out.relative_residual = rel;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        A.multiply(p, q);
        double pq = 0.0;
        for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
        if (!(pq > 0.0)) throw ConvergenceError("conjugate_gradient: matrix is not positive definite", rel);
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        rel = residual();
        out.iterations = it;
        if (rel <= cfg.rel_tol) {
            out.relative_residual = rel;
            return out;
        }
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw ConvergenceError("conjugate_gradient did not reach tolerance in " + std::to_string(cfg.max_iterations) +
                               " iterations",
                           rel);
}

}  // namespace warpgeom
