#pragma once

/// Dense complex matrix kernel shared by all physics layers: Kronecker
/// products, partial traces, eigendecompositions and linear solves.
/// Matrices are Eigen::MatrixXcd throughout; the semantic element order is
/// row-major, i.e. |i><j| maps to flat index i*d + j in vec_rowmajor().

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace qtm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-10;

inline bool all_finite(const ComplexMatrix& a) {
    return a.allFinite();
}

inline double hermiticity_defect(const ComplexMatrix& a) {
    return (a - ComplexMatrix(a.adjoint())).norm();
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol) {
    if (a.rows() != a.cols()) return false;
    return hermiticity_defect(a) <= tol * std::max(1.0, a.norm());
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
    return a.adjoint();
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// vec in the row-major convention: vec(rho)[i*d + j] = rho(i, j).
inline ComplexVector vec_rowmajor(const ComplexMatrix& rho) {
    ComplexVector v(rho.rows() * rho.cols());
    for (Index i = 0; i < rho.rows(); ++i)
        for (Index j = 0; j < rho.cols(); ++j)
            v(i * rho.cols() + j) = rho(i, j);
    return v;
}

inline ComplexMatrix unvec_rowmajor(const ComplexVector& v, Index d) {
    if (v.size() != d * d) throw DimensionError("unvec_rowmajor: size mismatch");
    ComplexMatrix m(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            m(i, j) = v(i * d + j);
    return m;
}

/// Reduced matrix over the kept subsystems (original order preserved).
/// dims lists the local dimensions of every subsystem, slowest index first.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho,
                                   const std::vector<Index>& dims,
                                   std::vector<Index> keep) {
    if (rho.rows() != rho.cols()) throw DimensionError("partial_trace: matrix not square");
    Index total = 1;
    for (Index d : dims) {
        if (d < 1) throw DimensionError("partial_trace: subsystem dimension < 1");
        total *= d;
    }
    if (total != rho.rows()) throw DimensionError("partial_trace: dims product != matrix dimension");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty()) throw DimensionError("partial_trace: keep set empty");
    for (Index k : keep)
        if (k < 0 || k >= static_cast<Index>(dims.size()))
            throw DimensionError("partial_trace: keep index out of range");

    const Index n = static_cast<Index>(dims.size());
    std::vector<Index> stride(n);
    Index acc = 1;
    for (Index i = n - 1; i >= 0; --i) {
        stride[i] = acc;
        acc *= dims[i];
    }
    std::vector<Index> traced;
    for (Index i = 0; i < n; ++i)
        if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);

    // Flat offsets for every kept and traced multi-index; the two sets occupy
    // disjoint tensor slots, so full offsets are sums of the partial ones.
    auto offsets = [&](const std::vector<Index>& subs) {
        Index count = 1;
        for (Index s : subs) count *= dims[s];
        std::vector<Index> off(count, 0);
        for (Index flat = 0; flat < count; ++flat) {
            Index rem = flat;
            for (Index si = static_cast<Index>(subs.size()) - 1; si >= 0; --si) {
                const Index d = dims[subs[si]];
                off[flat] += (rem % d) * stride[subs[si]];
                rem /= d;
            }
        }
        return off;
    };
    const std::vector<Index> keep_off = offsets(keep);
    const std::vector<Index> tr_off = offsets(traced);

    const Index dk = static_cast<Index>(keep_off.size());
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (Index r = 0; r < dk; ++r)
        for (Index c = 0; c < dk; ++c) {
            Complex s = 0.0;
            for (Index t : tr_off) s += rho(keep_off[r] + t, keep_off[c] + t);
            out(r, c) = s;
        }
    return out;
}

/// Eigendecomposition result; eigenvalues sorted descending by real part,
/// eigenvectors as matching columns.
struct Spectrum {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;
    bool diagonalizable = true;

    RealVector real_eigenvalues() const { return eigenvalues.real(); }
};

inline Spectrum eig_hermitian(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("eig_hermitian: matrix not square");
    if (!is_hermitian(a)) throw HermiticityError("eig_hermitian: input not Hermitian within 1e-10");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
    if (es.info() != Eigen::Success) throw SingularSystemError("eig_hermitian: solver failed");
    const Index d = a.rows();
    Spectrum s;
    s.eigenvalues.resize(d);
    s.eigenvectors.resize(d, d);
    for (Index i = 0; i < d; ++i) { // Eigen sorts ascending; flip to descending
        s.eigenvalues(i) = Complex(es.eigenvalues()(d - 1 - i), 0.0);
        s.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    return s;
}

inline Spectrum eig_general(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("eig_general: matrix not square");
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a, true);
    if (es.info() != Eigen::Success) throw SingularSystemError("eig_general: solver failed");
    const Index d = a.rows();
    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
        const Complex x = es.eigenvalues()(i), y = es.eigenvalues()(j);
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    Spectrum s;
    s.eigenvalues.resize(d);
    s.eigenvectors.resize(d, d);
    for (Index i = 0; i < d; ++i) {
        s.eigenvalues(i) = es.eigenvalues()(order[static_cast<std::size_t>(i)]);
        s.eigenvectors.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    }
    Eigen::FullPivLU<ComplexMatrix> lu(s.eigenvectors);
    s.diagonalizable = lu.isInvertible();
    return s;
}

/// Solve a x = b by LU with a residual check; throws SingularSystemError when
/// the system is singular within working precision.
inline ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols()) throw DimensionError("solve_linear: matrix not square");
    if (a.rows() != b.rows()) throw DimensionError("solve_linear: rhs dimension mismatch");
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    ComplexMatrix x = lu.solve(b);
    if (!x.allFinite()) throw SingularSystemError("solve_linear: singular system");
    const double resid = (a * x - b).norm();
    const double bound = 1e-10 * (a.norm() * x.norm() + b.norm());
    if (resid > bound) throw SingularSystemError("solve_linear: residual above bound");
    return x;
}

} // namespace qtm
