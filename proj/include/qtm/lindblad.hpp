#pragma once

/// Lindblad machinery: dissipators, Liouvillian application, superoperator
/// vectorization and the exact steady-state solve.
///
/// Conventions, fixed project-wide:
///   master equation   d rho/dt = i [rho, H] + sum_c (rate_c / 2) D_{o_c}(rho)
///   dissipator        D_o(rho) = 2 o rho o^dag - {o^dag o, rho}
///   vectorization     |i><j|  ->  flat index i*d + j   (row-major)

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace qtm {

enum class Direction { emission, absorption, neutral };

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::emission: return "emission";
        case Direction::absorption: return "absorption";
        default: return "neutral";
    }
}

/// One jump channel; contributes (rate/2) * D_jump(rho) to the Liouvillian.
struct LindbladChannel {
    std::string label;
    Direction direction = Direction::neutral;
    ComplexMatrix jump;
    double rate = 0.0;
};

struct OpenSystem {
    ComplexMatrix hamiltonian;
    std::vector<LindbladChannel> channels;
    Index dimension = 0;
    /// Orthonormal basis (columns) in which every jump operator maps basis
    /// states to basis states, when the model has one. Enables the exact
    /// waiting-time trajectory sampler.
    std::optional<ComplexMatrix> jump_basis;

    OpenSystem() = default;
    OpenSystem(ComplexMatrix h, std::vector<LindbladChannel> chans,
               std::optional<ComplexMatrix> basis = std::nullopt)
        : hamiltonian(std::move(h)), channels(std::move(chans)), jump_basis(std::move(basis)) {
        if (hamiltonian.rows() != hamiltonian.cols())
            throw DimensionError("OpenSystem: Hamiltonian not square");
        dimension = hamiltonian.rows();
        if (!is_hermitian(hamiltonian))
            throw HermiticityError("OpenSystem: Hamiltonian not Hermitian within 1e-10");
        for (const auto& c : channels) {
            if (c.rate < 0.0) throw Error("OpenSystem: negative channel rate for '" + c.label + "'");
            if (c.jump.rows() != dimension || c.jump.cols() != dimension)
                throw DimensionError("OpenSystem: channel '" + c.label + "' dimension mismatch");
        }
        if (jump_basis && (jump_basis->rows() != dimension || jump_basis->cols() != dimension))
            throw DimensionError("OpenSystem: jump basis dimension mismatch");
    }

    double max_rate() const {
        double m = 0.0;
        for (const auto& c : channels) m = std::max(m, c.rate);
        return m;
    }

    double min_positive_rate() const {
        double m = 0.0;
        for (const auto& c : channels)
            if (c.rate > 0.0) m = (m == 0.0) ? c.rate : std::min(m, c.rate);
        return m;
    }
};

struct SteadyState {
    ComplexMatrix rho;
    double residual = 0.0; // Frobenius norm of L[rho]
    std::string method;
    Index dimension = 0;
};

inline ComplexMatrix dissipator(const ComplexMatrix& o, const ComplexMatrix& rho) {
    if (o.rows() != o.cols() || rho.rows() != rho.cols() || o.rows() != rho.rows())
        throw DimensionError("dissipator: dimension mismatch");
    const ComplexMatrix odo = o.adjoint() * o;
    return 2.0 * o * rho * o.adjoint() - odo * rho - rho * odo;
}

inline ComplexMatrix apply_liouvillian(const OpenSystem& sys, const ComplexMatrix& rho) {
    if (rho.rows() != sys.dimension || rho.cols() != sys.dimension)
        throw DimensionError("apply_liouvillian: dimension mismatch");
    const Complex I(0.0, 1.0);
    ComplexMatrix out = I * (rho * sys.hamiltonian - sys.hamiltonian * rho);
    for (const auto& c : sys.channels) {
        if (c.rate == 0.0) continue;
        out += (0.5 * c.rate) * dissipator(c.jump, rho);
    }
    return out;
}

namespace detail {

/// out += coeff * kron(a, b), skipping zero entries of a.
inline void add_kron(ComplexMatrix& out, Complex coeff, const ComplexMatrix& a,
                     const ComplexMatrix& b) {
    const Index br = b.rows(), bc = b.cols();
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex(0.0, 0.0)) continue;
            out.block(i * br, j * bc, br, bc) += (coeff * aij) * b;
        }
}

} // namespace detail

/// d^2 x d^2 matrix F with F vec(rho) = vec(L[rho]) in the row-major vec
/// convention (A rho B -> (A kron B^T) vec(rho)).
inline ComplexMatrix superoperator(const OpenSystem& sys) {
    const Index d = sys.dimension;
    const Complex I(0.0, 1.0);
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    ComplexMatrix f = ComplexMatrix::Zero(d * d, d * d);
    detail::add_kron(f, I, id, sys.hamiltonian.transpose()); // rho H
    detail::add_kron(f, -I, sys.hamiltonian, id);            // -H rho
    for (const auto& c : sys.channels) {
        if (c.rate == 0.0) continue;
        const double g = 0.5 * c.rate;
        const ComplexMatrix odo = c.jump.adjoint() * c.jump;
        detail::add_kron(f, 2.0 * g, c.jump, c.jump.conjugate());
        detail::add_kron(f, -g, odo, id);
        detail::add_kron(f, -g, id, odo.transpose());
    }
    return f;
}

namespace detail {

/// Deterministic pseudo-random rhs for the uniqueness probe.
inline ComplexVector probe_vector(Index size) {
    ComplexVector v(size);
    std::uint64_t state = 0x9E3779B97F4A7C15ULL;
    auto next = [&state] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return 2.0 * static_cast<double>(state >> 11) / 9007199254740992.0 - 1.0;
    };
    for (Index i = 0; i < size; ++i) v(i) = Complex(next(), next());
    return v;
}

} // namespace detail

/// Unique steady state via the trace-replacement solve of the vectorized
/// Liouvillian: row 0 (a redundant diagonal row; the diagonal rows of F sum
/// to zero) becomes the trace constraint, giving a nonsingular system exactly
/// when the stationary state is unique. Uniqueness is then probed through
/// the same factorization by a smallest-singular-value proxy: a second
/// stationary direction makes the replaced system (near-)singular, which an
/// inverse-iteration solve against a dense random rhs exposes as a
/// non-finite or exploding solution.
inline SteadyState steady_state(const OpenSystem& sys) {
    const Index d = sys.dimension;
    if (d > 1 && sys.min_positive_rate() == 0.0)
        throw DegenerateSteadyStateError("steady_state: no dissipation, stationary state not unique");
    const ComplexMatrix f = superoperator(sys);

    ComplexMatrix f_mod = f;
    f_mod.row(0).setZero();
    for (Index i = 0; i < d; ++i) f_mod(0, i * d + i) = 1.0;
    Eigen::PartialPivLU<Eigen::Ref<ComplexMatrix>> lu(f_mod); // in-place factorization
    ComplexVector b = ComplexVector::Zero(d * d);
    b(0) = 1.0;
    const ComplexVector x1 = lu.solve(b);
    if (!x1.allFinite()) throw SingularSystemError("steady_state: trace-constrained solve failed");

    if (d > 1) {
        const ComplexVector r = detail::probe_vector(d * d);
        const ComplexVector z = lu.solve(r);
        // sigma_min proxy ||r|| / ||z||, judged against the smallest physical
        // rate and the working-precision floor of the factorization
        const double floor_scale = 10.0 * 2.2e-16 * f.norm() / std::sqrt(static_cast<double>(d));
        const double threshold = std::max(1e-6 * sys.min_positive_rate(), floor_scale);
        if (!z.allFinite() || r.norm() <= threshold * z.norm())
            throw DegenerateSteadyStateError(
                "steady_state: second stationary direction detected (sigma_min proxy " +
                std::to_string(z.allFinite() ? r.norm() / z.norm() : 0.0) + ")");
    }

    ComplexMatrix rho = unvec_rowmajor(x1, d);
    rho = 0.5 * (rho + ComplexMatrix(rho.adjoint()));

    // Clip eigenvalue noise in [-1e-9, 0); anything more negative means the
    // solve did not produce a state.
    Spectrum sp = eig_hermitian(rho);
    RealVector ev = sp.real_eigenvalues();
    bool clipped = false;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-9)
            throw NumericalPSDError("steady_state: negative eigenvalue beyond tolerance");
        if (ev(i) < 0.0) {
            ev(i) = 0.0;
            clipped = true;
        }
    }
    if (clipped) {
        rho = sp.eigenvectors * ev.cast<Complex>().asDiagonal() * sp.eigenvectors.adjoint();
        rho = 0.5 * (rho + ComplexMatrix(rho.adjoint()));
    }
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) throw SingularSystemError("steady_state: zero-trace solution");
    rho /= tr;

    SteadyState ss;
    ss.rho = std::move(rho);
    ss.residual = (f * vec_rowmajor(ss.rho)).norm();
    ss.method = "dense-lu/trace-replacement";
    ss.dimension = d;

    const double bound = 1e-9 * sys.max_rate();
    if (ss.residual > bound)
        throw SingularSystemError("steady_state: residual " + std::to_string(ss.residual) +
                                  " above bound " + std::to_string(bound));
    return ss;
}

} // namespace qtm
