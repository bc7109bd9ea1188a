#pragma once

/// Quantum-jump unraveling of the master equation: Kraus and reversed-Kraus
/// operators, stochastic trajectories sampled from the steady state,
/// per-trajectory entropy production (boundary + conditional terms) and
/// ensemble estimators for the Second Law and the integral fluctuation
/// theorem <exp(-dS)> = 1.
///
/// For models whose jump operators map Hamiltonian eigenstates to eigenstates
/// (the diamond machine), the unraveling reduces to a classical Markov jump
/// process and trajectories are sampled exactly with competing-exponential
/// waiting times. A first-order fixed-dt Kraus sampler covers everything
/// else.

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lindblad.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace qtm {

struct KrausJump {
    std::string label;
    Direction direction = Direction::neutral;
    ComplexMatrix op;
};

struct KrausSet {
    double dt = 0.0;
    ComplexMatrix no_jump; // K0 = 1 - dt*(iH + (1/2) sum rate*o^dag o)
    std::vector<KrausJump> jumps;
    ComplexMatrix reversed_no_jump; // K0^dag once populated
    std::vector<KrausJump> reversed;
    double completeness_defect = 0.0;  // ||K0^dag K0 + sum K^dag K - 1||
    double completeness_constant = 0.0; // defect / dt^2
};

/// First-order Kraus decomposition with K = sqrt(rate*dt) * jump.
inline KrausSet kraus_set(const OpenSystem& sys, double dt) {
    if (!(dt > 0.0)) throw TimestepError("kraus_set: dt must be > 0");
    if (dt * sys.max_rate() >= 0.05)
        throw TimestepError("kraus_set: dt * max rate must stay below 0.05");
    const Index d = sys.dimension;
    const Complex I(0.0, 1.0);
    KrausSet ks;
    ks.dt = dt;
    ComplexMatrix decay = ComplexMatrix::Zero(d, d);
    for (const auto& c : sys.channels) {
        if (c.rate == 0.0) continue;
        ks.jumps.push_back({c.label, c.direction, std::sqrt(c.rate * dt) * c.jump});
        decay += 0.5 * c.rate * (c.jump.adjoint() * c.jump);
    }
    ks.no_jump = ComplexMatrix::Identity(d, d) - dt * (I * sys.hamiltonian + decay);
    ComplexMatrix sum = ks.no_jump.adjoint() * ks.no_jump;
    for (const auto& j : ks.jumps) sum += j.op.adjoint() * j.op;
    ks.completeness_defect = (sum - ComplexMatrix::Identity(d, d)).norm();
    ks.completeness_constant = ks.completeness_defect / (dt * dt);
    return ks;
}

namespace detail {

/// W^s = exp(s * (-beta/2) H) in the H eigenbasis.
inline ComplexMatrix boltzmann_half_weight(const ComplexMatrix& h, double beta, double sign) {
    const Spectrum sp = eig_hermitian(h);
    const RealVector e = sp.real_eigenvalues();
    ComplexVector w(e.size());
    for (Index i = 0; i < e.size(); ++i) w(i) = std::exp(sign * (-0.5 * beta) * e(i));
    return sp.eigenvectors * w.asDiagonal() * sp.eigenvectors.adjoint();
}

inline Direction flip(Direction d) {
    if (d == Direction::emission) return Direction::absorption;
    if (d == Direction::absorption) return Direction::emission;
    return Direction::neutral;
}

} // namespace detail

/// Reversed operators K~ = sqrt(rho_inf) K^dag sqrt(rho_inf)^(-1) with
/// rho_inf = exp(-beta H) the (unnormalized) equilibrium weight of the
/// operator's bath, and K0~ = K0^dag. Negative beta is legal: the weight only
/// enters through the similarity conjugation. For an emission jump of energy
/// w the forward/reverse rate ratio at eigenstates is exp(+beta*w).
inline KrausSet reversed_kraus(KrausSet kraus, const std::map<std::string, double>& betas,
                               const ComplexMatrix& h) {
    kraus.reversed.clear();
    kraus.reversed.reserve(kraus.jumps.size());
    for (const auto& j : kraus.jumps) {
        double beta = 0.0;
        if (auto it = betas.find(j.label); it != betas.end()) beta = it->second;
        else if (j.direction != Direction::neutral)
            throw MissingBetaError("reversed_kraus: no beta for bath '" + j.label + "'");
        const ComplexMatrix w = detail::boltzmann_half_weight(h, beta, +1.0);
        const ComplexMatrix w_inv = detail::boltzmann_half_weight(h, beta, -1.0);
        kraus.reversed.push_back({j.label, detail::flip(j.direction),
                                  w * j.op.adjoint() * w_inv});
    }
    kraus.reversed_no_jump = kraus.no_jump.adjoint();
    return kraus;
}

struct JumpEvent {
    double time = 0.0;
    std::string label;
    Direction direction = Direction::neutral;
    double delta_q = 0.0; // system energy change carried by the jump
};

struct TrajectoryRecord {
    double t0 = 0.0;
    double tN = 0.0;
    int initial_index = 0;
    int final_index = 0;
    std::vector<JumpEvent> events;
    double ds_boundary = 0.0;
    double ds_conditional = 0.0;
    double ds_total = 0.0;
};

struct TrajectoryOptions {
    /// Fallback sampler step; <= 0 picks 0.01 / max rate.
    double dt = 0.0;
    /// Skip the exact waiting-time path even when the model is classical.
    bool force_fixed_dt = false;
};

namespace detail {

struct ClassicalJumpModel {
    ComplexMatrix basis;        // orthonormal columns
    RealVector energies;        // <b_i|H|b_i>
    RealVector weights;         // steady-state occupation per basis state
    struct Transition {
        int from = 0, to = 0;
        double rate = 0.0;   // rate_c * |<to|o_c|from>|^2
        double beta = 0.0;   // of the channel's bath
        std::string label;
        Direction direction = Direction::neutral;
    };
    std::vector<Transition> transitions;
};

/// Per-label inverse temperatures from the emission/absorption rate pair,
/// beta = ln(rate_em / rate_abs). Neutral channels get beta = 0.
inline std::map<std::string, double> infer_betas(const OpenSystem& sys) {
    std::map<std::string, double> em, ab;
    std::map<std::string, double> betas;
    for (const auto& c : sys.channels) {
        if (c.direction == Direction::emission) em[c.label] = c.rate;
        else if (c.direction == Direction::absorption) ab[c.label] = c.rate;
        else betas[c.label] = 0.0;
    }
    for (const auto& [label, rate_em] : em) {
        auto it = ab.find(label);
        if (it == ab.end() || !(it->second > 0.0) || !(rate_em > 0.0))
            throw MissingBetaError(
                "trajectories: bath '" + label +
                "' lacks a positive emission/absorption rate pair; beta not inferable");
        betas[label] = std::log(rate_em / it->second);
    }
    for (const auto& [label, rate] : ab)
        if (!em.count(label))
            throw MissingBetaError("trajectories: bath '" + label + "' has no emission channel");
    return betas;
}

/// Try to reduce the unraveling to a classical jump process in `basis`.
inline std::optional<ClassicalJumpModel> classical_model(const OpenSystem& sys,
                                                         const ComplexMatrix& rho,
                                                         const ComplexMatrix& basis) {
    const Index d = sys.dimension;
    const double tol = 1e-10;
    ClassicalJumpModel model;
    model.basis = basis;

    const ComplexMatrix h_b = basis.adjoint() * sys.hamiltonian * basis;
    const double h_scale = std::max(1.0, h_b.norm());
    if ((h_b - ComplexMatrix(h_b.diagonal().asDiagonal())).norm() > tol * h_scale)
        return std::nullopt;
    model.energies = h_b.diagonal().real();

    const std::map<std::string, double> betas = infer_betas(sys);
    for (const auto& c : sys.channels) {
        if (c.rate == 0.0) continue;
        const ComplexMatrix m = basis.adjoint() * c.jump * basis;
        const double scale = std::max(1.0, m.norm());
        for (Index col = 0; col < d; ++col) {
            Index target = -1;
            for (Index row = 0; row < d; ++row) {
                if (std::abs(m(row, col)) <= tol * scale) continue;
                if (target >= 0) return std::nullopt; // spreads over two states
                target = row;
            }
            if (target < 0) continue;
            ClassicalJumpModel::Transition t;
            t.from = static_cast<int>(col);
            t.to = static_cast<int>(target);
            t.rate = c.rate * std::norm(m(target, col));
            t.beta = betas.at(c.label);
            t.label = c.label;
            t.direction = c.direction;
            model.transitions.push_back(std::move(t));
        }
    }

    RealVector w = (basis.adjoint() * rho * basis).diagonal().real();
    double total = 0.0;
    for (Index i = 0; i < d; ++i) {
        w(i) = std::max(0.0, w(i));
        total += w(i);
    }
    if (total <= 0.0) return std::nullopt;
    model.weights = w / total;
    return model;
}

inline int draw_index(const RealVector& weights, std::mt19937_64& eng) {
    const double u = uniform_closed_open(eng);
    double acc = 0.0;
    int last_positive = 0;
    for (Index i = 0; i < weights.size(); ++i) {
        if (weights(i) > 0.0) last_positive = static_cast<int>(i);
        acc += weights(i);
        if (u < acc) return static_cast<int>(i);
    }
    return last_positive; // rounding pushed the cumulative sum below u
}

inline TrajectoryRecord sample_exact(const ClassicalJumpModel& model, double duration,
                                     std::mt19937_64& eng) {
    TrajectoryRecord rec;
    rec.t0 = 0.0;
    rec.tN = duration;
    int state = draw_index(model.weights, eng);
    rec.initial_index = state;

    std::vector<std::vector<const ClassicalJumpModel::Transition*>> out(
        static_cast<std::size_t>(model.energies.size()));
    for (const auto& t : model.transitions) out[static_cast<std::size_t>(t.from)].push_back(&t);

    double t = 0.0;
    for (;;) {
        const auto& options = out[static_cast<std::size_t>(state)];
        double total = 0.0;
        for (const auto* tr : options) total += tr->rate;
        if (total <= 0.0) break; // dark state
        t += -std::log(uniform_open_closed(eng)) / total;
        if (t >= duration) break;
        double u = uniform_closed_open(eng) * total;
        const ClassicalJumpModel::Transition* chosen = options.back();
        for (const auto* tr : options) {
            u -= tr->rate;
            if (u < 0.0) {
                chosen = tr;
                break;
            }
        }
        const double dq = model.energies(chosen->to) - model.energies(chosen->from);
        rec.events.push_back({t, chosen->label, chosen->direction, dq});
        rec.ds_conditional += -chosen->beta * dq;
        state = chosen->to;
    }
    rec.final_index = state;

    const double p0 = model.weights(rec.initial_index);
    const double p1 = model.weights(rec.final_index);
    if (p1 <= 0.0)
        throw BoundaryWeightError("sample_trajectory: zero steady-state weight at final state");
    rec.ds_boundary = std::log(p0) - std::log(p1);
    rec.ds_total = rec.ds_boundary + rec.ds_conditional;
    return rec;
}

inline TrajectoryRecord sample_fixed_dt(const OpenSystem& sys, const ComplexMatrix& rho,
                                        double duration, std::mt19937_64& eng, double dt) {
    const Spectrum sp = eig_hermitian(rho);
    RealVector weights = sp.real_eigenvalues();
    for (Index i = 0; i < weights.size(); ++i) weights(i) = std::max(0.0, weights(i));
    weights /= weights.sum();

    const long n_steps = std::max<long>(1, std::lround(duration / dt));
    const double step = duration / static_cast<double>(n_steps);
    KrausSet ks = kraus_set(sys, step); // throws TimestepError when incompatible
    ks = reversed_kraus(std::move(ks), detail::infer_betas(sys), sys.hamiltonian);

    TrajectoryRecord rec;
    rec.t0 = 0.0;
    rec.tN = duration;
    rec.initial_index = draw_index(weights, eng);
    ComplexVector psi = sp.eigenvectors.col(rec.initial_index);

    for (long k = 0; k < n_steps; ++k) {
        double u = uniform_closed_open(eng);
        const KrausJump* jumped = nullptr;
        const KrausJump* jumped_rev = nullptr;
        double p_forward = 0.0;
        ComplexVector next;
        for (std::size_t c = 0; c < ks.jumps.size(); ++c) {
            const ComplexVector candidate = ks.jumps[c].op * psi;
            const double p = candidate.squaredNorm();
            if (u < p) {
                jumped = &ks.jumps[c];
                jumped_rev = &ks.reversed[c];
                p_forward = p;
                next = candidate;
                break;
            }
            u -= p;
        }
        if (!jumped) {
            next = ks.no_jump * psi;
            p_forward = next.squaredNorm();
        }
        const double e_before = psi.dot(sys.hamiltonian * psi).real();
        psi = next / next.norm();
        const double e_after = psi.dot(sys.hamiltonian * psi).real();
        const ComplexMatrix& rev_op = jumped ? jumped_rev->op : ks.reversed_no_jump;
        const double p_reverse = (rev_op * psi).squaredNorm();
        rec.ds_conditional += std::log(p_forward) - std::log(p_reverse);
        if (jumped)
            rec.events.push_back({(static_cast<double>(k) + 1.0) * step, jumped->label,
                                  jumped->direction, e_after - e_before});
    }

    // Project the final state back onto the sampling eigenbasis.
    Index best = 0;
    double best_overlap = -1.0;
    for (Index i = 0; i < sp.eigenvectors.cols(); ++i) {
        const double ov = std::norm(ComplexVector(sp.eigenvectors.col(i)).dot(psi));
        if (ov > best_overlap) {
            best_overlap = ov;
            best = i;
        }
    }
    rec.final_index = static_cast<int>(best);
    if (weights(rec.final_index) <= 0.0)
        throw BoundaryWeightError("sample_trajectory: zero steady-state weight at final state");
    rec.ds_boundary = std::log(weights(rec.initial_index)) - std::log(weights(rec.final_index));
    rec.ds_total = rec.ds_boundary + rec.ds_conditional;
    return rec;
}

} // namespace detail

/// One stochastic realization started from the steady state; deterministic
/// for a fixed seed. The reverse-protocol initial distribution equals the
/// steady-state weights, which makes the boundary term average to zero.
inline TrajectoryRecord sample_trajectory(const OpenSystem& sys, const SteadyState& rho_ss,
                                          double duration, std::uint64_t seed,
                                          const TrajectoryOptions& opts = {}) {
    if (!(duration >= 0.0)) throw Error("sample_trajectory: duration must be >= 0");
    std::mt19937_64 eng(seed);

    ComplexMatrix basis;
    if (sys.jump_basis) basis = *sys.jump_basis;
    else basis = eig_hermitian(rho_ss.rho).eigenvectors;

    if (!opts.force_fixed_dt)
        if (auto model = detail::classical_model(sys, rho_ss.rho, basis))
            return detail::sample_exact(*model, duration, eng);

    const double dt = opts.dt > 0.0 ? opts.dt : 0.01 / sys.max_rate();
    return detail::sample_fixed_dt(sys, rho_ss.rho, duration, eng, dt);
}

/// Recompute both entropy terms of a finished record from explicit
/// steady-state weights and bath betas; updates the record and returns the
/// total.
inline double stochastic_entropy(TrajectoryRecord& record, const RealVector& pss_weights,
                                 const std::map<std::string, double>& betas) {
    if (record.initial_index < 0 || record.initial_index >= pss_weights.size() ||
        record.final_index < 0 || record.final_index >= pss_weights.size())
        throw Error("stochastic_entropy: record indices outside the weight vector");
    const double p0 = pss_weights(record.initial_index);
    const double p1 = pss_weights(record.final_index);
    if (p1 <= 0.0)
        throw BoundaryWeightError("stochastic_entropy: zero weight at final state");
    double cond = 0.0;
    for (const auto& ev : record.events) {
        auto it = betas.find(ev.label);
        if (it == betas.end())
            throw MissingBetaError("stochastic_entropy: no beta for bath '" + ev.label + "'");
        cond += -it->second * ev.delta_q;
    }
    record.ds_boundary = std::log(p0) - std::log(p1);
    record.ds_conditional = cond;
    record.ds_total = record.ds_boundary + record.ds_conditional;
    return record.ds_total;
}

struct EnsembleStats {
    std::size_t n = 0;
    double duration = 0.0;
    double mean_ds = 0.0;
    double se_ds = 0.0;
    double mean_exp_neg_ds = 0.0;
    double se_exp_neg_ds = 0.0;
    double rate_estimate = 0.0; // mean_ds / duration
};

inline EnsembleStats ensemble_estimators(const std::vector<TrajectoryRecord>& records) {
    if (records.size() < 2)
        throw InconsistentEnsembleError("ensemble_estimators: need at least 2 records");
    const double duration = records.front().tN - records.front().t0;
    for (const auto& r : records)
        if (std::abs((r.tN - r.t0) - duration) > 1e-12)
            throw InconsistentEnsembleError("ensemble_estimators: mixed durations");

    const double n = static_cast<double>(records.size());
    double sum = 0.0, sum_exp = 0.0;
    for (const auto& r : records) {
        sum += r.ds_total;
        sum_exp += std::exp(-r.ds_total);
    }
    const double mean = sum / n;
    const double mean_exp = sum_exp / n;
    double var = 0.0, var_exp = 0.0;
    for (const auto& r : records) {
        var += (r.ds_total - mean) * (r.ds_total - mean);
        var_exp += (std::exp(-r.ds_total) - mean_exp) * (std::exp(-r.ds_total) - mean_exp);
    }
    var /= n - 1.0;
    var_exp /= n - 1.0;

    EnsembleStats st;
    st.n = records.size();
    st.duration = duration;
    st.mean_ds = mean;
    st.se_ds = std::sqrt(var / n);
    st.mean_exp_neg_ds = mean_exp;
    st.se_exp_neg_ds = std::sqrt(var_exp / n);
    st.rate_estimate = duration > 0.0 ? mean / duration : 0.0;
    return st;
}

/// Independent trajectories with seeds derived from (base_seed, index);
/// reproducible for any worker count.
inline std::vector<TrajectoryRecord> run_ensemble(const OpenSystem& sys,
                                                  const SteadyState& rho_ss, std::size_t count,
                                                  double duration, std::uint64_t base_seed,
                                                  unsigned workers = 1,
                                                  const TrajectoryOptions& opts = {}) {
    std::vector<TrajectoryRecord> records(count);
    parallel_for(count, workers, [&](std::size_t i) {
        records[i] = sample_trajectory(sys, rho_ss, duration, derive_seed(base_seed, i), opts);
    });
    return records;
}

} // namespace qtm
