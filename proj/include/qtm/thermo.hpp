#pragma once

/// Steady-state heat currents Qdot_l = Tr{H L_l(rho)} and the entropy
/// production rate Sdot = -sum_l beta_l Qdot_l, valid for positive and
/// negative effective inverse temperatures (betas dimensionless, energies in
/// units where hbar = kB = 1).

#include <map>
#include <set>
#include <string>

#include "lindblad.hpp"

namespace qtm {

struct ThermoReport {
    std::map<std::string, double> heat_currents;
    double entropy_rate = 0.0;            // -sum_l beta_l * Qdot_l
    double entropy_rate_normalized = 0.0; // entropy_rate / normalization rate
};

/// Energy flow into the system attributed to the channels carrying `label`.
inline double heat_current(const OpenSystem& sys, const ComplexMatrix& rho,
                           const std::string& label) {
    if (rho.rows() != sys.dimension || rho.cols() != sys.dimension)
        throw DimensionError("heat_current: dimension mismatch");
    bool found = false;
    ComplexMatrix l_rho = ComplexMatrix::Zero(sys.dimension, sys.dimension);
    for (const auto& c : sys.channels) {
        if (c.label != label) continue;
        found = true;
        if (c.rate == 0.0) continue;
        l_rho += (0.5 * c.rate) * dissipator(c.jump, rho);
    }
    if (!found) throw UnknownBathError("heat_current: no channel labeled '" + label + "'");
    return (sys.hamiltonian * l_rho).trace().real();
}

/// Full report at a steady state. Heat-bath labels are those of non-neutral
/// channels; each needs an entry in `betas`. Neutral (dephasing-like)
/// channels carry no heat label and are excluded. The normalization rate
/// defaults to the largest absorption rate (the common pump).
inline ThermoReport entropy_rate(const OpenSystem& sys, const ComplexMatrix& rho,
                                 const std::map<std::string, double>& betas,
                                 double normalization_rate = 0.0) {
    std::set<std::string> labels;
    for (const auto& c : sys.channels)
        if (c.direction != Direction::neutral) labels.insert(c.label);

    ThermoReport report;
    for (const auto& label : labels) {
        auto it = betas.find(label);
        if (it == betas.end())
            throw MissingBetaError("entropy_rate: no beta supplied for bath '" + label + "'");
        const double q = heat_current(sys, rho, label);
        report.heat_currents[label] = q;
        report.entropy_rate -= it->second * q;
    }
    double norm = normalization_rate;
    if (norm <= 0.0) {
        for (const auto& c : sys.channels)
            if (c.direction == Direction::absorption) norm = std::max(norm, c.rate);
        if (norm <= 0.0) norm = sys.max_rate();
    }
    report.entropy_rate_normalized = norm > 0.0 ? report.entropy_rate / norm : 0.0;
    return report;
}

} // namespace qtm
