#ifndef LOWTHRUST_PROBLEM_HPP
#define LOWTHRUST_PROBLEM_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "lowthrust/core_model.hpp"
#include "lowthrust/units.hpp"

namespace lowthrust {

/// Fixed-endpoint transfer: leave `start` at start.t, arrive on `target` at
/// target.t. `target.raan` is the RAAN to meet at the final date on branch 0;
/// `raan_branch` adds whole revolutions.
struct TransferProblem {
    OrbitState start;
    OrbitState target;
    double f_max = 0.0; ///< m/s^2
    GravityModel g = GravityModel::earth();
    int raan_branch = 0;

    double t0() const { return start.t; }
    double tf() const { return target.t; }
    double duration() const { return target.t - start.t; }
    double target_raan() const { return target.raan + 2.0 * units::pi * raan_branch; }

    /// Mean drift rate needed to close the RAAN gap over the window.
    double required_mean_rate() const { return (target_raan() - start.raan) / duration(); }

    void validate() const
    {
        if (!start.valid() || !target.valid()) {
            throw std::invalid_argument("TransferProblem: invalid endpoint orbit");
        }
        if (!(target.t > start.t)) {
            throw std::invalid_argument("TransferProblem: final date must follow initial date");
        }
        if (!(f_max > 0.0)) {
            throw std::invalid_argument("TransferProblem: f_max must be positive");
        }
    }

    TransferProblem with_branch(int n) const
    {
        TransferProblem p = *this;
        p.raan_branch = n;
        return p;
    }
};

/// One row of a mission sequence table (t0, t1, t2, tf rows). SI units.
struct SequenceRow {
    std::string label;
    double t = 0.0;
    double v = 0.0;
    double inc = 0.0;
    double raan = 0.0;
    double rate = 0.0;    ///< precession rate, rad/s
    double impulse = 0.0; ///< cumulative velocity impulse, m/s
};

using SequenceTable = std::vector<SequenceRow>;

} // namespace lowthrust

#endif // LOWTHRUST_PROBLEM_HPP
