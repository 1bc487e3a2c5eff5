#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpow/consensus.hpp"
#include "qpow/quantum.hpp"
#include "qpow/schedule.hpp"

namespace qpow::consensus {

enum class IssueSeverity { warning, violation };

struct ValidationIssue {
    IssueSeverity severity;
    int epoch_index;  // 1-based index of the epoch the issue is anchored to
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    /// Warnings don't make a schedule invalid; violations do.
    bool valid() const {
        for (const auto& i : issues)
            if (i.severity == IssueSeverity::violation) return false;
        return true;
    }
};

/// Check a schedule against the retarget rule and its own bookkeeping:
/// per-epoch mining times, running sums, difficulty transitions, and
/// timestamp ordering. `tol` is relative to the magnitude of the value
/// being checked (floored at 1), so the default is strict enough for
/// generator output while 1e-4 absorbs 6-significant-digit CSV rounding.
/// Retarget violations are anchored to the epoch that wrote the offending
/// duration, not the epoch that inherited the wrong difficulty.
inline ValidationReport validate_schedule(const schedule::AttackSchedule& s,
                                          const ConsensusParams& params,
                                          double tol = 1e-9) {
    validate(params);
    quantum::validate(s.speed);
    if (s.epochs.empty())
        throw std::domain_error("schedule has no epochs");
    if (!(tol > 0.0))
        throw std::domain_error("tolerance must be positive");

    ValidationReport report;
    auto violation = [&](int index, std::string msg) {
        report.issues.push_back(
            {IssueSeverity::violation, index, std::move(msg)});
    };
    auto close = [&](double got, double want) {
        const double scale = std::max({1.0, std::fabs(got), std::fabs(want)});
        return std::fabs(got - want) <= tol * scale;
    };

    double cpow = 0.0, real = 0.0, ts = 0.0;
    for (std::size_t i = 0; i < s.epochs.size(); ++i) {
        const auto& e = s.epochs[i];
        const int expected_index = static_cast<int>(i) + 1;
        if (e.index != expected_index)
            violation(expected_index,
                      "epoch numbered " + std::to_string(e.index) +
                          " where " + std::to_string(expected_index) +
                          " was expected");
        if (!(e.difficulty > 0.0))
            violation(e.index, "difficulty is not positive");
        if (!(e.timestamp_delta > 0.0))
            violation(e.index, "written duration is not positive");

        if (e.difficulty > 0.0) {
            const double mining =
                quantum::quantum_epoch_time(e.difficulty, s.speed);
            if (!close(e.mining_time, mining))
                violation(e.index,
                          "mining time " + std::to_string(e.mining_time) +
                              " does not match sqrt(difficulty)/r = " +
                              std::to_string(mining));
        }

        cpow += e.difficulty;
        real += e.mining_time;
        ts += e.timestamp_delta;
        if (!close(e.cpow, cpow))
            violation(e.index, "cumulative work is off its running sum");
        if (!close(e.real_time, real))
            violation(e.index, "real time is off its running sum");
        if (!close(e.timestamp, ts))
            violation(e.index, "timestamp is off its running sum");
        // Resynchronize on the recorded columns so one bad row doesn't
        // cascade into a violation at every later epoch.
        cpow = e.cpow;
        real = e.real_time;
        ts = e.timestamp;

        const double prev_ts = i == 0 ? 0.0 : s.epochs[i - 1].timestamp;
        if (!(e.timestamp > prev_ts))
            violation(e.index, "timestamps must be strictly increasing");

        if (i + 1 < s.epochs.size()) {
            const double next = adjust_difficulty(
                e.difficulty, e.timestamp_delta, params);
            if (!close(s.epochs[i + 1].difficulty, next))
                violation(e.index,
                          "retarget after this epoch should give difficulty " +
                              std::to_string(next) + ", schedule has " +
                              std::to_string(s.epochs[i + 1].difficulty));
        }

        if (e.timestamp > e.real_time +
                              tol * std::max(1.0, std::fabs(e.real_time)))
            report.issues.push_back(
                {IssueSeverity::warning, e.index,
                 "timestamp is ahead of real time (future-dated block)"});
    }
    return report;
}

}  // namespace qpow::consensus
