#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qpow::quantum {

/// Speed of a quantum miner relative to the honest network, at difficulty 1:
/// r = (honest epoch time) / (time this miner needs for a difficulty-1
/// epoch). r = 1 is parity with the whole network; plausible hardware sits
/// orders of magnitude below that (see feasibility.hpp).
struct MinerSpeed {
    double r = 1.0;
};

inline void validate(MinerSpeed speed) {
    if (!(speed.r > 0.0) || speed.r > 1.0)
        throw std::domain_error("miner speed must be in (0, 1], got " +
                                std::to_string(speed.r));
}

/// Time to mine one block at the given difficulty, in target-block-time
/// units. Grover search over a space with success probability 1/d needs
/// ~sqrt(d) of the difficulty-1 effort, so time scales with sqrt(d) rather
/// than the classical d.
inline double quantum_block_time(double difficulty, MinerSpeed speed) {
    validate(speed);
    if (!(difficulty > 0.0))
        throw std::domain_error("difficulty must be positive");
    return std::sqrt(difficulty) / speed.r;
}

/// Time to mine a whole epoch at the given difficulty, in epoch-time units.
/// Numerically identical to quantum_block_time: every block of the epoch
/// takes sqrt(d)/r block-times, so the epoch takes sqrt(d)/r epoch-times.
inline double quantum_epoch_time(double difficulty, MinerSpeed speed) {
    return quantum_block_time(difficulty, speed);
}

/// Effective speed of `machines` identical miners splitting one search
/// space: Grover parallelizes at sqrt(k), not k, and the result is capped at
/// network parity.
inline MinerSpeed parallel_speed(MinerSpeed base, int machines) {
    validate(base);
    if (machines < 1)
        throw std::domain_error("need at least one machine");
    return MinerSpeed{
        std::min(1.0, base.r * std::sqrt(static_cast<double>(machines)))};
}

}  // namespace qpow::quantum
