#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qpow/consensus.hpp"
#include "qpow/quantum.hpp"
#include "qpow/schedule.hpp"

namespace qpow::feasibility {

/// Hardware assumptions for turning a hash puzzle into a wall-clock speed
/// ratio. Defaults describe a present-day network (5e20 hashes/s aiming at
/// one block per 600 s) attacked by a single fault-tolerant machine running
/// 1600-gate-deep search iterations at a 10 GHz logical clock.
struct HardwareProfile {
    double classical_hashrate = 5e20;  // network hashes per second
    double block_seconds = 600.0;      // target seconds per block
    double circuit_depth = 1600.0;     // gate depth per search iteration
    double clock_hz = 1e10;            // logical gate rate
    double machines = 1.0;             // identical machines searching jointly
    double overhead_factor = 1.0;      // error correction / routing slowdown
};

inline void validate(const HardwareProfile& hw) {
    if (!(hw.classical_hashrate > 0.0))
        throw std::domain_error("classical hashrate must be positive");
    if (!(hw.block_seconds > 0.0))
        throw std::domain_error("block time must be positive");
    if (!(hw.circuit_depth > 0.0))
        throw std::domain_error("circuit depth must be positive");
    if (!(hw.clock_hz > 0.0))
        throw std::domain_error("clock rate must be positive");
    if (!(hw.machines >= 1.0))
        throw std::domain_error("need at least one machine");
    if (!(hw.overhead_factor >= 1.0))
        throw std::domain_error("overhead factor cannot be below 1");
}

/// Chance that a single hash meets the target: the network performs
/// hashrate * block_seconds hashes per block on average.
inline double per_hash_success_probability(const HardwareProfile& hw) {
    validate(hw);
    return 1.0 / (hw.block_seconds * hw.classical_hashrate);
}

/// Unstructured search needs ~sqrt(1/p) iterations to find a winning hash.
inline double grover_iterations(const HardwareProfile& hw) {
    validate(hw);
    return std::sqrt(hw.block_seconds * hw.classical_hashrate);
}

/// Wall-clock seconds for the quantum miner to produce one block at unit
/// difficulty. k machines split the search space, which only buys sqrt(k):
/// each searches a 1/k slice needing sqrt(1/(pk)) iterations.
inline double quantum_block_seconds(const HardwareProfile& hw) {
    validate(hw);
    return hw.overhead_factor * hw.circuit_depth * grover_iterations(hw) /
           (hw.clock_hz * std::sqrt(hw.machines));
}

/// Speed ratio r: how many difficulty-1 blocks the quantum miner finds per
/// honest block time. Capped at 1 — the difficulty scale is defined
/// relative to the honest network, and the schedules assume r <= 1.
inline quantum::MinerSpeed speed_ratio(const HardwareProfile& hw) {
    return quantum::MinerSpeed{
        std::min(1.0, hw.block_seconds / quantum_block_seconds(hw))};
}

enum class AttackVariant { Spike, SpikeAndDescent, MultiTop, Clamped };

/// Wall-clock duration of a full attack schedule, in years. The schedule's
/// real time is measured in epoch-times; one epoch-time is epoch_length
/// blocks at the target block interval.
inline double attack_duration_years(quantum::MinerSpeed speed,
                                    const consensus::ConsensusParams& params,
                                    AttackVariant variant) {
    schedule::AttackSchedule s;
    switch (variant) {
        case AttackVariant::Spike:
            s = schedule::generate_variant1(speed, params);
            break;
        case AttackVariant::SpikeAndDescent:
            s = schedule::generate_variant2(speed, params);
            break;
        case AttackVariant::MultiTop:
            s = schedule::generate_variant3(speed, params, 3);
            break;
        case AttackVariant::Clamped:
            s = schedule::generate_variant4(speed, params);
            break;
    }
    const double days = s.aggregates.total_real_time * params.epoch_length *
                        params.target_block_minutes / (60.0 * 24.0);
    return days / 365.25;
}

}  // namespace qpow::feasibility
