#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpow::consensus {

/// Difficulty-retarget rules. Times are measured in epoch-time units (one
/// epoch-time = epoch_length * target_block_minutes of wall clock), so the
/// rules themselves are dimensionless.
struct ConsensusParams {
    int epoch_length = 2016;            // blocks per retarget window
    double target_block_minutes = 10.0; // intended block interval
    // Per-retarget bound on the difficulty change factor (e.g. 4 for the
    // Bitcoin-style limiter). Unset means the raw quotient is applied.
    std::optional<double> clamp_factor;
};

inline void validate(const ConsensusParams& p) {
    if (p.epoch_length <= 0)
        throw std::domain_error("epoch_length must be positive");
    if (!(p.target_block_minutes > 0.0))
        throw std::domain_error("target_block_minutes must be positive");
    if (p.clamp_factor && !(*p.clamp_factor > 1.0))
        throw std::domain_error("clamp_factor must exceed 1");
}

/// One retarget step: the protocol scales difficulty by the ratio of
/// intended to observed epoch duration (duration in epoch-time units, so
/// the intended duration is exactly 1). The observed duration comes from
/// block timestamps — which is the lever every schedule in this library
/// pulls on.
inline double adjust_difficulty(double old_difficulty,
                                double observed_duration,
                                const ConsensusParams& params) {
    validate(params);
    if (!(old_difficulty > 0.0))
        throw std::domain_error("difficulty must be positive");
    if (!(observed_duration > 0.0))
        throw std::domain_error("observed duration must be positive");
    double next = old_difficulty / observed_duration;
    if (params.clamp_factor) {
        next = std::min(next, old_difficulty * *params.clamp_factor);
        next = std::max(next, old_difficulty / *params.clamp_factor);
    }
    return next;
}

/// A chain reduced to what fork choice needs: per-epoch difficulty with the
/// epoch's closing timestamp, plus the block count.
struct EpochRecord {
    double difficulty;
    double end_timestamp;
};

struct ChainSummary {
    std::vector<EpochRecord> epochs;
    long long block_count = 0;
};

/// Total work: one full epoch at difficulty d contributes d units (the
/// expected number of difficulty-1 epochs' worth of hashing it represents).
inline double cumulative_work(const ChainSummary& chain) {
    double total = 0.0;
    double prev_ts = 0.0;
    bool first = true;
    for (const auto& e : chain.epochs) {
        if (!(e.difficulty > 0.0))
            throw std::domain_error("chain has a nonpositive difficulty");
        if (!first && !(e.end_timestamp > prev_ts))
            throw std::domain_error("chain timestamps are not increasing");
        prev_ts = e.end_timestamp;
        first = false;
        total += e.difficulty;
    }
    if (chain.block_count < 0)
        throw std::domain_error("negative block count");
    return total;
}

enum class ForkChoiceRule {
    CumulativeWork,  // heaviest total work wins
    LongestChain,    // most blocks wins
};

enum class ForkWinner { A, B, Tie };

/// Resolve a fork between two candidate chains under the given rule.
/// Tie means exact equality of the compared quantity.
inline ForkWinner fork_choice(const ChainSummary& a, const ChainSummary& b,
                              ForkChoiceRule rule) {
    double wa, wb;
    if (rule == ForkChoiceRule::CumulativeWork) {
        wa = cumulative_work(a);
        wb = cumulative_work(b);
    } else {
        cumulative_work(a);  // invariant checks only
        cumulative_work(b);
        wa = static_cast<double>(a.block_count);
        wb = static_cast<double>(b.block_count);
    }
    if (wa == wb) return ForkWinner::Tie;
    return wa > wb ? ForkWinner::A : ForkWinner::B;
}

}  // namespace qpow::consensus
