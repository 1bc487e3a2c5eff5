#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qpow/consensus.hpp"
#include "qpow/rng.hpp"
#include "qpow/schedule.hpp"

namespace qpow::race {

enum class HonestMode { Deterministic, PoissonMC };

/// How much of the network's nominal hashrate the honest side actually
/// applies while the attack runs, and how its block production is modeled.
struct HonestModel {
    HonestMode mode = HonestMode::Deterministic;
    double efficiency = 1.0;  // fraction of nominal honest hashrate, (0, 1]
    long long trials = 10000;  // Monte Carlo only
    std::uint64_t seed = 0;    // Monte Carlo only
};

struct ConfidenceInterval {
    double low;
    double high;
};

struct RaceOutcome {
    double attacker_cpow;
    double honest_cpow_expected;
    double win_probability;
    double margin;  // attacker_cpow - honest_cpow_expected
    std::optional<ConfidenceInterval> ci95;  // Monte Carlo only
};

inline void validate(const HonestModel& model) {
    if (!(model.efficiency > 0.0) || model.efficiency > 1.0)
        throw std::domain_error("honest efficiency must be in (0, 1]");
    if (model.mode == HonestMode::PoissonMC && model.trials < 1)
        throw std::domain_error("Monte Carlo needs at least one trial");
}

/// Cumulative work the honest network is expected to mine over the given
/// real time: it produces one unit of difficulty per epoch-time at full
/// efficiency, by the definition of the difficulty scale.
inline double expected_honest_cpow(double real_time, const HonestModel& model) {
    validate(model);
    return model.efficiency * real_time;
}

/// Probability that the attacker's chain carries more cumulative work than
/// the honest chain grown over the same wall-clock span. Deterministic mode
/// compares means; Monte Carlo mode draws the honest block count from a
/// Poisson distribution (block arrivals are memoryless), one decorrelated
/// RNG substream per trial, and reports a Wilson 95% interval.
///
/// No structural checks happen here — audit a schedule with
/// validate_schedule first if it comes from outside.
inline RaceOutcome race_win_probability(const schedule::AttackSchedule& s,
                                        const HonestModel& model) {
    validate(model);
    consensus::validate(s.params);
    const auto metrics = schedule::schedule_metrics(s);  // throws if empty

    RaceOutcome out{};
    out.attacker_cpow = metrics.total_cpow;
    out.honest_cpow_expected =
        expected_honest_cpow(metrics.total_real_time, model);
    out.margin = out.attacker_cpow - out.honest_cpow_expected;

    if (model.mode == HonestMode::Deterministic) {
        out.win_probability = out.margin > 0.0 ? 1.0 : 0.0;
        return out;
    }

    // Honest blocks arrive at efficiency * epoch_length per epoch-time;
    // the attacker's work is worth attacker_cpow * epoch_length blocks of
    // unit difficulty. Strictly fewer honest blocks means the attacker's
    // chain is heavier.
    const double expected_blocks =
        out.honest_cpow_expected * s.params.epoch_length;
    const double threshold = out.attacker_cpow * s.params.epoch_length;
    long long wins = 0;
    for (long long i = 0; i < model.trials; ++i) {
        auto gen = rng::substream(model.seed, static_cast<std::uint64_t>(i));
        if (static_cast<double>(rng::poisson(gen, expected_blocks)) < threshold)
            ++wins;
    }
    const double n = static_cast<double>(model.trials);
    const double p = static_cast<double>(wins) / n;
    out.win_probability = p;

    // Wilson score interval: behaves sensibly even when every trial lands
    // on one side (a plain normal interval would collapse to width zero).
    const double z = 1.959963984540054;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    out.ci95 = ConfidenceInterval{center - half, center + half};
    return out;
}

enum class Party { Honest, Attacker, Tie };

struct CounterexampleResult {
    consensus::ChainSummary honest;
    consensus::ChainSummary attacker;
    Party longest_chain_winner;
    Party cumulative_work_winner;
};

namespace detail {

inline Party to_party(consensus::ForkWinner w) {
    switch (w) {
        case consensus::ForkWinner::A: return Party::Honest;
        case consensus::ForkWinner::B: return Party::Attacker;
        default: return Party::Tie;
    }
}

}  // namespace detail

/// Construct the fork pair where counting blocks and weighing work disagree.
/// The honest chain mines one easy epoch and then n epochs of difficulty
/// `hard`, one per time unit. An attacker holding a `power` fraction of the
/// hashrate mines easy epochs the whole time and fits
/// floor(power * hard * n) + 1 of them into the same window — more blocks
/// than the honest chain whenever that count exceeds n + 1, yet carrying
/// a vanishing fraction of its work.
inline CounterexampleResult counterexample_longest_chain(int n, double power,
                                                         double hard) {
    if (n < 1) throw std::domain_error("need at least one hard epoch");
    if (!(power > 0.0) || !(power < 1.0))
        throw std::domain_error("attacker power must be in (0, 1)");
    if (!(hard > 0.0))
        throw std::domain_error("hard-epoch difficulty must be positive");
    if (!(power * hard > 1.0))
        throw std::domain_error(
            "attacker too slow: power * hard must exceed 1 for the block "
            "counts to flip");

    const long long attacker_epochs =
        static_cast<long long>(std::floor(power * hard * n)) + 1;
    if (attacker_epochs <= static_cast<long long>(n) + 1)
        throw std::domain_error(
            "window too short: the attacker cannot out-count the honest "
            "chain in n epochs");

    const int blocks_per_epoch = consensus::ConsensusParams{}.epoch_length;
    const double window = static_cast<double>(n) + 1.0;

    CounterexampleResult res;
    res.honest.epochs.push_back({1.0, 1.0});
    for (int i = 1; i <= n; ++i)
        res.honest.epochs.push_back({hard, static_cast<double>(i) + 1.0});
    res.honest.block_count =
        static_cast<long long>(n + 1) * blocks_per_epoch;

    for (long long i = 1; i <= attacker_epochs; ++i)
        res.attacker.epochs.push_back(
            {1.0, static_cast<double>(i) * window /
                      static_cast<double>(attacker_epochs)});
    res.attacker.block_count = attacker_epochs * blocks_per_epoch;

    res.longest_chain_winner = detail::to_party(consensus::fork_choice(
        res.honest, res.attacker, consensus::ForkChoiceRule::LongestChain));
    res.cumulative_work_winner = detail::to_party(consensus::fork_choice(
        res.honest, res.attacker, consensus::ForkChoiceRule::CumulativeWork));
    return res;
}

}  // namespace qpow::race
