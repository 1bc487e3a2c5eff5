#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpow/consensus.hpp"
#include "qpow/errors.hpp"
#include "qpow/quantum.hpp"

namespace qpow::schedule {

/// One planned epoch of an attack. The miner decides `timestamp_delta` (the
/// duration the retarget rule will observe) freely; everything else follows
/// from the difficulty path and the miner's speed. All prefix columns are
/// running sums from epoch 1.
struct EpochPlan {
    int index;               // 1-based
    double difficulty;       // epoch-time units of expected honest work
    double timestamp_delta;  // written epoch duration, in epoch-times
    double mining_time;      // sqrt(difficulty)/r, actual time spent
    double cpow;             // cumulative proof of work
    double real_time;        // cumulative mining time
    double timestamp;        // cumulative written time
};

struct Aggregates {
    double total_cpow = 0.0;
    double total_real_time = 0.0;
    double final_timestamp = 0.0;
    // How far the written clock trails reality. Positive lag means the
    // timestamps look plausibly old; negative means they claim the future.
    double lag = 0.0;
    // Fraction of the mined epochs' block rewards relative to what the
    // honest network would earn over the same real time: epochs per unit
    // real time, since one honest epoch completes per epoch-time.
    double revenue_fraction = 0.0;
};

struct AttackSchedule {
    consensus::ConsensusParams params;
    quantum::MinerSpeed speed;
    std::vector<EpochPlan> epochs;
    Aggregates aggregates;
};

/// Recompute the aggregate row from the epochs (fresh sums, same
/// left-to-right order the builder uses, so results are bit-identical).
inline Aggregates schedule_metrics(const AttackSchedule& s) {
    if (s.epochs.empty())
        throw std::domain_error("schedule has no epochs");
    Aggregates a;
    for (const auto& e : s.epochs) {
        a.total_cpow += e.difficulty;
        a.total_real_time += e.mining_time;
    }
    a.final_timestamp = s.epochs.back().timestamp;
    a.lag = a.total_real_time - a.final_timestamp;
    a.revenue_fraction =
        static_cast<double>(s.epochs.size()) / a.total_real_time;
    return a;
}

/// Shape parameters shared by the spike-and-descent family. `defaults`
/// gives the standard sizing for a miner of the given speed.
struct VariantConfig {
    double effective_r;        // sizing speed, min(r, 1/4)
    double top_difficulty;     // spike height
    int n_top_epochs = 1;      // how many epochs hold the spike
    double reduction_factor = 8.0;   // per-epoch difficulty divisor going down
    std::optional<double> increase_factor;  // per-epoch multiplier going up
    double bottom_difficulty;  // where the descent lands
    double lag_threshold = 1.0;  // skip the easy tail if lag is already below

    static VariantConfig defaults(quantum::MinerSpeed speed) {
        quantum::validate(speed);
        VariantConfig cfg;
        // Sizing never assumes a miner faster than 1/4 of the network: a
        // faster miner simply finishes ahead of its own written clock, which
        // shows up as future-timestamp warnings rather than a different
        // schedule shape.
        cfg.effective_r = std::min(speed.r, 0.25);
        // The top epoch repays its mining time twice over in cpow:
        // difficulty 4/r^2 takes 2/r^2 epoch-times to mine.
        cfg.top_difficulty = 4.0 / (cfg.effective_r * cfg.effective_r);
        // Factor 8 keeps descent difficulties dyadic and the descent short;
        // the written cost of a descent scales as f/ln(f), minimized at
        // f = e, but 8 is within 16% of that optimum.
        cfg.reduction_factor = 8.0;
        cfg.bottom_difficulty = std::pow(cfg.effective_r, 6);
        return cfg;
    }
};

inline void validate(const VariantConfig& cfg) {
    if (!(cfg.effective_r > 0.0) || cfg.effective_r > 1.0)
        throw std::domain_error("effective_r must be in (0, 1]");
    if (!(cfg.top_difficulty > 0.0) || !(cfg.bottom_difficulty > 0.0))
        throw std::domain_error("difficulties must be positive");
    if (cfg.bottom_difficulty > cfg.top_difficulty)
        throw std::domain_error("bottom difficulty above top difficulty");
    if (cfg.n_top_epochs < 1)
        throw std::domain_error("need at least one top epoch");
    if (!(cfg.reduction_factor > 1.0))
        throw std::domain_error("reduction factor must exceed 1");
    if (cfg.increase_factor && !(*cfg.increase_factor > 1.0))
        throw std::domain_error("increase factor must exceed 1");
    if (!(cfg.lag_threshold >= 0.0))
        throw std::domain_error("lag threshold must be nonnegative");
}

namespace detail {

// Relative slack for "did the difficulty land where intended" comparisons.
// Descent loops drive the live difficulty by the same divisions used to
// precompute their targets, so the drift is a few ulps at most.
inline constexpr double kRelEps = 1e-12;

// Hard cap on generated epochs; beyond this the schedule is no longer a
// desk-scale object and the caller almost certainly mis-sized something.
inline constexpr long long kMaxEpochs = 20'000'000;

class Builder {
  public:
    Builder(quantum::MinerSpeed speed, const consensus::ConsensusParams& params,
            double initial_difficulty)
        : difficulty_(initial_difficulty) {
        quantum::validate(speed);
        consensus::validate(params);
        schedule_.speed = speed;
        schedule_.params = params;
    }

    double difficulty() const { return difficulty_; }
    double lag() const { return real_ - ts_; }
    long long size() const {
        return static_cast<long long>(schedule_.epochs.size());
    }

    // Append one epoch at the current difficulty, writing `delta` as its
    // duration, then retarget. A retarget the clamp would distort is a
    // planning contradiction, not something to smooth over silently.
    void push(double delta) {
        const double mining =
            quantum::quantum_epoch_time(difficulty_, schedule_.speed);
        const double next =
            consensus::adjust_difficulty(difficulty_, delta, schedule_.params);
        const double raw = difficulty_ / delta;
        if (std::fabs(next - raw) > kRelEps * raw)
            throw incompatibility_error(
                "retarget by " + std::to_string(1.0 / delta) +
                "x is outside the clamp factor " +
                std::to_string(*schedule_.params.clamp_factor) + " window");
        if (size() >= kMaxEpochs)
            throw capacity_error("schedule exceeds " +
                                 std::to_string(kMaxEpochs) + " epochs");
        cpow_ += difficulty_;
        real_ += mining;
        ts_ += delta;
        schedule_.epochs.push_back({static_cast<int>(size()) + 1, difficulty_,
                                    delta, mining, cpow_, real_, ts_});
        difficulty_ = next;
    }

    AttackSchedule finish() {
        schedule_.aggregates = schedule_metrics(schedule_);
        return std::move(schedule_);
    }

  private:
    AttackSchedule schedule_;
    double difficulty_;
    double cpow_ = 0.0;
    double real_ = 0.0;
    double ts_ = 0.0;
};

}  // namespace detail

/// The two-epoch spike: write the first epoch implausibly short so the
/// difficulty jumps to 4/r^2, then cash that epoch in. Total cpow 1 + 4/r^2
/// against 1/r + 2/r^2 real epoch-times of mining.
inline AttackSchedule generate_variant1(quantum::MinerSpeed speed,
                                        const consensus::ConsensusParams& params) {
    quantum::validate(speed);
    detail::Builder b(speed, params, 1.0);
    b.push(speed.r * speed.r / 4.0);
    b.push(1.0);
    return b.finish();
}

namespace detail {

// Tail closure helper shared by the descent variants; kept out of the
// builder because it owns the stopping rule, not the bookkeeping.
inline void close_lag_with_easy_epochs(Builder& b, quantum::MinerSpeed speed,
                                       double threshold) {
    if (!(b.lag() > threshold)) return;
    const double mining = quantum::quantum_epoch_time(b.difficulty(), speed);
    const double closure = 1.0 - mining;
    if (!(closure > 1e-9))
        throw incompatibility_error(
            "easy epochs at the bottom difficulty cannot close the "
            "timestamp gap (they take longer to mine than they claim)");
    // Guard keeps lag >= 0 through the last epoch despite rounding in the
    // prefix sums; it is far below any closure step that matters.
    while (b.lag() >= closure + 1e-9) b.push(1.0);
}

// Spike, hold, multiplicative descent, landing, easy tail. The last epoch
// at the top writes the first reduction step, so a single-top schedule
// spends no extra time holding the spike.
inline AttackSchedule spike_and_descend(quantum::MinerSpeed speed,
                                        const consensus::ConsensusParams& params,
                                        const VariantConfig& cfg) {
    quantum::validate(speed);
    schedule::validate(cfg);
    Builder b(speed, params, 1.0);
    b.push(1.0 / cfg.top_difficulty);
    for (int i = 0; i + 1 < cfg.n_top_epochs; ++i) b.push(1.0);
    while (b.difficulty() > cfg.bottom_difficulty * (1.0 + kRelEps)) {
        const double ratio_left = b.difficulty() / cfg.bottom_difficulty;
        b.push(std::min(cfg.reduction_factor, ratio_left));
    }
    b.push(1.0);  // landing epoch at the bottom
    close_lag_with_easy_epochs(b, speed, cfg.lag_threshold);
    return b.finish();
}

}  // namespace detail

/// Spike to 4/r^2, then walk the difficulty down by the reduction factor to
/// r^6 and pay the timestamp debt back with easy epochs.
inline AttackSchedule generate_variant2(quantum::MinerSpeed speed,
                                        const consensus::ConsensusParams& params,
                                        const VariantConfig& cfg) {
    return detail::spike_and_descend(speed, params, cfg);
}

inline AttackSchedule generate_variant2(quantum::MinerSpeed speed,
                                        const consensus::ConsensusParams& params) {
    return generate_variant2(speed, params, VariantConfig::defaults(speed));
}

/// Same shape but the spike is held for `n_top_epochs`: each extra top epoch
/// adds 4/r^2 cpow for 2/r^2 real time, driving the revenue fraction toward
/// 1 as the fast tail amortizes the setup.
inline AttackSchedule generate_variant3(quantum::MinerSpeed speed,
                                        const consensus::ConsensusParams& params,
                                        int n_top_epochs) {
    auto cfg = VariantConfig::defaults(speed);
    cfg.n_top_epochs = n_top_epochs;
    return detail::spike_and_descend(speed, params, cfg);
}

/// Clamp-compatible schedule: ramp the difficulty up by `step_factor` per
/// epoch (every write inside the clamp window), hold the peak, step back
/// down, and close the gap with easy epochs. The peak overshoots 4/r_eff^2
/// by step^2 so the ramp's cheap epochs are repaid.
inline AttackSchedule generate_variant4(
    quantum::MinerSpeed speed, const consensus::ConsensusParams& params,
    double step_factor = 2.0, int n_top_epochs = 3,
    std::optional<int> n_down_steps = std::nullopt) {
    quantum::validate(speed);
    consensus::validate(params);
    if (!params.clamp_factor)
        throw incompatibility_error(
            "the ramp schedule plays against a clamped retarget rule; these "
            "params have no clamp factor");
    if (!(step_factor > 1.0))
        throw std::domain_error("step factor must exceed 1");
    if (step_factor > *params.clamp_factor * (1.0 + detail::kRelEps))
        throw incompatibility_error(
            "step factor " + std::to_string(step_factor) +
            " exceeds the clamp factor " +
            std::to_string(*params.clamp_factor));
    if (n_top_epochs < 1)
        throw std::domain_error("need at least one peak epoch");
    if (n_down_steps && *n_down_steps < 1)
        throw std::domain_error("need at least one descent step");

    const double r_eff = std::min(speed.r, 0.25);
    const double base_top = 4.0 / (r_eff * r_eff);

    // Smallest power of the step that clears step^2 * base_top.
    double peak = 1.0;
    while (peak < step_factor * step_factor * base_top * (1.0 - detail::kRelEps))
        peak *= step_factor;

    // Descend until at or below 4 * r_eff^6 unless told how far. Dividing
    // down from the peak mirrors the builder's own retarget arithmetic, so
    // the descent lands on `bottom` exactly.
    double bottom = peak;
    if (n_down_steps) {
        for (int i = 0; i < *n_down_steps; ++i) bottom /= step_factor;
    } else {
        const double floor_difficulty = 4.0 * std::pow(r_eff, 6);
        while (bottom > floor_difficulty * (1.0 + detail::kRelEps))
            bottom /= step_factor;
    }

    detail::Builder b(speed, params, 1.0);
    while (b.difficulty() < peak * (1.0 - detail::kRelEps))
        b.push(1.0 / step_factor);
    for (int i = 0; i + 1 < n_top_epochs; ++i) b.push(1.0);
    while (b.difficulty() > bottom * (1.0 + detail::kRelEps))
        b.push(step_factor);
    b.push(1.0);  // landing epoch
    detail::close_lag_with_easy_epochs(b, speed, /*threshold=*/1.0);
    return b.finish();
}

/// Smallest number of top epochs whose schedule earns at least a 1 - epsilon
/// revenue fraction. Revenue is monotone in the top-epoch count (each extra
/// top epoch trades 2/r^2 real time for 4/r^2 cpow and a faster tail), so a
/// bracketed search suffices; both neighbors of the answer are verified.
inline AttackSchedule generate_revenue_target(
    quantum::MinerSpeed speed, const consensus::ConsensusParams& params,
    double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::domain_error("epsilon must be in (0, 1)");
    const double target = 1.0 - epsilon;
    constexpr int kMaxTopEpochs = 4096;

    auto revenue = [&](int n) {
        return generate_variant3(speed, params, n).aggregates.revenue_fraction;
    };

    if (revenue(1) >= target) return generate_variant3(speed, params, 1);
    if (revenue(kMaxTopEpochs) < target)
        throw capacity_error(
            "revenue target " + std::to_string(target) + " needs more than " +
            std::to_string(kMaxTopEpochs) + " top epochs");
    int lo = 1, hi = kMaxTopEpochs;  // revenue(lo) < target <= revenue(hi)
    while (lo + 1 < hi) {
        const int mid = lo + (hi - lo) / 2;
        (revenue(mid) >= target ? hi : lo) = mid;
    }
    return generate_variant3(speed, params, hi);
}

}  // namespace qpow::schedule
