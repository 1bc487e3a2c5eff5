#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "qpow/consensus.hpp"
#include "qpow/feasibility.hpp"

using qpow::consensus::ConsensusParams;
using namespace qpow::feasibility;

namespace {
const ConsensusParams kParams{};
}

TEST_CASE("default hardware profile: derived quantities", "[feasibility]") {
    HardwareProfile hw;  // today's network vs one plausible quantum machine
    CHECK(hw.classical_hashrate == Catch::Approx(5e20));
    CHECK(hw.block_seconds == Catch::Approx(600.0));

    // One hash succeeds with probability 1 / (hashrate * block interval).
    CHECK(per_hash_success_probability(hw) ==
          Catch::Approx(3.3333333333e-24).epsilon(1e-9));

    // Grover needs ~sqrt(1/p) iterations to find a winning preimage.
    CHECK(grover_iterations(hw) == Catch::Approx(5.47722557505e11).epsilon(1e-10));

    // Each iteration costs `circuit_depth` gate layers at `clock_hz`.
    CHECK(quantum_block_seconds(hw) == Catch::Approx(87635.609200827).epsilon(1e-10));

    auto r = speed_ratio(hw);
    CHECK(r.r == Catch::Approx(0.00684653196881).epsilon(1e-9));
    CHECK(r.r * r.r == Catch::Approx(4.6875e-5).epsilon(1e-9));
}

TEST_CASE("speed ratio responds to hardware knobs", "[feasibility]") {
    HardwareProfile hw;
    double base_qbs = quantum_block_seconds(hw);
    double base_r = speed_ratio(hw).r;

    // Four machines in parallel: sqrt(4) = 2x faster.
    HardwareProfile four = hw;
    four.machines = 4;
    CHECK(quantum_block_seconds(four) == Catch::Approx(base_qbs / 2.0));
    CHECK(speed_ratio(four).r == Catch::Approx(base_r * 2.0));

    // A 2x clock halves the block time.
    HardwareProfile fast = hw;
    fast.clock_hz = 2e10;
    CHECK(quantum_block_seconds(fast) == Catch::Approx(base_qbs / 2.0));

    // Overhead scales the block time directly.
    HardwareProfile slow = hw;
    slow.overhead_factor = 3.0;
    CHECK(quantum_block_seconds(slow) == Catch::Approx(base_qbs * 3.0));

    // An absurdly fast machine is capped at classical parity.
    HardwareProfile dream = hw;
    dream.clock_hz = 1e30;
    CHECK(speed_ratio(dream).r == 1.0);
}

TEST_CASE("dimensional identity ties the pieces together", "[feasibility]") {
    HardwareProfile hw;
    hw.machines = 9;
    CHECK(quantum_block_seconds(hw) * hw.clock_hz * std::sqrt(hw.machines) ==
          Catch::Approx(hw.circuit_depth * grover_iterations(hw)));
}

TEST_CASE("derived quantities are monotone in the profile", "[feasibility]") {
    HardwareProfile lo;
    HardwareProfile hi = lo;
    hi.classical_hashrate = 1e21;  // network doubles
    CHECK(per_hash_success_probability(hi) < per_hash_success_probability(lo));
    CHECK(grover_iterations(hi) > grover_iterations(lo));
    CHECK(quantum_block_seconds(hi) > quantum_block_seconds(lo));
    CHECK(speed_ratio(hi).r < speed_ratio(lo).r);
}

TEST_CASE("profiles are validated", "[feasibility]") {
    HardwareProfile hw;
    hw.classical_hashrate = 0.0;
    CHECK_THROWS_AS(per_hash_success_probability(hw), std::domain_error);
    hw = HardwareProfile{};
    hw.clock_hz = -1.0;
    CHECK_THROWS_AS(quantum_block_seconds(hw), std::domain_error);
    hw = HardwareProfile{};
    hw.machines = 0;
    CHECK_THROWS_AS(quantum_block_seconds(hw), std::domain_error);
}

TEST_CASE("attack duration: parity miner runs the spike in weeks",
          "[feasibility]") {
    // At r = 1 the two-epoch spike takes 3 epoch times = 42 days.
    double years = attack_duration_years(qpow::quantum::MinerSpeed{1.0},
                                         kParams, AttackVariant::Spike);
    CHECK(years == Catch::Approx(42.0 / 365.25).epsilon(1e-12));
}

TEST_CASE("attack duration at today's estimated speed ratio", "[feasibility]") {
    // The honest figure for the default profile: ~1641 years for the
    // two-epoch spike. (Dominated by the 2/r^2 top epoch.)
    auto r = speed_ratio(HardwareProfile{});
    double years = attack_duration_years(r, kParams, AttackVariant::Spike);
    CHECK(years == Catch::Approx(1641.008).epsilon(1e-4));
}

TEST_CASE("attack duration scales like 1/r^2 as r shrinks", "[feasibility]") {
    // Halving r should roughly quadruple the duration; the approach to 4x
    // is monotone and already within 5% by r = 1/16.
    ConsensusParams p{};
    double prev = attack_duration_years(qpow::quantum::MinerSpeed{0.125}, p,
                                        AttackVariant::Spike);
    for (double r : {0.0625, 0.03125, 0.015625}) {
        double cur =
            attack_duration_years(qpow::quantum::MinerSpeed{r}, p,
                                  AttackVariant::Spike);
        CHECK(cur / prev == Catch::Approx(4.0).epsilon(0.05));
        CHECK(cur / prev < 4.0);
        prev = cur;
    }
}

TEST_CASE("attack duration covers every schedule family", "[feasibility]") {
    qpow::quantum::MinerSpeed quarter{0.25};
    // 14-day epochs: real-time totals from the schedule tables, in years.
    double spike = attack_duration_years(quarter, kParams, AttackVariant::Spike);
    CHECK(spike == Catch::Approx(36.0 * 14.0 / 365.25).epsilon(1e-12));

    double descent =
        attack_duration_years(quarter, kParams, AttackVariant::SpikeAndDescent);
    CHECK(descent == Catch::Approx(53.7172 * 14.0 / 365.25).margin(0.01));

    double multi =
        attack_duration_years(quarter, kParams, AttackVariant::MultiTop);
    CHECK(multi == Catch::Approx(121.8422 * 14.0 / 365.25).margin(0.01));

    ConsensusParams clamped{};
    clamped.clamp_factor = 4.0;
    double ramped =
        attack_duration_years(quarter, clamped, AttackVariant::Clamped);
    CHECK(ramped == Catch::Approx(555.0607 * 14.0 / 365.25).margin(0.01));
}
