#include <catch2/catch_amalgamated.hpp>

#include <stdexcept>
#include <vector>

#include "qpow/consensus.hpp"

using namespace qpow::consensus;

namespace {

ConsensusParams unclamped() { return ConsensusParams{}; }

ConsensusParams clamped(double factor) {
    ConsensusParams p;
    p.clamp_factor = factor;
    return p;
}

ChainSummary chain_of(std::vector<double> difficulties) {
    ChainSummary c;
    double ts = 0.0;
    for (double d : difficulties) {
        ts += 1.0;
        c.epochs.push_back({d, ts});
    }
    c.block_count = static_cast<long long>(difficulties.size()) * 2016;
    return c;
}

}  // namespace

TEST_CASE("retarget divides by observed duration", "[consensus]") {
    CHECK(adjust_difficulty(1.0, 1.0 / 64.0, unclamped()) == Catch::Approx(64.0));
    CHECK(adjust_difficulty(1.0, 1.0, unclamped()) == Catch::Approx(1.0));
    CHECK(adjust_difficulty(1.0, 1.0, clamped(4.0)) == Catch::Approx(1.0));
    CHECK(adjust_difficulty(64.0, 8.0, unclamped()) == Catch::Approx(8.0));
}

TEST_CASE("clamp limits the per-epoch change factor", "[consensus]") {
    CHECK(adjust_difficulty(1.0, 1.0 / 64.0, clamped(4.0)) == Catch::Approx(4.0));
    CHECK(adjust_difficulty(1.0, 64.0, clamped(4.0)) == Catch::Approx(0.25));
    // Inside the window the clamp is inert.
    CHECK(adjust_difficulty(10.0, 0.5, clamped(4.0)) == Catch::Approx(20.0));
}

TEST_CASE("retarget rejects nonpositive inputs and bad params", "[consensus]") {
    CHECK_THROWS_AS(adjust_difficulty(0.0, 1.0, unclamped()), std::domain_error);
    CHECK_THROWS_AS(adjust_difficulty(1.0, 0.0, unclamped()), std::domain_error);
    CHECK_THROWS_AS(adjust_difficulty(1.0, -2.0, unclamped()), std::domain_error);
    CHECK_THROWS_AS(adjust_difficulty(1.0, 1.0, clamped(1.0)), std::domain_error);
    ConsensusParams bad;
    bad.epoch_length = 0;
    CHECK_THROWS_AS(adjust_difficulty(1.0, 1.0, bad), std::domain_error);
}

TEST_CASE("retarget is homogeneous and conserves work rate", "[consensus]") {
    const double scales[] = {0.01, 0.5, 3.0, 1000.0};
    const double durations[] = {1.0 / 64.0, 0.2, 1.0, 8.0, 50.0};
    for (const auto& params : {unclamped(), clamped(4.0), clamped(2.0)}) {
        for (double c : scales) {
            for (double delta : durations) {
                const double lhs = adjust_difficulty(c * 3.0, delta, params);
                const double rhs = c * adjust_difficulty(3.0, delta, params);
                CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
            }
        }
    }
    // Unclamped only: new difficulty times observed duration gives back d_old.
    for (double delta : durations) {
        const double d_new = adjust_difficulty(7.0, delta, unclamped());
        CHECK(d_new * delta == Catch::Approx(7.0).epsilon(1e-12));
    }
    // Clamped results stay inside the window.
    for (double delta : durations) {
        const double d_new = adjust_difficulty(7.0, delta, clamped(4.0));
        CHECK(d_new >= 7.0 / 4.0 - 1e-12);
        CHECK(d_new <= 7.0 * 4.0 + 1e-12);
    }
}

TEST_CASE("cumulative work sums epoch difficulties", "[consensus]") {
    CHECK(cumulative_work(chain_of({1.0, 64.0})) == Catch::Approx(65.0));
    CHECK(cumulative_work(ChainSummary{}) == 0.0);
    // One cheap epoch followed by n expensive ones.
    for (int n : {1, 5, 10}) {
        std::vector<double> ds{1.0};
        ds.insert(ds.end(), n, 1000.0);
        CHECK(cumulative_work(chain_of(ds)) == Catch::Approx(1.0 + 1000.0 * n));
    }
}

TEST_CASE("cumulative work is additive under concatenation", "[consensus]") {
    auto a = chain_of({1.0, 2.0, 4.0});
    auto b = chain_of({8.0, 0.5});
    ChainSummary joined = a;
    double ts = a.epochs.back().end_timestamp;
    for (auto e : b.epochs) {
        ts += 1.0;
        joined.epochs.push_back({e.difficulty, ts});
    }
    joined.block_count = a.block_count + b.block_count;
    CHECK(cumulative_work(joined) ==
          Catch::Approx(cumulative_work(a) + cumulative_work(b)));
}

TEST_CASE("fork choice by cumulative work and by length", "[consensus]") {
    // Attacker with 2 epochs of work 65 versus 36 honest unit epochs.
    auto attacker = chain_of({1.0, 64.0});
    auto honest = chain_of(std::vector<double>(36, 1.0));
    CHECK(fork_choice(attacker, honest, ForkChoiceRule::CumulativeWork) ==
          ForkWinner::A);
    CHECK(fork_choice(attacker, honest, ForkChoiceRule::LongestChain) ==
          ForkWinner::B);

    CHECK(fork_choice(attacker, attacker, ForkChoiceRule::CumulativeWork) ==
          ForkWinner::Tie);
    CHECK(fork_choice(attacker, attacker, ForkChoiceRule::LongestChain) ==
          ForkWinner::Tie);

    // The two rules can disagree: many cheap epochs against few heavy ones.
    auto cheap = chain_of(std::vector<double>(20, 1.0));
    auto heavy = chain_of({1.0, 1000.0});
    CHECK(fork_choice(cheap, heavy, ForkChoiceRule::LongestChain) == ForkWinner::A);
    CHECK(fork_choice(cheap, heavy, ForkChoiceRule::CumulativeWork) == ForkWinner::B);
}

TEST_CASE("fork choice is consistent under argument swap", "[consensus]") {
    auto a = chain_of({1.0, 64.0});
    auto b = chain_of(std::vector<double>(36, 1.0));
    for (auto rule : {ForkChoiceRule::CumulativeWork, ForkChoiceRule::LongestChain}) {
        auto fwd = fork_choice(a, b, rule);
        auto rev = fork_choice(b, a, rule);
        if (fwd == ForkWinner::A) CHECK(rev == ForkWinner::B);
        if (fwd == ForkWinner::B) CHECK(rev == ForkWinner::A);
        if (fwd == ForkWinner::Tie) CHECK(rev == ForkWinner::Tie);
    }
}

TEST_CASE("chain summaries reject broken invariants", "[consensus]") {
    ChainSummary bad;
    bad.epochs = {{1.0, 1.0}, {2.0, 1.0}};  // timestamps not increasing
    bad.block_count = 2 * 2016;
    CHECK_THROWS_AS(cumulative_work(bad), std::domain_error);
    ChainSummary neg;
    neg.epochs = {{-1.0, 1.0}};
    neg.block_count = 2016;
    CHECK_THROWS_AS(cumulative_work(neg), std::domain_error);
}
