#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qpow/consensus.hpp"
#include "qpow/quantum.hpp"
#include "qpow/schedule.hpp"

namespace qpow::io {

/// Render a value with 6 significant digits, ties away from zero, trailing
/// fraction zeros dropped. Scientific notation kicks in outside
/// [1e-4, 1e6), with a sign and at least two exponent digits. This is the
/// one formatter the CSV layer uses, so parse(emit(s)) re-emits its input
/// byte for byte: six decimal digits survive a double round-trip intact.
inline std::string format_number(double value) {
    if (value == 0.0) return "0";
    if (!std::isfinite(value))
        throw std::domain_error("cannot format a non-finite value");
    const bool negative = value < 0.0;
    const double a = std::fabs(value);

    int exp10 = static_cast<int>(std::floor(std::log10(a)));
    long long digits = std::llround(a * std::pow(10.0, 5 - exp10));
    if (digits >= 1000000) {  // rounding carried into a seventh digit
        digits = std::llround(a * std::pow(10.0, 4 - exp10));
        ++exp10;
    } else if (digits < 100000) {  // log10 landed one decade high
        digits = std::llround(a * std::pow(10.0, 6 - exp10));
        --exp10;
    }

    std::string ds = std::to_string(digits);  // exactly six digits
    std::string out;
    if (exp10 < -4 || exp10 >= 6) {
        std::string mantissa = ds.substr(0, 1);
        std::string frac = ds.substr(1);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        if (!frac.empty()) mantissa += "." + frac;
        char tail[16];
        std::snprintf(tail, sizeof tail, "e%+03d", exp10);
        out = mantissa + tail;
    } else if (exp10 >= 0) {
        std::string head = ds.substr(0, static_cast<size_t>(exp10) + 1);
        std::string frac = ds.substr(static_cast<size_t>(exp10) + 1);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        out = frac.empty() ? head : head + "." + frac;
    } else {
        while (!ds.empty() && ds.back() == '0') ds.pop_back();
        out = "0." + std::string(static_cast<size_t>(-exp10) - 1, '0') + ds;
    }
    return negative ? "-" + out : out;
}

inline constexpr std::string_view kCsvHeader =
    "n,difficulty,CPoW,timeToCreate,realTimeWhenCreated,timestamp";

/// One row per epoch, in the header's column order. Only the prefix columns
/// and the per-epoch mining time are written; the written durations are
/// recoverable as timestamp differences.
inline std::string emit_schedule_csv(const schedule::AttackSchedule& s) {
    std::string out{kCsvHeader};
    out += '\n';
    for (const auto& e : s.epochs) {
        out += std::to_string(e.index);
        out += ',';
        out += format_number(e.difficulty);
        out += ',';
        out += format_number(e.cpow);
        out += ',';
        out += format_number(e.mining_time);
        out += ',';
        out += format_number(e.real_time);
        out += ',';
        out += format_number(e.timestamp);
        out += '\n';
    }
    return out;
}

namespace detail {

inline double parse_field(const std::string& field, int line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw std::domain_error("line " + std::to_string(line_no) +
                                ": '" + field + "' is not a number");
    }
    if (pos != field.size())
        throw std::domain_error("line " + std::to_string(line_no) +
                                ": trailing junk in '" + field + "'");
    return v;
}

}  // namespace detail

/// Parse a schedule CSV back into an AttackSchedule. Row values are kept
/// verbatim (re-emitting reproduces the input bytes); written durations are
/// reconstructed from timestamp differences and aggregates are recomputed.
/// The miner speed is inferred from the first row's mining time unless one
/// is supplied.
inline schedule::AttackSchedule parse_schedule_csv(
    const std::string& text, const consensus::ConsensusParams& params,
    std::optional<quantum::MinerSpeed> speed = std::nullopt) {
    consensus::validate(params);
    if (speed) quantum::validate(*speed);

    schedule::AttackSchedule s;
    s.params = params;

    std::size_t begin = 0;
    int line_no = 0;
    bool saw_header = false;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(begin, end - begin);
        begin = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        if (line.empty()) {
            if (begin > text.size()) break;
            continue;
        }
        if (!saw_header) {
            if (line != kCsvHeader)
                throw std::domain_error(
                    "line 1: expected the schedule CSV header");
            saw_header = true;
            continue;
        }

        std::vector<std::string> fields;
        std::size_t fb = 0;
        while (true) {
            std::size_t fe = line.find(',', fb);
            fields.push_back(line.substr(
                fb, fe == std::string::npos ? std::string::npos : fe - fb));
            if (fe == std::string::npos) break;
            fb = fe + 1;
        }
        if (fields.size() != 6)
            throw std::domain_error("line " + std::to_string(line_no) +
                                    ": expected 6 columns, found " +
                                    std::to_string(fields.size()));

        schedule::EpochPlan e{};
        const double index = detail::parse_field(fields[0], line_no);
        const int expected = static_cast<int>(s.epochs.size()) + 1;
        if (index != static_cast<double>(expected))
            throw std::domain_error("line " + std::to_string(line_no) +
                                    ": epoch numbers must run 1, 2, ...");
        e.index = expected;
        e.difficulty = detail::parse_field(fields[1], line_no);
        e.cpow = detail::parse_field(fields[2], line_no);
        e.mining_time = detail::parse_field(fields[3], line_no);
        e.real_time = detail::parse_field(fields[4], line_no);
        e.timestamp = detail::parse_field(fields[5], line_no);
        const double prev_ts =
            s.epochs.empty() ? 0.0 : s.epochs.back().timestamp;
        e.timestamp_delta = e.timestamp - prev_ts;
        s.epochs.push_back(e);
    }

    if (!saw_header) throw std::domain_error("empty schedule CSV");
    if (s.epochs.empty())
        throw std::domain_error("schedule CSV has no data rows");

    if (speed) {
        s.speed = *speed;
    } else {
        const auto& first = s.epochs.front();
        if (!(first.mining_time > 0.0) || !(first.difficulty > 0.0))
            throw std::domain_error(
                "cannot infer the miner speed from the first row");
        // r = sqrt(d)/t; rounding in the CSV can push the estimate a hair
        // past the physical ceiling, so cap it.
        s.speed.r =
            std::min(1.0, std::sqrt(first.difficulty) / first.mining_time);
    }
    s.aggregates = schedule::schedule_metrics(s);
    return s;
}

}  // namespace qpow::io
