#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpow/consensus.hpp"
#include "qpow/errors.hpp"
#include "qpow/feasibility.hpp"
#include "qpow/quantum.hpp"
#include "qpow/race.hpp"
#include "qpow/schedule.hpp"
#include "qpow/schedule_io.hpp"
#include "qpow/validation.hpp"

namespace qpow::cli {

namespace detail {

inline std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string percent(double fraction) {
    return io::format_number(fraction * 100.0) + "%";
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Apply `key=value` lines from an INI-style file to any of the
// subcommand's options the command line left untouched, so explicit flags
// always win. (CLI11's own set_config only fires on the root app, not on a
// parsed subcommand, so the layering is done by hand.) Unknown keys and
// malformed lines are usage errors; values run through the option's normal
// conversion and validators.
inline void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' ||
            line[0] == '[')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ConfigError("line " + std::to_string(line_no) +
                                   ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 &&
            ((value.front() == '"' && value.back() == '"') ||
             (value.front() == '\'' && value.back() == '\'')))
            value = value.substr(1, value.size() - 2);
        auto* op = sub->get_option_no_throw("--" + key);
        if (op == nullptr) throw CLI::ConfigError::Extras(key);
        if (op->count() == 0) {
            op->add_result(value);
            op->run_callback();
        }
    }
}

inline void print_summary(const schedule::AttackSchedule& s,
                          std::ostream& os) {
    const auto& a = s.aggregates;
    os << "# epochs: " << s.epochs.size() << "\n"
       << "# total cpow: " << io::format_number(a.total_cpow) << "\n"
       << "# total real time: " << io::format_number(a.total_real_time)
       << " epoch-times\n"
       << "# final timestamp: " << io::format_number(a.final_timestamp)
       << "\n"
       << "# lag: " << io::format_number(a.lag) << "\n"
       << "# revenue: " << percent(a.revenue_fraction) << "\n";
}

inline const char* party_name(race::Party p) {
    switch (p) {
        case race::Party::Honest: return "honest";
        case race::Party::Attacker: return "attacker";
        default: return "tie";
    }
}

struct CommonScheduleFlags {
    double speed = 0.0;
    int variant = 0;
    std::optional<double> clamp;
    int epoch_length = 2016;
    double block_minutes = 10.0;
    double step = 2.0;
    int n_top = 3;
    std::optional<int> n_down;

    consensus::ConsensusParams params() const {
        consensus::ConsensusParams p;
        p.epoch_length = epoch_length;
        p.target_block_minutes = block_minutes;
        p.clamp_factor = clamp;
        return p;
    }

    schedule::AttackSchedule build(std::optional<double> epsilon) const {
        const quantum::MinerSpeed r{speed};
        const auto p = params();
        switch (variant) {
            case 1: return schedule::generate_variant1(r, p);
            case 2: return schedule::generate_variant2(r, p);
            case 3:
                return epsilon ? schedule::generate_revenue_target(r, p,
                                                                   *epsilon)
                               : schedule::generate_variant3(r, p, n_top);
            case 4:
                return schedule::generate_variant4(r, p, step, n_top, n_down);
            default:
                throw std::domain_error("variant must be 1..4");
        }
    }
};

// Wires the schedule-shape options shared by `attack` and `race` onto a
// subcommand. Returns the --speed option so callers can mark it required
// or probe whether it was given.
inline CLI::Option* add_schedule_flags(CLI::App* cmd,
                                       CommonScheduleFlags& f,
                                       std::optional<double>& clamp,
                                       std::optional<int>& n_down) {
    auto* speed = cmd->add_option(
        "--speed", f.speed, "Quantum miner speed ratio r, in (0, 1]");
    cmd->add_option("--variant", f.variant,
                    "Schedule shape: 1 spike, 2 spike+descent, 3 held "
                    "spike, 4 clamp-compatible ramp")
        ->check(CLI::Range(1, 4));
    cmd->add_option("--clamp", clamp,
                    "Retarget clamp factor the consensus rule enforces");
    cmd->add_option("--epoch-length", f.epoch_length,
                    "Blocks per difficulty epoch")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--block-minutes", f.block_minutes,
                    "Target minutes per block")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--step", f.step,
                    "Per-epoch difficulty factor for variant 4");
    cmd->add_option("--n-top", f.n_top,
                    "Epochs held at the top (variants 3 and 4)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-down", n_down,
                    "Descent steps for variant 4 (default: sized from r)");
    return speed;
}

}  // namespace detail

/// Argument-vector entry point; `args` excludes the program name. All
/// output goes through the supplied streams so the tool is testable
/// in-process. Exit codes: 0 success, 1 usage error, 2 a model or I/O
/// error (incompatible parameters, invalid schedule, unreadable file).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err, bool stdout_is_tty = false) {
    CLI::App app{"Timestamp-attack schedules for difficulty-adjusted "
                 "proof-of-work, and the analysis around them"};
    app.require_subcommand(1);

    // --- attack ---------------------------------------------------------
    auto* attack = app.add_subcommand(
        "attack", "Generate an attack schedule as CSV");
    std::string a_config;
    attack->add_option("--config", a_config,
                       "Read option defaults from an INI file");
    detail::CommonScheduleFlags af;
    std::optional<double> a_clamp;
    std::optional<int> a_n_down;
    // --speed and --variant are required, but a config file may supply
    // them, so the check happens after the config merge below.
    detail::add_schedule_flags(attack, af, a_clamp, a_n_down);
    std::optional<double> a_epsilon;
    attack->add_option("--epsilon", a_epsilon,
                       "Variant 3 only: pick the top-epoch count so the "
                       "revenue fraction reaches 1-epsilon");
    std::string a_output;
    attack->add_option("-o,--output", a_output,
                       "Write the CSV here instead of stdout");
    std::string a_out_dir;
    attack->add_option("--out-dir", a_out_dir,
                       "Directory for relative --output paths")
        ->envname("QPOW_OUT_DIR");

    // --- race -----------------------------------------------------------
    auto* race_cmd = app.add_subcommand(
        "race", "Race a schedule against the honest network's work");
    std::string r_config;
    race_cmd->add_option("--config", r_config,
                         "Read option defaults from an INI file");
    detail::CommonScheduleFlags rf;
    std::optional<double> r_clamp;
    std::optional<int> r_n_down;
    auto* r_speed = detail::add_schedule_flags(race_cmd, rf, r_clamp,
                                               r_n_down);
    std::string r_schedule_path;
    race_cmd->add_option("--schedule", r_schedule_path,
                         "Read the attacker schedule from a CSV file");
    std::string r_mode = "det";
    race_cmd->add_option("--mode", r_mode,
                         "det: compare expectations; mc: Poisson Monte "
                         "Carlo")
        ->check(CLI::IsMember({"det", "mc"}));
    long long r_trials = 10000;
    race_cmd->add_option("--trials", r_trials, "Monte Carlo trial count");
    std::uint64_t r_seed = 0;
    race_cmd->add_option("--seed", r_seed, "Monte Carlo master seed");
    double r_efficiency = 1.0;
    race_cmd->add_option("--efficiency", r_efficiency,
                         "Honest hashrate fraction applied during the race");
    bool r_counter = false;
    race_cmd->add_flag("--counterexample", r_counter,
                       "Show the fork where longest-chain and heaviest-work "
                       "rules disagree");
    int r_epochs = 10;
    double r_power = 0.002;
    double r_hard = 1000.0;
    race_cmd->add_option("--epochs", r_epochs,
                         "Counterexample: honest hard epochs");
    race_cmd->add_option("--power", r_power,
                         "Counterexample: attacker hashrate fraction");
    race_cmd->add_option("--hard", r_hard,
                         "Counterexample: honest epoch difficulty");

    // --- feasibility ----------------------------------------------------
    auto* feas = app.add_subcommand(
        "feasibility", "Derive the speed ratio from hardware assumptions");
    std::string f_config;
    feas->add_option("--config", f_config,
                     "Read option defaults from an INI file");
    feasibility::HardwareProfile hw;
    feas->add_option("--hashrate", hw.classical_hashrate,
                     "Network hashes per second");
    feas->add_option("--block-seconds", hw.block_seconds,
                     "Target seconds per block");
    feas->add_option("--depth", hw.circuit_depth,
                     "Gate depth per search iteration");
    feas->add_option("--clock", hw.clock_hz, "Logical gate rate, Hz");
    feas->add_option("--machines", hw.machines,
                     "Machines splitting the search space");
    feas->add_option("--overhead", hw.overhead_factor,
                     "Error-correction slowdown factor");
    int f_epoch_length = 2016;
    double f_block_minutes = 10.0;
    feas->add_option("--epoch-length", f_epoch_length,
                     "Blocks per difficulty epoch")
        ->check(CLI::PositiveNumber);
    feas->add_option("--block-minutes", f_block_minutes,
                     "Target minutes per block")
        ->check(CLI::PositiveNumber);

    // --- validate -------------------------------------------------------
    auto* val = app.add_subcommand(
        "validate", "Audit a schedule CSV against the retarget rule");
    std::string v_config;
    val->add_option("--config", v_config,
                    "Read option defaults from an INI file");
    std::string v_file;
    val->add_option("file", v_file, "Schedule CSV to check")->required();
    std::optional<double> v_speed;
    val->add_option("--speed", v_speed,
                    "Miner speed ratio (default: inferred from the file)");
    double v_tolerance = 1e-4;  // absorbs the CSV's 6-digit rounding
    val->add_option("--tolerance", v_tolerance,
                    "Relative tolerance for the numeric checks");
    std::optional<double> v_clamp;
    val->add_option("--clamp", v_clamp,
                    "Retarget clamp factor the consensus rule enforces");
    int v_epoch_length = 2016;
    double v_block_minutes = 10.0;
    val->add_option("--epoch-length", v_epoch_length,
                    "Blocks per difficulty epoch")
        ->check(CLI::PositiveNumber);
    val->add_option("--block-minutes", v_block_minutes,
                    "Target minutes per block")
        ->check(CLI::PositiveNumber);

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("qpow");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(argv_store.size());
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        const std::pair<CLI::App*, const std::string*> config_sources[] = {
            {attack, &a_config},
            {race_cmd, &r_config},
            {feas, &f_config},
            {val, &v_config},
        };
        for (const auto& [sub, path] : config_sources)
            if (*sub && !path->empty()) detail::apply_config_file(sub, *path);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    try {
        if (*attack) {
            for (const char* name : {"--variant", "--speed"})
                if (attack->get_option(name)->count() == 0) {
                    err << "error: attack requires " << name
                        << " (on the command line or in a config file)\n";
                    return 1;
                }
            af.clamp = a_clamp;
            af.n_down = a_n_down;
            if (a_epsilon && af.variant != 3) {
                err << "error: --epsilon applies to --variant 3 only\n";
                return 1;
            }
            const auto s = af.build(a_epsilon);
            const std::string csv = io::emit_schedule_csv(s);
            if (a_output.empty()) {
                out << csv;
            } else {
                std::filesystem::path target(a_output);
                if (target.is_relative() && !a_out_dir.empty())
                    target = std::filesystem::path(a_out_dir) / target;
                std::ofstream f(target, std::ios::binary);
                if (!f)
                    throw std::runtime_error("cannot open " +
                                             target.string());
                f << csv;
            }
            detail::print_summary(s, stdout_is_tty ? out : err);
            return 0;
        }

        if (*race_cmd) {
            if (r_counter) {
                const auto res = race::counterexample_longest_chain(
                    r_epochs, r_power, r_hard);
                out << "honest: " << res.honest.epochs.size()
                    << " epochs, " << res.honest.block_count
                    << " blocks, cumulative work "
                    << io::format_number(
                           consensus::cumulative_work(res.honest))
                    << "\n"
                    << "attacker: " << res.attacker.epochs.size()
                    << " epochs, " << res.attacker.block_count
                    << " blocks, cumulative work "
                    << io::format_number(
                           consensus::cumulative_work(res.attacker))
                    << "\n"
                    << "longest-chain winner: "
                    << detail::party_name(res.longest_chain_winner) << "\n"
                    << "cumulative-work winner: "
                    << detail::party_name(res.cumulative_work_winner)
                    << "\n";
                return 0;
            }

            rf.clamp = r_clamp;
            rf.n_down = r_n_down;
            schedule::AttackSchedule s;
            if (!r_schedule_path.empty()) {
                std::optional<quantum::MinerSpeed> speed;
                if (r_speed->count() > 0)
                    speed = quantum::MinerSpeed{rf.speed};
                s = io::parse_schedule_csv(
                    detail::slurp_file(r_schedule_path), rf.params(), speed);
            } else {
                if (rf.variant == 0 || r_speed->count() == 0) {
                    err << "error: race needs either --schedule FILE or "
                           "--variant with --speed\n";
                    return 1;
                }
                s = rf.build(std::nullopt);
            }

            race::HonestModel model;
            model.mode = r_mode == "mc" ? race::HonestMode::PoissonMC
                                        : race::HonestMode::Deterministic;
            model.efficiency = r_efficiency;
            model.trials = r_trials;
            model.seed = r_seed;
            const auto res = race::race_win_probability(s, model);
            out << "attacker cpow: "
                << io::format_number(res.attacker_cpow) << "\n"
                << "honest cpow (expected): "
                << io::format_number(res.honest_cpow_expected) << "\n"
                << "margin: " << io::format_number(res.margin) << "\n";
            if (model.mode == race::HonestMode::PoissonMC)
                out << "trials: " << model.trials << "\n"
                    << "seed: " << model.seed << "\n";
            out << "win probability: "
                << io::format_number(res.win_probability) << "\n";
            if (res.ci95)
                out << "ci95: [" << io::format_number(res.ci95->low) << ", "
                    << io::format_number(res.ci95->high) << "]\n";
            return 0;
        }

        if (*feas) {
            consensus::ConsensusParams params;
            params.epoch_length = f_epoch_length;
            params.target_block_minutes = f_block_minutes;
            const auto speed = feasibility::speed_ratio(hw);
            out << "per-hash success probability: "
                << io::format_number(
                       feasibility::per_hash_success_probability(hw))
                << "\n"
                << "grover iterations per block: "
                << io::format_number(feasibility::grover_iterations(hw))
                << "\n"
                << "quantum block time: "
                << io::format_number(feasibility::quantum_block_seconds(hw))
                << " seconds\n"
                << "speed ratio r: " << io::format_number(speed.r) << "\n"
                << "spike attack duration: "
                << io::format_number(feasibility::attack_duration_years(
                       speed, params, feasibility::AttackVariant::Spike))
                << " years\n";
            return 0;
        }

        if (*val) {
            consensus::ConsensusParams params;
            params.epoch_length = v_epoch_length;
            params.target_block_minutes = v_block_minutes;
            params.clamp_factor = v_clamp;
            std::optional<quantum::MinerSpeed> speed;
            if (v_speed) speed = quantum::MinerSpeed{*v_speed};
            const auto s = io::parse_schedule_csv(
                detail::slurp_file(v_file), params, speed);
            const auto report =
                consensus::validate_schedule(s, params, v_tolerance);
            int violations = 0;
            for (const auto& issue : report.issues) {
                const bool bad =
                    issue.severity == consensus::IssueSeverity::violation;
                violations += bad ? 1 : 0;
                out << "epoch " << issue.epoch_index << ": "
                    << (bad ? "violation: " : "warning: ") << issue.message
                    << "\n";
            }
            if (report.valid()) {
                out << "schedule is valid (" << s.epochs.size()
                    << " epochs)\n";
                return 0;
            }
            out << "schedule is invalid (" << violations
                << " violation(s) in " << s.epochs.size() << " epochs)\n";
            return 2;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace qpow::cli
