// qchain_cli.cpp — command-line front end.
//
// Four subcommands (evolve, eigen, spectrum, sweep) share the chain options.
// A JSON config file provides the base values and explicit flags override
// individual fields. Errors go to stderr as one-line JSON objects; exit code
// 0 = success, 2 = invalid configuration, 3 = solver failure, 4 = I/O failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qchain/csv.hpp"
#include "qchain/errors.hpp"
#include "qchain/run.hpp"

namespace {

struct FlagValues {
    std::string config_path;
    int n = 0;
    double gamma = 0.0;
    std::string kd;
    double kd_pi = 0.0;
    std::string positions;
    int excited = 0;
    std::string initial_file;
    double t_max = 0.0;
    int samples = 0;
    std::string method;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    double delta_min = 0.0;
    double delta_max = 0.0;
    int delta_points = 0;
    double observation_time = 0.0;
    std::string spectrum_method;
    std::string normalization;
    std::string sweep_parameter;
    double sweep_from = 0.0;
    double sweep_to = 0.0;
    double sweep_step = 0.0;
    int jobs = 0;
    std::string output;
};

bool flag_given(const CLI::App* cmd, const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

std::vector<double> parse_position_list(const std::string& text) {
    std::vector<double> values;
    std::string cell;
    std::istringstream stream(text);
    while (std::getline(stream, cell, ',')) {
        values.push_back(qchain::parse_pi_units(cell));
    }
    if (values.empty()) throw std::invalid_argument("empty position list");
    return values;
}

// Register the options shared by every subcommand; returns the option
// pointers needed to test presence after parsing.
void add_chain_options(CLI::App* cmd, FlagValues& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file with base values");
    cmd->add_option("-n,--n", flags.n, "number of qubits");
    cmd->add_option("--gamma", flags.gamma, "single-qubit decay rate");
    cmd->add_option("--kd", flags.kd, "qubit spacing phase in pi units, e.g. 0.5 or 0.5pi");
    cmd->add_option("--kd-pi", flags.kd_pi, "qubit spacing phase as a bare pi multiplier");
    cmd->add_option("--positions", flags.positions,
                    "comma-separated per-qubit phases in pi units (overrides --kd)");
    cmd->add_option("--excited", flags.excited, "1-based index of the initially excited qubit");
    cmd->add_option("--initial-file", flags.initial_file,
                    "JSON array of amplitudes ([re, im] pairs) overriding --excited");
    cmd->add_option("-o,--output", flags.output, "output CSV path, '-' for stdout");
}

void apply_common(const CLI::App* cmd, const FlagValues& flags, qchain::RunConfig& config) {
    if (flag_given(cmd, "--n")) config.n = flags.n;
    if (flag_given(cmd, "--gamma")) config.gamma = flags.gamma;
    if (flag_given(cmd, "--kd") && flag_given(cmd, "--kd-pi")) {
        throw std::invalid_argument("specify --kd or --kd-pi, not both");
    }
    if (flag_given(cmd, "--kd")) {
        config.kd_pi = qchain::parse_pi_units(flags.kd);
        config.positions_pi.reset();
    }
    if (flag_given(cmd, "--kd-pi")) {
        config.kd_pi = flags.kd_pi;
        config.positions_pi.reset();
    }
    if (flag_given(cmd, "--positions")) {
        config.positions_pi = parse_position_list(flags.positions);
        config.kd_pi.reset();
    }
    if (flag_given(cmd, "--excited")) config.excited = flags.excited;
    if (flag_given(cmd, "--initial-file")) config.initial_file = flags.initial_file;
    if (flag_given(cmd, "--output")) config.output = flags.output;
}

qchain::RunConfig load_base_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream file(path);
    if (!file) throw qchain::IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        file >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed config file: ") + e.what());
    }
    return qchain::RunConfig::from_json(j);
}

void report_cli_error(int code, const std::string& message) {
    nlohmann::json j;
    j["error"] = {{"code", code}, {"kind", code == 4 ? "io_failure" : "invalid_config"},
                  {"message", message}};
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collective decay of a qubit chain coupled to a 1D waveguide"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("qchain ") + qchain::kVersion);

    FlagValues flags;

    CLI::App* evolve = app.add_subcommand("evolve", "time evolution of the qubit amplitudes");
    add_chain_options(evolve, flags);
    evolve->add_option("--t-max", flags.t_max, "end of the time grid");
    evolve->add_option("--samples", flags.samples, "number of uniform time samples");
    evolve->add_option("--method", flags.method, "propagator: auto, modal or ode");
    evolve->add_option("--rel-tol", flags.rel_tol, "adaptive relative tolerance");
    evolve->add_option("--abs-tol", flags.abs_tol, "adaptive absolute tolerance");

    CLI::App* eigen = app.add_subcommand("eigen", "characteristic roots and classification");
    add_chain_options(eigen, flags);

    CLI::App* spectrum = app.add_subcommand("spectrum", "emitted-photon spectrum");
    add_chain_options(spectrum, flags);
    spectrum->add_option("--delta-min", flags.delta_min, "lowest detuning");
    spectrum->add_option("--delta-max", flags.delta_max, "highest detuning");
    spectrum->add_option("--delta-points", flags.delta_points, "detuning grid size");
    spectrum->add_option("--observation-time", flags.observation_time,
                         "upper limit of the emission integral");
    spectrum->add_option("--spectrum-method", flags.spectrum_method,
                         "route: numeric (quadrature) or modal (closed form)");
    spectrum->add_option("--normalization", flags.normalization, "raw or peak");
    spectrum->add_option("--method", flags.method, "propagator for the numeric route");
    spectrum->add_option("--rel-tol", flags.rel_tol, "adaptive relative tolerance");
    spectrum->add_option("--abs-tol", flags.abs_tol, "adaptive absolute tolerance");

    CLI::App* sweep = app.add_subcommand("sweep", "scan a parameter and tabulate mode metrics");
    add_chain_options(sweep, flags);
    sweep->add_option("--parameter", flags.sweep_parameter, "swept field: n, kd or excited");
    sweep->add_option("--from", flags.sweep_from, "first swept value (kd in pi units)");
    sweep->add_option("--to", flags.sweep_to, "last swept value, inclusive");
    sweep->add_option("--step", flags.sweep_step, "sweep increment");
    sweep->add_option("--jobs", flags.jobs, "worker threads for sweep points");
    sweep->add_option("--t-max", flags.t_max, "end of the per-point time grid");
    sweep->add_option("--samples", flags.samples, "per-point time samples");
    sweep->add_option("--observation-time", flags.observation_time,
                      "per-point emission integral limit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        report_cli_error(2, e.what());
        return 2;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        qchain::RunConfig config = load_base_config(flags.config_path);

        if (cmd == evolve) config.subcommand = qchain::Subcommand::Evolve;
        if (cmd == eigen) config.subcommand = qchain::Subcommand::Eigenmodes;
        if (cmd == spectrum) config.subcommand = qchain::Subcommand::Spectrum;
        if (cmd == sweep) config.subcommand = qchain::Subcommand::Sweep;

        apply_common(cmd, flags, config);
        if (flag_given(cmd, "--t-max")) config.t_max = flags.t_max;
        if (flag_given(cmd, "--samples")) config.samples = flags.samples;
        if (flag_given(cmd, "--method")) config.method = flags.method;
        if (flag_given(cmd, "--rel-tol")) config.rel_tol = flags.rel_tol;
        if (flag_given(cmd, "--abs-tol")) config.abs_tol = flags.abs_tol;
        if (flag_given(cmd, "--delta-min")) config.delta_min = flags.delta_min;
        if (flag_given(cmd, "--delta-max")) config.delta_max = flags.delta_max;
        if (flag_given(cmd, "--delta-points")) config.delta_points = flags.delta_points;
        if (flag_given(cmd, "--observation-time")) {
            config.observation_time = flags.observation_time;
        }
        if (flag_given(cmd, "--spectrum-method")) config.spectrum_method = flags.spectrum_method;
        if (flag_given(cmd, "--normalization")) config.normalization = flags.normalization;
        if (cmd == sweep) {
            if (flag_given(cmd, "--parameter")) {
                if (flags.sweep_parameter == "n") {
                    config.sweep_parameter = qchain::SweepParameter::Qubits;
                } else if (flags.sweep_parameter == "kd") {
                    config.sweep_parameter = qchain::SweepParameter::Spacing;
                } else if (flags.sweep_parameter == "excited") {
                    config.sweep_parameter = qchain::SweepParameter::ExcitedIndex;
                } else {
                    throw std::invalid_argument("sweep parameter must be n, kd or excited");
                }
            }
            if (flag_given(cmd, "--from")) config.sweep_from = flags.sweep_from;
            if (flag_given(cmd, "--to")) config.sweep_to = flags.sweep_to;
            if (flag_given(cmd, "--step")) config.sweep_step = flags.sweep_step;
            if (flag_given(cmd, "--jobs")) config.jobs = flags.jobs;
        }

        return qchain::run_command(config, std::cerr);
    } catch (const qchain::IoError& e) {
        report_cli_error(4, e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        report_cli_error(2, e.what());
        return 2;
    } catch (const std::exception& e) {
        report_cli_error(2, e.what());
        return 2;
    }
}
