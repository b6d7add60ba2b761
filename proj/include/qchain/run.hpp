// run.hpp — resolved run configuration and the four subcommand drivers.
//
// A RunConfig can come from a JSON file, command-line flags, or both
// (flags win). Every writer echoes the fully resolved config as a single
// '# config: {...}' comment so outputs are self-describing, and all numbers
// go through format_double so reruns are byte-identical.

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qchain/chain.hpp"
#include "qchain/dynamics.hpp"
#include "qchain/emission.hpp"

namespace qchain {

// Exit code 4: filesystem/stream failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Subcommand { Evolve, Eigenmodes, Spectrum, Sweep };
enum class SweepParameter { Qubits, Spacing, ExcitedIndex };

const char* to_string(Subcommand c);
const char* to_string(SweepParameter p);

struct RunConfig {
    Subcommand subcommand = Subcommand::Evolve;

    // Chain geometry. Spacings are given in units of pi (kd_pi = 0.5 means
    // kd = pi/2); explicit per-qubit phase positions are also in pi units.
    int n = 1;
    double gamma = 1.0;
    std::optional<double> kd_pi;  // mutually exclusive with positions_pi
    std::optional<std::vector<double>> positions_pi;
    int excited = 1;
    std::optional<std::string> initial_file;  // JSON array of [re, im] pairs

    // evolve
    double t_max = 40.0;
    int samples = 2000;
    std::string method = "auto";  // auto | modal | ode
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;

    // spectrum
    double delta_min = -3.0;
    double delta_max = 3.0;
    int delta_points = 2001;
    double observation_time = 100.0;
    std::string spectrum_method = "numeric";  // numeric | modal
    std::string normalization = "raw";        // raw | peak

    // sweep
    std::optional<SweepParameter> sweep_parameter;
    double sweep_from = 0.0;
    double sweep_to = 0.0;
    double sweep_step = 1.0;
    int jobs = 1;

    std::string output = "-";  // '-' = stdout

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;

    ChainConfig chain() const;          // loads initial_file if set
    EvolveOptions evolve_options() const;
    std::vector<double> detuning_grid() const;
};

void run_evolve(const RunConfig& config, std::ostream& out);
void run_eigenmodes(const RunConfig& config, std::ostream& out);
void run_spectrum(const RunConfig& config, std::ostream& out);

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least-squares fit of log(y) against log(x).
PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);

struct SweepRow {
    double value = 0.0;
    double min_decay_rate = 0.0;
    int dark_count = 0;
    double p_photon_final = 0.0;
    double peak_hwhm = 0.0;
    std::optional<std::string> error;  // row kept, metrics NaN
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<PowerLawFit> fit;  // qubit-count sweeps with >= 3 clean points
};

SweepResult run_sweep(const RunConfig& config, std::ostream& out);

// Parse "0.75pi", "pi", "-2pi" or a bare multiplier into pi units.
double parse_pi_units(const std::string& text);

// Exception -> {exit code, machine-readable error report on `diag`},
// with the CSV written to config.output ('-' = stdout).
int run_command(const RunConfig& config, std::ostream& diag);

}  // namespace qchain
