#include "qchain/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "qchain/csv.hpp"

namespace qchain {
namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

std::string join_keys(const std::vector<std::string>& keys) {
    std::string out;
    for (const auto& k : keys) {
        if (!out.empty()) out += ", ";
        out += k;
    }
    return out;
}

Subcommand subcommand_from_string(const std::string& name) {
    if (name == "evolve") return Subcommand::Evolve;
    if (name == "eigen") return Subcommand::Eigenmodes;
    if (name == "spectrum") return Subcommand::Spectrum;
    if (name == "sweep") return Subcommand::Sweep;
    throw std::invalid_argument("unknown subcommand: " + name);
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
    if (name == "n") return SweepParameter::Qubits;
    if (name == "kd") return SweepParameter::Spacing;
    if (name == "excited") return SweepParameter::ExcitedIndex;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

void write_config_comment(const RunConfig& config, std::ostream& out) {
    out << "# config: " << config.to_json().dump() << "\n";
}

bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-9; }

}  // namespace

const char* to_string(Subcommand c) {
    switch (c) {
        case Subcommand::Evolve: return "evolve";
        case Subcommand::Eigenmodes: return "eigen";
        case Subcommand::Spectrum: return "spectrum";
        case Subcommand::Sweep: return "sweep";
    }
    return "unknown";
}

const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Qubits: return "n";
        case SweepParameter::Spacing: return "kd";
        case SweepParameter::ExcitedIndex: return "excited";
    }
    return "unknown";
}

double parse_pi_units(const std::string& text) {
    std::string trimmed = text;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    const size_t end = trimmed.find_last_not_of(" \t");
    trimmed.erase(end == std::string::npos ? 0 : end + 1);
    if (trimmed.empty()) throw std::invalid_argument("empty spacing value");

    std::string numeric = trimmed;
    if (numeric.size() >= 2 && numeric.compare(numeric.size() - 2, 2, "pi") == 0) {
        numeric.erase(numeric.size() - 2);
        if (numeric.empty() || numeric == "+") return 1.0;
        if (numeric == "-") return -1.0;
    }
    return parse_double(numeric);
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "subcommand", "n", "gamma", "kd_pi", "positions_pi", "excited", "initial_file",
        "t_max", "samples", "method", "rel_tol", "abs_tol",
        "delta_min", "delta_max", "delta_points", "observation_time",
        "spectrum_method", "normalization",
        "sweep_parameter", "sweep_from", "sweep_to", "sweep_step", "jobs", "output"};

    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& item : j.items()) {
        if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
            throw std::invalid_argument("unknown config key '" + item.key() +
                                        "' (known: " + join_keys(known) + ")");
        }
    }

    RunConfig config;
    try {
        if (j.contains("subcommand")) {
            config.subcommand = subcommand_from_string(j.at("subcommand").get<std::string>());
        }
        if (j.contains("n")) config.n = j.at("n").get<int>();
        if (j.contains("gamma")) config.gamma = j.at("gamma").get<double>();
        if (j.contains("kd_pi")) config.kd_pi = j.at("kd_pi").get<double>();
        if (j.contains("positions_pi")) {
            config.positions_pi = j.at("positions_pi").get<std::vector<double>>();
        }
        if (j.contains("excited")) config.excited = j.at("excited").get<int>();
        if (j.contains("initial_file")) {
            config.initial_file = j.at("initial_file").get<std::string>();
        }
        if (j.contains("t_max")) config.t_max = j.at("t_max").get<double>();
        if (j.contains("samples")) config.samples = j.at("samples").get<int>();
        if (j.contains("method")) config.method = j.at("method").get<std::string>();
        if (j.contains("rel_tol")) config.rel_tol = j.at("rel_tol").get<double>();
        if (j.contains("abs_tol")) config.abs_tol = j.at("abs_tol").get<double>();
        if (j.contains("delta_min")) config.delta_min = j.at("delta_min").get<double>();
        if (j.contains("delta_max")) config.delta_max = j.at("delta_max").get<double>();
        if (j.contains("delta_points")) config.delta_points = j.at("delta_points").get<int>();
        if (j.contains("observation_time")) {
            config.observation_time = j.at("observation_time").get<double>();
        }
        if (j.contains("spectrum_method")) {
            config.spectrum_method = j.at("spectrum_method").get<std::string>();
        }
        if (j.contains("normalization")) {
            config.normalization = j.at("normalization").get<std::string>();
        }
        if (j.contains("sweep_parameter")) {
            config.sweep_parameter =
                sweep_parameter_from_string(j.at("sweep_parameter").get<std::string>());
        }
        if (j.contains("sweep_from")) config.sweep_from = j.at("sweep_from").get<double>();
        if (j.contains("sweep_to")) config.sweep_to = j.at("sweep_to").get<double>();
        if (j.contains("sweep_step")) config.sweep_step = j.at("sweep_step").get<double>();
        if (j.contains("jobs")) config.jobs = j.at("jobs").get<int>();
        if (j.contains("output")) config.output = j.at("output").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed config value: ") + e.what());
    }
    return config;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["subcommand"] = to_string(subcommand);
    j["n"] = n;
    j["gamma"] = gamma;
    if (kd_pi) j["kd_pi"] = *kd_pi;
    if (positions_pi) j["positions_pi"] = *positions_pi;
    j["excited"] = excited;
    if (initial_file) j["initial_file"] = *initial_file;
    j["t_max"] = t_max;
    j["samples"] = samples;
    j["method"] = method;
    j["rel_tol"] = rel_tol;
    j["abs_tol"] = abs_tol;
    j["delta_min"] = delta_min;
    j["delta_max"] = delta_max;
    j["delta_points"] = delta_points;
    j["observation_time"] = observation_time;
    j["spectrum_method"] = spectrum_method;
    j["normalization"] = normalization;
    if (sweep_parameter) {
        j["sweep_parameter"] = to_string(*sweep_parameter);
        j["sweep_from"] = sweep_from;
        j["sweep_to"] = sweep_to;
        j["sweep_step"] = sweep_step;
        j["jobs"] = jobs;
    }
    j["output"] = output;
    return j;
}

void RunConfig::validate() const {
    // During a sweep the swept field is replaced per point, so checks that
    // couple it to other fields move to the per-point configs; a point that
    // fails them is reported as a failed row instead of aborting the sweep.
    const bool sweeping_qubits = subcommand == Subcommand::Sweep && sweep_parameter &&
                                 *sweep_parameter == SweepParameter::Qubits;
    const bool sweeping_excited = subcommand == Subcommand::Sweep && sweep_parameter &&
                                  *sweep_parameter == SweepParameter::ExcitedIndex;

    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (kd_pi && positions_pi) {
        throw std::invalid_argument("kd_pi and positions_pi are mutually exclusive");
    }
    if (sweeping_qubits && positions_pi) {
        throw std::invalid_argument("positions_pi cannot be combined with a qubit sweep");
    }
    if (positions_pi && static_cast<int>(positions_pi->size()) != n) {
        throw std::invalid_argument("positions_pi must list one value per qubit");
    }
    if (!sweeping_qubits && !sweeping_excited && (excited < 1 || excited > n)) {
        throw std::invalid_argument("excited index out of range");
    }
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
    if (samples < 2) throw std::invalid_argument("samples must be at least 2");
    if (method != "auto" && method != "modal" && method != "ode") {
        throw std::invalid_argument("method must be auto, modal or ode");
    }
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("tolerances must be positive");
    }
    if (delta_points < 1) throw std::invalid_argument("delta_points must be at least 1");
    if (delta_points > 1 && !(delta_min < delta_max)) {
        throw std::invalid_argument("delta_min must be below delta_max");
    }
    if (!(observation_time > 0.0)) throw std::invalid_argument("observation_time must be positive");
    if (spectrum_method != "numeric" && spectrum_method != "modal") {
        throw std::invalid_argument("spectrum_method must be numeric or modal");
    }
    if (normalization != "raw" && normalization != "peak") {
        throw std::invalid_argument("normalization must be raw or peak");
    }
    if (subcommand == Subcommand::Sweep) {
        if (!sweep_parameter) throw std::invalid_argument("sweep requires a sweep parameter");
        if (!(sweep_step > 0.0)) throw std::invalid_argument("sweep_step must be positive");
        if (sweep_to < sweep_from) throw std::invalid_argument("sweep range is empty");
        if (*sweep_parameter == SweepParameter::Qubits ||
            *sweep_parameter == SweepParameter::ExcitedIndex) {
            if (!is_integral(sweep_from) || !is_integral(sweep_to) || !is_integral(sweep_step)) {
                throw std::invalid_argument("integer sweep needs integer bounds and step");
            }
            if (sweep_from < 1.0) throw std::invalid_argument("integer sweep must start at 1 or above");
        }
        if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
    }
}

ChainConfig RunConfig::chain() const {
    ChainConfig cc;
    cc.n_qubits = n;
    cc.gamma = gamma;
    cc.excited_index = excited;
    if (positions_pi) {
        cc.positions.reserve(positions_pi->size());
        for (double p : *positions_pi) cc.positions.push_back(p * std::numbers::pi);
    } else {
        cc.kd = kd_pi.value_or(0.0) * std::numbers::pi;
    }
    if (initial_file) {
        std::ifstream file(*initial_file);
        if (!file) throw IoError("cannot open initial-state file: " + *initial_file);
        nlohmann::json j;
        try {
            file >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("malformed initial-state file: ") + e.what());
        }
        if (!j.is_array()) throw std::invalid_argument("initial state must be a JSON array");
        cc.initial_amplitudes.resize(static_cast<int>(j.size()));
        for (size_t i = 0; i < j.size(); ++i) {
            const auto& entry = j[i];
            if (entry.is_number()) {
                cc.initial_amplitudes[static_cast<int>(i)] = entry.get<double>();
            } else if (entry.is_array() && entry.size() == 2) {
                cc.initial_amplitudes[static_cast<int>(i)] =
                    std::complex<double>(entry[0].get<double>(), entry[1].get<double>());
            } else {
                throw std::invalid_argument(
                    "initial state entries must be numbers or [re, im] pairs");
            }
        }
    }
    cc.validate();
    return cc;
}

EvolveOptions RunConfig::evolve_options() const {
    EvolveOptions options;
    if (method == "modal") {
        options.method = EvolveMethod::Modal;
    } else if (method == "ode") {
        options.method = EvolveMethod::AdaptiveOde;
    } else {
        options.method = EvolveMethod::Auto;
    }
    options.rel_tol = rel_tol;
    options.abs_tol = abs_tol;
    return options;
}

std::vector<double> RunConfig::detuning_grid() const {
    std::vector<double> grid(static_cast<size_t>(delta_points));
    if (delta_points == 1) {
        grid[0] = delta_min;
        return grid;
    }
    for (int i = 0; i < delta_points; ++i) {
        grid[static_cast<size_t>(i)] =
            delta_min + (delta_max - delta_min) *
                            (static_cast<double>(i) / static_cast<double>(delta_points - 1));
    }
    return grid;
}

void run_evolve(const RunConfig& config, std::ostream& out) {
    config.validate();
    const ChainConfig cc = config.chain();
    const EffectiveMatrix matrix = build_effective_matrix(cc);
    const std::vector<double> times = uniform_time_grid(config.t_max, config.samples);
    const AmplitudeTrajectory traj =
        evolve(matrix, cc.initial_state(), times, config.evolve_options());

    write_config_comment(config, out);
    out << "t";
    for (int m = 1; m <= config.n; ++m) out << ",re_beta_" << m << ",im_beta_" << m;
    for (int m = 1; m <= config.n; ++m) out << ",prob_" << m;
    out << ",p_ph\n";
    for (int i = 0; i < traj.n_times(); ++i) {
        out << format_double(traj.times[static_cast<size_t>(i)]);
        for (int m = 0; m < config.n; ++m) {
            out << ',' << format_double(traj.amplitudes(i, m).real()) << ','
                << format_double(traj.amplitudes(i, m).imag());
        }
        for (int m = 0; m < config.n; ++m) out << ',' << format_double(traj.probabilities(i, m));
        out << ',' << format_double(traj.p_photon[i]) << "\n";
    }
}

void run_eigenmodes(const RunConfig& config, std::ostream& out) {
    config.validate();
    const ChainConfig cc = config.chain();
    const ModeSet modes = characteristic_roots(build_effective_matrix(cc));

    write_config_comment(config, out);
    out << "index,re_lambda,im_lambda,E_i,Gamma_i,class\n";
    for (int i = 0; i < modes.size(); ++i) {
        out << (i + 1) << ',' << format_double(modes.roots[i].real()) << ','
            << format_double(modes.roots[i].imag()) << ',' << format_double(modes.detuning(i))
            << ',' << format_double(modes.decay_rate(i)) << ',' << to_string(modes.classify(i))
            << "\n";
    }
}

namespace {

// Spectrum on an arbitrary detuning grid for a resolved chain, honoring the
// configured route (dense-trajectory quadrature vs modal closed form).
Eigen::VectorXcd spectrum_amplitudes(const RunConfig& config, const ChainConfig& cc,
                                     const Eigen::VectorXd& deltas) {
    const EffectiveMatrix matrix = build_effective_matrix(cc);
    const std::vector<double> positions = cc.resolved_positions();
    const double t_obs = config.observation_time;

    if (config.spectrum_method == "modal") {
        const ModeSet modes = characteristic_roots(matrix);
        const ModalExpansion expansion = modal_expansion(modes, cc.initial_state());
        return photon_amplitude_modal(expansion, positions, deltas, t_obs);
    }

    double max_abs_delta = 0.0;
    for (int i = 0; i < deltas.size(); ++i) {
        max_abs_delta = std::max(max_abs_delta, std::abs(deltas[i]));
    }
    const double step = required_time_step(max_abs_delta, cc.n_qubits, cc.gamma);
    const int samples = std::max(2, static_cast<int>(std::ceil(t_obs / step - 1e-12)) + 1);
    const std::vector<double> times = uniform_time_grid(t_obs, samples);
    const AmplitudeTrajectory traj =
        evolve(matrix, cc.initial_state(), times, config.evolve_options());
    return photon_amplitude_numeric(traj, positions, deltas, t_obs);
}

}  // namespace

void run_spectrum(const RunConfig& config, std::ostream& out) {
    config.validate();
    const ChainConfig cc = config.chain();

    const std::vector<double> grid = config.detuning_grid();
    Eigen::VectorXd deltas =
        Eigen::Map<const Eigen::VectorXd>(grid.data(), static_cast<int>(grid.size()));
    const Eigen::VectorXcd amplitudes = spectrum_amplitudes(config, cc, deltas);
    const SpectrumResult spec = make_spectrum(deltas, amplitudes, config.observation_time,
                                              SpectrumNormalization::Raw);
    const double peak = spec.values.maxCoeff();

    write_config_comment(config, out);
    out << "delta,s_raw,s_norm\n";
    for (int i = 0; i < spec.detunings.size(); ++i) {
        const double raw = spec.values[i];
        const double norm = peak > 0.0 ? raw / peak : 0.0;
        out << format_double(spec.detunings[i]) << ',' << format_double(raw) << ','
            << format_double(norm) << "\n";
    }
}

PowerLawFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3) {
        throw std::invalid_argument("power-law fit needs at least 3 matching points");
    }
    const size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
            throw std::invalid_argument("power-law fit needs positive data");
        }
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("power-law fit needs distinct x values");

    PowerLawFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

namespace {

RunConfig config_for_sweep_point(const RunConfig& base, double value) {
    RunConfig point = base;
    point.subcommand = Subcommand::Evolve;  // per-point validation is not a sweep
    point.sweep_parameter.reset();
    switch (*base.sweep_parameter) {
        case SweepParameter::Qubits:
            point.n = static_cast<int>(std::llround(value));
            break;
        case SweepParameter::Spacing:
            point.kd_pi = value;
            point.positions_pi.reset();
            break;
        case SweepParameter::ExcitedIndex:
            point.excited = static_cast<int>(std::llround(value));
            break;
    }
    return point;
}

// Dominant-peak half width: coarse pass on the configured detuning window,
// then a zoomed remeasure around the tallest peak so narrow lines are not
// limited by the coarse grid step.
double sweep_peak_hwhm(const RunConfig& point, const ChainConfig& cc) {
    const std::vector<double> grid = point.detuning_grid();
    if (grid.size() < 3) return kNan;
    Eigen::VectorXd deltas =
        Eigen::Map<const Eigen::VectorXd>(grid.data(), static_cast<int>(grid.size()));

    const EffectiveMatrix matrix = build_effective_matrix(cc);
    const ModeSet modes = characteristic_roots(matrix);
    const ModalExpansion expansion = modal_expansion(modes, cc.initial_state());
    const std::vector<double> positions = cc.resolved_positions();
    const double t_obs = point.observation_time;

    Eigen::VectorXd coarse =
        photon_amplitude_modal(expansion, positions, deltas, t_obs).cwiseAbs2();
    int imax = 0;
    coarse.maxCoeff(&imax);
    const double center = deltas[imax];
    const double coarse_step = deltas[1] - deltas[0];
    double fwhm = measure_fwhm(deltas, coarse);
    if (std::isnan(fwhm)) fwhm = 4.0 * coarse_step;

    const double half_window = std::max(2.5 * fwhm, 10.0 * coarse_step);
    Eigen::VectorXd fine(deltas.size());
    for (int i = 0; i < fine.size(); ++i) {
        fine[i] = center - half_window +
                  2.0 * half_window * (static_cast<double>(i) / static_cast<double>(fine.size() - 1));
    }
    Eigen::VectorXd values =
        photon_amplitude_modal(expansion, positions, fine, t_obs).cwiseAbs2();
    const double refined = measure_fwhm(fine, values);
    return std::isnan(refined) ? kNan : refined / 2.0;
}

SweepRow compute_sweep_row(const RunConfig& base, double value) {
    SweepRow row;
    row.value = value;
    try {
        const RunConfig point = config_for_sweep_point(base, value);
        point.validate();
        const ChainConfig cc = point.chain();
        const EffectiveMatrix matrix = build_effective_matrix(cc);
        const ModeSet modes = characteristic_roots(matrix);
        row.min_decay_rate = modes.min_decay_rate();
        row.dark_count = dark_state_count(modes);

        const std::vector<double> times = uniform_time_grid(point.t_max, point.samples);
        const AmplitudeTrajectory traj =
            evolve(matrix, cc.initial_state(), times, point.evolve_options());
        row.p_photon_final = traj.p_photon[traj.n_times() - 1];

        row.peak_hwhm = sweep_peak_hwhm(point, cc);
    } catch (const std::exception& e) {
        row.error = e.what();
        row.min_decay_rate = kNan;
        row.dark_count = -1;
        row.p_photon_final = kNan;
        row.peak_hwhm = kNan;
    }
    return row;
}

}  // namespace

SweepResult run_sweep(const RunConfig& config, std::ostream& out) {
    config.validate();

    std::vector<double> values;
    for (double v = config.sweep_from; v <= config.sweep_to + 1e-9 * config.sweep_step;
         v += config.sweep_step) {
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument("sweep range is empty");

    SweepResult result;
    result.rows.resize(values.size());

    const int jobs = std::min<int>(config.jobs, static_cast<int>(values.size()));
    if (jobs <= 1) {
        for (size_t i = 0; i < values.size(); ++i) {
            result.rows[i] = compute_sweep_row(config, values[i]);
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<size_t>(jobs));
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
                    result.rows[i] = compute_sweep_row(config, values[i]);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    if (config.sweep_parameter == SweepParameter::Qubits) {
        std::vector<double> xs, ys;
        for (const SweepRow& row : result.rows) {
            if (!row.error && row.min_decay_rate > 0.0) {
                xs.push_back(row.value);
                ys.push_back(row.min_decay_rate);
            }
        }
        if (xs.size() >= 3) result.fit = fit_power_law(xs, ys);
    }

    write_config_comment(config, out);
    out << "sweep_value,min_gamma_i,dark_count,p_ph_final,peak_hwhm\n";
    for (const SweepRow& row : result.rows) {
        if (row.error) {
            out << "# point " << format_double(row.value) << " failed: " << *row.error << "\n";
            out << format_double(row.value) << ",nan,-1,nan,nan\n";
            continue;
        }
        out << format_double(row.value) << ',' << format_double(row.min_decay_rate) << ','
            << row.dark_count << ',' << format_double(row.p_photon_final) << ','
            << format_double(row.peak_hwhm) << "\n";
    }
    if (result.fit) {
        out << "# fit: slope=" << format_double(result.fit->slope)
            << " intercept=" << format_double(result.fit->intercept)
            << " r_squared=" << format_double(result.fit->r_squared) << "\n";
    }
    return result;
}

namespace {

void report_error(std::ostream& diag, int code, const char* kind, const std::string& message) {
    nlohmann::json j;
    j["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
    diag << j.dump() << "\n";
}

void dispatch(const RunConfig& config, std::ostream& out) {
    switch (config.subcommand) {
        case Subcommand::Evolve: run_evolve(config, out); return;
        case Subcommand::Eigenmodes: run_eigenmodes(config, out); return;
        case Subcommand::Spectrum: run_spectrum(config, out); return;
        case Subcommand::Sweep: run_sweep(config, out); return;
    }
    throw std::invalid_argument("unknown subcommand");
}

}  // namespace

int run_command(const RunConfig& config, std::ostream& diag) {
    try {
        config.validate();

        std::ofstream file;
        const bool to_stdout = config.output == "-";
        if (!to_stdout) {
            file.open(config.output, std::ios::out | std::ios::trunc);
            if (!file) throw IoError("cannot open output file: " + config.output);
        }

        std::ostringstream buffer;
        dispatch(config, buffer);

        if (to_stdout) {
            std::cout << buffer.str() << std::flush;
        } else {
            file << buffer.str();
            file.flush();
            if (!file) throw IoError("failed to write output file: " + config.output);
        }
        return 0;
    } catch (const IoError& e) {
        report_error(diag, 4, "io_failure", e.what());
        return 4;
    } catch (const SolverError& e) {
        report_error(diag, 3, "solver_failure", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        report_error(diag, 2, "invalid_config", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        report_error(diag, 2, "invalid_config", e.what());
        return 2;
    } catch (const std::exception& e) {
        report_error(diag, 3, "internal_error", e.what());
        return 3;
    }
}

}  // namespace qchain
