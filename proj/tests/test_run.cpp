#include "qchain/run.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifdef QCHAIN_CLI_PATH
#include <sys/wait.h>
#endif

#include "doctest.h"
#include "qchain/csv.hpp"
#include "qchain/modes.hpp"
#include "test_support.hpp"

using namespace qchain;

namespace {

std::string echoed_config_json(const CsvTable& table) {
    const std::string prefix = "# config: ";
    for (const std::string& comment : table.comments) {
        if (comment.rfind(prefix, 0) == 0) return comment.substr(prefix.size());
    }
    return {};
}

#ifdef QCHAIN_CLI_PATH

std::string tmp_path(const std::string& name) {
    return std::string(QCHAIN_TEST_TMPDIR) + "/" + name;
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream file(path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

CommandResult run_cli(const std::string& args) {
    const std::string out_path = tmp_path("cli_stdout.txt");
    const std::string err_path = tmp_path("cli_stderr.txt");
    const std::string command =
        std::string(QCHAIN_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

#endif  // QCHAIN_CLI_PATH

}  // namespace

TEST_CASE("number formatting is fixed-width scientific") {
    CHECK(format_double(0.0) == "0.00000000000e+00");
    CHECK(format_double(-0.25) == "-2.50000000000e-01");
    CHECK(format_double(1.0 / 3.0) == "3.33333333333e-01");
    CHECK(parse_double(format_double(0.1)) == doctest::Approx(0.1).epsilon(1e-11));
    CHECK_THROWS_AS(parse_double("1.0x"), std::invalid_argument);
}

TEST_CASE("pi-unit parsing") {
    CHECK(parse_pi_units("0.5pi") == doctest::Approx(0.5));
    CHECK(parse_pi_units("pi") == doctest::Approx(1.0));
    CHECK(parse_pi_units("-pi") == doctest::Approx(-1.0));
    CHECK(parse_pi_units("2pi") == doctest::Approx(2.0));
    CHECK(parse_pi_units("0.75") == doctest::Approx(0.75));
    CHECK(parse_pi_units(" 1.5pi ") == doctest::Approx(1.5));
    CHECK_THROWS_AS(parse_pi_units(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_pi_units("abcpi"), std::invalid_argument);
}

TEST_CASE("config JSON round-trip preserves every field") {
    RunConfig config;
    config.subcommand = Subcommand::Spectrum;
    config.n = 7;
    config.gamma = 0.8;
    config.kd_pi = 0.5;
    config.excited = 4;
    config.t_max = 25.0;
    config.samples = 1234;
    config.method = "modal";
    config.delta_min = -2.0;
    config.delta_max = 2.0;
    config.delta_points = 501;
    config.observation_time = 55.0;
    config.spectrum_method = "modal";
    config.normalization = "peak";
    config.output = "out.csv";

    const RunConfig back = RunConfig::from_json(config.to_json());
    CHECK(back.to_json().dump() == config.to_json().dump());
    CHECK(back.subcommand == Subcommand::Spectrum);
    CHECK(back.kd_pi.has_value());
    CHECK(*back.kd_pi == 0.5);
    CHECK_FALSE(back.positions_pi.has_value());

    RunConfig sweep;
    sweep.subcommand = Subcommand::Sweep;
    sweep.sweep_parameter = SweepParameter::Qubits;
    sweep.sweep_from = 4;
    sweep.sweep_to = 24;
    sweep.sweep_step = 2;
    sweep.jobs = 3;
    sweep.positions_pi = std::vector<double>{0.0, 0.5, 1.25};
    sweep.n = 3;
    const RunConfig sweep_back = RunConfig::from_json(sweep.to_json());
    CHECK(sweep_back.to_json().dump() == sweep.to_json().dump());
    REQUIRE(sweep_back.positions_pi.has_value());
    CHECK(sweep_back.positions_pi->size() == 3);
}

TEST_CASE("unknown config keys are rejected with the known-key list") {
    nlohmann::json j;
    j["n"] = 3;
    j["squirrel"] = 1;
    try {
        RunConfig::from_json(j);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find("squirrel") != std::string::npos);
        CHECK(what.find("gamma") != std::string::npos);  // key list included
    }
}

TEST_CASE("config validation rejects inconsistent requests") {
    RunConfig config;
    config.n = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = RunConfig{};
    config.kd_pi = 0.5;
    config.positions_pi = std::vector<double>{0.0};
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = RunConfig{};
    config.method = "sorcery";
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);

    config = RunConfig{};
    config.subcommand = Subcommand::Sweep;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);  // no parameter

    config.sweep_parameter = SweepParameter::Qubits;
    config.sweep_from = 1.5;
    config.sweep_to = 3.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);  // non-integer qubit count

    config.sweep_from = 2.0;
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("eigen table lists sorted modes with classes") {
    RunConfig config;
    config.subcommand = Subcommand::Eigenmodes;
    config.n = 5;
    config.kd_pi = 0.5;

    std::ostringstream out;
    run_eigenmodes(config, out);
    std::istringstream in(out.str());
    const CsvTable table = read_csv(in);

    REQUIRE(table.header.size() == 6);
    CHECK(table.header[0] == "index");
    CHECK(table.header[5] == "class");
    REQUIRE(table.rows.size() == 5);

    const ModeSet modes = characteristic_roots(build_effective_matrix(config.chain()));
    for (size_t i = 0; i < 5; ++i) {
        CHECK(table.value(i, "re_lambda") ==
              doctest::Approx(modes.roots[static_cast<int>(i)].real()).epsilon(1e-10));
        CHECK(table.value(i, "Gamma_i") ==
              doctest::Approx(modes.decay_rate(static_cast<int>(i))).epsilon(1e-10));
        CHECK(table.value(i, "E_i") ==
              doctest::Approx(-modes.roots[static_cast<int>(i)].imag()).epsilon(1e-10));
        CHECK(table.rows[i][5] == to_string(modes.classify(static_cast<int>(i))));
    }

    // The echoed config parses back to the run's exact configuration.
    const std::string echoed = echoed_config_json(table);
    REQUIRE_FALSE(echoed.empty());
    const RunConfig parsed = RunConfig::from_json(nlohmann::json::parse(echoed));
    CHECK(parsed.to_json().dump() == config.to_json().dump());
}

TEST_CASE("evolve table carries amplitudes, probabilities and emission") {
    RunConfig config;
    config.subcommand = Subcommand::Evolve;
    config.n = 3;
    config.kd_pi = 1.0;
    config.excited = 2;
    config.t_max = 5.0;
    config.samples = 11;

    std::ostringstream out;
    run_evolve(config, out);
    std::istringstream in(out.str());
    const CsvTable table = read_csv(in);

    REQUIRE(table.header.size() == 1 + 2 * 3 + 3 + 1);
    CHECK(table.header[0] == "t");
    CHECK(table.header[1] == "re_beta_1");
    CHECK(table.header[6] == "im_beta_3");
    CHECK(table.header[7] == "prob_1");
    CHECK(table.header.back() == "p_ph");
    REQUIRE(table.rows.size() == 11);

    CHECK(table.value(0, "t") == 0.0);
    CHECK(table.value(0, "re_beta_2") == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(table.value(0, "p_ph") == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(table.value(10, "t") == 5.0);

    // Cross-check one row against the closed form at half-wave spacing.
    const ResonantState ref = analytic_amplitudes_resonant(3, 2, ResonantParity::Odd, 5.0);
    CHECK(table.value(10, "re_beta_1") == doctest::Approx(ref.amplitudes[0].real()).epsilon(1e-8));
    CHECK(table.value(10, "p_ph") == doctest::Approx(ref.p_photon).epsilon(1e-8));

    // Byte determinism.
    std::ostringstream again;
    run_evolve(config, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("spectrum table: raw and normalized columns from both routes") {
    RunConfig config;
    config.subcommand = Subcommand::Spectrum;
    config.n = 1;
    config.delta_min = -2.0;
    config.delta_max = 2.0;
    config.delta_points = 41;
    config.observation_time = 20.0;

    std::ostringstream numeric_out;
    run_spectrum(config, numeric_out);
    std::istringstream numeric_in(numeric_out.str());
    const CsvTable numeric = read_csv(numeric_in);
    REQUIRE(numeric.header == std::vector<std::string>({"delta", "s_raw", "s_norm"}));
    REQUIRE(numeric.rows.size() == 41);

    config.spectrum_method = "modal";
    std::ostringstream modal_out;
    run_spectrum(config, modal_out);
    std::istringstream modal_in(modal_out.str());
    const CsvTable modal = read_csv(modal_in);

    double max_norm = 0.0;
    for (size_t i = 0; i < 41; ++i) {
        CHECK(numeric.value(i, "s_raw") == doctest::Approx(modal.value(i, "s_raw")).epsilon(1e-6));
        max_norm = std::max(max_norm, numeric.value(i, "s_norm"));
        // Single qubit at long time: lorentzian of half width 1/2 around zero.
        const double delta = numeric.value(i, "delta");
        CHECK(numeric.value(i, "s_raw") ==
              doctest::Approx(1.0 / (delta * delta + 0.25)).epsilon(1e-4));
    }
    CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power-law fit recovers exact exponents") {
    std::vector<double> xs, ys;
    for (int n = 4; n <= 24; n += 2) {
        xs.push_back(n);
        ys.push_back(2.0 * std::pow(n, -3.0));
    }
    const PowerLawFit fit = fit_power_law(xs, ys);
    CHECK(fit.slope == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_power_law({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("sweep rows and the qubit-count fit") {
    RunConfig config;
    config.subcommand = Subcommand::Sweep;
    config.kd_pi = 0.5;
    config.sweep_parameter = SweepParameter::Qubits;
    config.sweep_from = 1;
    config.sweep_to = 4;
    config.sweep_step = 1;
    config.t_max = 10.0;
    config.samples = 300;

    std::ostringstream out;
    const SweepResult result = run_sweep(config, out);
    REQUIRE(result.rows.size() == 4);

    // Single qubit: the only mode decays at gamma, nothing is dark.
    CHECK(result.rows[0].min_decay_rate == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(result.rows[0].dark_count == 0);
    CHECK(result.rows[0].p_photon_final == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-8));
    CHECK(result.rows[0].peak_hwhm == doctest::Approx(0.5).epsilon(0.02));

    for (const SweepRow& row : result.rows) CHECK_FALSE(row.error.has_value());
    REQUIRE(result.fit.has_value());
    CHECK(result.fit->slope < 0.0);

    std::istringstream in(out.str());
    const CsvTable table = read_csv(in);
    REQUIRE(table.header ==
            std::vector<std::string>(
                {"sweep_value", "min_gamma_i", "dark_count", "p_ph_final", "peak_hwhm"}));
    REQUIRE(table.rows.size() == 4);
    bool fit_comment = false;
    for (const std::string& comment : table.comments) {
        if (comment.rfind("# fit: slope=", 0) == 0) fit_comment = true;
    }
    CHECK(fit_comment);

    // A spacing sweep gets no power-law fit.
    RunConfig spacing = config;
    spacing.n = 2;
    spacing.kd_pi.reset();
    spacing.sweep_parameter = SweepParameter::Spacing;
    spacing.sweep_from = 0.25;
    spacing.sweep_to = 0.75;
    spacing.sweep_step = 0.25;
    std::ostringstream spacing_out;
    const SweepResult spacing_result = run_sweep(spacing, spacing_out);
    CHECK(spacing_result.rows.size() == 3);
    CHECK_FALSE(spacing_result.fit.has_value());
}

TEST_CASE("sweep keeps going when a point fails") {
    RunConfig config;
    config.subcommand = Subcommand::Sweep;
    config.kd_pi = 0.5;
    config.excited = 3;  // valid only once n >= 3
    config.sweep_parameter = SweepParameter::Qubits;
    config.sweep_from = 2;
    config.sweep_to = 4;
    config.sweep_step = 1;
    config.t_max = 5.0;
    config.samples = 200;

    std::ostringstream out;
    const SweepResult result = run_sweep(config, out);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].error.has_value());  // n = 2 cannot excite qubit 3
    CHECK_FALSE(result.rows[1].error.has_value());
    CHECK_FALSE(result.rows[2].error.has_value());
    CHECK(out.str().find("# point") != std::string::npos);
    CHECK(out.str().find("failed") != std::string::npos);
}

TEST_CASE("parallel sweep output is byte-identical to serial") {
    RunConfig config;
    config.subcommand = Subcommand::Sweep;
    config.kd_pi = 0.5;
    config.sweep_parameter = SweepParameter::Qubits;
    config.sweep_from = 1;
    config.sweep_to = 6;
    config.sweep_step = 1;
    config.t_max = 8.0;
    config.samples = 250;

    std::ostringstream serial;
    run_sweep(config, serial);

    RunConfig parallel = config;
    parallel.jobs = 3;
    std::ostringstream threaded;
    run_sweep(parallel, threaded);

    // The jobs field is echoed in the config comment; compare data lines only.
    const auto strip_comments = [](const std::string& text) {
        std::istringstream in(text);
        std::string line, kept;
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] != '#') kept += line + "\n";
        }
        return kept;
    };
    CHECK(strip_comments(serial.str()) == strip_comments(threaded.str()));
}

#ifdef QCHAIN_CLI_PATH

TEST_CASE("cli: eigen output matches the library") {
    const CommandResult result = run_cli("eigen -n 5 --kd 0.5pi");
    REQUIRE(result.exit_code == 0);
    std::istringstream in(result.out);
    const CsvTable table = read_csv(in);
    REQUIRE(table.rows.size() == 5);
    CHECK(table.value(0, "Gamma_i") == doctest::Approx(2.79632190326).epsilon(1e-9));

    const CommandResult alias = run_cli("eigen -n 5 --kd-pi 0.5");
    CHECK(alias.exit_code == 0);
    CHECK(alias.out == result.out);
}

TEST_CASE("cli: invalid configuration exits 2 with a JSON error report") {
    const CommandResult result = run_cli("eigen -n 0");
    CHECK(result.exit_code == 2);
    const nlohmann::json j = nlohmann::json::parse(result.err);
    CHECK(j.at("error").at("code") == 2);
    CHECK(j.at("error").at("kind") == "invalid_config");

    CHECK(run_cli("eigen --no-such-flag").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);  // missing subcommand
    CHECK(run_cli("evolve -n 2 --kd 0.5pi --kd-pi 0.5").exit_code == 2);
    CHECK(run_cli("evolve -n 2 --kd 0.5pi --method sorcery").exit_code == 2);
}

TEST_CASE("cli: unreachable solver tolerance exits 3") {
    const CommandResult result =
        run_cli("evolve -n 3 --kd 0.5pi --method ode --rel-tol 1e-30 --abs-tol 1e-300 "
                "--t-max 1 --samples 5");
    CHECK(result.exit_code == 3);
    const nlohmann::json j = nlohmann::json::parse(result.err);
    CHECK(j.at("error").at("code") == 3);
    CHECK(j.at("error").at("kind") == "solver_failure");
}

TEST_CASE("cli: unwritable output path exits 4") {
    const CommandResult result =
        run_cli("eigen -n 2 --kd 0.5pi -o /nonexistent_dir_qchain/out.csv");
    CHECK(result.exit_code == 4);
    const nlohmann::json j = nlohmann::json::parse(result.err);
    CHECK(j.at("error").at("kind") == "io_failure");

    CHECK(run_cli("eigen -n 2 --config /nonexistent_dir_qchain/config.json").exit_code == 4);
}

TEST_CASE("cli: config file with flag overrides") {
    const std::string config_path = tmp_path("base_config.json");
    {
        std::ofstream file(config_path);
        file << R"({"n": 3, "kd_pi": 0.5, "gamma": 1.0, "excited": 2})";
    }
    const CommandResult result = run_cli("eigen --config " + config_path + " -n 5");
    REQUIRE(result.exit_code == 0);
    std::istringstream in(result.out);
    const CsvTable table = read_csv(in);
    CHECK(table.rows.size() == 5);  // override won over the file's n = 3

    const std::string echoed = echoed_config_json(table);
    const nlohmann::json j = nlohmann::json::parse(echoed);
    CHECK(j.at("n") == 5);
    CHECK(j.at("kd_pi") == 0.5);
    CHECK(j.at("excited") == 2);

    // Malformed JSON in the file is a configuration error, not an I/O one.
    const std::string broken_path = tmp_path("broken_config.json");
    {
        std::ofstream file(broken_path);
        file << "{not json";
    }
    CHECK(run_cli("eigen --config " + broken_path).exit_code == 2);
}

TEST_CASE("cli: explicit initial state file") {
    const std::string state_path = tmp_path("initial_state.json");
    {
        std::ofstream file(state_path);
        file << "[[0.7071067811865476, 0.0], [0.0, 0.7071067811865476]]";
    }
    const CommandResult result = run_cli("evolve -n 2 --kd 0.5pi --initial-file " + state_path +
                                         " --t-max 1 --samples 3");
    REQUIRE(result.exit_code == 0);
    std::istringstream in(result.out);
    const CsvTable table = read_csv(in);
    CHECK(table.value(0, "re_beta_1") == doctest::Approx(0.7071067811865476).epsilon(1e-10));
    CHECK(table.value(0, "im_beta_2") == doctest::Approx(0.7071067811865476).epsilon(1e-10));

    // Norm violations are rejected.
    const std::string bad_path = tmp_path("bad_state.json");
    {
        std::ofstream file(bad_path);
        file << "[[1.0, 0.0], [1.0, 0.0]]";
    }
    CHECK(run_cli("evolve -n 2 --kd 0.5pi --initial-file " + bad_path).exit_code == 2);
}

TEST_CASE("cli: outputs are byte-deterministic across runs") {
    const std::string args =
        "spectrum -n 2 --kd 0.25pi --delta-points 31 --observation-time 10";
    const CommandResult first = run_cli(args);
    REQUIRE(first.exit_code == 0);
    const CommandResult second = run_cli(args);
    CHECK(first.out == second.out);
    CHECK(!first.out.empty());
}

TEST_CASE("cli: writes the requested output file") {
    const std::string out_path = tmp_path("eigen_table.csv");
    std::remove(out_path.c_str());
    const CommandResult result = run_cli("eigen -n 3 --kd pi -o " + out_path);
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.empty());
    const CsvTable table = read_csv_file(out_path);
    CHECK(table.rows.size() == 3);
}

TEST_CASE("cli: version flag") {
    const CommandResult result = run_cli("--version");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("qchain") != std::string::npos);
}

#endif  // QCHAIN_CLI_PATH
