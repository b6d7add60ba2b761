#include "qchain/dynamics.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace qchain;
using qtest::kPi;

namespace {

ChainConfig equidistant(int n, double kd_pi_units, int excited = 1, double gamma = 1.0) {
    ChainConfig cc;
    cc.n_qubits = n;
    cc.gamma = gamma;
    cc.kd = kd_pi_units * kPi;
    cc.excited_index = excited;
    return cc;
}

}  // namespace

TEST_CASE("uniform time grid hits both endpoints exactly") {
    const std::vector<double> grid = uniform_time_grid(40.0, 2000);
    REQUIRE(grid.size() == 2000);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 40.0);
    for (size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] - grid[i - 1] == doctest::Approx(40.0 / 1999.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(uniform_time_grid(-1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(uniform_time_grid(1.0, 1), std::invalid_argument);
}

TEST_CASE("modal and adaptive propagators agree") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const ChainConfig cc = qtest::random_chain(rng, 9);
        const EffectiveMatrix em = build_effective_matrix(cc);
        const std::vector<double> times = uniform_time_grid(8.0 / cc.gamma, 41);

        EvolveOptions modal;
        modal.method = EvolveMethod::Modal;
        EvolveOptions adaptive;
        adaptive.method = EvolveMethod::AdaptiveOde;

        const AmplitudeTrajectory a = evolve(em, cc.initial_state(), times, modal);
        const AmplitudeTrajectory b = evolve(em, cc.initial_state(), times, adaptive);
        CHECK((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("closed-form resonant dynamics") {
    for (int n : {2, 3, 5}) {
        for (ResonantParity parity : {ResonantParity::Even, ResonantParity::Odd}) {
            const double spacing = parity == ResonantParity::Even ? 2.0 : 1.0;
            for (int excited = 1; excited <= n; ++excited) {
                const ChainConfig cc = equidistant(n, spacing, excited);
                const EffectiveMatrix em = build_effective_matrix(cc);
                const std::vector<double> times = uniform_time_grid(6.0, 31);
                const AmplitudeTrajectory traj = evolve(em, cc.initial_state(), times);

                for (int k = 0; k < traj.n_times(); ++k) {
                    const ResonantState ref = analytic_amplitudes_resonant(
                        n, excited, parity, traj.times[static_cast<size_t>(k)]);
                    for (int m = 0; m < n; ++m) {
                        CHECK(std::abs(traj.amplitudes(k, m) - ref.amplitudes[m]) < 1e-8);
                    }
                    CHECK(std::abs(traj.p_photon[k] - ref.p_photon) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("emission probability is monotone and bounded") {
    std::mt19937 rng(32);
    for (int trial = 0; trial < 15; ++trial) {
        const ChainConfig cc = qtest::random_chain(rng);
        const EffectiveMatrix em = build_effective_matrix(cc);
        const std::vector<double> times = uniform_time_grid(12.0 / cc.gamma, 400);
        const AmplitudeTrajectory traj = evolve(em, cc.initial_state(), times);

        CHECK((photon_emission_probability(traj) - traj.p_photon).norm() == 0.0);
        CHECK(traj.p_photon[0] == doctest::Approx(0.0).epsilon(1e-12));
        for (int k = 1; k < traj.n_times(); ++k) {
            CHECK(traj.p_photon[k] >= traj.p_photon[k - 1] - 1e-10);
            CHECK(traj.p_photon[k] <= 1.0 + 1e-10);
        }
    }
}

TEST_CASE("trapped fraction is frozen at late times") {
    for (int n : {2, 5, 9}) {
        for (ResonantParity parity : {ResonantParity::Even, ResonantParity::Odd}) {
            const double spacing = parity == ResonantParity::Even ? 2.0 : 1.0;
            const ChainConfig cc = equidistant(n, spacing);
            const EffectiveMatrix em = build_effective_matrix(cc);
            const double t_frozen = 30.0 / (n * 1.0);
            const std::vector<double> times = {0.0, t_frozen, 2.0 * t_frozen};
            const AmplitudeTrajectory traj = evolve(em, cc.initial_state(), times);

            const ResonantState trapped =
                analytic_amplitudes_resonant(n, 1, parity, 1e6);  // effectively t = infinity
            for (int m = 0; m < n; ++m) {
                CHECK(std::abs(traj.amplitudes(1, m) - trapped.amplitudes[m]) < 1e-6);
                CHECK(std::abs(traj.amplitudes(2, m) - traj.amplitudes(1, m)) < 1e-6);
            }
        }
    }
}

TEST_CASE("single qubit decays exponentially") {
    ChainConfig cc;
    cc.n_qubits = 1;
    cc.gamma = 1.5;
    const EffectiveMatrix em = build_effective_matrix(cc);
    const std::vector<double> times = uniform_time_grid(4.0, 17);
    const AmplitudeTrajectory traj = evolve(em, cc.initial_state(), times);
    for (int k = 0; k < traj.n_times(); ++k) {
        const double expected = std::exp(-1.5 * traj.times[static_cast<size_t>(k)] / 2.0);
        CHECK(std::abs(traj.amplitudes(k, 0) - expected) < 1e-12);
    }
}

TEST_CASE("evolve validates its inputs") {
    const ChainConfig cc = equidistant(3, 0.5);
    const EffectiveMatrix em = build_effective_matrix(cc);
    const Eigen::VectorXcd beta0 = cc.initial_state();

    CHECK_THROWS_AS(evolve(em, beta0, {}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(em, beta0, {0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(em, beta0, {0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(em, 0.9 * beta0, {0.0, 1.0}), std::invalid_argument);

    Eigen::VectorXcd wrong_size = Eigen::VectorXcd::Zero(4);
    wrong_size[0] = 1.0;
    CHECK_THROWS_AS(evolve(em, wrong_size, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("unreachable tolerance surfaces as a solver failure") {
    const ChainConfig cc = equidistant(3, 0.5);
    const EffectiveMatrix em = build_effective_matrix(cc);
    EvolveOptions options;
    options.method = EvolveMethod::AdaptiveOde;
    options.rel_tol = 1e-30;
    options.abs_tol = 1e-300;
    CHECK_THROWS_AS(evolve(em, cc.initial_state(), uniform_time_grid(1.0, 5), options),
                    SolverError);
}

TEST_CASE("resonant closed form validates its inputs") {
    CHECK_THROWS_AS(analytic_amplitudes_resonant(0, 1, ResonantParity::Even, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(analytic_amplitudes_resonant(3, 4, ResonantParity::Even, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(analytic_amplitudes_resonant(3, 1, ResonantParity::Even, -0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(analytic_amplitudes_resonant(3, 1, ResonantParity::Even, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("plateau scan on a synthetic staircase") {
    // Ramp to 0.3 on [0,2], flat on [2,4], ramp to 0.5 on [4,6], flat to 10.
    const std::vector<double> times = uniform_time_grid(10.0, 1001);
    Eigen::VectorXd p(1001);
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        double v;
        if (t < 2.0) {
            v = 0.15 * t;
        } else if (t < 4.0) {
            v = 0.3;
        } else if (t < 6.0) {
            v = 0.3 + 0.1 * (t - 4.0);
        } else {
            v = 0.5;
        }
        p[static_cast<int>(i)] = v;
    }

    const PlateauScan scan = find_plateaus(times, p, 1e-3, 1.0);
    REQUIRE(scan.interior.size() == 1);
    CHECK(scan.interior[0].t_start == doctest::Approx(2.0).epsilon(0.02));
    CHECK(scan.interior[0].t_end == doctest::Approx(4.0).epsilon(0.02));
    REQUIRE(scan.saturation.has_value());
    CHECK(scan.saturation->t_start == doctest::Approx(6.0).epsilon(0.02));
    CHECK(scan.saturation->t_end == 10.0);

    // Narrower min_width also admits nothing new here; wider rejects the flat.
    CHECK(find_plateaus(times, p, 1e-3, 2.5).interior.empty());

    // A grid that cannot resolve min_width is refused.
    CHECK_THROWS_AS(find_plateaus(uniform_time_grid(10.0, 11), Eigen::VectorXd::Zero(11), 1e-3, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_plateaus(times, p, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("three-qubit quarter-wave emission shows an interior plateau") {
    const ChainConfig cc = equidistant(3, 0.5, 2);
    const EffectiveMatrix em = build_effective_matrix(cc);
    const std::vector<double> times = uniform_time_grid(40.0, 2000);
    const AmplitudeTrajectory traj = evolve(em, cc.initial_state(), times);
    const PlateauScan scan = find_plateaus(times, traj.p_photon, 1e-3, 0.2);
    CHECK(scan.interior.size() >= 1);
}
