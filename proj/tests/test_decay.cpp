#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rbsim/decay.hpp"
#include "rbsim/rng.hpp"
#include "rbsim/simulator.hpp"

using namespace rbsim;

TEST_CASE("decay model evaluation") {
    SECTION("p = 1 is flat") {
        const auto m = DecayModel::zero_order(0.5, 1.0, 0.5);
        for (int i : {0, 1, 10, 150}) CHECK(evaluate(m, i) == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("two-fidelity at m = 0 is twice the amplitude") {
        CHECK(evaluate(DecayModel::two_fidelity(0.31, 0.99, 0.9), 0) ==
              Catch::Approx(0.62).margin(1e-15));
    }

    SECTION("two-fidelity at the reference-row parameters") {
        const auto m = DecayModel::two_fidelity(0.25, 0.995, 0.959);
        const double expected = 0.25 * (std::pow(0.995, 150) + std::pow(0.959, 150));
        CHECK(evaluate(m, 150) == Catch::Approx(expected).epsilon(1e-14));
        CHECK(expected == Catch::Approx(0.1183).margin(5e-4));
    }

    SECTION("parameter counts") {
        CHECK(DecayModel::zero_order(1, 0.9, 0).parameter_count() == 3);
        CHECK(DecayModel::no_constant(1, 0.9).parameter_count() == 2);
        CHECK(DecayModel::residual_spam(1, 0.9, 0).parameter_count() == 3);
        CHECK(DecayModel::two_fidelity(1, 0.9, 0.8).parameter_count() == 3);
    }

    SECTION("monotone non-increasing in m for admissible parameters") {
        RandomStream rng(61);
        for (int trial = 0; trial < 200; ++trial) {
            const double a = rng.uniform01();
            const double p = 0.01 + 0.99 * rng.uniform01();
            const double q = p * rng.uniform01();
            const double b = rng.uniform01();
            const DecayModel models[] = {DecayModel::zero_order(a, p, b),
                                         DecayModel::no_constant(a, p),
                                         DecayModel::residual_spam(a, p, b),
                                         DecayModel::two_fidelity(a, p, std::max(q, 1e-6))};
            for (const auto& m : models)
                for (int i = 0; i < 40; i += 3)
                    CHECK(evaluate(m, i + 1) <= evaluate(m, i) + 1e-12);
        }
    }

    SECTION("two-fidelity with p = q collapses onto residual-spam with B = 0") {
        RandomStream rng(62);
        for (int trial = 0; trial < 100; ++trial) {
            const double a = rng.uniform01();
            const double p = 0.2 + 0.799 * rng.uniform01();
            const int m = static_cast<int>(rng.uniform_below(200));
            const double tf = evaluate(DecayModel::two_fidelity(a, p, p), m);
            const double rs = evaluate(DecayModel::residual_spam(2.0 * a, p, 0.0), m);
            CHECK(tf == Catch::Approx(rs).margin(1e-12));
        }
    }

    SECTION("canonicalization orders p >= q") {
        const auto m = DecayModel::two_fidelity(0.25, 0.9, 0.99).canonicalized();
        CHECK(m.p == 0.99);
        CHECK(m.q == 0.9);
    }
}

TEST_CASE("tilde series") {
    SECTION("perfect dataset gives F~ = 1") {
        SimulationPlan plan;
        plan.lengths = {2, 5};
        plan.n_sequences = 10;
        plan.n_shots = 4;
        plan.detuning = DetuningModel::fixed(0.0);
        plan.seed = 3;
        const auto series = tilde_series(simulate(plan));
        for (const auto& pt : series.points) {
            CHECK(pt.value == Catch::Approx(1.0).margin(1e-12));
            CHECK(pt.variance > 0.0);  // floored, saturated estimates
            CHECK(pt.variance == Catch::Approx(1.0 / (4.0 * 4 * 10)).margin(1e-15));
        }
    }

    SECTION("arithmetic of the B-elimination") {
        BenchmarkDataset ds;
        ds.n_shots = 10;
        // Up estimates {0.9, 0.7}, down estimates {0.6, 0.8} at m = 3.
        ds.records = {{3, Direction::Up, 0, 0.9, 10},
                      {3, Direction::Down, 1, 0.6, 10},
                      {3, Direction::Up, 2, 0.7, 10},
                      {3, Direction::Down, 3, 0.8, 10}};
        const auto series = tilde_series(ds);
        REQUIRE(series.points.size() == 1);
        CHECK(series.points[0].value == Catch::Approx(0.8 - (1.0 - 0.7)).margin(1e-12));
        const double var_up = sample_variance({0.9, 0.7}) / 2.0;
        const double var_down = sample_variance({0.6, 0.8}) / 2.0;
        CHECK(series.points[0].variance == Catch::Approx(var_up + var_down).margin(1e-15));
        CHECK(series.points[0].n_up == 2);
        CHECK(series.points[0].n_down == 2);
    }

    SECTION("missing direction throws") {
        BenchmarkDataset ds;
        ds.n_shots = 10;
        ds.records = {{3, Direction::Up, 0, 0.9, 10}, {3, Direction::Up, 1, 0.8, 10}};
        CHECK_THROWS_AS(tilde_series(ds), MissingDirection);
    }

    SECTION("direction series extracts one target") {
        BenchmarkDataset ds;
        ds.n_shots = 10;
        ds.records = {{3, Direction::Up, 0, 0.9, 10},
                      {3, Direction::Down, 1, 0.6, 10},
                      {3, Direction::Up, 2, 0.7, 10},
                      {3, Direction::Down, 3, 0.8, 10}};
        const auto up = direction_series(ds, Direction::Up);
        CHECK(up.kind == "up");
        CHECK(up.points[0].value == Catch::Approx(0.8).margin(1e-12));
        const auto down = direction_series(ds, Direction::Down);
        CHECK(down.points[0].value == Catch::Approx(0.7).margin(1e-12));
    }
}

TEST_CASE("fidelity conversions") {
    const double n_g = 1.875;

    SECTION("polarization to average fidelity") {
        CHECK(polarization_to_avg_fidelity(1.0) == 1.0);
        CHECK(polarization_to_avg_fidelity(0.0) == 0.5);
        CHECK(polarization_to_avg_fidelity(0.995) == Catch::Approx(0.9975).margin(1e-12));
    }

    SECTION("fidelity/polarization round trip") {
        RandomStream rng(63);
        for (int trial = 0; trial < 100; ++trial) {
            const double p = 2.0 * rng.uniform01() - 0.5;
            CHECK(avg_fidelity_to_polarization(polarization_to_avg_fidelity(p)) ==
                  Catch::Approx(p).margin(1e-12));
        }
    }

    SECTION("primitive gate fidelity at the reference-row polarizations") {
        CHECK(primitive_gate_fidelity(0.995, n_g) ==
              Catch::Approx(1.0 - 0.005 / (2.0 * n_g)).margin(1e-15));
        CHECK(primitive_gate_fidelity(0.995, n_g) == Catch::Approx(0.99867).margin(5e-6));
        CHECK(primitive_gate_fidelity(0.959, n_g) == Catch::Approx(0.98907).margin(5e-6));
        CHECK(primitive_gate_fidelity(1.0, 3.0) == 1.0);
    }

    SECTION("interleaved fidelity reproduces the table conversions") {
        CHECK(interleaved_fidelity(0.952, 0.959, n_g) == Catch::Approx(0.99805).margin(5e-6));
        CHECK(interleaved_fidelity(0.911, 0.995, n_g) == Catch::Approx(0.97749).margin(5e-6));
        CHECK(interleaved_fidelity(0.9, 0.9, n_g) == 1.0);
    }

    SECTION("ratio above 1 clamps with a warning up to 1.05, then throws") {
        bool clamped = false;
        CHECK(interleaved_fidelity(0.964, 0.959, n_g, &clamped) == 1.0);
        CHECK(clamped);
        clamped = false;
        CHECK(interleaved_fidelity(0.5, 0.9, n_g, &clamped) < 1.0);
        CHECK_FALSE(clamped);
        CHECK_THROWS_AS(interleaved_fidelity(0.99, 0.9, n_g), RatioOutOfRange);
    }

    SECTION("uncertainty propagation") {
        CHECK(primitive_gate_fidelity_stderr(0.0, n_g) == 0.0);
        CHECK(primitive_gate_fidelity_stderr(0.001, n_g) ==
              Catch::Approx(0.001 / 3.75).margin(1e-15));
        CHECK(primitive_gate_fidelity_stderr(0.001, n_g) == Catch::Approx(2.7e-4).margin(5e-6));

        // Quadrature combination vs finite-difference derivatives.
        const double p_int = 0.95, p_ref = 0.98, s_int = 2e-3, s_ref = 1.5e-3;
        const double h = 1e-7;
        const double d_int = (interleaved_fidelity(p_int + h, p_ref, n_g) -
                              interleaved_fidelity(p_int - h, p_ref, n_g)) /
                             (2.0 * h);
        const double d_ref = (interleaved_fidelity(p_int, p_ref + h, n_g) -
                              interleaved_fidelity(p_int, p_ref - h, n_g)) /
                             (2.0 * h);
        const double expected =
            std::sqrt(d_int * d_int * s_int * s_int + d_ref * d_ref * s_ref * s_ref);
        CHECK(interleaved_fidelity_stderr(p_int, p_ref, s_int, s_ref, n_g) ==
              Catch::Approx(expected).epsilon(1e-6));
    }

    SECTION("invalid reference polarization") {
        CHECK_THROWS_AS(interleaved_fidelity(0.9, 0.0, n_g), ConfigError);
    }
}
