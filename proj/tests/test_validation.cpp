#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "xcir/validation.hpp"

using namespace xcir;
using Catch::Approx;

TEST_CASE("compensator identity") {
    ScenarioConfig cfg = testutil::load_fixture("fig2.json");
    auto tests = default_compensator_tests(cfg.schedule);
    CompensatorReport rep = compensator_check(cfg.schedule, tests, 100000, 31337);
    REQUIRE(rep.rows.size() == 3);

    SECTION("H == 1 is the exact counting identity") {
        const auto& row = rep.rows[0];
        CHECK(row.mc_mean == 13.0);
        CHECK(row.quadrature == Approx(13.0).epsilon(1e-14));
        CHECK(row.mc_se == 0.0);
        CHECK(row.pass);
    }
    SECTION("H = z averages one half per jump") {
        const auto& row = rep.rows[1];
        CHECK(row.quadrature == Approx(6.5).epsilon(1e-12));
        CHECK(std::abs(row.z) <= 3.0);
    }
    SECTION("H = e^z before s_5 quadrature equals the closed form 5(e-1)") {
        const auto& row = rep.rows[2];
        CHECK(row.quadrature == Approx(8.591409142295225).epsilon(1e-12));
        CHECK(std::abs(row.z) <= 3.0);
    }
    CHECK(rep.pass);
}

TEST_CASE("characteristic-function comparison") {
    SECTION("empty schedule reduces to the continuous CIR check") {
        json j;
        j["params"] = {{"kappa", 0.1}, {"theta", 3.0}, {"sigma", 0.1}, {"x0", 1.0}};
        j["horizon"] = 2.0;
        j["grid"] = {{"dt", 0.5}};
        j["mc"] = {{"n_paths", 20000}, {"seed", 1}, {"chunk_size", 1000}};
        j["u_grid"] = {{{"re", -1.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 1.0}}};
        ScenarioConfig cfg = validate_config(j);
        CFComparisonReport rep =
            compare_affine(cfg, cfg.horizon, cfg.u_grid, 20000, 97);
        CHECK(rep.pass);
        CHECK(rep.max_abs_z <= 4.0);
    }
    SECTION("fig.2 and fig.3 pass at reduced path counts") {
        for (const char* name : {"fig2.json", "fig3.json"}) {
            ScenarioConfig cfg = testutil::load_fixture(name);
            CFComparisonReport rep =
                compare_affine(cfg, cfg.horizon, cfg.u_grid, 20000, *cfg.mc.seed);
            INFO(name << " max |z| = " << rep.max_abs_z);
            CHECK(rep.pass);
            REQUIRE(rep.rows.size() == 6);
        }
    }
}

TEST_CASE("stationary limit of the time-change jump") {
    CIRParams p{0.1, 3.0, 0.1, 1.0};
    std::vector<Complex> us = {{-2.0, 0.0}, {-1.0, 0.0}, {-0.5, 0.0},
                               {0.0, 1.0},  {0.0, 2.0},  {-1.0, 1.0}};
    std::vector<double> xs = {0.0, 1.0, 5.0};

    SECTION("huge shift matches the Gamma(60, 20) characteristic function") {
        StationaryReport rep = stationary_limit_check(p, 1e6, us, xs);
        CHECK(rep.max_abs_dev <= 1e-6);
    }
    SECTION("zero shift leaves exp(u x) untouched") {
        StationaryReport rep = stationary_limit_check(p, 0.0, us, xs);
        for (const auto& row : rep.rows) {
            Complex expected = std::exp(row.u * row.x);
            CHECK(row.post_jump_cf == expected);
        }
    }
    SECTION("deviation shrinks monotonically over four decades") {
        double prev = std::numeric_limits<double>::infinity();
        for (double delta : {10.0, 100.0, 1000.0, 10000.0}) {
            StationaryReport rep = stationary_limit_check(p, delta, us, xs);
            CHECK(rep.max_abs_dev <= prev + 1e-15);
            prev = rep.max_abs_dev;
        }
    }
}

TEST_CASE("reports are reproducible and carry their provenance") {
    ScenarioConfig cfg = testutil::load_fixture("fig3.json");
    CFComparisonReport a = compare_affine(cfg, cfg.horizon, cfg.u_grid, 5000, 4242);
    CFComparisonReport b = compare_affine(cfg, cfg.horizon, cfg.u_grid, 5000, 4242);
    CHECK(to_json(a).dump() == to_json(b).dump());
    CHECK(a.seed == 4242);
    CHECK(a.n_paths == 5000);
    CHECK(a.config_hash == config_hash(cfg));

    CompensatorReport ca = compensator_check(cfg.schedule,
                                             default_compensator_tests(cfg.schedule),
                                             20000, 55);
    CompensatorReport cb = compensator_check(cfg.schedule,
                                             default_compensator_tests(cfg.schedule),
                                             20000, 55);
    CHECK(to_json(ca).dump() == to_json(cb).dump());

    // different seed, different draws
    CFComparisonReport c = compare_affine(cfg, cfg.horizon, cfg.u_grid, 5000, 4243);
    CHECK(to_json(c).dump() != to_json(a).dump());
}

TEST_CASE("text renderings stay aligned and informative") {
    ScenarioConfig cfg = testutil::load_fixture("beta0.json");
    CFComparisonReport rep = compare_affine(cfg, cfg.horizon, cfg.u_grid, 2000, 9);
    std::string text = to_text(rep);
    CHECK(text.find("max |z|") != std::string::npos);
    CompensatorReport comp = compensator_check(
        cfg.schedule, default_compensator_tests(cfg.schedule), 1000, 10);
    CHECK(to_text(comp).find("compensator identity") != std::string::npos);
}
