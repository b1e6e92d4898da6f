#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "xcir/jump_exponents.hpp"
#include "xcir/stats.hpp"

using namespace xcir;
using Catch::Approx;

namespace {

const CIRParams kFig{0.1, 3.0, 0.1, 1.0};

const std::vector<Complex> kUGrid = {
    {-2.0, 0.0}, {-1.0, 0.0}, {-0.5, 0.0}, {0.0, 1.0},
    {0.0, 2.0},  {-1.0, 1.0}, {-0.1, -3.0}, {-5.0, 0.5}};

GenericTransport constant_up_jump(double size) {
    GenericTransport gt;
    gt.transport = [size](double, double) { return size; };
    gt.gamma0 = [size](Complex u) { return u * size; };
    gt.gamma1 = [](Complex) { return Complex{}; };
    return gt;
}

ExponentPair proportional_pair(double factor) {
    ExponentPair pair;
    pair.gamma0 = [](Complex) { return Complex{}; };
    pair.gamma1 = [factor](Complex u) { return factor * u; };
    return pair;
}

} // namespace

TEST_CASE("exponent pairs vanish at the origin, bit-exactly") {
    for (JumpModel model : std::initializer_list<JumpModel>{
             NoJump{}, DropToGamma{3.0, 1.0, 1.0}, TimeChange{15.0}}) {
        ExponentPair pair = exponents(model, kFig);
        Complex g0 = pair.gamma0(Complex{0.0, 0.0});
        Complex g1 = pair.gamma1(Complex{0.0, 0.0});
        CHECK(g0.real() == 0.0);
        CHECK(g0.imag() == 0.0);
        CHECK(g1.real() == 0.0);
        CHECK(g1.imag() == 0.0);
        CHECK(!std::signbit(g0.real()));
        CHECK(!std::signbit(g1.real()));
    }
}

TEST_CASE("time-change exponents: short and long shift asymptotics") {
    SECTION("delta -> 0 collapses to no jump") {
        ExponentPair zero = exponents(TimeChange{0.0}, kFig);
        for (Complex u : kUGrid) {
            CHECK(std::abs(zero.gamma0(u)) == 0.0);
            CHECK(std::abs(zero.gamma1(u)) < 1e-15);
        }
        ExponentPair tiny = exponents(TimeChange{1e-9}, kFig);
        for (Complex u : kUGrid) {
            CHECK(std::abs(tiny.gamma0(u)) < 1e-6);
            CHECK(std::abs(tiny.gamma1(u)) < 1e-6);
        }
    }
    SECTION("delta -> inf gives the stationary Gamma exponent") {
        ExponentPair pair = exponents(TimeChange{1e6}, kFig);
        // -(nu/2) log(1 - u sigma^2 / (2 kappa)) at u = -1, nu = 120
        CHECK(pair.gamma0(Complex{-1.0, 0.0}).real() ==
              Approx(-2.9274098501659225).epsilon(1e-12));
        for (Complex u : kUGrid) {
            Complex expected = -0.5 * 120.0 * std::log(1.0 - u * 0.05);
            CHECK(std::abs(pair.gamma0(u) - expected) < 1e-9);
            CHECK(std::abs(pair.gamma1(u) - (-u)) < 1e-9);
        }
    }
}

TEST_CASE("generic transport without exponents is rejected") {
    GenericTransport gt;
    gt.transport = [](double, double z) { return z; };
    REQUIRE_THROWS_WITH(exponents(JumpModel{gt}, kFig),
                        Catch::Matchers::ContainsSubstring("no affine representation"));
}

TEST_CASE("sampler and exponent pair agree in distribution") {
    // MC characteristic function of xi vs exp(gamma0 + gamma1 x) at >= 8
    // left-half-plane points, three pre-jump states, 1e5 draws.
    // |Re u| stays <= 1: deeper exponential moments of a jump from x = 5
    // are valid but too heavy-tailed for a 1e5-draw estimator.
    const std::vector<Complex> uGrid = {
        {-1.0, 0.0},  {-0.5, 0.0}, {-0.25, 0.0}, {0.0, 1.0},
        {0.0, 2.0},   {-1.0, 1.0}, {-0.1, -3.0}, {-0.3, 0.7}};
    std::vector<std::pair<const char*, JumpModel>> models = {
        {"drop_to_gamma(3,1,1)", DropToGamma{3.0, 1.0, 1.0}},
        {"drop_to_gamma(3.5,1.5,1)", DropToGamma{3.5, 1.5, 1.0}},
        {"time_change(15)", TimeChange{15.0}},
        {"time_change(25)", TimeChange{25.0}},
    };
    Rng rng(20240618);
    for (const auto& [name, model] : models) {
        ExponentPair pair = exponents(model, kFig);
        for (double x : {0.0, 1.0, 5.0}) {
            std::vector<double> draws(100000);
            for (auto& d : draws) d = sample_jump(model, kFig, x, rng);
            for (Complex u : uGrid) {
                ComplexMeanVar acc;
                for (double xi : draws) acc.add(std::exp(u * xi));
                Complex analytic = std::exp(pair.gamma0(u) + pair.gamma1(u) * x);
                INFO(name << " x=" << x << " u=" << u);
                CHECK(std::abs(z_score(acc.mean().real(), analytic.real(),
                                       acc.re.std_error())) <= 3.0);
                CHECK(std::abs(z_score(acc.mean().imag(), analytic.imag(),
                                       acc.im.std_error())) <= 3.0);
            }
        }
    }
}

TEST_CASE("jumps never take the state negative") {
    std::vector<JumpModel> models = {NoJump{}, DropToGamma{3.0, 1.0, 1.0},
                                     DropToGamma{3.5, 1.5, 1.0}, TimeChange{15.0}};
    Rng rng(99);
    const std::vector<double> xs = {0.0, 0.5, 1.0, 5.0, 10.0};
    std::size_t violations = 0, total = 0;
    for (const auto& model : models) {
        for (double x : xs) {
            for (int i = 0; i < 50000; ++i) {
                double xi = sample_jump(model, kFig, x, rng);
                if (!(x + xi >= 0.0)) ++violations;
                ++total;
            }
        }
    }
    CHECK(total == 1000000);
    CHECK(violations == 0);
}

TEST_CASE("drop-to-gamma post-state moments") {
    Rng rng(7);
    MeanVar acc;
    DropToGamma g{3.0, 1.0, 1.0};
    const double x = 2.0;
    for (int i = 0; i < 100000; ++i) acc.add(x + sample_jump(g, kFig, x, rng));
    CHECK(std::abs(acc.mean - 5.0) <= 3.0 * acc.std_error()); // (alpha + beta x)/lambda
}

TEST_CASE("time change with zero shift never moves the state") {
    Rng rng(8);
    for (int i = 0; i < 1000; ++i)
        CHECK(sample_jump(TimeChange{0.0}, kFig, 1.3, rng) == 0.0);
}

TEST_CASE("generic transport samples below -x are rejected") {
    GenericTransport gt;
    gt.transport = [](double x, double) { return -2.0 * x; };
    Rng rng(9);
    REQUIRE_THROWS_WITH(sample_jump(JumpModel{gt}, kFig, 1.0, rng),
                        Catch::Matchers::ContainsSubstring("inadmissible jump sample"));
}

TEST_CASE("support infimum via the log-CF limit") {
    SECTION("built-in models have support [-x, inf)") {
        for (JumpModel model : std::initializer_list<JumpModel>{
                 DropToGamma{3.0, 1.0, 1.0}, TimeChange{15.0}}) {
            ExponentPair pair = exponents(model, kFig);
            for (double x : {0.5, 1.0, 5.0}) {
                LimitEstimate est = support_infimum(pair, x);
                CHECK(est.value == Approx(-x).margin(1e-6));
            }
        }
    }
    SECTION("no jump degenerates at zero") {
        ExponentPair pair = exponents(NoJump{}, kFig);
        LimitEstimate est = support_infimum(pair, 3.0);
        CHECK(est.value == Approx(0.0).margin(1e-12));
    }
    SECTION("raw tail error decreases monotonically in y") {
        ExponentPair pair = exponents(TimeChange{15.0}, kFig);
        const double x = 1.0;
        double prev = std::numeric_limits<double>::infinity();
        for (double y : {1e5, 1e6, 1e7, 1e8}) {
            Complex v = pair.gamma0(Complex{-y, 0.0}) + pair.gamma1(Complex{-y, 0.0}) * x;
            double err = std::abs(-v.real() / y + x);
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("admissibility limits") {
    SECTION("drop-to-gamma passes with limits (0, 1)") {
        AdmissibilityReport rep =
            check_admissibility(exponents(DropToGamma{3.0, 1.0, 1.0}, kFig));
        CHECK(rep.pass);
        CHECK(rep.lim_gamma0_over_y == Approx(0.0).margin(1e-6));
        CHECK(rep.lim_gamma1_over_y == Approx(1.0).margin(1e-6));
    }
    SECTION("time-change passes") {
        AdmissibilityReport rep = check_admissibility(exponents(TimeChange{15.0}, kFig));
        CHECK(rep.pass);
        CHECK(rep.lim_gamma0_over_y == Approx(0.0).margin(1e-6));
        CHECK(rep.lim_gamma1_over_y == Approx(1.0).margin(1e-6));
    }
    SECTION("deterministic jump to -2x is rejected") {
        AdmissibilityReport rep = check_admissibility(proportional_pair(-2.0));
        CHECK_FALSE(rep.pass);
        CHECK(rep.lim_gamma1_over_y == Approx(2.0).margin(1e-9));
    }
    SECTION("drop exactly to zero sits on the admissible boundary") {
        AdmissibilityReport rep = check_admissibility(proportional_pair(-1.0));
        CHECK(rep.pass);
        CHECK(rep.lim_gamma1_over_y == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("Levy-Khintchine admissibility") {
    SECTION("pure drop-to-zero drift passes on the boundary") {
        LKParams lk;
        lk.beta0 = 0.0;
        lk.beta1 = -1.0;
        CHECK(check_lk_admissibility(lk).pass);
    }
    SECTION("beta1 below -1 fails") {
        LKParams lk;
        lk.beta1 = -1.5;
        LKReport rep = check_lk_admissibility(lk);
        CHECK_FALSE(rep.pass);
        REQUIRE(rep.reasons.size() == 1);
        CHECK(rep.reasons[0] == "beta1 must be >= -1");
    }
    SECTION("negative atoms fail with the support reason") {
        LKParams lk;
        lk.nu0.atoms = {{0.5, -1.0}};
        LKReport rep = check_lk_admissibility(lk);
        CHECK_FALSE(rep.pass);
        CHECK(rep.reasons[0] == "nu0: Levy measure not supported on R+");
    }
    SECTION("drop-to-gamma in LK form reproduces the closed-form exponents") {
        // gamma0 is the Gamma-subordinator measure alpha e^{-lambda xi}/xi;
        // gamma1 the same with weight beta plus a unit drop drift
        DropToGamma g{3.0, 1.0, 1.0};
        LKParams lk;
        lk.beta0 = 0.0;
        lk.nu0.density = GammaLevyDensity{g.alpha, g.lambda};
        lk.beta1 = -1.0;
        lk.nu1.density = GammaLevyDensity{g.beta, g.lambda};
        CHECK(check_lk_admissibility(lk).pass);

        ExponentPair closed = exponents(g, kFig);
        ExponentPair viaLk = lk_exponent_pair(lk);
        int checked = 0;
        for (Complex u : kUGrid) {
            for (double s : {1.0, 0.37, 2.5}) {
                Complex w = u * s;
                CHECK(std::abs(viaLk.gamma0(w) - closed.gamma0(w)) < 1e-10);
                CHECK(std::abs(viaLk.gamma1(w) - closed.gamma1(w)) < 1e-10);
                ++checked;
            }
        }
        CHECK(checked >= 20);
    }
}

TEST_CASE("full convex span heuristic") {
    SECTION("no jump spans when the grid reaches zero") {
        ConvexSpanReport rep = check_full_convex_span(NoJump{}, kFig);
        CHECK(rep.min_g == 0.0); // min over the x grid, which contains 0
        CHECK(rep.spans);
    }
    SECTION("constant unit upward jump fails the span check") {
        ConvexSpanReport rep =
            check_full_convex_span(JumpModel{constant_up_jump(1.0)}, kFig);
        CHECK(rep.min_g == Approx(1.0));
        CHECK_FALSE(rep.inf_near_zero);
        CHECK_FALSE(rep.spans);
    }
    SECTION("time-change post-state reaches toward zero as x -> 0") {
        ConvexSpanReport rep = check_full_convex_span(TimeChange{15.0}, kFig);
        CHECK(rep.min_x == 0.0);
        CHECK(rep.min_g <= 1e-2);
        CHECK(rep.spans);
    }
    SECTION("drop-to-gamma spans") {
        ConvexSpanReport rep = check_full_convex_span(DropToGamma{3.0, 1.0, 1.0}, kFig);
        CHECK(rep.min_g <= 1e-10);
        CHECK(rep.spans);
    }
}
