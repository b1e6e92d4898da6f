#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "xcir/cir_kernel.hpp"
#include "xcir/special_functions.hpp"
#include "xcir/stats.hpp"

using namespace xcir;
using Catch::Approx;

namespace {
const CIRParams kFig{0.1, 3.0, 0.1, 1.0};

const std::vector<Complex> kUGrid = {
    {-2.0, 0.0}, {-1.0, 0.0}, {-0.5, 0.0}, {0.0, 1.0},
    {0.0, 2.0},  {-1.0, 1.0}, {-0.1, -3.0}, {-5.0, 0.5}};
} // namespace

TEST_CASE("transition parameters") {
    SECTION("degrees of freedom for the fig parameters") {
        TransitionParams tp = transition_params(kFig, 1.0, 1.0);
        CHECK(tp.nu == Approx(120.0).epsilon(1e-14)); // 4*0.1*3.0/0.01
    }
    SECTION("long-horizon limit") {
        TransitionParams tp = transition_params(kFig, 1.0, 1e6);
        CHECK(tp.c == Approx(0.025).epsilon(1e-12)); // sigma^2/(4 kappa)
        CHECK(tp.lambda_nc == Approx(0.0).margin(1e-300));
    }
    SECTION("short-horizon limit: c -> 0 and c * lambda -> x") {
        double x = 0.7;
        TransitionParams tp = transition_params(kFig, x, 1e-10);
        CHECK(tp.c < 1e-11);
        CHECK(tp.c * tp.lambda_nc == Approx(x).epsilon(1e-9));
    }
    SECTION("kappa = 0 uses the analytic limit") {
        CIRParams p{0.0, 3.0, 0.1, 1.0};
        TransitionParams tp = transition_params(p, 1.0, 2.0);
        CHECK(tp.c == Approx(0.25 * 0.01 * 2.0).epsilon(1e-14));
        CHECK(tp.nu == 0.0);
    }
    SECTION("sigma = 0 is rejected") {
        CIRParams p{0.1, 3.0, 0.0, 1.0};
        REQUIRE_THROWS_AS(transition_params(p, 1.0, 1.0), std::domain_error);
    }
}

TEST_CASE("exact transition sampling") {
    SECTION("zero horizon is the identity") {
        Rng rng(1);
        CHECK(sample_cir_exact(kFig, 0.42, 0.0, rng) == 0.42);
    }
    SECTION("sigma = 0 follows the drift ODE") {
        CIRParams p{0.1, 3.0, 0.0, 1.0};
        Rng rng(1);
        CHECK(sample_cir_exact(p, 1.0, 10.0, rng) ==
              Approx(2.2642411176571153).epsilon(1e-15));
    }
    SECTION("empirical mean matches the conditional mean and an EM cross-check") {
        const double delta = 5.0;
        Rng rng(20240610);
        MeanVar acc;
        for (int i = 0; i < 100000; ++i)
            acc.add(sample_cir_exact(kFig, 1.0, delta, rng));
        const double mean = 1.7869386805747332; // theta + (x - theta) e^{-0.5}
        CHECK(std::abs(acc.mean - mean) <= 3.0 * acc.std_error());

        std::mt19937_64 gen(99);
        MeanVar em;
        for (int i = 0; i < 20000; ++i)
            em.add(oracle::euler_cir_full_truncation(kFig, 1.0, delta, 2000, gen));
        double se = std::hypot(acc.std_error(), em.std_error());
        CHECK(std::abs(acc.mean - em.mean) <= 4.0 * se);
    }
    SECTION("distribution matches the scaled noncentral chi-squared CDF (KS 1%)") {
        TransitionParams tp = transition_params(kFig, 1.0, 1.0);
        Rng rng(77);
        std::vector<double> draws(10000);
        for (auto& d : draws) d = sample_cir_exact(kFig, 1.0, 1.0, rng);
        double stat = ks_statistic(draws, [&](double v) {
            return noncentral_chisq_cdf(tp.nu, tp.lambda_nc, v / tp.c);
        });
        CHECK(ks_pvalue_one_sample(stat, draws.size()) >= 0.01);
    }
    SECTION("strictly positive under the Feller condition") {
        REQUIRE(kFig.feller());
        Rng rng(5);
        for (int i = 0; i < 1000000; ++i) {
            double v = sample_cir_exact(kFig, 1.0, 1.0, rng);
            if (!(v > 0.0)) FAIL("non-positive draw observed");
        }
        SUCCEED();
    }
}

TEST_CASE("noncentral chi-squared sampler moments") {
    SECTION("central case has mean nu") {
        Rng rng(11);
        MeanVar acc;
        for (int i = 0; i < 100000; ++i) acc.add(sample_noncentral_chisq(3.0, 0.0, rng));
        CHECK(std::abs(acc.mean - 3.0) <= 3.0 * acc.std_error());
    }
    SECTION("variance of chi-squared(120) is 240") {
        Rng rng(12);
        MeanVar acc;
        for (int i = 0; i < 100000; ++i) acc.add(sample_noncentral_chisq(120.0, 0.0, rng));
        // SE of a sample variance ~ var * sqrt(2/(n-1))
        double se_var = 240.0 * std::sqrt(2.0 / (acc.n - 1.0));
        CHECK(std::abs(acc.variance() - 240.0) <= 4.0 * se_var);
    }
    SECTION("noncentral mean is nu + lambda") {
        Rng rng(13);
        MeanVar acc;
        for (int i = 0; i < 100000; ++i) acc.add(sample_noncentral_chisq(1.0, 4.0, rng));
        CHECK(std::abs(acc.mean - 5.0) <= 3.0 * acc.std_error());
    }
}

TEST_CASE("characteristic exponents of the continuous transition") {
    SECTION("normalization and identity") {
        for (double tau : {0.0, 0.01, 1.0, 50.0}) {
            PhiPsi z = cir_exponents(kFig, tau, Complex{0.0, 0.0});
            CHECK(z.phi == Complex{0.0, 0.0});
            CHECK(z.psi == Complex{0.0, 0.0});
        }
        for (Complex u : kUGrid) {
            PhiPsi id = cir_exponents(kFig, 0.0, u);
            CHECK(id.phi == Complex{0.0, 0.0});
            CHECK(id.psi == u);
        }
    }
    SECTION("positive real part is rejected") {
        REQUIRE_THROWS_AS(cir_exponents(kFig, 1.0, Complex{0.1, 0.0}),
                          std::domain_error);
    }
    SECTION("matches the noncentral chi-squared MGF and a Monte Carlo estimate") {
        const Complex u{-1.0, 0.0};
        PhiPsi e = cir_exponents(kFig, 1.0, u);
        TransitionParams tp = transition_params(kFig, 1.0, 1.0);
        Complex mgf = std::pow(1.0 - 2.0 * u * tp.c, -0.5 * tp.nu) *
                      std::exp(tp.lambda_nc * u * tp.c / (1.0 - 2.0 * u * tp.c));
        CHECK(std::abs(std::exp(e.phi + e.psi * 1.0) - mgf) < 1e-12);

        Rng rng(314);
        MeanVar acc;
        for (int i = 0; i < 100000; ++i)
            acc.add(std::exp(-sample_cir_exact(kFig, 1.0, 1.0, rng)));
        double analytic = std::exp(e.phi + e.psi * 1.0).real();
        CHECK(std::abs(acc.mean - analytic) <= 3.0 * acc.std_error());
    }
    SECTION("semigroup property on a u-grid") {
        for (Complex u : kUGrid) {
            for (auto [t1, t2] : {std::pair{0.5, 1.5}, {3.0, 0.25}, {10.0, 7.0}}) {
                PhiPsi two = cir_exponents(kFig, t2, u);
                PhiPsi one = cir_exponents(kFig, t1, two.psi);
                PhiPsi full = cir_exponents(kFig, t1 + t2, u);
                CHECK(std::abs(full.psi - one.psi) <=
                      1e-10 * (1.0 + std::abs(full.psi)));
                CHECK(std::abs(full.phi - (two.phi + one.phi)) <=
                      1e-10 * (1.0 + std::abs(full.phi)));
            }
        }
    }
    SECTION("psi maps the left half-plane into itself") {
        for (Complex u : kUGrid)
            for (double tau : {0.01, 0.5, 2.0, 25.0})
                CHECK(cir_exponents(kFig, tau, u).psi.real() <= 0.0);
    }
}

TEST_CASE("conditional mean and variance") {
    SECTION("degenerate cases") {
        MeanVarPair mv = cir_mean_var(kFig, 0.9, 0.0);
        CHECK(mv.mean == 0.9);
        CHECK(mv.var == 0.0);
        CIRParams det{0.1, 3.0, 0.0, 1.0};
        MeanVarPair dm = cir_mean_var(det, 1.0, 10.0);
        CHECK(dm.mean == Approx(2.2642411176571153).epsilon(1e-15));
        CHECK(dm.var == 0.0);
    }
    SECTION("stationary limit is the Gamma(2 kappa theta / sigma^2, 2 kappa / sigma^2) moments") {
        MeanVarPair mv = cir_mean_var(kFig, 1.0, 1e9);
        CHECK(mv.mean == Approx(3.0).epsilon(1e-12));
        CHECK(mv.var == Approx(0.15).epsilon(1e-12)); // theta sigma^2 / (2 kappa)
    }
    SECTION("agrees with the standard closed form") {
        for (double x : {0.0, 0.3, 1.0, 5.0})
            for (double d : {0.05, 0.5, 2.0, 20.0}) {
                MeanVarPair mv = cir_mean_var(kFig, x, d);
                CHECK(mv.mean == Approx(oracle::cir_mean(kFig, x, d)).margin(1e-13));
                CHECK(mv.var == Approx(oracle::cir_var(kFig, x, d)).margin(1e-13));
            }
    }
}
