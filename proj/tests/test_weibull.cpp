#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "openmax/error.hpp"
#include "openmax/rng.hpp"
#include "openmax/weibull.hpp"

using namespace openmax;
using doctest::Approx;

TEST_CASE("cdf analytic values") {
    CHECK(std::abs(weibull_cdf({2, 1, 0}, 1.0) - (1.0 - std::exp(-1.0))) < 1e-12);
    CHECK(weibull_cdf({2, 1, 0}, 1.0) == Approx(0.6321205588).epsilon(1e-10));
    CHECK(weibull_cdf({2, 1, 0}, 0.0) == 0.0);
    CHECK(weibull_cdf({2, 1, 0}, -3.0) == 0.0);
    CHECK(std::abs(weibull_cdf({1, 2, 0}, 2.0 * std::log(2.0)) - 0.5) < 1e-15);
    CHECK_THROWS_AS(weibull_cdf({2, 1, 0}, NAN), InvalidArgument);
    CHECK_THROWS_AS(weibull_cdf({0, 1, 0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(weibull_cdf({1, -1, 0}, 1.0), InvalidArgument);
}

TEST_CASE("cdf monotone and saturating") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> shape(0.3, 6.0), scale(0.1, 5.0), loc(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        const WeibullParams p{shape(gen), scale(gen), loc(gen)};
        double prev = 0.0;
        for (int i = -20; i <= 200; ++i) {
            const double a = p.location + p.scale * i / 20.0;
            const double f = weibull_cdf(p, a);
            CHECK(f >= prev);
            CHECK(f <= 1.0);
            if (i <= 0) CHECK(f == 0.0);
            prev = f;
        }
        CHECK(weibull_cdf(p, p.location + p.scale * std::pow(30.0, 1.0 / p.shape)) > 1.0 - 1e-12);
    }
}

TEST_CASE("shape 1 is the shifted exponential") {
    const WeibullParams p{1.0, 2.5, 0.75};
    for (double t : {0.5, 1.0, 2.0}) {
        CHECK(std::abs(weibull_cdf(p, p.location + p.scale * t) - (1.0 - std::exp(-t))) < 1e-12);
    }
}

TEST_CASE("pdf values and edge cases") {
    CHECK(weibull_pdf({1, 1, 0}, 0.0) == 1.0);
    CHECK(weibull_pdf({2, 1, 0}, 0.0) == 0.0);
    CHECK(weibull_pdf({2, 1, 0}, -1.0) == 0.0);
    CHECK(weibull_pdf({0.5, 1, 0}, -1.0) == 0.0);
    CHECK_THROWS_AS(weibull_pdf({0.5, 1, 0}, 0.0), InvalidArgument);
    // (b/g) t^(b-1) e^(-t^b) with b=2, g=1, t=1
    CHECK(weibull_pdf({2, 1, 0}, 1.0) == Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("pdf integrates to one") {
    const WeibullParams p{2, 3, 1};
    const double mass = oracle::simpson([&](double a) { return weibull_pdf(p, a); }, p.location,
                                        p.location + 20 * p.scale, 20000);
    CHECK(std::abs(mass - 1.0) < 1e-6);
}

TEST_CASE("pdf is the derivative of the cdf") {
    const WeibullParams p{1.7, 0.8, -0.3};
    for (double a : {-0.2, 0.1, 0.5, 1.3, 2.4}) {
        const double fd = oracle::central_difference([&](double x) { return weibull_cdf(p, x); }, a, 1e-6);
        CHECK(weibull_pdf(p, a) == Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("shape residual analytic collapse") {
    const std::vector<double> es(10, std::exp(1.0));
    CHECK(shape_equation_residual(2.0, es) == Approx(-0.5).epsilon(1e-14));
    CHECK(shape_equation_residual(4.0, es) == Approx(-0.25).epsilon(1e-14));
    CHECK_THROWS_AS(shape_equation_residual(1.0, std::vector<double>{}), InvalidArgument);
    CHECK_THROWS_AS(shape_equation_residual(1.0, std::vector<double>{1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(shape_equation_residual(0.0, std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST_CASE("shape residual matches the textbook form") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> x(0.05, 4.0);
    std::vector<double> xs(50);
    for (auto& v : xs) v = x(gen);
    for (double k : {0.3, 1.0, 2.7, 8.0}) {
        double s0 = 0, s1 = 0, sl = 0;
        for (double v : xs) {
            s0 += std::pow(v, k);
            s1 += std::pow(v, k) * std::log(v);
            sl += std::log(v);
        }
        const double g = s1 / s0 - 1.0 / k - sl / xs.size();
        CHECK(shape_equation_residual(k, xs) == Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("shape residual is increasing") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> x(0.01, 10.0), k(0.01, 50.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> xs(20);
        for (auto& v : xs) v = x(gen);
        double k1 = k(gen), k2 = k(gen);
        if (k1 > k2) std::swap(k1, k2);
        if (k1 == k2) continue;
        CHECK(shape_equation_residual(k2, xs) > shape_equation_residual(k1, xs));
    }
}

TEST_CASE("fit errors") {
    const std::vector<double> flat(10, 5.0);
    try {
        fit_weibull_tail(flat, TailConfig{20, 3});
        FAIL("expected DegenerateTail");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::degenerate_tail);
    }
    try {
        fit_weibull_tail(std::vector<double>{1.0, 2.0}, TailConfig{20, 3});
        FAIL("expected TooFewSamples");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::too_few_samples);
    }
    try {
        fit_weibull_tail(std::vector<double>{1.0, 2.0, 2.0, 2.0}, TailConfig{20, 3});
        FAIL("expected TooFewSamples on distinct count");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::too_few_samples);
    }
    // Nearly every value sits at the maximum, so g(1e3) < 0.
    std::vector<double> spike(10000, 10.0);
    spike[0] = 9.0;
    try {
        fit_weibull_tail(spike, TailConfig{10000, 2});
        FAIL("expected NoBracket");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::no_bracket);
    }
    CHECK_THROWS_AS(fit_weibull_tail(std::vector<double>{1, -2, 3}, TailConfig{}), InvalidArgument);
    CHECK_THROWS_AS(fit_weibull_tail(std::vector<double>{1, 2, 3}, TailConfig{2, 3}), InvalidArgument);
    CHECK_THROWS_AS(fit_weibull_tail(std::vector<double>{1, 2, 3}, TailConfig{5, 1}), InvalidArgument);
}

TEST_CASE("fit recovers parameters from 2000 samples") {
    const auto xs = sample_weibull({2, 3, 0}, 2000, 2024);
    const TailFit fit = fit_weibull_tail(xs, TailConfig{2000, 3});
    CHECK(fit.n_tail == 2000);
    CHECK_FALSE(fit.tail_clamped);
    CHECK(fit.params.shape >= 1.8);
    CHECK(fit.params.shape <= 2.2);
    CHECK(fit.params.scale >= 2.85);
    CHECK(fit.params.scale <= 3.15);

    std::vector<double> shifted;
    for (double x : xs) shifted.push_back(x - fit.params.location);
    CHECK(std::abs(shape_equation_residual(fit.params.shape, shifted)) < 1e-9);
}

TEST_CASE("fit uses the largest distances and the documented location") {
    std::vector<double> d;
    for (int i = 1; i <= 100; ++i) d.push_back(i * 0.1);
    const TailFit fit = fit_weibull_tail(d, TailConfig{20, 3});
    CHECK(fit.n_tail == 20);
    // tail is 8.1 .. 10.0
    CHECK(fit.params.location == estimate_location(8.1, 10.0));
    CHECK(fit.params.location == Approx(8.1 - 0.019 - 1e-9).epsilon(1e-14));
}

TEST_CASE("tail size larger than the sample is clamped and flagged") {
    const auto xs = sample_weibull({1.5, 2, 0}, 12, 9);
    const TailFit fit = fit_weibull_tail(xs, TailConfig{20, 3});
    CHECK(fit.tail_clamped);
    CHECK(fit.n_tail == 12);
}

TEST_CASE("every successful fit solves the shape equation") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> shape(0.5, 5.0), scale(0.2, 10.0);
    for (int t = 0; t < 30; ++t) {
        const auto xs = sample_weibull({shape(gen), scale(gen), 0}, 200, gen());
        for (std::size_t tail : {10u, 50u, 200u}) {
            const TailFit fit = fit_weibull_tail(xs, TailConfig{tail, 3});
            std::vector<double> sorted(xs);
            std::sort(sorted.rbegin(), sorted.rend());
            sorted.resize(tail);
            for (double& x : sorted) x -= fit.params.location;
            CHECK(std::abs(shape_equation_residual(fit.params.shape, sorted)) < 1e-9);
            CHECK(fit.iterations <= 200);
        }
    }
}

TEST_CASE("fit is scale equivariant") {
    const auto xs = sample_weibull({1.7, 1.0, 0}, 500, 5);
    const TailFit base = fit_weibull_tail(xs, TailConfig{500, 3});
    for (double s : {0.01, 3.0, 250.0}) {
        std::vector<double> scaled;
        for (double x : xs) scaled.push_back(s * x);
        const TailFit fit = fit_weibull_tail(scaled, TailConfig{500, 3});
        CHECK(fit.params.shape == Approx(base.params.shape).epsilon(1e-6));
        CHECK(fit.params.scale == Approx(s * base.params.scale).epsilon(1e-6));
    }
}

TEST_CASE("sampling is deterministic and above the location") {
    const WeibullParams p{1.3, 2.0, 4.0};
    CHECK(sample_weibull(p, 100, 42) == sample_weibull(p, 100, 42));
    CHECK(sample_weibull(p, 100, 42) != sample_weibull(p, 100, 43));
    for (double x : sample_weibull(p, 1000, 1)) CHECK(x > p.location);
}

TEST_CASE("inverse cdf identity") {
    CHECK(weibull_quantile({1, 1, 0}, 1.0 - std::exp(-1.0)) == Approx(1.0).epsilon(1e-14));
    CHECK(weibull_quantile({2, 3, 1}, 0.0) == 1.0);
    CHECK_THROWS_AS(weibull_quantile({2, 3, 1}, 1.0), InvalidArgument);
}

TEST_CASE("samples follow the analytic cdf") {
    const WeibullParams p{2, 3, 0};
    const auto xs = sample_weibull(p, 5000, 77);
    CHECK(oracle::ks_statistic(xs, [&](double a) { return oracle::weibull_cdf(2, 3, 0, a); }) < 0.03);
}

TEST_CASE("splitmix64 reference stream") {
    // First outputs for seed 0 of the published SplitMix64 reference.
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(rng.next() == 0x06C45D188009454FULL);
    SplitMix64 u(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform_open();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
}
