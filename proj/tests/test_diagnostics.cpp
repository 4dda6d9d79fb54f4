#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "netmeasure/diagnostics.hpp"
#include "netmeasure/errors.hpp"
#include "netmeasure/estimators.hpp"
#include "netmeasure/labels.hpp"
#include "netmeasure/rng.hpp"
#include "netmeasure/trace.hpp"

using namespace netmeasure;

namespace {

std::vector<double> normals(std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (double& v : out) {
        v = standard_normal(rng);
    }
    return out;
}

}  // namespace

TEST_CASE("matching segments give a zero score") {
    Rng rng(1);
    const auto noise = normals(10, rng);
    std::vector<double> seq;
    for (double v : noise) {
        seq.push_back(4.0 + v);
    }
    for (double v : normals(40, rng)) {
        seq.push_back(10.0 * v);
    }
    for (int rep = 0; rep < 5; ++rep) {
        for (double v : noise) {
            seq.push_back(4.0 + v);
        }
    }
    REQUIRE(seq.size() == 100);
    CHECK(std::abs(geweke_z(seq)) < 1e-9);
}

TEST_CASE("a level shift is detected") {
    Rng rng(2);
    auto seq = normals(1000, rng);
    for (std::size_t i = 500; i < seq.size(); ++i) {
        seq[i] += 3.0;
    }
    CHECK(std::abs(geweke_z(seq)) > 5.0);
}

TEST_CASE("score is shift and scale invariant and flips with negation") {
    Rng rng(3);
    auto seq = normals(400, rng);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        seq[i] += 0.002 * static_cast<double>(i);
    }
    const double z = geweke_z(seq);
    auto shifted = seq;
    auto scaled = seq;
    auto negated = seq;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        shifted[i] += 12.5;
        scaled[i] *= 3.0;
        negated[i] = -seq[i];
    }
    CHECK(geweke_z(shifted) == doctest::Approx(z).epsilon(1e-9));
    CHECK(geweke_z(scaled) == doctest::Approx(z).epsilon(1e-9));
    CHECK(geweke_z(negated) == doctest::Approx(-z).epsilon(1e-9));
}

TEST_CASE("i.i.d. chains are rarely flagged") {
    // The Bartlett estimate with a sqrt(n) window runs slightly low at this
    // length, which puts coverage of |Z| < 1.96 near 94% instead of 95%.
    Rng rng(4);
    std::size_t inside = 0;
    const std::size_t trials = 1000;
    for (std::size_t t = 0; t < trials; ++t) {
        if (std::abs(geweke_z(normals(10000, rng))) < 1.96) {
            ++inside;
        }
    }
    const double coverage = static_cast<double>(inside) / trials;
    MESSAGE("coverage " << coverage);
    CHECK(coverage >= 0.92);
    CHECK(coverage <= 0.98);
}

TEST_CASE("spectral density of a constant-plus-alternating segment") {
    const std::vector<double> flat(30, 2.0);
    CHECK(spectral_density_at_zero(flat, 5) == 0.0);
    std::vector<double> alt;
    for (int i = 0; i < 40; ++i) {
        alt.push_back(i % 2 == 0 ? 1.0 : -1.0);
    }
    // gamma_k = (-1)^k (n - k) / n; window 0 leaves gamma_0 only.
    CHECK(spectral_density_at_zero(alt, 0) == doctest::Approx(1.0));
    CHECK(spectral_density_at_zero(alt, 1) == doctest::Approx(1.0 - 2.0 * 0.5 * 39.0 / 40.0));
}

TEST_CASE("Geweke input checks") {
    const std::vector<double> short_seq(19, 1.0);
    CHECK_THROWS_AS(geweke_z(short_seq), ParameterError);
    const std::vector<double> flat(50, 1.0);
    CHECK_THROWS_AS(geweke_z(flat), UndefinedValueError);
    GewekeParams p;
    p.first_frac = 0.6;
    std::vector<double> ok(100);
    CHECK_THROWS_AS(geweke_z(ok, p), ParameterError);
}

TEST_CASE("running estimates over trace prefixes") {
    SampleTrace t;
    t.entries = {{0, 0.5405, 0}, {1, 0.4595, 1}};
    const LabelFunction f({1.0, 0.0});
    const auto lit = running_estimates(t, f, WeightingMode::literal);
    REQUIRE(lit.size() == 2);
    CHECK(lit[0] == 1.0);
    CHECK(lit[1] == doctest::Approx(0.5405));
    const auto inv = running_estimates(t, f, WeightingMode::inverse);
    CHECK(inv[1] == doctest::Approx(0.4595));
}

TEST_CASE("running estimates agree with the estimator on every prefix") {
    Rng rng(5);
    SampleTrace t;
    std::vector<double> values;
    for (NodeId x = 0; x < 60; ++x) {
        t.entries.push_back({x, 0.01 + uniform01(rng), x});
        values.push_back(uniform01(rng) < 0.3 ? 1.0 : 0.0);
    }
    const LabelFunction f(values);
    for (auto mode : {WeightingMode::literal, WeightingMode::inverse}) {
        const auto run = running_estimates(t, f, mode);
        for (std::size_t k = 1; k <= t.size(); ++k) {
            const std::span<const TraceEntry> prefix(t.entries.data(), k);
            CHECK(run[k - 1] == doctest::Approx(e_dir_value(prefix, f, mode)).epsilon(1e-12));
        }
    }
    const auto profile = geweke_profile(t, f, WeightingMode::inverse);
    REQUIRE(profile.size() == 60);
    for (const auto& p : profile) {
        CHECK(p.z.has_value() == (p.k >= 20));
    }
}

TEST_CASE("profile CSV layout") {
    const std::vector<GewekePoint> points{{1, 0.5, std::nullopt}, {20, 0.25, -1.5}};
    std::ostringstream out;
    write_geweke_csv(out, points);
    CHECK(out.str() == "k,running_estimate,z_if_computed\n1,0.5,\n20,0.25,-1.5\n");
}
