#include "assetsim/diagnostics.hpp"
#include "assetsim/errors.hpp"
#include "assetsim/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace assetsim;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed, 0);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    return x;
}

// Fixed sample with scipy.stats reference values.
const std::vector<double> kSkewed = {0.139, 0.157, 0.175, 0.256, 0.344, 0.413, 0.503, 0.577, 0.614,
                                     0.655, 0.954, 1.392, 1.557, 1.648, 1.690, 1.994, 2.174, 2.206,
                                     3.245, 3.510, 3.571, 4.354, 4.980, 6.084, 8.351};

}  // namespace

TEST_CASE("moments") {
    CHECK(moment_stats(std::vector<double>{-1, 0, 1}).skew == doctest::Approx(0.0));
    CHECK(moment_stats(std::vector<double>{-1, 1, -1, 1}).kurt == doctest::Approx(-2.0));
    CHECK_THROWS_AS(moment_stats(std::vector<double>{2, 2, 2}), ValidationError);
}

TEST_CASE("autocorrelation of an alternating sequence") {
    const std::vector<double> x = {1, -1, 1, -1};
    const auto rho = autocorrelation(x, 1);
    CHECK(rho[0] == doctest::Approx(1.0));
    CHECK(rho[1] == doctest::Approx(-0.75));
    const auto l1 = acf_l1(x, 1);
    CHECK(l1.l1_original == doctest::Approx(0.75));
    CHECK_FALSE(l1.l1_absolute.has_value());
}

TEST_CASE("ACF L1 of white noise is small") {
    const auto x = gaussian(10000, 3);
    CHECK(acf_l1(x).l1_original < 0.1);
}

TEST_CASE("ACF L1 symmetry and scale invariance") {
    auto x = gaussian(200, 11);
    for (auto& v : x) v = v * v * v;
    std::vector<double> neg(x), twice(x);
    for (auto& v : neg) v = -v;
    for (auto& v : twice) v = 2.0 * v;
    const auto a = acf_l1(x), b = acf_l1(neg), c = acf_l1(twice);
    CHECK(a.l1_original == doctest::Approx(b.l1_original).epsilon(1e-12));
    CHECK(*a.l1_absolute == doctest::Approx(*b.l1_absolute).epsilon(1e-12));
    CHECK(a.l1_original == doctest::Approx(c.l1_original).epsilon(1e-12));
    CHECK(*a.l1_absolute == doctest::Approx(*c.l1_absolute).epsilon(1e-12));
}

TEST_CASE("Jarque-Bera") {
    const auto jb = jarque_bera(4, Moments{0.0, -2.0});
    CHECK(jb.statistic == doctest::Approx(2.0 / 3.0));
    CHECK(jb.p_value == doctest::Approx(std::exp(-1.0 / 3.0)));
    // scipy.stats.jarque_bera
    const auto s = jarque_bera(kSkewed);
    CHECK(s.statistic == doctest::Approx(10.61471928311309).epsilon(1e-9));
    CHECK(s.p_value == doctest::Approx(0.004954992417090045).epsilon(1e-9));
}

TEST_CASE("Shapiro-Wilk against scipy") {
    const auto a = shapiro_wilk(kSkewed);
    CHECK(a.w == doctest::Approx(0.8346662753381485).epsilon(1e-6));
    CHECK(a.p_value == doctest::Approx(0.0009134904825887374).epsilon(1e-3));
    const std::vector<double> y = {1, 2, 4, 7, 11, 16, 22, 29};
    const auto b = shapiro_wilk(y);
    CHECK(b.w == doctest::Approx(0.9175136530568774).epsilon(1e-6));
    CHECK(b.p_value == doctest::Approx(0.4100153868491899).epsilon(1e-3));
}

TEST_CASE("normality tests omit SW outside its range") {
    const auto small = normality_tests(std::vector<double>{-1, 1, -1, 1});
    CHECK_FALSE(small.sw_p.has_value());
    CHECK(small.jb_p == doctest::Approx(std::exp(-1.0 / 3.0)));
    CHECK(normality_tests(gaussian(50, 1)).sw_p.has_value());
}

TEST_CASE("normality tests are calibrated on Gaussian samples") {
    int sw_reject = 0, jb_reject = 0;
    const int trials = 1000;
    for (int k = 0; k < trials; ++k) {
        const auto r = normality_tests(gaussian(200, 1000 + std::uint64_t(k)));
        sw_reject += *r.sw_p < 0.05;
        jb_reject += r.jb_p < 0.05;
    }
    CHECK(sw_reject > 30);
    CHECK(sw_reject < 75);
    CHECK(jb_reject > 20);
    CHECK(jb_reject < 75);
}

TEST_CASE("diagnose report") {
    const auto r = diagnose("x", gaussian(97, 5));
    CHECK(r.n == 97);
    CHECK(r.stdev > 0.7);
    CHECK(r.stdev < 1.3);
    CHECK(r.sw_p.has_value());
    std::ostringstream text, csv;
    write_reports_text(text, {r});
    write_reports_csv(csv, {r});
    CHECK(text.str().find("x") != std::string::npos);
    CHECK(csv.str().find("series") != std::string::npos);
}

TEST_CASE("critical values are deterministic and worker independent") {
    const auto a = mc_critical_values(30, 0.95, 4000, 9, 1);
    const auto b = mc_critical_values(30, 0.95, 4000, 9, 1);
    const auto c = mc_critical_values(30, 0.95, 4000, 9, 3);
    CHECK(a.skew_crit == b.skew_crit);
    CHECK(a.kurt_crit == b.kurt_crit);
    CHECK(a.l1_crit == b.l1_crit);
    CHECK(a.skew_crit == c.skew_crit);
    CHECK(a.l1_crit == c.l1_crit);
    const std::vector<double> levels = {0.9, 0.99};
    const auto t = mc_critical_values(30, levels, 4000, 9);
    REQUIRE(t.size() == 2);
    CHECK(t[0].skew_crit < t[1].skew_crit);
    CHECK(t[0].kurt_crit < t[1].kurt_crit);
}
