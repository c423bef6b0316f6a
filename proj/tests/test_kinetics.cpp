#include <doctest.h>

#include <cmath>
#include <random>

#include <isg/kinetics.hpp>

using namespace isg;

namespace {

Standard3 standard_with(double ga, double gb, double gm)
{
    return Standard3{ga, gb, gm};
}

} // namespace

TEST_CASE("zeta of the standard scheme")
{
    CHECK(zeta(tmyag_standard()) == doctest::Approx(0.91).epsilon(1e-12));
    CHECK(zeta(standard_with(1.0, 0.0, 0.0)) == 0.0);
    CHECK(zeta(standard_with(2.0, 2.0, 2.0)) == doctest::Approx(1.5));
    CHECK_THROWS_AS(zeta(tmyag_isg()), scheme_mismatch);
    CHECK_THROWS_AS(zeta(tmyag_lambda()), scheme_mismatch);
}

TEST_CASE("xi of the sublevel schemes")
{
    CHECK(xi(Lambda3{2.0, 1.0, 1e5}) == doctest::Approx(1.0));

    const double ge = 1250.0, gz = 0.7;
    const Tm5 t{ge / 4, 3 * ge / 4, 0.0, 100.0, gz, 6e5, 1e5};
    CHECK(xi(t) == doctest::Approx(3.0 / 16.0 * ge / gz));

    CHECK(xi(tmyag_isg()) == doctest::Approx(1171.875));
    CHECK(xi(tmyag_lambda()) == doctest::Approx(3125.0));
    CHECK_THROWS_AS(xi(tmyag_standard()), scheme_mismatch);
}

TEST_CASE("Tm:YAG presets")
{
    const Tm5 t = tmyag_isg();
    CHECK(t.gamma_e() == doctest::Approx(1.0 / 800e-6));
    CHECK(t.gamma_a == doctest::Approx(t.gamma_e() / 4));
    CHECK(t.gamma_b == doctest::Approx(3 * t.gamma_e() / 4));
    CHECK(t.gamma_c == 0.0);
    CHECK(t.gamma_m == doctest::Approx(1.0 / 10e-3));
    CHECK(t.gamma_z == doctest::Approx(1.0 / 5.0));
    CHECK(t.delta_ge() == doctest::Approx(500e3));
    CHECK(t.delta_g == doctest::Approx(600e3));

    for (const auto& name : preset_names()) {
        CHECK(validate(preset(name)).empty());
    }
    CHECK_THROWS_AS(preset("tmyag"), config_error);
}

TEST_CASE("scheme validation")
{
    CHECK_THROWS_AS(validate(standard_with(0.0, 1.0, 0.01)), domain_error);
    CHECK_THROWS_AS(validate(standard_with(1.0, -1.0, 0.01)), domain_error);
    CHECK_THROWS_AS(validate(Lambda3{1.0, 2.0, 1e5}), domain_error);

    Tm5 t = tmyag_isg();
    t.gamma_c = -1.0;
    CHECK_THROWS_AS(validate(t), domain_error);
    t.gamma_c = 0.0;
    t.gamma_z = 2000.0;
    CHECK_THROWS_AS(validate(t), domain_error);

    const auto warnings = validate(standard_with(1.0, 1.0, 0.5));
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("gamma_m") != std::string::npos);
}

TEST_CASE("steady state examples")
{
    const auto s0 = steady_state(tmyag_standard(), 0.0);
    CHECK(s0.first == 1.0);
    CHECK_FALSE(s0.has_second);

    for (const LevelScheme& scheme : {LevelScheme(tmyag_lambda()), LevelScheme(tmyag_isg())}) {
        const auto eq = steady_state(scheme, 0.0, 0.0);
        CHECK(eq.first == 0.5);
        CHECK(eq.second == 0.5);
    }

    const LevelScheme std3 = tmyag_standard();
    CHECK(steady_state(std3, 0.9 / zeta(std3)).first == doctest::Approx(1.0 / 1.9).epsilon(1e-14));

    const LevelScheme lam = tmyag_lambda();
    const auto d = steady_state(lam, 10.0 / xi(lam), 0.0);
    CHECK(d.first == doctest::Approx(0.5 / 11.0).epsilon(1e-13));
    CHECK(d.second == doctest::Approx(10.5 / 11.0).epsilon(1e-13));

    CHECK_THROWS_AS(steady_state(std3, -1.0), domain_error);
    CHECK_THROWS_AS(steady_state(lam, 0.1, -1e-9), domain_error);
}

TEST_CASE("steady state on arrays matches the scalar form")
{
    const LevelScheme scheme = tmyag_isg();
    ArrayX r = ArrayX::LinSpaced(33, 0.0, 0.02);
    ArrayX rp = r.reverse();
    const auto arr = steady_state(scheme, r, rp);
    for (Eigen::Index k = 0; k < r.size(); ++k) {
        const auto s = steady_state(scheme, r(k), rp(k));
        CHECK(arr.first(k) == s.first);
        CHECK(arr.second(k) == s.second);
    }
    CHECK_THROWS_AS(steady_state(scheme, r, ArrayX(ArrayX::Zero(3))), domain_error);
    r(3) = -1.0;
    CHECK_THROWS_AS(steady_state(scheme, r, rp), domain_error);
}

TEST_CASE("sum rule, ranges and monotonicity")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (const LevelScheme& scheme : {LevelScheme(tmyag_lambda()), LevelScheme(tmyag_isg())}) {
        const double x = xi(scheme);
        for (int i = 0; i < 200; ++i) {
            const double r = u(rng) / x, rp = u(rng) / x;
            const auto d = steady_state(scheme, r, rp);
            // same-phase sum: first + second with the roles of r and r' exchanged
            const auto swapped = steady_state(scheme, rp, r);
            CHECK(std::abs(d.first + swapped.first - 1.0) <= 4e-16);
            CHECK(d.first > 0.0);
            CHECK(d.first < 1.0);
            CHECK(d.second > 0.0);
            CHECK(d.second < 1.0);
            CHECK(std::abs(d.first + d.second - (1.0 + x * (r + rp)) / (1.0 + x * (r + rp))) <= 4e-16);
        }
    }

    const LevelScheme std3 = tmyag_standard();
    double prev = 2.0;
    for (double zr = 0.0; zr <= 50.0; zr += 0.25) {
        const double v = steady_state(std3, zr / zeta(std3)).first;
        CHECK(v < prev);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }

    const LevelScheme lam = tmyag_lambda();
    const double x = xi(lam);
    double last_r = 1.0, last_rp = 0.0;
    for (double a = 0.0; a <= 40.0; a += 0.5) {
        const double down = steady_state(lam, a / x, 3.0 / x).first;
        const double up = steady_state(lam, 3.0 / x, a / x).first;
        CHECK(down < last_r);
        CHECK(up > last_rp);
        last_r = down;
        last_rp = up;
    }
}

TEST_CASE("absorption composition")
{
    const PhaseGrid grid(64);
    const long half = grid.size() / 2;
    for (const LevelScheme& scheme : {LevelScheme(tmyag_lambda()), LevelScheme(tmyag_isg())}) {
        const ArrayX zero = ArrayX::Zero(grid.size());
        const auto eq = absorption(scheme, 3.0, steady_state(scheme, zero, zero), half);
        CHECK((eq.alpha - 3.0).abs().maxCoeff() <= 1e-15);
        CHECK_FALSE(eq.truncated);
    }

    // aligned sinusoidal pumping of an interlaced scheme
    const LevelScheme isg = tmyag_isg();
    const double xr = 30.0;
    const ArrayX phi = grid.values();
    const ArrayX r = xr / xi(isg) * (1.0 + phi.cos());
    const ArrayX alpha = absorption_from_rate(isg, 1.0, r, half);
    const ArrayX expected = 1.0 - 2.0 * xr / (1.0 + 2.0 * xr) * phi.cos();
    CHECK((alpha - expected).abs().maxCoeff() <= 1e-12);
    CHECK(alpha(0) == doctest::Approx(1.0 - 60.0 / 61.0));

    const LevelScheme std3 = tmyag_standard();
    const auto sd = steady_state(std3, r, r);
    CHECK((absorption(std3, 2.0, sd).alpha - 2.0 * sd.first).abs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(absorption(isg, 1.0, steady_state(isg, r, r), 2.5), grid_resolution_error);
}

TEST_CASE("narrow pump gives a dip and raised replicas")
{
    const LevelScheme lam = tmyag_lambda();
    const Eigen::Index n = 201, c = 100, s = 30;
    ArrayX r = ArrayX::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double d = static_cast<double>(k - c) / 3.0;
        r(k) = 5.0 / xi(lam) * std::exp(-d * d);
    }
    ArrayX rp = ArrayX::Zero(n);
    rp.tail(n - s) = r.head(n - s);
    const auto spec = absorption(lam, 1.0, steady_state(lam, r, rp), static_cast<double>(s),
                                 GridBoundary::finite);
    CHECK(spec.truncated);
    CHECK(spec.alpha(c) < 0.5);
    CHECK(spec.alpha(c + s) > 1.2);
    CHECK(spec.alpha(c - s) > 1.2);
    CHECK(spec.alpha(c + s / 2) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("weak-field margins")
{
    const auto zero = weak_field_margins(tmyag_isg(), 0.0);
    CHECK(zero.optical_ratio == 0.0);
    REQUIRE(zero.metastable_ratio.has_value());
    CHECK(*zero.metastable_ratio == 0.0);
    CHECK(zero.pass());

    const LevelScheme isg = tmyag_isg();
    const double peak30 = 2.0 * (30.0 / xi(isg)) * rate_unit(isg);
    const auto at30 = weak_field_margins(isg, peak30);
    CHECK(at30.drive == doctest::Approx(30.0));
    CHECK(at30.at_limit);
    CHECK(at30.pass());
    CHECK_FALSE(weak_field_margins(isg, 1.5 * peak30).drive_ok);

    const LevelScheme std3 = tmyag_standard();
    const double peak09 = 2.0 * (0.9 / zeta(std3)) * rate_unit(std3);
    const auto at09 = weak_field_margins(std3, peak09);
    CHECK(at09.pass());
    CHECK(at09.optical_ratio < 1.0);
    CHECK(6.0 / at09.drive == doctest::Approx(6.67).epsilon(1e-3));
    CHECK_FALSE(at09.metastable_ratio.has_value());
}

TEST_CASE("rate matrices conserve population")
{
    for (const auto& name : preset_names()) {
        const LevelScheme scheme = preset(name);
        for (auto model : {RateModel::full, RateModel::ground_only}) {
            const Eigen::MatrixXd A = rate_matrix(scheme, 37.0, 11.0, model);
            CHECK(A.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(static_cast<std::size_t>(A.rows()) == level_labels(scheme).size());
        }
    }
}

TEST_CASE("transient oracle at equilibrium")
{
    for (const auto& name : preset_names()) {
        const LevelScheme scheme = preset(name);
        const auto st = transient_oracle(scheme, 0.0, 0.0, 1e-3);
        const auto d = st.differences();
        CHECK(d.first == doctest::Approx(is_interlaced(scheme) ? 0.5 : 1.0).epsilon(1e-15));
        CHECK(st.fractions.sum() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("transient oracle reproduces the standard closed form")
{
    const LevelScheme std3 = tmyag_standard();
    const double z = zeta(std3);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int i = 0; i < 100; ++i) {
        const double r = (i == 0 ? 0.9 : u(rng)) / z;
        const auto st = transient_oracle(std3, r, 0.0, default_oracle_time(std3));
        CHECK(std::abs(st.differences().first - steady_state(std3, r).first) <= 1e-6);
        CHECK(st.max_drift <= 1e-12);
        CHECK((st.fractions.array() >= -1e-15).all());
        CHECK((st.fractions.array() <= 1.0 + 1e-15).all());
    }
}

TEST_CASE("ground-only oracle reproduces the sublevel closed forms")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    OracleOptions o;
    o.model = RateModel::ground_only;
    for (const LevelScheme& scheme : {LevelScheme(tmyag_lambda()), LevelScheme(tmyag_isg())}) {
        const double x = xi(scheme);
        for (int i = 0; i < 6; ++i) {
            const double r = u(rng) / x, rp = u(rng) / x;
            const auto st = transient_oracle(scheme, r, rp, default_oracle_time(scheme), o);
            const auto d = st.differences();
            const auto c = steady_state(scheme, r, rp);
            CHECK(std::abs(d.first - c.first) <= 1e-6);
            CHECK(std::abs(d.second - c.second) <= 1e-6);
            CHECK(st.max_drift <= 1e-12);
        }
    }
}

TEST_CASE("full sublevel model approaches the closed form in the weak-field limit")
{
    const LevelScheme isg = tmyag_isg();
    const double r = 6.0 / xi(isg);
    const auto st = transient_oracle(isg, r, 0.0, default_oracle_time(isg));
    const auto c = steady_state(isg, r, 0.0);
    // corrections scale with R / gamma_e = r
    CHECK(std::abs(st.differences().first - c.first) <= 10.0 * r);
    CHECK(std::abs(st.differences().second - c.second) <= 10.0 * r);
    CHECK(st.fraction("m") < 0.01);
}

TEST_CASE("metastable level fills above the shelving bound")
{
    const Tm5 t = tmyag_isg();
    const double bound = t.gamma_m * t.gamma_e() / t.gamma_b;
    const double r = 100.0 * bound / t.gamma_e();
    const auto st = transient_oracle(t, r, r, default_oracle_time(t));
    CHECK(st.fraction("m") > 0.1);
    CHECK(st.max_drift <= 1e-12);
}

TEST_CASE("oracle convergence checks")
{
    const LevelScheme std3 = tmyag_standard();
    CHECK_THROWS_AS(transient_oracle(std3, 0.9 / zeta(std3), 0.0, 1e-3), convergence_error);
    OracleOptions loose;
    loose.require_steady = false;
    CHECK_NOTHROW(transient_oracle(std3, 0.9 / zeta(std3), 0.0, 1e-3, loose));
    CHECK_THROWS_AS(transient_oracle(std3, -1.0, 0.0, 1.0), domain_error);
    OracleOptions coarse;
    coarse.step_fraction = 0.05;
    CHECK_THROWS_AS(transient_oracle(std3, 0.1, 0.0, 1.0, coarse), domain_error);
    CHECK_THROWS_AS(transient_oracle(std3, 0.0, 0.0, 1.0).fraction("4"), domain_error);
}
