#include <doctest.h>

#include <cmath>
#include <numbers>

#include <isg/engraving.hpp>

#include "oracles.hpp"

using namespace isg;

namespace {

constexpr double pi = std::numbers::pi;

ExcitationField pump(const LevelScheme& scheme, double drive, int n_phi = 256)
{
    return sinusoidal_pump(PhaseGrid(n_phi), drive / drive_scale(scheme));
}

oracle::PointKinetics kinetics_of(const LevelScheme& scheme, int n_phi)
{
    return {is_interlaced(scheme), drive_scale(scheme), n_phi / 2};
}

double max_row_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("medium")
{
    const auto m = MediumSpec::from_depth(2.0, 2.5e-3);
    CHECK(m.alpha0 == doctest::Approx(800.0));
    CHECK(m.optical_depth() == doctest::Approx(2.0));
    CHECK(m.wavenumber() == doctest::Approx(2 * pi / 793e-9));
    CHECK(m.grating_wavenumber() == 0.0);
    const auto a = MediumSpec::from_alpha(400.0, 1.0);
    CHECK(a.length == doctest::Approx(2.5e-3));
    CHECK_THROWS_AS(MediumSpec::from_depth(0.0, 1e-3), domain_error);
    CHECK_THROWS_AS(MediumSpec::from_depth(1.0, -1e-3), domain_error);
    MediumSpec bad = m;
    bad.theta = -0.1;
    CHECK_THROWS_AS(bad.check(), domain_error);

    CHECK(parse_regime("large-angle") == Regime::large_angle);
    CHECK(regime_name(parse_regime(regime_name(Regime::entrance_only))) == "entrance-only");
    CHECK_THROWS_AS(parse_regime("sideways"), config_error);
}

TEST_CASE("entrance contrast closed forms")
{
    const LevelScheme isg = tmyag_isg();
    const LevelScheme std3 = tmyag_standard();
    CHECK(entrance_contrast(isg, 30.0 / xi(isg)) == doctest::Approx(120.0 / 61.0).epsilon(1e-12));
    CHECK(120.0 / 61.0 == doctest::Approx(1.967).epsilon(1e-3));
    CHECK(entrance_contrast(std3, 0.9 / zeta(std3)) == doctest::Approx(1.8 / 2.8).epsilon(1e-12));

    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    struct Case
    {
        LevelScheme scheme;
        double drive;
        double expected;
    };
    for (const Case& c : {Case{isg, 30.0, 1.967}, Case{std3, 0.9, 0.643}, Case{isg, 6.0, 1.846},
                          Case{tmyag_lambda(), 6.0, 1.846}}) {
        const auto field = pump(c.scheme, c.drive);
        const ArrayX row = entrance_profile(c.scheme, field, medium.alpha0);
        const double measured = contrast(row.matrix(), medium.alpha0);
        CHECK(measured == doctest::Approx(entrance_contrast(c.scheme, field.r_avg)).epsilon(1e-9));
        CHECK(measured == doctest::Approx(c.expected).epsilon(5e-4));
    }
}

TEST_CASE("alignment of interlaced gratings")
{
    const LevelScheme isg = tmyag_isg();
    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    ExcitationField field = pump(isg, 6.0, 64);
    field.replica_shift_bins = 16;
    CHECK_THROWS_AS(engrave_small_angle(isg, field, medium), domain_error);
    CHECK_THROWS_AS(entrance_profile(isg, field, medium.alpha0), domain_error);
    EngraveOptions eo;
    eo.allow_misaligned = true;
    CHECK_NOTHROW(engrave_small_angle(isg, field, medium, eo));
    // the standard scheme ignores the replica
    CHECK_NOTHROW(engrave_small_angle(tmyag_standard(), field, medium));
}

TEST_CASE("unpumped medium")
{
    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    for (const LevelScheme& scheme : {LevelScheme(tmyag_standard()), LevelScheme(tmyag_isg())}) {
        const auto field = sinusoidal_pump(PhaseGrid(64), 0.0);
        const auto p = engrave_small_angle(scheme, field, medium);
        CHECK((p.alpha.array() - medium.alpha0).abs().maxCoeff() <= 1e-12 * medium.alpha0);
        const Eigen::Index last = p.depth_count() - 1;
        CHECK(p.intensity.row(last).minCoeff() == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
        CHECK(contrast(p.alpha.row(last), p.alpha0) <= 1e-12);
    }
}

TEST_CASE("contrast of simple rows")
{
    CHECK(contrast(Eigen::RowVectorXd::Constant(8, 3.0), 3.0) == 0.0);
    Eigen::RowVectorXd sq(4);
    sq << 0.0, 2.0, 2.0, 0.0;
    CHECK(contrast(sq, 1.0) == 2.0);
    CHECK_THROWS_AS(contrast(Eigen::RowVectorXd(), 1.0), domain_error);
}

TEST_CASE("phase matching")
{
    MediumSpec m = MediumSpec::from_depth(2.0, 2.5e-3);
    CHECK_THROWS_AS(max_phase_matched_order(m), domain_error);

    m.theta = 0.0;
    auto pm = max_phase_matched_order(m);
    CHECK(pm.critical_angle == doctest::Approx(12.59e-3).epsilon(1e-3));
    CHECK(pm.critical_angle == doctest::Approx(std::sqrt(793e-9 / 5e-3)).epsilon(1e-14));
    CHECK_FALSE(pm.max_order.has_value());
    CHECK(pm.regime == PhaseMatchRegime::small_angle);

    m.theta = 17.5e-3;
    pm = max_phase_matched_order(m);
    CHECK(pm.regime == PhaseMatchRegime::large_angle);
    CHECK(pm.max_order == 1);

    m.theta = 7.5e-3;
    pm = max_phase_matched_order(m);
    CHECK(pm.regime == PhaseMatchRegime::small_angle);
    CHECK(pm.max_order == 2);

    m.theta = 12.6e-3;
    CHECK(max_phase_matched_order(m).regime == PhaseMatchRegime::ambiguous);

    // brute-force order count: n(n-1) K^2 L / k < pi
    for (double theta : {1e-3, 3e-3, 5e-3, 9e-3, 11e-3, 14e-3, 30e-3}) {
        m.theta = theta;
        const double K = 2 * m.wavenumber() * std::sin(theta / 2);
        const double q = K * K * m.length / m.wavenumber();
        int n = 1;
        while ((n + 1) * n * q < pi) {
            ++n;
        }
        CHECK(max_phase_matched_order(m).max_order == n);
    }
}

TEST_CASE("small-angle engraving matches coupled spectral orders")
{
    const int n_phi = 128, n_z = 200;
    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    for (const auto& [scheme, drive] : {std::pair{LevelScheme(tmyag_isg()), 6.0},
                                        std::pair{LevelScheme(tmyag_standard()), 0.9}}) {
        const auto field = pump(scheme, drive, n_phi);
        EngraveOptions eo;
        eo.n_z = n_z;
        const auto p = engrave_small_angle(scheme, field, medium, eo);
        const Eigen::MatrixXd ref = oracle::coupled_wave_small_angle(
            kinetics_of(scheme, n_phi), field.r_avg, medium.alpha0, medium.length, n_phi, n_z, 48);
        CHECK(max_row_gap(p.alpha, ref) / medium.alpha0 <= 1e-6);
    }
}

TEST_CASE("large-angle engraving matches the two-wave oracle")
{
    const int n_phi = 128, n_z = 200;
    const auto medium = MediumSpec::from_depth(1.8, 2.5e-3);
    for (const auto& [scheme, drive] : {std::pair{LevelScheme(tmyag_isg()), 30.0},
                                        std::pair{LevelScheme(tmyag_standard()), 0.9}}) {
        const auto field = pump(scheme, drive, n_phi);
        EngraveOptions eo;
        eo.n_z = n_z;
        const auto res = engrave_large_angle(scheme, field, medium, eo);
        const Eigen::MatrixXd ref = oracle::two_wave_large_angle(
            kinetics_of(scheme, n_phi), field.r_avg, medium.alpha0, medium.length, n_phi, 2 * n_z);
        Eigen::MatrixXd coarse(n_z + 1, n_phi);
        for (int i = 0; i <= n_z; ++i) {
            coarse.row(i) = ref.row(2 * i);
        }
        CHECK(max_row_gap(res.profile.alpha, coarse) / medium.alpha0 <= 1e-8);
        for (int i = 0; i <= n_z; i += 20) {
            const auto a1 = oracle::first_harmonic(res.profile.alpha.row(i));
            CHECK(std::abs(res.fourier.coeffs(i, 1) - a1) <= 1e-12 * medium.alpha0);
        }
    }
}

TEST_CASE("interlaced profiles are point symmetric")
{
    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    for (const LevelScheme& scheme : {LevelScheme(tmyag_lambda()), LevelScheme(tmyag_isg())}) {
        for (double drive : {0.1, 6.0, 30.0}) {
            const auto field = pump(scheme, drive, 128);
            const auto small = engrave_small_angle(scheme, field, medium);
            const auto large = engrave_large_angle(scheme, field, medium).profile;
            for (const auto* p : {&small, &large}) {
                const Eigen::MatrixXd& a = p->alpha;
                const Eigen::MatrixXd sum = a.leftCols(64) + a.rightCols(64);
                CHECK((sum.array() - 2 * medium.alpha0).abs().maxCoeff() <= 1e-9 * medium.alpha0);
            }
        }
    }
}

TEST_CASE("standard gratings stay below the unpumped absorption")
{
    const LevelScheme std3 = tmyag_standard();
    const auto medium = MediumSpec::from_depth(3.0, 2.5e-3);
    const auto p = engrave_small_angle(std3, pump(std3, 0.9), medium);
    CHECK(p.alpha.maxCoeff() <= medium.alpha0 * (1 + 1e-12));
    CHECK(p.alpha.minCoeff() > 0.0);
    // bleaching fades with depth, so the mean absorption rises towards alpha0
    const Eigen::VectorXd mean = p.alpha.rowwise().mean();
    for (Eigen::Index i = 1; i < mean.size(); ++i) {
        CHECK(mean(i) >= mean(i - 1));
    }
    // and the pump intensity only decays
    for (Eigen::Index i = 1; i < p.intensity.rows(); ++i) {
        CHECK((p.intensity.row(i).array() <= p.intensity.row(i - 1).array() + 1e-15).all());
    }
}

TEST_CASE("large-angle pump energy decays")
{
    const LevelScheme isg = tmyag_isg();
    const auto res = engrave_large_angle(isg, pump(isg, 30.0), MediumSpec::from_depth(2.0, 2.5e-3));
    const ArrayX energy = res.e0.abs2() + res.e1.abs2();
    for (Eigen::Index i = 1; i < energy.size(); ++i) {
        CHECK(energy(i) < energy(i - 1));
    }
    CHECK(std::abs(res.e0(0) - 1.0) == 0.0);
    CHECK(res.profile.intensity.row(0).mean() == doctest::Approx(1.0));
    CHECK(contrast(res.profile.alpha.row(0), res.profile.alpha0) ==
          doctest::Approx(120.0 / 61.0).epsilon(1e-6));
    CHECK(contrast(res.profile.alpha.row(400), res.profile.alpha0) ==
          doctest::Approx(1.57).epsilon(0.03));
}

TEST_CASE("a single large-angle beam writes no grating")
{
    const LevelScheme isg = tmyag_isg();
    EngraveOptions eo;
    eo.second_beam = 0.0;
    const auto res = engrave_large_angle(isg, pump(isg, 6.0), MediumSpec::from_depth(2.0, 2.5e-3), eo);
    CHECK(res.fourier.coeffs.col(1).cwiseAbs().maxCoeff() <= 1e-12 * res.profile.alpha0);
    CHECK(res.e1.abs().maxCoeff() <= 1e-12);
}

TEST_CASE("depth and phase resolution")
{
    const LevelScheme isg = tmyag_isg();
    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    EngraveOptions coarse;
    coarse.n_z = 200;
    EngraveOptions fine;
    fine.n_z = 400;
    const auto a = engrave_small_angle(isg, pump(isg, 30.0, 128), medium, coarse);
    const auto b = engrave_small_angle(isg, pump(isg, 30.0, 256), medium, fine);
    const double ca = contrast(a.alpha.row(200), a.alpha0);
    const double cb = contrast(b.alpha.row(400), b.alpha0);
    CHECK(std::abs(ca - cb) <= 1e-4);

    EngraveOptions few;
    few.n_z = 49;
    CHECK_THROWS_AS(engrave_small_angle(isg, pump(isg, 6.0), medium, few), domain_error);
    EngraveOptions strict;
    strict.n_z = 50;
    strict.tolerance = 1e-14;
    CHECK_THROWS_AS(engrave_small_angle(isg, pump(isg, 30.0), medium, strict), convergence_error);
    CHECK_THROWS_AS(engrave(isg, pump(isg, 6.0), medium, Regime::uniform_ideal), domain_error);
    CHECK(engrave(isg, pump(isg, 6.0), medium, Regime::entrance_only).regime == Regime::entrance_only);
}

TEST_CASE("fourier coefficients")
{
    const LevelScheme isg = tmyag_isg();
    const auto p = engrave_small_angle(isg, pump(isg, 6.0, 64), MediumSpec::from_depth(2.0, 2.5e-3));
    const auto f = fourier_coefficients(p, 5);
    CHECK(f.p_max() == 5);
    CHECK(f.depth_count() == p.depth_count());
    for (Eigen::Index i = 0; i < p.depth_count(); i += 50) {
        for (int q = 0; q <= 5; ++q) {
            std::complex<double> acc = 0.0;
            for (int k = 0; k < 64; ++k) {
                acc += p.alpha(i, k) * std::exp(std::complex<double>(0.0, 2 * pi * q * k / 64));
            }
            CHECK(std::abs(f.coeffs(i, q) - acc / 64.0) <= 1e-12 * p.alpha0);
        }
        // interlaced gratings hold only odd harmonics apart from the mean
        CHECK(std::abs(f.coeffs(i, 0) - p.alpha0) <= 1e-9 * p.alpha0);
        CHECK(std::abs(f.coeffs(i, 2)) <= 1e-9 * p.alpha0);
        CHECK(std::abs(f.coeffs(i, 4)) <= 1e-9 * p.alpha0);
    }
    CHECK_THROWS_AS(fourier_coefficients(p, 32), grid_resolution_error);
    CHECK_THROWS_AS(fourier_coefficients(p, -1), domain_error);
}

TEST_CASE("ideal gratings")
{
    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    const auto sine = ideal_grating(IdealKind::sinusoidal, medium, PhaseGrid(256), 10);
    const auto square = ideal_grating(IdealKind::square, medium, PhaseGrid(256), 10);
    CHECK(sine.depth_count() == 11);
    CHECK(sine.regime == Regime::uniform_ideal);
    CHECK(sine.alpha(3, 64) == doctest::Approx(2 * medium.alpha0));
    CHECK(square.alpha(0, 0) == doctest::Approx(medium.alpha0));
    CHECK(square.alpha(0, 10) == doctest::Approx(2 * medium.alpha0));
    CHECK(square.alpha(0, 200) == doctest::Approx(0.0));

    const auto fs = fourier_coefficients(sine, 1);
    const auto fq = fourier_coefficients(square, 1);
    CHECK(std::abs(fs.coeffs(5, 0) - medium.alpha0) <= 1e-9 * medium.alpha0);
    CHECK(std::abs(fs.coeffs(5, 1)) == doctest::Approx(0.5 * medium.alpha0).epsilon(1e-12));
    // discrete harmonic of sign(sin): (2/n) cot(pi/n), close to 2/pi
    const double discrete = 2.0 / 256 * (1.0 / std::tan(pi / 256));
    CHECK(std::abs(fq.coeffs(5, 1)) == doctest::Approx(discrete * medium.alpha0).epsilon(1e-12));
    CHECK(std::abs(fq.coeffs(5, 1)) == doctest::Approx(2 / pi * medium.alpha0).epsilon(1e-4));
    const auto continuum = oracle::fourier_integral(
        [](double phi) { return std::sin(phi) > 0 ? 1.0 : (std::sin(phi) < 0 ? -1.0 : 0.0); }, 1);
    CHECK(std::abs(continuum) == doctest::Approx(2 / pi).epsilon(1e-6));
}
