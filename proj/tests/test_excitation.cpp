#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <isg/excitation.hpp>

using namespace isg;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("phase grid")
{
    CHECK_THROWS_AS(PhaseGrid(15), domain_error);
    CHECK_THROWS_AS(PhaseGrid(8), domain_error);
    const PhaseGrid g(64);
    CHECK(g.size() == 64);
    CHECK(g.phi(16) == doctest::Approx(pi / 2));
    CHECK(g.values().size() == 64);
    CHECK(g.values()(63) == doctest::Approx(2 * pi * 63 / 64));
    CHECK(g.bins_for(0.5) == 32);
    CHECK(g.bins_for(-0.25) == -16);
    CHECK_THROWS_AS(g.bins_for(0.3), grid_resolution_error);

    ArrayX a = ArrayX::LinSpaced(5, 0.0, 4.0);
    const ArrayX s = circular_shift(a, 2);
    CHECK(s(0) == 3.0);
    CHECK(s(2) == 0.0);
    CHECK((circular_shift(a, -3) - circular_shift(a, 2)).abs().maxCoeff() == 0.0);
}

TEST_CASE("sinusoidal pump")
{
    const PhaseGrid g(128);
    const auto f = sinusoidal_pump(g, 0.02);
    CHECK(f.r(0) == doctest::Approx(0.04));
    CHECK(f.r(64) == doctest::Approx(0.0).epsilon(1e-18));
    CHECK(f.r(32) == doctest::Approx(0.02));
    CHECK(f.r.mean() == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(f.replica_shift_bins == 64);
    CHECK((f.r >= 0.0).all());
    CHECK_NOTHROW(f.check());
    CHECK_THROWS_AS(sinusoidal_pump(g, -1.0), domain_error);

    ExcitationField bad = f;
    bad.r(3) = -1e-3;
    CHECK_THROWS_AS(bad.check(), domain_error);
    bad = f;
    bad.r_avg = 0.03;
    CHECK_THROWS_AS(bad.check(), domain_error);
}

TEST_CASE("replica fields")
{
    const PhaseGrid g(64);
    const auto f = sinusoidal_pump(g, 1.0);
    CHECK((replica_field(f, 0.0).r - f.r).abs().maxCoeff() == 0.0);
    CHECK((replica_field(f, 1.0).r - f.r).abs().maxCoeff() == 0.0);

    const auto half = replica_field(f, 0.5);
    // antiphase replicas sum to a flat 2<r>
    CHECK((half.r + f.r - 2.0).abs().maxCoeff() <= 1e-14);
    for (int k = 0; k < g.size(); ++k) {
        CHECK(half.r(k) == doctest::Approx(1.0 + std::cos(g.phi(k) - pi)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(replica_field(f, 0.1), grid_resolution_error);
}

TEST_CASE("pulse pair spectrum")
{
    PulsePairSpec spec;
    spec.envelope = Envelope::rectangular;
    spec.pulse_area = 0.013 * pi;
    spec.pulse_duration = 200e-9;
    spec.delay = 1e-6;
    spec.period = 120e-6;
    CHECK(spec.fringe_period() == doctest::Approx(1e6));

    // one fringe around the carrier, finely sampled
    const int n = 4000;
    const ArrayX nu = ArrayX::LinSpaced(n, -0.5e6, 0.5e6 - 1e6 / n);
    const auto s = pulse_pair_spectrum(spec, nu);
    const double a = spec.pulse_area;
    CHECK(s.rate.mean() == doctest::Approx(a * a / (2 * spec.period)).epsilon(0.02));
    CHECK(a * a / (2 * spec.period) == doctest::Approx(6.95).epsilon(1e-3));
    CHECK(s.max_density == doctest::Approx(4 * a * a).epsilon(1e-9));
    CHECK(s.weak);
    CHECK((s.rate >= 0.0).all());

    // full visibility: dark fringe at half the fringe period
    const ArrayX dark = (ArrayX(1) << 0.5e6).finished();
    CHECK(pulse_pair_spectrum(spec, dark).rate(0) <= 1e-12 * s.rate.maxCoeff());

    // fringe period 1/tau
    const ArrayX bright = (ArrayX(2) << 0.0, 1e6).finished();
    const auto b = pulse_pair_spectrum(spec, bright);
    CHECK(b.spectral_density(1) == doctest::Approx(b.spectral_density(0) * std::pow(
        single_pulse_shape(spec, 1e6), 2)).epsilon(1e-12));

    PulsePairSpec single = spec;
    single.second_pulse_area = 0.0;
    const auto flat = pulse_pair_spectrum(single, nu);
    // a single pulse has no fringes: only the slow sinc envelope remains
    for (Eigen::Index k = 0; k < n; ++k) {
        CHECK(flat.spectral_density(k) ==
              doctest::Approx(a * a * std::pow(single_pulse_shape(spec, nu(k)), 2)).epsilon(1e-12));
    }

    PulsePairSpec strong = spec;
    strong.pulse_area = 0.5;
    CHECK_FALSE(pulse_pair_spectrum(strong, nu).weak);

    PulsePairSpec bad = spec;
    bad.delay = 0.0;
    CHECK_THROWS_AS(pulse_pair_spectrum(bad, nu), domain_error);
    bad = spec;
    bad.period = -1.0;
    CHECK_THROWS_AS(pulse_pair_spectrum(bad, nu), domain_error);
}

TEST_CASE("single pulse shapes")
{
    PulsePairSpec spec;
    spec.pulse_duration = 100e-9;
    CHECK(single_pulse_shape(spec, 0.0) == 1.0);
    CHECK(std::abs(single_pulse_shape(spec, 1e7)) <= 1e-15);
    spec.envelope = Envelope::gaussian;
    // field FWHM f in time maps to a field FWHM of 4 ln2 / (pi f) in frequency
    const double half_width = 2.0 * std::numbers::ln2 / (pi * spec.pulse_duration);
    CHECK(single_pulse_shape(spec, half_width) == doctest::Approx(0.5));
    CHECK(single_pulse_shape(spec, -half_width) == doctest::Approx(0.5));
}

TEST_CASE("relaxation between pulse pairs")
{
    PulsePairSpec spec;
    spec.period = 2e-3;
    CHECK(period_allows_relaxation(spec, tmyag_isg()));
    spec.period = 1e-3;
    CHECK_FALSE(period_allows_relaxation(spec, tmyag_isg()));
    spec.period = 120e-6;
    CHECK_FALSE(period_allows_relaxation(spec, tmyag_standard()));
}

TEST_CASE("replica alignment scan")
{
    const LevelScheme scheme = tmyag_isg();
    ReplicaScanConfig cfg;
    cfg.r_avg = 0.1 / xi(scheme);
    cfg.ratios = {0.5, 1.0};
    const auto scan = replica_alignment_scan(scheme, cfg);
    REQUIRE(scan.alpha_rel.size() == 2);
    CHECK(scan.nu.size() == scan.r.size());
    CHECK(scan.nu(0) == doctest::Approx(-scan.nu(scan.nu.size() - 1)));

    const auto fringe_amplitude = [&](const ArrayX& a) {
        // first harmonic of alpha - 1 at the fringe frequency, whole window
        std::complex<double> acc = 0.0;
        for (Eigen::Index k = 0; k < a.size(); ++k) {
            acc += (a(k) - 1.0) * std::polar(1.0, 2.0 * pi * scan.nu(k) * cfg.tau);
        }
        return std::abs(acc) / static_cast<double>(a.size());
    };
    CHECK(fringe_amplitude(scan.alpha_rel[0]) > 1e-3);
    CHECK(fringe_amplitude(scan.alpha_rel[1]) < 1e-9 * fringe_amplitude(scan.alpha_rel[0]));
    for (const auto& a : scan.alpha_rel) {
        CHECK((a > 0.0).all());
        CHECK((a < 2.0).all());
    }

    // far from the band the medium is unpumped
    CHECK(scan.alpha_rel[0](0) == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(replica_alignment_scan(tmyag_standard(), cfg), scheme_mismatch);
    ReplicaScanConfig odd = cfg;
    odd.ratios = {0.51};
    CHECK_THROWS_AS(replica_alignment_scan(scheme, odd), grid_resolution_error);

    // replicas split far beyond the pulse bandwidth do not overlap
    ReplicaScanConfig wide = cfg;
    wide.r_avg = 5.0 / xi(scheme);
    wide.ratios = {30.0};
    const auto far = replica_alignment_scan(scheme, wide);
    const ArrayX& a = far.alpha_rel[0];
    const Eigen::Index c = far.nu.size() / 2;
    CHECK(a(c) < 0.5);
    CHECK(a(c + 30 * wide.bins_per_period) > 1.3);
    CHECK(a(c + 15 * wide.bins_per_period) == doctest::Approx(1.0).epsilon(1e-6));
}
