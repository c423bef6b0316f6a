#include <isg/diffraction.hpp>

#include <algorithm>
#include <cmath>

namespace isg {

namespace {

using Amplitudes = Eigen::Vector2cd;

Amplitudes probe_slope(const Amplitudes& E, std::complex<double> a0, std::complex<double> a1)
{
    return {-0.5 * a0 * E(0), -0.5 * a0 * E(1) - a1 * E(0)};
}

// RK4 with step `stride` samples; sample i + stride/2 is the midpoint.
Amplitudes integrate(const FourierGrating& g, Eigen::Index stride)
{
    const Eigen::Index last = g.depth_count() - 1;
    Amplitudes E(1.0, 0.0);
    for (Eigen::Index i = 0; i < last; i += stride) {
        const double h = g.z(i + stride) - g.z(i);
        const auto a0 = g.coeffs(i, 0), a1 = g.coeffs(i, 1);
        const auto m0 = g.coeffs(i + stride / 2, 0), m1 = g.coeffs(i + stride / 2, 1);
        const auto e0 = g.coeffs(i + stride, 0), e1 = g.coeffs(i + stride, 1);
        const Amplitudes k1 = probe_slope(E, a0, a1);
        const Amplitudes k2 = probe_slope(E + 0.5 * h * k1, m0, m1);
        const Amplitudes k3 = probe_slope(E + 0.5 * h * k2, m0, m1);
        const Amplitudes k4 = probe_slope(E + h * k3, e0, e1);
        E += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return E;
}

} // namespace

ProbeResult probe_efficiency(const FourierGrating& grating, const ProbeOptions& options)
{
    const Eigen::Index steps = grating.depth_count() - 1;
    if (grating.coeffs.cols() < 2) {
        throw domain_error("probe needs harmonics 0 and 1");
    }
    if (steps < 2 || steps % 2 != 0 || grating.z.size() != grating.depth_count()) {
        throw domain_error("probe needs an even number of depth steps");
    }

    const Amplitudes E = integrate(grating, 2);
    ProbeResult out{std::norm(E(1)), E(0), E(1), std::norm(E(0))};

    if (options.verify && steps % 4 == 0) {
        const Amplitudes coarse = integrate(grating, 4);
        const double diff = std::abs(std::norm(coarse(1)) - out.eta);
        if (diff > options.tolerance * out.eta + 1e-15) {
            throw convergence_error("probe efficiency changes by " + std::to_string(diff) +
                                    " when the depth step is doubled");
        }
    }
    return out;
}

std::vector<double> linear_range(double start, double stop, double step)
{
    if (!(step > 0.0) || stop < start) {
        throw domain_error("range needs step > 0 and stop >= start");
    }
    std::vector<double> out;
    const long count = static_cast<long>(std::floor((stop - start) / step + 0.5));
    for (long i = 0; i <= count; ++i) {
        out.push_back(start + step * static_cast<double>(i));
    }
    return out;
}

double efficiency_at(const LevelScheme& scheme, double r_avg, Regime regime,
                     double optical_depth, const SweepOptions& options)
{
    if (!(optical_depth > 0.0)) {
        throw domain_error("sweep values must be positive");
    }
    const MediumSpec medium = MediumSpec::from_depth(optical_depth, options.length);
    const ExcitationField field = sinusoidal_pump(PhaseGrid(options.n_phi), r_avg);
    EngraveOptions eo;
    eo.n_z = options.n_z;
    eo.verify = options.verify;

    ProbeOptions po;
    po.verify = options.verify;
    if (regime == Regime::large_angle) {
        return probe_efficiency(engrave_large_angle(scheme, field, medium, eo).fourier, po).eta;
    }
    const GratingProfile profile = engrave(scheme, field, medium, regime, eo);
    return probe_efficiency(fourier_coefficients(profile, 1), po).eta;
}

namespace {

EfficiencyCurve make_curve(std::string parameter, const std::vector<double>& x,
                           std::vector<double> eta, Regime regime, std::string scheme)
{
    EfficiencyCurve c{std::move(parameter), x, std::move(eta), regime, std::move(scheme), 0};
    if (!c.eta.empty()) {
        c.argmax = static_cast<std::size_t>(
            std::distance(c.eta.begin(), std::max_element(c.eta.begin(), c.eta.end())));
    }
    return c;
}

} // namespace

EfficiencyCurve efficiency_vs_depth(const LevelScheme& scheme, double r_avg, Regime regime,
                                    const std::vector<double>& depths,
                                    const SweepOptions& options)
{
    std::vector<double> eta;
    eta.reserve(depths.size());
    for (double od : depths) {
        eta.push_back(efficiency_at(scheme, r_avg, regime, od, options));
    }
    return make_curve("optical_depth", depths, std::move(eta), regime,
                      std::string(scheme_name(scheme)));
}

EfficiencyCurve efficiency_vs_drive(const LevelScheme& scheme, double optical_depth,
                                    Regime regime, const std::vector<double>& drives,
                                    const SweepOptions& options)
{
    const double scale = drive_scale(scheme);
    std::vector<double> eta;
    eta.reserve(drives.size());
    for (double d : drives) {
        if (!(d >= 0.0)) {
            throw domain_error("drive values must be non-negative");
        }
        eta.push_back(efficiency_at(scheme, d / scale, regime, optical_depth, options));
    }
    return make_curve("drive", drives, std::move(eta), regime, std::string(scheme_name(scheme)));
}

EfficiencyCurve ideal_efficiency_vs_depth(IdealKind kind, const std::vector<double>& depths,
                                          const SweepOptions& options)
{
    std::vector<double> eta;
    eta.reserve(depths.size());
    for (double od : depths) {
        if (!(od > 0.0)) {
            throw domain_error("sweep values must be positive");
        }
        const MediumSpec medium = MediumSpec::from_depth(od, options.length);
        const auto profile = ideal_grating(kind, medium, PhaseGrid(options.n_phi), options.n_z);
        ProbeOptions po;
        po.verify = options.verify;
        eta.push_back(probe_efficiency(fourier_coefficients(profile, 1), po).eta);
    }
    return make_curve("optical_depth", depths, std::move(eta), Regime::uniform_ideal,
                      kind == IdealKind::sinusoidal ? "ideal-sinusoidal" : "ideal-square");
}

} // namespace isg
