#include <isg/excitation.hpp>

#include <cmath>
#include <numbers>

namespace isg {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double ln2 = std::numbers::ln2;
} // namespace

void ExcitationField::check() const
{
    if (r.size() != grid.size()) {
        throw domain_error("excitation samples do not match the phase grid");
    }
    if ((r < 0.0).any()) {
        throw domain_error("pumping rate must be non-negative");
    }
    if (std::abs(r.mean() - r_avg) > 1e-10 * std::max(1.0, r_avg)) {
        throw domain_error("mean pumping rate does not match r_avg");
    }
}

ExcitationField sinusoidal_pump(const PhaseGrid& grid, double r_avg)
{
    if (!(r_avg >= 0.0) || !std::isfinite(r_avg)) {
        throw domain_error("r_avg must be non-negative");
    }
    ArrayX r = r_avg * (1.0 + grid.values().cos());
    // 1 + cos phi can round to a tiny negative at phi = pi.
    r = r.max(0.0);
    return {grid, std::move(r), r_avg, grid.size() / 2};
}

ExcitationField replica_field(const ExcitationField& field, double shift)
{
    const long bins = field.grid.bins_for(shift);
    return {field.grid, circular_shift(field.r, bins), field.r_avg,
            field.replica_shift_bins};
}

double single_pulse_shape(const PulsePairSpec& spec, double detuning)
{
    if (spec.envelope == Envelope::rectangular) {
        const double x = pi * detuning * spec.pulse_duration;
        return x == 0.0 ? 1.0 : std::sin(x) / x;
    }
    const double f = spec.pulse_duration;
    return std::exp(-pi * pi * detuning * detuning * f * f / (4.0 * ln2));
}

PumpSpectrum pulse_pair_spectrum(const PulsePairSpec& spec, const ArrayX& nu)
{
    if (!(spec.delay > 0.0)) {
        throw domain_error("pulse delay tau must be positive");
    }
    if (!(spec.period > 0.0) || !(spec.pulse_duration > 0.0)) {
        throw domain_error("pulse duration and repetition period must be positive");
    }
    const double a1 = spec.pulse_area;
    const double a2 = spec.second_pulse_area.value_or(spec.pulse_area);

    PumpSpectrum out;
    out.nu = nu;
    out.spectral_density.resize(nu.size());
    for (Eigen::Index k = 0; k < nu.size(); ++k) {
        const double d = nu(k) - spec.center_offset;
        const double s = single_pulse_shape(spec, d);
        const double fringe = a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * std::cos(2.0 * pi * d * spec.delay);
        out.spectral_density(k) = std::max(0.0, s * s * fringe);
    }
    out.rate = out.spectral_density / (4.0 * spec.period);
    out.max_density = nu.size() > 0 ? out.spectral_density.maxCoeff() : 0.0;
    out.weak = out.max_density <= 0.1;
    return out;
}

bool period_allows_relaxation(const PulsePairSpec& spec, const LevelScheme& scheme)
{
    return spec.period >= 2.0 / gamma_e(scheme);
}

ReplicaScan replica_alignment_scan(const LevelScheme& scheme, const ReplicaScanConfig& config)
{
    if (!is_interlaced(scheme)) {
        throw scheme_mismatch("replica scans need a sublevel (lambda3/tm5) scheme");
    }
    if (!(config.tau > 0.0) || !(config.pulse_fwhm > 0.0)) {
        throw domain_error("tau and pulse_fwhm must be positive");
    }
    if (config.bins_per_period < 4) {
        throw domain_error("need at least 4 frequency bins per fringe period");
    }
    if (config.r_avg < 0.0) {
        throw domain_error("r_avg must be non-negative");
    }

    const double step = 1.0 / (config.tau * config.bins_per_period);
    std::vector<long> shifts;
    double widest = 0.0;
    for (double ratio : config.ratios) {
        const double bins = ratio * config.bins_per_period;
        if (std::abs(bins - std::round(bins)) > 1e-9 * std::max(1.0, bins)) {
            throw grid_resolution_error("splitting ratio " + std::to_string(ratio) +
                                        " is not an integer number of frequency bins");
        }
        shifts.push_back(std::lround(bins));
        widest = std::max(widest, std::abs(ratio) / config.tau);
    }

    const double half_span =
        config.half_span > 0.0 ? config.half_span : 4.0 / config.pulse_fwhm + widest;
    const long half = static_cast<long>(std::ceil(half_span / step));
    const Eigen::Index n = 2 * half + 1;

    PulsePairSpec spec;
    spec.envelope = Envelope::gaussian;
    spec.pulse_duration = config.pulse_fwhm;
    spec.delay = config.tau;

    ReplicaScan scan;
    scan.nu = ArrayX::LinSpaced(n, -half * step, half * step);
    scan.r.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double s = single_pulse_shape(spec, scan.nu(k));
        scan.r(k) = config.r_avg * s * s * (1.0 + std::cos(2.0 * pi * scan.nu(k) * config.tau));
    }
    scan.ratios = config.ratios;

    for (long shift : shifts) {
        // r'(nu) = r(nu - splitting); outside the window the pump is zero.
        ArrayX r_prime = ArrayX::Zero(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::Index j = k - shift;
            if (j >= 0 && j < n) {
                r_prime(k) = scan.r(j);
            }
        }
        const auto diffs = steady_state(scheme, scan.r, r_prime);
        auto spectrum = absorption(scheme, 1.0, diffs, static_cast<double>(shift),
                                   GridBoundary::finite);
        scan.truncated = scan.truncated || spectrum.truncated;
        scan.alpha_rel.push_back(std::move(spectrum.alpha));
    }
    return scan;
}

} // namespace isg
