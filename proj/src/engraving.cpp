#include <isg/engraving.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace isg {

namespace {
constexpr double pi = std::numbers::pi;
} // namespace

double MediumSpec::wavenumber() const
{
    return 2.0 * pi / wavelength;
}

double MediumSpec::grating_wavenumber() const
{
    return 2.0 * wavenumber() * std::sin(theta.value_or(0.0) / 2.0);
}

void MediumSpec::check() const
{
    if (!(optical_depth() > 0.0) || !std::isfinite(optical_depth())) {
        throw domain_error("optical depth alpha0*L must be positive");
    }
    if (!(wavelength > 0.0)) {
        throw domain_error("wavelength must be positive");
    }
    if (theta && !(*theta >= 0.0)) {
        throw domain_error("beam angle must be non-negative");
    }
}

MediumSpec MediumSpec::from_depth(double optical_depth, double length, double wavelength)
{
    if (!(length > 0.0)) {
        throw domain_error("length must be positive");
    }
    MediumSpec m{optical_depth / length, length, wavelength, std::nullopt};
    m.check();
    return m;
}

MediumSpec MediumSpec::from_alpha(double alpha0, double optical_depth, double wavelength)
{
    if (!(alpha0 > 0.0)) {
        throw domain_error("alpha0 must be positive");
    }
    MediumSpec m{alpha0, optical_depth / alpha0, wavelength, std::nullopt};
    m.check();
    return m;
}

std::string_view regime_name(Regime regime)
{
    switch (regime) {
    case Regime::entrance_only:
        return "entrance-only";
    case Regime::small_angle:
        return "small-angle";
    case Regime::large_angle:
        return "large-angle";
    case Regime::uniform_ideal:
        return "uniform-ideal";
    }
    return "unknown";
}

Regime parse_regime(std::string_view name)
{
    for (Regime r : {Regime::entrance_only, Regime::small_angle, Regime::large_angle,
                     Regime::uniform_ideal}) {
        if (regime_name(r) == name) {
            return r;
        }
    }
    if (name == "small") {
        return Regime::small_angle;
    }
    if (name == "large") {
        return Regime::large_angle;
    }
    if (name == "entrance") {
        return Regime::entrance_only;
    }
    throw config_error("unknown regime '" + std::string(name) + "'");
}

double entrance_contrast(const LevelScheme& scheme, double r_avg)
{
    const double d = drive_scale(scheme) * r_avg;
    return is_interlaced(scheme) ? 4.0 * d / (1.0 + 2.0 * d) : 2.0 * d / (1.0 + 2.0 * d);
}

namespace {

void check_alignment(const LevelScheme& scheme, const ExcitationField& field, bool allow)
{
    field.check();
    if (is_interlaced(scheme) && !allow && field.replica_shift_bins != field.grid.size() / 2) {
        throw domain_error("interlaced engraving expects the replica shifted by half a period "
                           "(splitting * tau = 1/2); pass allow_misaligned to override");
    }
}

std::vector<std::string> margin_warnings(const LevelScheme& scheme, double r_peak_reduced)
{
    std::vector<std::string> out;
    const auto m = weak_field_margins(scheme, r_peak_reduced * rate_unit(scheme));
    if (!m.optical_ok) {
        out.push_back("peak pumping rate exceeds gamma_e/2 (ratio " +
                      std::to_string(m.optical_ratio) + ")");
    }
    if (!m.metastable_ok) {
        out.push_back("peak pumping rate exceeds gamma_m gamma_e / gamma_b (ratio " +
                      std::to_string(*m.metastable_ratio) + ")");
    }
    if (!m.drive_ok) {
        out.push_back("drive " + std::to_string(m.drive) + " beyond the operating limit " +
                      std::to_string(m.drive_limit));
    }
    return out;
}

GratingProfile blank_profile(const LevelScheme& scheme, const ExcitationField& field,
                             const MediumSpec& medium, int n_z, Regime regime)
{
    GratingProfile p{.z = ArrayX::LinSpaced(n_z + 1, 0.0, medium.length),
                     .grid = field.grid,
                     .alpha = Eigen::MatrixXd(n_z + 1, field.grid.size()),
                     .intensity = Eigen::MatrixXd(n_z + 1, field.grid.size()),
                     .alpha0 = medium.alpha0,
                     .length = medium.length,
                     .scheme = std::string(scheme_name(scheme)),
                     .regime = regime,
                     .warnings = {}};
    return p;
}

GratingProfile march_small(const LevelScheme& scheme, const ExcitationField& field,
                           const MediumSpec& medium, int n_z)
{
    GratingProfile out = blank_profile(scheme, field, medium, n_z, Regime::small_angle);
    const double h = medium.length / n_z;
    const long shift = field.replica_shift_bins;

    ArrayX I = field.r_avg > 0.0 ? ArrayX(field.r / field.r_avg)
                                 : ArrayX(ArrayX::Ones(field.grid.size()));
    // Pumping follows the local intensity; the constant is fixed at the entrance.
    const double scale = field.r_avg / I.mean();
    auto alpha_of = [&](const ArrayX& intensity) {
        return absorption_from_rate(scheme, medium.alpha0, scale * intensity, shift);
    };
    auto slope = [&](const ArrayX& intensity) -> ArrayX {
        return -alpha_of(intensity) * intensity;
    };

    for (int i = 0; i <= n_z; ++i) {
        out.intensity.row(i) = I.matrix().transpose();
        out.alpha.row(i) = alpha_of(I).matrix().transpose();
        if (i == n_z) {
            break;
        }
        const ArrayX k1 = slope(I);
        const ArrayX k2 = slope(I + 0.5 * h * k1);
        const ArrayX k3 = slope(I + 0.5 * h * k2);
        const ArrayX k4 = slope(I + h * k3);
        I += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

LargeAngleResult march_large(const LevelScheme& scheme, const ExcitationField& field,
                             const MediumSpec& medium, int n_z, std::complex<double> second)
{
    LargeAngleResult out{blank_profile(scheme, field, medium, n_z, Regime::large_angle), {},
                         ArrayXc(n_z + 1), ArrayXc(n_z + 1)};
    const Eigen::Index n = field.grid.size();
    const double h = medium.length / n_z;
    const long shift = field.replica_shift_bins;

    ArrayXc carrier(n); // e^{-i phi_k}
    for (Eigen::Index k = 0; k < n; ++k) {
        carrier(k) = std::polar(1.0, -field.grid.phi(static_cast<int>(k)));
    }
    auto intensity_of = [&](const Eigen::Vector2cd& E) -> ArrayX {
        return (E(0) + E(1) * carrier).abs2();
    };

    const Eigen::Vector2cd entrance(1.0, second);
    const double norm = intensity_of(entrance).mean();

    struct Local
    {
        ArrayX intensity;
        ArrayX alpha;
        std::complex<double> a0;
        std::complex<double> a1;
    };
    auto local = [&](const Eigen::Vector2cd& E) {
        Local l;
        l.intensity = intensity_of(E) / norm;
        l.alpha = absorption_from_rate(scheme, medium.alpha0, field.r_avg * l.intensity, shift);
        l.a0 = fourier_coefficient(l.alpha, 0);
        l.a1 = fourier_coefficient(l.alpha, 1);
        return l;
    };
    auto slope = [&](const Eigen::Vector2cd& E) -> Eigen::Vector2cd {
        const Local l = local(E);
        return {-0.5 * l.a0 * E(0), -0.5 * l.a0 * E(1) - l.a1 * E(0)};
    };

    out.fourier.z = out.profile.z;
    out.fourier.length = medium.length;
    out.fourier.coeffs.resize(n_z + 1, 2);

    Eigen::Vector2cd E = entrance;
    for (int i = 0; i <= n_z; ++i) {
        const Local l = local(E);
        out.profile.intensity.row(i) = l.intensity.matrix().transpose();
        out.profile.alpha.row(i) = l.alpha.matrix().transpose();
        out.fourier.coeffs(i, 0) = l.a0;
        out.fourier.coeffs(i, 1) = l.a1;
        out.e0(i) = E(0);
        out.e1(i) = E(1);
        if (i == n_z) {
            break;
        }
        const Eigen::Vector2cd k1 = slope(E);
        const Eigen::Vector2cd k2 = slope(E + 0.5 * h * k1);
        const Eigen::Vector2cd k3 = slope(E + 0.5 * h * k2);
        const Eigen::Vector2cd k4 = slope(E + h * k3);
        E += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

void compare_resolutions(const GratingProfile& coarse, const GratingProfile& fine, double tol)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < coarse.alpha.rows(); ++i) {
        worst = std::max(worst, (coarse.alpha.row(i) - fine.alpha.row(2 * i)).cwiseAbs().maxCoeff());
    }
    worst /= coarse.alpha0;
    if (worst > tol) {
        throw convergence_error("engraving profile changes by " + std::to_string(worst) +
                                " alpha0 when the depth step is halved");
    }
}

void check_depth_steps(int n_z)
{
    if (n_z < 50) {
        throw domain_error("engraving needs n_z >= 50");
    }
}

} // namespace

ArrayX entrance_profile(const LevelScheme& scheme, const ExcitationField& field, double alpha0,
                        bool allow_misaligned)
{
    check_alignment(scheme, field, allow_misaligned);
    return absorption_from_rate(scheme, alpha0, field.r, field.replica_shift_bins);
}

PhaseMatching max_phase_matched_order(const MediumSpec& medium)
{
    if (!medium.theta) {
        throw domain_error("phase matching needs the beam angle theta");
    }
    if (!(medium.length > 0.0) || !(medium.wavelength > 0.0)) {
        throw domain_error("phase matching needs positive length and wavelength");
    }
    PhaseMatching pm;
    pm.critical_angle = std::sqrt(medium.wavelength / (2.0 * medium.length));
    const double theta = *medium.theta;
    const double K = medium.grating_wavenumber();
    if (K > 0.0) {
        const double q = K * K * medium.length / medium.wavenumber();
        // n(n-1) q < pi  <=>  n < (1 + sqrt(1 + 4 pi / q)) / 2
        const double bound = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * pi / q));
        double n = std::ceil(bound) - 1.0;
        while (n > 1.0 && n * (n - 1.0) * q >= pi) {
            n -= 1.0;
        }
        pm.max_order = static_cast<int>(std::min(n, double(std::numeric_limits<int>::max())));
    }
    if (theta <= 0.75 * pm.critical_angle) {
        pm.regime = PhaseMatchRegime::small_angle;
    } else if (theta >= 1.25 * pm.critical_angle) {
        pm.regime = PhaseMatchRegime::large_angle;
    } else {
        pm.regime = PhaseMatchRegime::ambiguous;
    }
    return pm;
}

GratingProfile engrave_small_angle(const LevelScheme& scheme, const ExcitationField& field,
                                   const MediumSpec& medium, const EngraveOptions& options)
{
    medium.check();
    check_depth_steps(options.n_z);
    check_alignment(scheme, field, options.allow_misaligned);

    GratingProfile out = march_small(scheme, field, medium, options.n_z);
    if (options.verify) {
        compare_resolutions(out, march_small(scheme, field, medium, 2 * options.n_z),
                            options.tolerance);
    }
    out.warnings = margin_warnings(scheme, field.r.maxCoeff());
    return out;
}

LargeAngleResult engrave_large_angle(const LevelScheme& scheme, const ExcitationField& field,
                                     const MediumSpec& medium, const EngraveOptions& options)
{
    medium.check();
    check_depth_steps(options.n_z);
    check_alignment(scheme, field, options.allow_misaligned);

    LargeAngleResult out = march_large(scheme, field, medium, options.n_z, options.second_beam);
    if (options.verify) {
        compare_resolutions(out.profile,
                            march_large(scheme, field, medium, 2 * options.n_z,
                                        options.second_beam)
                                .profile,
                            options.tolerance);
    }
    out.profile.warnings =
        margin_warnings(scheme, field.r_avg * out.profile.intensity.row(0).maxCoeff());
    return out;
}

GratingProfile engrave_entrance_only(const LevelScheme& scheme, const ExcitationField& field,
                                     const MediumSpec& medium, const EngraveOptions& options)
{
    medium.check();
    if (options.n_z < 1) {
        throw domain_error("need at least one depth step");
    }
    const ArrayX row = entrance_profile(scheme, field, medium.alpha0, options.allow_misaligned);
    GratingProfile out = blank_profile(scheme, field, medium, options.n_z, Regime::entrance_only);
    out.alpha = row.matrix().transpose().replicate(options.n_z + 1, 1);
    out.intensity.resize(0, 0);
    out.warnings = margin_warnings(scheme, field.r.maxCoeff());
    return out;
}

GratingProfile engrave(const LevelScheme& scheme, const ExcitationField& field,
                       const MediumSpec& medium, Regime regime, const EngraveOptions& options)
{
    switch (regime) {
    case Regime::entrance_only:
        return engrave_entrance_only(scheme, field, medium, options);
    case Regime::small_angle:
        return engrave_small_angle(scheme, field, medium, options);
    case Regime::large_angle:
        return engrave_large_angle(scheme, field, medium, options).profile;
    case Regime::uniform_ideal:
        break;
    }
    throw domain_error("uniform-ideal gratings are built with ideal_grating, not engraved");
}

FourierGrating fourier_coefficients(const GratingProfile& profile, int p_max)
{
    const int n = profile.grid.size();
    if (p_max < 0) {
        throw domain_error("p_max must be non-negative");
    }
    if (p_max >= n / 2) {
        throw grid_resolution_error("harmonic " + std::to_string(p_max) +
                                    " aliases on a " + std::to_string(n) + "-point phase grid");
    }
    Eigen::MatrixXcd basis(n, p_max + 1);
    for (int k = 0; k < n; ++k) {
        for (int p = 0; p <= p_max; ++p) {
            basis(k, p) = std::polar(1.0, p * profile.grid.phi(k));
        }
    }
    FourierGrating out;
    out.z = profile.z;
    out.length = profile.length;
    out.coeffs = profile.alpha.cast<std::complex<double>>() * basis / static_cast<double>(n);
    return out;
}

GratingProfile ideal_grating(IdealKind kind, const MediumSpec& medium, const PhaseGrid& grid,
                             int n_z)
{
    medium.check();
    if (n_z < 1) {
        throw domain_error("need at least one depth step");
    }
    const int n = grid.size();
    Eigen::RowVectorXd row(n);
    for (int k = 0; k < n; ++k) {
        double shape = 0.0;
        if (kind == IdealKind::sinusoidal) {
            shape = std::sin(grid.phi(k));
        } else if (k != 0 && 2 * k != n) {
            // sign(sin phi), with sign(0) = 0 at the nodes phi = 0, pi
            shape = 2 * k < n ? 1.0 : -1.0;
        }
        row(k) = medium.alpha0 * (1.0 + shape);
    }
    GratingProfile out{.z = ArrayX::LinSpaced(n_z + 1, 0.0, medium.length),
                       .grid = grid,
                       .alpha = row.replicate(n_z + 1, 1),
                       .intensity = {},
                       .alpha0 = medium.alpha0,
                       .length = medium.length,
                       .scheme = kind == IdealKind::sinusoidal ? "ideal-sinusoidal" : "ideal-square",
                       .regime = Regime::uniform_ideal,
                       .warnings = {}};
    return out;
}

} // namespace isg
