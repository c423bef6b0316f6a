#ifndef ISG_ENGRAVING_HPP
#define ISG_ENGRAVING_HPP

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <isg/excitation.hpp>
#include <isg/grid.hpp>
#include <isg/kinetics.hpp>

namespace isg {

/**
 * Absorbing slab. alpha0 in m^-1, length and wavelength in m, theta in rad.
 */
struct MediumSpec
{
    double alpha0 = 0.0;
    double length = 0.0;
    double wavelength = 793e-9;
    std::optional<double> theta;

    double optical_depth() const { return alpha0 * length; }
    /// |k0| = 2 pi / lambda
    double wavenumber() const;
    /// |k1 - k0| = 2 k sin(theta/2)
    double grating_wavenumber() const;

    /// Throws domain_error on alpha0*L <= 0, lambda <= 0 or theta < 0.
    void check() const;

    static MediumSpec from_depth(double optical_depth, double length, double wavelength = 793e-9);
    static MediumSpec from_alpha(double alpha0, double optical_depth, double wavelength = 793e-9);
};

enum class Regime
{
    entrance_only,
    small_angle,
    large_angle,
    uniform_ideal
};

std::string_view regime_name(Regime regime);
Regime parse_regime(std::string_view name);

struct GratingProfile
{
    ArrayX z; ///< n_z + 1 depths over [0, L]
    PhaseGrid grid;
    Eigen::MatrixXd alpha;     ///< alpha(z_i, phi_k), rows are depths
    Eigen::MatrixXd intensity; ///< pump |E|^2 normalized to mean 1 at the entrance; empty when not propagated
    double alpha0 = 0.0;
    double length = 0.0;
    std::string scheme;
    Regime regime = Regime::entrance_only;
    std::vector<std::string> warnings;

    Eigen::Index depth_count() const { return alpha.rows(); }
};

struct FourierGrating
{
    ArrayX z;
    Eigen::MatrixXcd coeffs; ///< alpha^(p)(z_i), columns p = 0..p_max
    double length = 0.0;

    Eigen::Index depth_count() const { return coeffs.rows(); }
    int p_max() const { return static_cast<int>(coeffs.cols()) - 1; }
};

/// Mean of alpha_k e^{i p phi_k}: the discrete form of (1/2pi) int alpha e^{ip phi}.
template <typename Derived>
std::complex<double> fourier_coefficient(const Eigen::ArrayBase<Derived>& row, int p)
{
    const Eigen::Index n = row.size();
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    std::complex<double> acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        acc += row(k) * std::polar(1.0, p * step * static_cast<double>(k));
    }
    return acc / static_cast<double>(n);
}

/// (alpha_max - alpha_min) / alpha0
template <typename Derived>
double contrast(const Eigen::DenseBase<Derived>& row, double alpha0)
{
    if (row.size() == 0) {
        throw domain_error("contrast of an empty profile");
    }
    return (row.maxCoeff() - row.minCoeff()) / alpha0;
}

/// Entrance contrast of a sinusoidally pumped grating, closed form.
double entrance_contrast(const LevelScheme& scheme, double r_avg);

/**
 * alpha(phi) at z = 0: pointwise steady state under the field. Interlaced
 * schemes require the half-period replica shift unless allow_misaligned.
 */
ArrayX entrance_profile(const LevelScheme& scheme, const ExcitationField& field, double alpha0,
                        bool allow_misaligned = false);

enum class PhaseMatchRegime
{
    small_angle,
    large_angle,
    ambiguous
};

struct PhaseMatching
{
    std::optional<int> max_order; ///< unset when every order is matched (K = 0)
    PhaseMatchRegime regime = PhaseMatchRegime::small_angle;
    double critical_angle = 0.0; ///< sqrt(lambda / 2L)
};

/// Largest n with n(n-1) K^2 L / k < pi, and the regime from theta/theta_c.
PhaseMatching max_phase_matched_order(const MediumSpec& medium);

struct EngraveOptions
{
    int n_z = 400;
    bool verify = true;        ///< rerun at 2 n_z and compare
    double tolerance = 1e-6;   ///< max |delta alpha| / alpha0 between resolutions
    bool allow_misaligned = false;
    std::complex<double> second_beam = 1.0; ///< E^(1)(0) relative to E^(0)(0) (large angle)
};

/// Pump intensity attenuated pointwise in phi, all orders implicitly kept.
GratingProfile engrave_small_angle(const LevelScheme& scheme, const ExcitationField& field,
                                   const MediumSpec& medium, const EngraveOptions& options = {});

struct LargeAngleResult
{
    GratingProfile profile;
    FourierGrating fourier; ///< orders 0 and 1
    ArrayXc e0;             ///< engraving amplitude, order 0, per depth
    ArrayXc e1;             ///< order 1
};

/// Two-mode march: only orders 0 and 1 are phase matched.
LargeAngleResult engrave_large_angle(const LevelScheme& scheme, const ExcitationField& field,
                                     const MediumSpec& medium, const EngraveOptions& options = {});

/// Entrance profile repeated at every depth.
GratingProfile engrave_entrance_only(const LevelScheme& scheme, const ExcitationField& field,
                                     const MediumSpec& medium, const EngraveOptions& options = {});

/// Dispatch on regime; uniform_ideal is not an engraving and is rejected.
GratingProfile engrave(const LevelScheme& scheme, const ExcitationField& field,
                       const MediumSpec& medium, Regime regime, const EngraveOptions& options = {});

/// Per-depth harmonics p = 0..p_max; p_max >= n_phi/2 aliases and throws.
FourierGrating fourier_coefficients(const GratingProfile& profile, int p_max = 1);

enum class IdealKind
{
    sinusoidal,
    square
};

/// alpha0 (1 + sin phi) or alpha0 (1 + sign(sin phi)), uniform in depth.
GratingProfile ideal_grating(IdealKind kind, const MediumSpec& medium,
                             const PhaseGrid& grid = PhaseGrid(256), int n_z = 400);

} // namespace isg

#endif // ISG_ENGRAVING_HPP
