#ifndef ISG_KINETICS_HPP
#define ISG_KINETICS_HPP

#include <concepts>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include <isg/error.hpp>
#include <isg/grid.hpp>

namespace isg {

/*
 * Level schemes. Rates are in s^-1, splittings in Hz.
 */

/// |1> <-> |2> optical transition with shelving in a metastable |m>.
struct Standard3
{
    double gamma_a; ///< |2> -> |1>
    double gamma_b; ///< |2> -> |m>
    double gamma_m; ///< |m> -> |1>

    double gamma_e() const { return gamma_a + gamma_b; }
};

/// Lambda system: ground sublevels |1>, |3> sharing the upper level |2>.
struct Lambda3
{
    double gamma_e; ///< total decay of |2>, split equally to |1> and |3>
    double gamma_z; ///< ground sublevel relaxation
    double delta_g; ///< ground splitting
};

/// Thulium: transitions |1> -> |2> and |3> -> |4>, shared metastable |m>.
struct Tm5
{
    double gamma_a; ///< spin-preserving direct decay
    double gamma_b; ///< decay into |m>
    double gamma_c; ///< spin-flipping direct decay
    double gamma_m; ///< |m> decay, split equally to |1> and |3>
    double gamma_z; ///< ground sublevel relaxation
    double delta_g; ///< ground splitting
    double delta_e; ///< excited splitting

    double gamma_e() const { return gamma_a + gamma_b + gamma_c; }
    double delta_ge() const { return delta_g - delta_e; }
};

using LevelScheme = std::variant<Standard3, Lambda3, Tm5>;

std::string_view scheme_name(const LevelScheme& scheme);

/// True for the sublevel (interlaced) schemes, Lambda3 and Tm5.
bool is_interlaced(const LevelScheme& scheme);

/// Total decay rate of the upper level(s).
double gamma_e(const LevelScheme& scheme);

/**
 * Checks the scheme invariants. Throws domain_error on non-positive rates,
 * gamma_c < 0 or gamma_Z >= gamma_e; returns gamma_m/gamma_e >= 0.1 as a
 * warning.
 */
std::vector<std::string> validate(const LevelScheme& scheme);

/// Tm:YAG, standard pumping through the metastable level.
Standard3 tmyag_standard();
/// Tm:YAG, 5-level interlaced scheme.
Tm5 tmyag_isg();
/// Lambda system carrying the Tm:YAG optical and ground rates.
Lambda3 tmyag_lambda();

/// Named presets: "tmyag-standard", "tmyag-isg", "tmyag-lambda".
LevelScheme preset(std::string_view name);
std::vector<std::string> preset_names();

/// (gamma_b + 2 gamma_m) / gamma_e for Standard3.
double zeta(const LevelScheme& scheme);

/// gamma_e/(2 gamma_Z) for Lambda3, (gamma_b/2 + gamma_c)/(2 gamma_Z) for Tm5.
double xi(const LevelScheme& scheme);

/// zeta for Standard3, xi otherwise: the factor turning <r> into the drive.
double drive_scale(const LevelScheme& scheme);

/// Rate normalizing the reduced pumping rate: gamma_m (Standard3) or gamma_e.
double rate_unit(const LevelScheme& scheme);

/**
 * Steady-state population differences along the pumped transitions.
 * For Standard3 only `first` (n1 - n2) is meaningful and `second` is unset
 * in the scalar case; for Lambda3/Tm5 `second` holds n3 - n2 or n3 - n4.
 */
template <typename T>
struct PopulationDifferences
{
    T first;
    T second;
    bool has_second = false;
};

namespace detail {

template <typename T>
bool any_negative(const T& v)
{
    if constexpr (std::is_floating_point_v<T>) {
        return v < 0 || std::isnan(v);
    } else {
        return (v < 0).any() || v.isNaN().any();
    }
}

} // namespace detail

template <std::floating_point Scalar>
PopulationDifferences<Scalar>
steady_state(const LevelScheme& scheme, Scalar r, Scalar r_prime = 0)
{
    if (detail::any_negative(r) || detail::any_negative(r_prime)) {
        throw domain_error("pumping rates must be non-negative");
    }
    if (std::holds_alternative<Standard3>(scheme)) {
        const Scalar z = static_cast<Scalar>(zeta(scheme));
        return {Scalar(1) / (Scalar(1) + z * r), Scalar(0), false};
    }
    const Scalar x = static_cast<Scalar>(xi(scheme));
    const Scalar den = Scalar(1) + x * (r + r_prime);
    return {(Scalar(0.5) + x * r_prime) / den, (Scalar(0.5) + x * r) / den,
            true};
}

template <typename DerivedR, typename DerivedRp>
PopulationDifferences<Eigen::Array<typename DerivedR::Scalar, Eigen::Dynamic, 1>>
steady_state(const LevelScheme& scheme, const Eigen::ArrayBase<DerivedR>& r,
             const Eigen::ArrayBase<DerivedRp>& r_prime)
{
    using Array = Eigen::Array<typename DerivedR::Scalar, Eigen::Dynamic, 1>;
    using Scalar = typename DerivedR::Scalar;
    if (detail::any_negative(r.derived().eval()) ||
        detail::any_negative(r_prime.derived().eval())) {
        throw domain_error("pumping rates must be non-negative");
    }
    if (std::holds_alternative<Standard3>(scheme)) {
        const Scalar z = static_cast<Scalar>(zeta(scheme));
        Array first = (Scalar(1) + z * r).inverse();
        return {std::move(first), Array::Zero(r.size()), false};
    }
    if (r.size() != r_prime.size()) {
        throw domain_error("r and r' must share a grid");
    }
    const Scalar x = static_cast<Scalar>(xi(scheme));
    const Array den = Scalar(1) + x * (r + r_prime);
    return {(Scalar(0.5) + x * r_prime) / den, (Scalar(0.5) + x * r) / den,
            true};
}

enum class GridBoundary
{
    periodic, ///< phase grid, shifts wrap around
    finite    ///< frequency window, out-of-window samples sit at equilibrium
};

struct AbsorptionSpectrum
{
    ArrayX alpha;
    bool truncated = false; ///< a finite-grid shift reached past the edge
};

/**
 * Absorption from population differences on a common grid. For the
 * interlaced schemes the second transition contributes at nu + shift,
 * with the shift given in (integer) grid bins.
 */
AbsorptionSpectrum absorption(const LevelScheme& scheme, double alpha0,
                              const PopulationDifferences<ArrayX>& diffs,
                              double shift_bins = 0.0,
                              GridBoundary boundary = GridBoundary::periodic);

/**
 * Pointwise composition used by the engraving marches: given the reduced
 * rate r on a periodic grid, pump the replica transition with
 * r'(k) = r(k - shift) and return the absorption.
 */
ArrayX absorption_from_rate(const LevelScheme& scheme, double alpha0,
                            const ArrayX& r, long shift_bins);

struct WeakFieldMargins
{
    double optical_ratio = 0.0;             ///< R_peak / (gamma_e/2)
    std::optional<double> metastable_ratio; ///< R_peak / (gamma_m gamma_e / gamma_b), Tm5
    double drive = 0.0;       ///< zeta<r> or xi<r> with <r> = R_peak/2 in rate units
    double drive_limit = 0.0; ///< operating point: 0.9 (Standard3), 30 (Tm5); 0 if none
    bool optical_ok = true;
    bool metastable_ok = true;
    bool drive_ok = true;
    bool at_limit = false; ///< drive sits at the operating limit

    bool pass() const { return optical_ok && metastable_ok && drive_ok; }
};

/// Warn-only weak-field report for a peak pumping rate R_peak (s^-1).
WeakFieldMargins weak_field_margins(const LevelScheme& scheme, double r_peak);

/*
 * Transient rate-equation oracle.
 */

enum class RateModel
{
    full,       ///< every level, stimulated emission, metastable shelving
    ground_only ///< weak-field limit with upper levels eliminated (Lambda3/Tm5)
};

struct OracleOptions
{
    RateModel model = RateModel::full;
    double step_fraction = 0.01;    ///< h = step_fraction / fastest rate (<= 0.01/gamma_e)
    bool require_steady = true;     ///< enforce the last-decade change check
    double steady_tolerance = 1e-9; ///< relative change over the last tenth of t_end
    double richardson_tolerance = 1e-9;
};

struct PopulationState
{
    std::string scheme;
    std::vector<std::string> labels;
    Eigen::VectorXd fractions;
    double max_drift = 0.0;        ///< max |sum - 1| over all steps
    double richardson_error = 0.0; ///< |x_h - x_2h|_inf / 15
    long steps = 0;

    double fraction(std::string_view label) const;
    PopulationDifferences<double> differences() const;
};

/// Labels in state-vector order for a scheme.
std::vector<std::string> level_labels(const LevelScheme& scheme);

/// Generator A of dn/dt = A n for pumping rates R, R' in s^-1.
Eigen::MatrixXd rate_matrix(const LevelScheme& scheme, double R, double R_prime,
                            RateModel model = RateModel::full);

/**
 * Integrates the linear rate equations from the unpumped equilibrium with
 * fixed-step classical RK4 and returns the final populations. r and r' are
 * reduced rates (R/gamma_m for Standard3, R/gamma_e otherwise).
 */
PopulationState transient_oracle(const LevelScheme& scheme, double r,
                                 double r_prime, double t_end,
                                 const OracleOptions& options = {});

/// 40 relaxation times of the slowest unpumped channel.
double default_oracle_time(const LevelScheme& scheme);

} // namespace isg

#endif // ISG_KINETICS_HPP
