#ifndef ISG_EXCITATION_HPP
#define ISG_EXCITATION_HPP

#include <optional>
#include <vector>

#include <isg/grid.hpp>
#include <isg/kinetics.hpp>

namespace isg {

/**
 * Reduced pumping rate sampled over one spectro-spatial period.
 *
 * `replica_shift_bins` is the rotation (in bins) between the pump seen by
 * the first transition and the one seen by the replica transition; half a
 * period for an aligned interlaced grating.
 */
struct ExcitationField
{
    PhaseGrid grid;
    ArrayX r;
    double r_avg = 0.0;
    long replica_shift_bins = 0;

    /// Throws domain_error when r < 0 somewhere or mean(r) != r_avg.
    void check() const;
};

/// r(phi) = <r> (1 + cos phi), replica shifted by half a period.
ExcitationField sinusoidal_pump(const PhaseGrid& grid, double r_avg);

/// r'(phi) = r(phi - 2 pi shift); shift * n_phi must be an integer.
ExcitationField replica_field(const ExcitationField& field, double shift);

enum class Envelope
{
    rectangular,
    gaussian
};

struct PulsePairSpec
{
    Envelope envelope = Envelope::rectangular;
    double pulse_area = 0.0;     ///< rad, first pulse
    double pulse_duration = 0.0; ///< s; FWHM for gaussian pulses
    double delay = 0.0;          ///< tau, s
    double period = 0.0;         ///< repetition period T, s
    double center_offset = 0.0;  ///< Hz
    std::optional<double> second_pulse_area; ///< defaults to pulse_area

    double fringe_period() const { return 1.0 / delay; }
};

struct PumpSpectrum
{
    ArrayX nu;
    ArrayX rate;             ///< R(nu), s^-1
    ArrayX spectral_density; ///< |Omega~(nu)|^2 of the pair
    double max_density = 0.0;
    bool weak = true; ///< max |Omega~|^2 <= 0.1
};

/// Transform of a single pulse normalized to 1 at the carrier.
double single_pulse_shape(const PulsePairSpec& spec, double detuning);

/**
 * Average pumping rate of a repeated pulse pair,
 * R(nu) = |Omega~_pair(nu)|^2 / (4T), from the analytic single-pulse
 * transform (sinc or gaussian).
 */
PumpSpectrum pulse_pair_spectrum(const PulsePairSpec& spec, const ArrayX& nu);

/// Checks the relaxation requirement T >= 2/gamma_e.
bool period_allows_relaxation(const PulsePairSpec& spec, const LevelScheme& scheme);

struct ReplicaScanConfig
{
    double tau = 1e-6;           ///< pulse delay, s
    double pulse_fwhm = 100e-9;  ///< gaussian pulse FWHM, s
    double r_avg = 0.0;          ///< band-center average reduced rate
    int bins_per_period = 40;    ///< frequency samples per fringe 1/tau
    double half_span = 0.0;      ///< Hz; 0 picks 4/fwhm + largest splitting
    std::vector<double> ratios{0.5, 0.75, 1.0, 1.25}; ///< splitting / fringe period
};

struct ReplicaScan
{
    ArrayX nu; ///< detuning from band center, Hz
    ArrayX r;  ///< reduced pump r(nu)
    std::vector<double> ratios;
    std::vector<ArrayX> alpha_rel; ///< alpha(nu)/alpha0 per ratio
    bool truncated = false;
};

/**
 * Absorption of an interlaced scheme under a finite-bandwidth gaussian
 * pulse pair, for each requested ratio of replica splitting to fringe
 * period. The scheme's own splitting is replaced by ratio/tau.
 */
ReplicaScan replica_alignment_scan(const LevelScheme& scheme, const ReplicaScanConfig& config);

} // namespace isg

#endif // ISG_EXCITATION_HPP
