#ifndef ISG_DIFFRACTION_HPP
#define ISG_DIFFRACTION_HPP

#include <complex>
#include <concepts>
#include <cmath>
#include <string>
#include <vector>

#include <isg/engraving.hpp>
#include <isg/kinetics.hpp>

namespace isg {

struct ProbeResult
{
    double eta = 0.0;               ///< |E1(L)|^2 with E0(0) = 1
    std::complex<double> e0_out;
    std::complex<double> e1_out;
    double transmission = 0.0;      ///< |E0(L)|^2
};

struct ProbeOptions
{
    bool verify = true;      ///< compare against a doubled step when n_z % 4 == 0
    double tolerance = 1e-6; ///< relative
};

/**
 * Weak probe through an engraved grating:
 *   dE0/dz = -(a0/2) E0,   dE1/dz = -(a0/2) E1 - a1 E0,
 * E0(0) = 1, E1(0) = 0, integrated with RK4 at twice the grating's depth
 * step so the odd depth samples serve as midpoints. n_z must be even.
 */
ProbeResult probe_efficiency(const FourierGrating& grating, const ProbeOptions& options = {});

/// (|a1| L)^2 exp(-a0 L): exact for depth-independent harmonics.
template <std::floating_point Scalar>
Scalar eta_uniform(Scalar alpha0_coeff, Scalar alpha1_magnitude, Scalar length)
{
    const Scalar x = alpha1_magnitude * length;
    return x * x * std::exp(-alpha0_coeff * length);
}

struct EfficiencyCurve
{
    std::string parameter; ///< "optical_depth" or "drive"
    std::vector<double> x;
    std::vector<double> eta;
    Regime regime = Regime::small_angle;
    std::string scheme;
    std::size_t argmax = 0;

    double max_eta() const { return eta.empty() ? 0.0 : eta[argmax]; }
    double argmax_x() const { return x.empty() ? 0.0 : x[argmax]; }
};

struct SweepOptions
{
    int n_phi = 256;
    int n_z = 400;
    double length = 2.5e-3; ///< only alpha0*L matters; this fixes the units
    bool verify = true;
};

/// Efficiency for one engraving + probe job.
double efficiency_at(const LevelScheme& scheme, double r_avg, Regime regime,
                     double optical_depth, const SweepOptions& options = {});

/// eta versus alpha0*L at fixed <r>.
EfficiencyCurve efficiency_vs_depth(const LevelScheme& scheme, double r_avg, Regime regime,
                                    const std::vector<double>& depths,
                                    const SweepOptions& options = {});

/// eta versus drive (zeta<r> or xi<r>) at fixed alpha0*L.
EfficiencyCurve efficiency_vs_drive(const LevelScheme& scheme, double optical_depth,
                                    Regime regime, const std::vector<double>& drives,
                                    const SweepOptions& options = {});

/// Ideal uniform grating efficiency curve, through probe_efficiency.
EfficiencyCurve ideal_efficiency_vs_depth(IdealKind kind, const std::vector<double>& depths,
                                          const SweepOptions& options = {});

/// start, start+step, ... up to stop (inclusive within half a step).
std::vector<double> linear_range(double start, double stop, double step);

} // namespace isg

#endif // ISG_DIFFRACTION_HPP
