#include <isg/validation.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <isg/bench.hpp>
#include <isg/diffraction.hpp>
#include <isg/engraving.hpp>
#include <isg/excitation.hpp>
#include <isg/kinetics.hpp>

namespace isg {

namespace {

std::string sci(double v)
{
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

const std::vector<LevelScheme>& suite_schemes()
{
    static const std::vector<LevelScheme> schemes{tmyag_standard(), tmyag_lambda(), tmyag_isg()};
    return schemes;
}

struct OracleSweep
{
    double worst_difference = 0.0;
    double worst_drift = 0.0;
};

OracleSweep oracle_sweep(const SuiteOptions& o)
{
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> drive(0.0, 100.0);
    OracleSweep out;
    for (const auto& scheme : suite_schemes()) {
        OracleOptions oo;
        oo.model = is_interlaced(scheme) ? RateModel::ground_only : RateModel::full;
        const double scale = drive_scale(scheme);
        const double t_end = default_oracle_time(scheme);
        for (int i = 0; i < o.oracle_points; ++i) {
            const double r = drive(rng) / scale;
            const double rp = drive(rng) / scale;
            const auto state = transient_oracle(scheme, r, rp, t_end, oo);
            const auto oracle = state.differences();
            const auto closed = steady_state(scheme, r, rp);
            double diff = std::abs(oracle.first - closed.first);
            if (closed.has_second) {
                diff = std::max(diff, std::abs(oracle.second - closed.second));
            }
            out.worst_difference = std::max(out.worst_difference, diff);
            out.worst_drift = std::max(out.worst_drift, state.max_drift);
        }
    }
    return out;
}

double symmetry_defect(const GratingProfile& p)
{
    const int half = p.grid.size() / 2;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p.alpha.rows(); ++i) {
        for (int k = 0; k < half; ++k) {
            worst = std::max(worst, std::abs(p.alpha(i, k) + p.alpha(i, k + half) - 2.0 * p.alpha0));
        }
    }
    return worst / p.alpha0;
}

ExcitationField pump_at_drive(const LevelScheme& scheme, double drive, int n_phi)
{
    return sinusoidal_pump(PhaseGrid(n_phi), drive / drive_scale(scheme));
}

double operating_drive(const LevelScheme& scheme)
{
    return is_interlaced(scheme) ? 30.0 : 0.9;
}

CheckResult check_symmetry(const SuiteOptions& o)
{
    double worst = 0.0;
    for (const auto& scheme : {LevelScheme(tmyag_lambda()), LevelScheme(tmyag_isg())}) {
        for (double drive : {0.1, 6.0, 30.0}) {
            const auto field = pump_at_drive(scheme, drive, o.n_phi);
            const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
            EngraveOptions eo;
            eo.n_z = o.n_z;
            worst = std::max(worst, symmetry_defect(engrave_small_angle(scheme, field, medium, eo)));
            worst = std::max(worst,
                             symmetry_defect(engrave_large_angle(scheme, field, medium, eo).profile));
        }
    }
    return {"interlaced point symmetry", worst <= 1e-9, "max |a(phi)+a(phi+pi)-2a0|/a0 = " + sci(worst)};
}

CheckResult check_passivity(const SuiteOptions& o)
{
    SweepOptions so;
    so.n_phi = o.n_phi;
    so.n_z = o.n_z;
    double worst = -1.0;
    for (const auto& scheme : suite_schemes()) {
        const double r_avg = operating_drive(scheme) / drive_scale(scheme);
        for (double od : {0.25, 1.0, 2.0, 3.0}) {
            const auto medium = MediumSpec::from_depth(od, so.length);
            const auto field = sinusoidal_pump(PhaseGrid(so.n_phi), r_avg);
            EngraveOptions eo;
            eo.n_z = so.n_z;
            const auto small = probe_efficiency(
                fourier_coefficients(engrave_small_angle(scheme, field, medium, eo), 1));
            const auto large = probe_efficiency(engrave_large_angle(scheme, field, medium, eo).fourier);
            worst = std::max({worst, small.eta + small.transmission, large.eta + large.transmission});
        }
    }
    return {"passivity eta + T0 <= 1", worst <= 1.0, "max eta + T0 = " + std::to_string(worst)};
}

CheckResult check_ordering(const SuiteOptions& o)
{
    SweepOptions so;
    so.n_phi = o.n_phi;
    so.n_z = o.n_z;
    const LevelScheme isg = tmyag_isg();
    const double eta_isg = efficiency_at(isg, 30.0 / xi(isg), Regime::small_angle, 2.0, so);
    const double eta_sin = ideal_efficiency_vs_depth(IdealKind::sinusoidal, {2.0}, so).eta[0];
    const double eta_sq = ideal_efficiency_vs_depth(IdealKind::square, {2.0}, so).eta[0];
    std::ostringstream d;
    d << "sinusoid " << eta_sin << " < interlaced " << eta_isg << " < square " << eta_sq;
    return {"sinusoid < interlaced small angle < square at alpha0 L = 2",
            eta_sin < eta_isg && eta_isg < eta_sq, d.str()};
}

double fringe_amplitude(const ArrayX& nu, const ArrayX& alpha_rel, double tau)
{
    std::complex<double> acc = 0.0;
    for (Eigen::Index k = 0; k < nu.size(); ++k) {
        acc += (alpha_rel(k) - 1.0) * std::polar(1.0, 2.0 * std::numbers::pi * nu(k) * tau);
    }
    return std::abs(acc);
}

CheckResult check_cancellation()
{
    double worst = 0.0;
    for (const auto& scheme : {LevelScheme(tmyag_lambda()), LevelScheme(tmyag_isg())}) {
        ReplicaScanConfig cfg;
        cfg.r_avg = 0.1 / xi(scheme);
        cfg.ratios = {0.5, 1.0, 1.5, 2.0};
        const auto scan = replica_alignment_scan(scheme, cfg);
        const double half1 = fringe_amplitude(scan.nu, scan.alpha_rel[0], cfg.tau);
        const double int1 = fringe_amplitude(scan.nu, scan.alpha_rel[1], cfg.tau);
        const double half2 = fringe_amplitude(scan.nu, scan.alpha_rel[2], cfg.tau);
        const double int2 = fringe_amplitude(scan.nu, scan.alpha_rel[3], cfg.tau);
        worst = std::max({worst, int1 / half1, int2 / half2});
    }
    return {"integer vs half-integer replica cancellation", worst < 0.05,
            "max first-harmonic ratio = " + sci(worst)};
}

CheckResult check_determinism(const SuiteOptions& o)
{
    FigureOverrides fo;
    fo.n_phi = o.n_phi;
    fo.n_z = o.n_z;
    bool same = true;
    for (const char* id : {"3", "6", "9-calc"}) {
        same = same && reproduce_figure(id, fo).to_csv() == reproduce_figure(id, fo).to_csv();
    }
    const auto scheme = tmyag_isg();
    const auto field = pump_at_drive(scheme, 30.0, o.n_phi);
    const auto medium = MediumSpec::from_depth(1.8, 2.5e-3);
    EngraveOptions eo;
    eo.n_z = o.n_z;
    const auto a = engrave_large_angle(scheme, field, medium, eo);
    const auto b = engrave_large_angle(scheme, field, medium, eo);
    same = same && a.profile.alpha == b.profile.alpha && a.fourier.coeffs == b.fourier.coeffs;
    return {"determinism (bit-identical reruns)", same, same ? "identical" : "outputs differ"};
}

std::vector<double> contrasts(int n_phi, int n_z)
{
    std::vector<double> out;
    const auto medium = MediumSpec::from_depth(2.0, 2.5e-3);
    EngraveOptions eo;
    eo.n_z = n_z;
    for (const auto& scheme : suite_schemes()) {
        const auto field = pump_at_drive(scheme, operating_drive(scheme), n_phi);
        const auto small = engrave_small_angle(scheme, field, medium, eo);
        const auto large = engrave_large_angle(scheme, field, medium, eo).profile;
        const Eigen::Index last = small.alpha.rows() - 1;
        out.push_back(contrast(small.alpha.row(0), small.alpha0));
        out.push_back(contrast(small.alpha.row(last), small.alpha0));
        out.push_back(contrast(large.alpha.row(last), large.alpha0));
    }
    return out;
}

CheckResult check_grid_doubling(const SuiteOptions& o)
{
    const auto base = contrasts(o.n_phi, o.n_z);
    const auto fine = contrasts(2 * o.n_phi, 2 * o.n_z);
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        worst = std::max(worst, std::abs(base[i] - fine[i]));
    }
    return {"grid doubling stability", worst < 1e-4, "max contrast change = " + sci(worst)};
}

} // namespace

std::vector<CheckResult> run_invariant_suite(const SuiteOptions& options,
                                             const std::function<void(const CheckResult&)>& progress)
{
    std::vector<CheckResult> out;
    auto record = [&](CheckResult c) {
        if (progress) {
            progress(c);
        }
        out.push_back(std::move(c));
    };
    auto guarded = [&](const std::string& name, auto&& fn) {
        try {
            record(fn());
        } catch (const error& e) {
            record({name, false, std::string("error: ") + e.what()});
        }
    };

    try {
        const OracleSweep sweep = oracle_sweep(options);
        record({"rate-equation oracle equivalence", sweep.worst_difference <= 1e-6,
                std::to_string(options.oracle_points) + " points per scheme, max difference " +
                    sci(sweep.worst_difference)});
        record({"population conservation", sweep.worst_drift <= 1e-12,
                "max |sum - 1| over every step = " + sci(sweep.worst_drift)});
    } catch (const error& e) {
        record({"rate-equation oracle equivalence", false, std::string("error: ") + e.what()});
        record({"population conservation", false, "not evaluated"});
    }
    guarded("interlaced point symmetry", [&] { return check_symmetry(options); });
    guarded("passivity eta + T0 <= 1", [&] { return check_passivity(options); });
    guarded("sinusoid < interlaced small angle < square at alpha0 L = 2",
            [&] { return check_ordering(options); });
    guarded("integer vs half-integer replica cancellation", [] { return check_cancellation(); });
    guarded("determinism (bit-identical reruns)", [&] { return check_determinism(options); });
    guarded("grid doubling stability", [&] { return check_grid_doubling(options); });
    return out;
}

} // namespace isg
