#include <isg/kinetics.hpp>

#include <algorithm>
#include <cmath>

namespace isg {

std::vector<std::string> level_labels(const LevelScheme& scheme)
{
    if (std::holds_alternative<Standard3>(scheme)) {
        return {"1", "2", "m"};
    }
    if (std::holds_alternative<Lambda3>(scheme)) {
        return {"1", "2", "3"};
    }
    return {"1", "2", "3", "4", "m"};
}

Eigen::MatrixXd rate_matrix(const LevelScheme& scheme, double R, double Rp, RateModel model)
{
    if (const auto* s = std::get_if<Standard3>(&scheme)) {
        // The closed form for this scheme is exact on the full model, so
        // there is no reduced variant.
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
        A(0, 0) = -R;
        A(0, 1) = R + s->gamma_a;
        A(0, 2) = s->gamma_m;
        A(1, 0) = R;
        A(1, 1) = -R - s->gamma_e();
        A(2, 1) = s->gamma_b;
        A(2, 2) = -s->gamma_m;
        return A;
    }

    if (const auto* l = std::get_if<Lambda3>(&scheme)) {
        // Ground relaxation drives n1 - n3 at rate gamma_z.
        const double gz = l->gamma_z / 2.0;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
        if (model == RateModel::ground_only) {
            A(0, 0) = -R / 2.0 - gz;
            A(0, 2) = Rp / 2.0 + gz;
            A(2, 0) = R / 2.0 + gz;
            A(2, 2) = -Rp / 2.0 - gz;
            return A;
        }
        const double half = l->gamma_e / 2.0;
        A(0, 0) = -R - gz;
        A(0, 1) = R + half;
        A(0, 2) = gz;
        A(1, 0) = R;
        A(1, 1) = -R - Rp - l->gamma_e;
        A(1, 2) = Rp;
        A(2, 0) = gz;
        A(2, 1) = Rp + half;
        A(2, 2) = -Rp - gz;
        return A;
    }

    const auto& t = std::get<Tm5>(scheme);
    const double ge = t.gamma_e();
    const double gz = t.gamma_z;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, 5);
    // order: 1, 2, 3, 4, m
    if (model == RateModel::ground_only) {
        const double flip = (t.gamma_b / 2.0 + t.gamma_c) / ge;
        A(0, 0) = -R * flip - gz;
        A(0, 2) = Rp * flip + gz;
        A(2, 0) = R * flip + gz;
        A(2, 2) = -Rp * flip - gz;
        return A;
    }
    A(0, 0) = -R - gz;
    A(0, 1) = R + t.gamma_a;
    A(0, 2) = gz;
    A(0, 3) = t.gamma_c;
    A(0, 4) = t.gamma_m / 2.0;

    A(1, 0) = R;
    A(1, 1) = -R - ge;

    A(2, 0) = gz;
    A(2, 1) = t.gamma_c;
    A(2, 2) = -Rp - gz;
    A(2, 3) = Rp + t.gamma_a;
    A(2, 4) = t.gamma_m / 2.0;

    A(3, 2) = Rp;
    A(3, 3) = -Rp - ge;

    A(4, 1) = t.gamma_b;
    A(4, 3) = t.gamma_b;
    A(4, 4) = -t.gamma_m;
    return A;
}

double PopulationState::fraction(std::string_view label) const
{
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw domain_error("no level '" + std::string(label) + "' in scheme " + scheme);
    }
    return fractions(std::distance(labels.begin(), it));
}

PopulationDifferences<double> PopulationState::differences() const
{
    if (scheme == "standard3") {
        return {fraction("1") - fraction("2"), 0.0, false};
    }
    if (scheme == "lambda3") {
        return {fraction("1") - fraction("2"), fraction("3") - fraction("2"), true};
    }
    return {fraction("1") - fraction("2"), fraction("3") - fraction("4"), true};
}

double default_oracle_time(const LevelScheme& scheme)
{
    if (const auto* s = std::get_if<Standard3>(&scheme)) {
        return 40.0 / s->gamma_m;
    }
    if (const auto* l = std::get_if<Lambda3>(&scheme)) {
        return 40.0 / l->gamma_z;
    }
    const auto& t = std::get<Tm5>(scheme);
    return 40.0 / std::min(t.gamma_z, t.gamma_m);
}

namespace {

struct March
{
    Eigen::VectorXd final_state;
    Eigen::VectorXd at_nine_tenths;
    double max_drift = 0.0;
};

// Classical RK4 for the autonomous linear system x' = A x collapses to a
// single propagator I + D, D = sum_{1<=j<=4} (hA)^j / j!, so each step is one matvec.
template <int N>
March march(const Eigen::MatrixXd& A_dyn, const Eigen::VectorXd& x0, double h, long steps)
{
    using Mat = Eigen::Matrix<double, N, N>;
    using Vec = Eigen::Matrix<double, N, 1>;
    const Mat hA = h * Mat(A_dyn);
    const Mat hA2 = hA * hA;
    const Mat hA3 = hA2 * hA;
    // Increment form x += D x keeps the rounding proportional to the change.
    Mat D = hA + hA2 / 2.0 + hA3 / 6.0 + hA3 * hA / 24.0;
    for (int j = 0; j < N; ++j) {
        D(j, j) = -(D.col(j).sum() - D(j, j));
    }

    March out;
    Vec x = x0;
    const long checkpoint = (9 * steps) / 10;
    out.at_nine_tenths = x;
    Vec carry = Vec::Zero(); // Kahan compensation of x += D x
    for (long i = 1; i <= steps; ++i) {
        const Vec y = D * x - carry;
        const Vec t = x + y;
        carry = (t - x) - y;
        x = t;
        out.max_drift = std::max(out.max_drift, std::abs(x.sum() - 1.0));
        if (i == checkpoint) {
            out.at_nine_tenths = x;
        }
    }
    out.final_state = x;
    return out;
}

March run_march(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0, double h, long steps)
{
    switch (A.rows()) {
    case 3:
        return march<3>(A, x0, h, steps);
    case 5:
        return march<5>(A, x0, h, steps);
    default:
        throw domain_error("unsupported rate matrix size");
    }
}

} // namespace

PopulationState transient_oracle(const LevelScheme& scheme, double r, double r_prime,
                                 double t_end, const OracleOptions& options)
{
    if (r < 0.0 || r_prime < 0.0 || !std::isfinite(r) || !std::isfinite(r_prime)) {
        throw domain_error("pumping rates must be non-negative");
    }
    if (t_end < 0.0 || !std::isfinite(t_end)) {
        throw domain_error("t_end must be non-negative");
    }
    if (!(options.step_fraction > 0.0) || options.step_fraction > 0.01) {
        throw domain_error("step_fraction must lie in (0, 0.01]");
    }

    const double unit = rate_unit(scheme);
    const double R = r * unit;
    const double Rp = is_interlaced(scheme) ? r_prime * unit : 0.0;
    const Eigen::MatrixXd A = rate_matrix(scheme, R, Rp, options.model);

    PopulationState state;
    state.scheme = std::string(scheme_name(scheme));
    state.labels = level_labels(scheme);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(A.rows());
    if (is_interlaced(scheme)) {
        x0(0) = 0.5;
        x0(2) = 0.5;
    } else {
        x0(0) = 1.0;
    }
    if (t_end == 0.0) {
        state.fractions = x0;
        return state;
    }

    const double fastest = std::max(gamma_e(scheme), A.diagonal().cwiseAbs().maxCoeff());
    const double h_max = options.step_fraction / fastest;
    long steps = static_cast<long>(std::ceil(t_end / h_max));
    steps += steps % 2; // even, so the 2h pass lands on t_end too
    if (steps > 2'000'000'000L) {
        throw domain_error("t_end needs more than 2e9 oracle steps");
    }
    const double h = t_end / static_cast<double>(steps);

    const March fine = run_march(A, x0, h, steps);
    const March coarse = run_march(A, x0, 2.0 * h, steps / 2);

    state.fractions = fine.final_state;
    state.max_drift = fine.max_drift;
    state.steps = steps;
    state.richardson_error =
        (fine.final_state - coarse.final_state).cwiseAbs().maxCoeff() / 15.0;
    if (state.richardson_error > options.richardson_tolerance) {
        throw convergence_error("oracle Richardson estimate " +
                                std::to_string(state.richardson_error) + " above tolerance");
    }
    if (options.require_steady) {
        const double change = (fine.final_state - fine.at_nine_tenths).cwiseAbs().maxCoeff() /
                              fine.final_state.cwiseAbs().maxCoeff();
        if (change > options.steady_tolerance) {
            throw convergence_error("oracle not at steady state: relative change " +
                                    std::to_string(change) + " over the last tenth of t_end");
        }
    }
    return state;
}

} // namespace isg
