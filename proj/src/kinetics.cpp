#include <isg/kinetics.hpp>

#include <algorithm>
#include <cmath>

namespace isg {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw domain_error(std::string(name) + " must be strictly positive");
    }
}

} // namespace

std::string_view scheme_name(const LevelScheme& scheme)
{
    return std::visit(overloaded{
                          [](const Standard3&) { return std::string_view("standard3"); },
                          [](const Lambda3&) { return std::string_view("lambda3"); },
                          [](const Tm5&) { return std::string_view("tm5"); },
                      },
                      scheme);
}

bool is_interlaced(const LevelScheme& scheme)
{
    return !std::holds_alternative<Standard3>(scheme);
}

double gamma_e(const LevelScheme& scheme)
{
    return std::visit(overloaded{
                          [](const Standard3& s) { return s.gamma_e(); },
                          [](const Lambda3& s) { return s.gamma_e; },
                          [](const Tm5& s) { return s.gamma_e(); },
                      },
                      scheme);
}

std::vector<std::string> validate(const LevelScheme& scheme)
{
    std::vector<std::string> warnings;
    auto metastable_check = [&](double gamma_m, double ge) {
        if (gamma_m / ge >= 0.1) {
            warnings.push_back("gamma_m/gamma_e = " + std::to_string(gamma_m / ge) +
                               " is not small (>= 0.1)");
        }
    };
    std::visit(overloaded{
                   [&](const Standard3& s) {
                       require_positive(s.gamma_a, "gamma_a");
                       require_positive(s.gamma_b, "gamma_b");
                       require_positive(s.gamma_m, "gamma_m");
                       metastable_check(s.gamma_m, s.gamma_e());
                   },
                   [&](const Lambda3& s) {
                       require_positive(s.gamma_e, "gamma_e");
                       require_positive(s.gamma_z, "gamma_z");
                       require_positive(s.delta_g, "delta_g");
                       if (s.gamma_z >= s.gamma_e) {
                           throw domain_error("gamma_z must be below gamma_e");
                       }
                   },
                   [&](const Tm5& s) {
                       require_positive(s.gamma_a, "gamma_a");
                       require_positive(s.gamma_b, "gamma_b");
                       require_positive(s.gamma_m, "gamma_m");
                       require_positive(s.gamma_z, "gamma_z");
                       require_positive(s.delta_g, "delta_g");
                       require_positive(s.delta_e, "delta_e");
                       if (!(s.gamma_c >= 0.0)) {
                           throw domain_error("gamma_c must be non-negative");
                       }
                       if (s.gamma_z >= s.gamma_e()) {
                           throw domain_error("gamma_z must be below gamma_e");
                       }
                       metastable_check(s.gamma_m, s.gamma_e());
                   },
               },
               scheme);
    return warnings;
}

namespace {
constexpr double tm_gamma_e = 1.0 / 800e-6;
constexpr double tm_gamma_m = 1.0 / 10e-3;
constexpr double tm_gamma_z = 1.0 / 5.0;
constexpr double tm_delta_g = 600e3;
constexpr double tm_delta_ge = 500e3;
} // namespace

Standard3 tmyag_standard()
{
    return {.gamma_a = tm_gamma_e / 4, .gamma_b = 3 * tm_gamma_e / 4, .gamma_m = tm_gamma_m};
}

Tm5 tmyag_isg()
{
    return {.gamma_a = tm_gamma_e / 4,
            .gamma_b = 3 * tm_gamma_e / 4,
            .gamma_c = 0.0,
            .gamma_m = tm_gamma_m,
            .gamma_z = tm_gamma_z,
            .delta_g = tm_delta_g,
            .delta_e = tm_delta_g - tm_delta_ge};
}

Lambda3 tmyag_lambda()
{
    return {.gamma_e = tm_gamma_e, .gamma_z = tm_gamma_z, .delta_g = tm_delta_g};
}

LevelScheme preset(std::string_view name)
{
    if (name == "tmyag-standard") {
        return tmyag_standard();
    }
    if (name == "tmyag-isg") {
        return tmyag_isg();
    }
    if (name == "tmyag-lambda") {
        return tmyag_lambda();
    }
    throw config_error("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
    return {"tmyag-standard", "tmyag-isg", "tmyag-lambda"};
}

double zeta(const LevelScheme& scheme)
{
    const auto* s = std::get_if<Standard3>(&scheme);
    if (s == nullptr) {
        throw scheme_mismatch("zeta is defined for the standard 3-level scheme only, got " +
                              std::string(scheme_name(scheme)));
    }
    return (s->gamma_b + 2.0 * s->gamma_m) / s->gamma_e();
}

double xi(const LevelScheme& scheme)
{
    if (const auto* l = std::get_if<Lambda3>(&scheme)) {
        return l->gamma_e / (2.0 * l->gamma_z);
    }
    if (const auto* t = std::get_if<Tm5>(&scheme)) {
        return (t->gamma_b / 2.0 + t->gamma_c) / (2.0 * t->gamma_z);
    }
    throw scheme_mismatch("xi is defined for the lambda3 and tm5 schemes only");
}

double drive_scale(const LevelScheme& scheme)
{
    return is_interlaced(scheme) ? xi(scheme) : zeta(scheme);
}

double rate_unit(const LevelScheme& scheme)
{
    if (const auto* s = std::get_if<Standard3>(&scheme)) {
        return s->gamma_m;
    }
    return gamma_e(scheme);
}

AbsorptionSpectrum absorption(const LevelScheme& scheme, double alpha0,
                              const PopulationDifferences<ArrayX>& diffs,
                              double shift_bins, GridBoundary boundary)
{
    if (!is_interlaced(scheme)) {
        return {alpha0 * diffs.first, false};
    }
    if (!diffs.has_second || diffs.second.size() != diffs.first.size()) {
        throw domain_error("interlaced absorption needs both population differences");
    }
    const double rounded = std::round(shift_bins);
    if (std::abs(shift_bins - rounded) > 1e-9 * std::max(1.0, std::abs(shift_bins))) {
        throw grid_resolution_error("replica shift of " + std::to_string(shift_bins) +
                                    " bins is not representable on the grid");
    }
    const long s = static_cast<long>(rounded);
    const Eigen::Index n = diffs.first.size();

    if (boundary == GridBoundary::periodic) {
        return {alpha0 * (diffs.first + circular_shift(diffs.second, -s)), false};
    }

    ArrayX second_shifted(n);
    bool truncated = false;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index j = k + s;
        if (j < 0 || j >= n) {
            second_shifted(k) = 0.5;
            truncated = true;
        } else {
            second_shifted(k) = diffs.second(j);
        }
    }
    return {alpha0 * (diffs.first + second_shifted), truncated};
}

ArrayX absorption_from_rate(const LevelScheme& scheme, double alpha0, const ArrayX& r,
                            long shift_bins)
{
    if (!is_interlaced(scheme)) {
        return alpha0 * (1.0 + zeta(scheme) * r).inverse();
    }
    const ArrayX r_prime = circular_shift(r, shift_bins);
    const auto diffs = steady_state(scheme, r, r_prime);
    return absorption(scheme, alpha0, diffs, static_cast<double>(shift_bins)).alpha;
}

WeakFieldMargins weak_field_margins(const LevelScheme& scheme, double r_peak)
{
    WeakFieldMargins m;
    const double ge = gamma_e(scheme);
    m.optical_ratio = r_peak / (ge / 2.0);
    m.optical_ok = m.optical_ratio <= 1.0;

    const double r_avg = r_peak / 2.0 / rate_unit(scheme);
    m.drive = drive_scale(scheme) * r_avg;

    if (std::holds_alternative<Standard3>(scheme)) {
        m.drive_limit = 0.9;
    } else if (const auto* t = std::get_if<Tm5>(&scheme)) {
        const double bound = t->gamma_m * ge / t->gamma_b;
        m.metastable_ratio = r_peak / bound;
        m.metastable_ok = *m.metastable_ratio <= 1.0;
        m.drive_limit = 30.0;
    }
    if (m.drive_limit > 0.0) {
        m.drive_ok = m.drive <= m.drive_limit * (1.0 + 1e-12);
        m.at_limit = std::abs(m.drive - m.drive_limit) <= 1e-9 * m.drive_limit;
    }
    return m;
}

} // namespace isg
