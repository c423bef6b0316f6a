#ifndef ISG_CLI_HPP
#define ISG_CLI_HPP

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <isg/engraving.hpp>
#include <isg/kinetics.hpp>

namespace isg::cli {

/// "1/800us", "1250", "1250/s" -> s^-1. Throws config_error.
double parse_rate(const nlohmann::json& value, const std::string& field);
/// 600000, "600kHz", "0.6 MHz" -> Hz. Throws config_error.
double parse_frequency(const nlohmann::json& value, const std::string& field);

struct SweepSpec
{
    std::string parameter = "optical_depth"; ///< or "drive"
    std::vector<double> values;              ///< empty: parameter default
};

struct SimConfig
{
    LevelScheme scheme = tmyag_isg();
    bool scheme_set = false; ///< scheme came from a flag or the config file
    std::optional<double> drive; ///< zeta<r> or xi<r>
    std::optional<double> r_avg;
    double optical_depth = 2.0;
    double length = 2.5e-3;
    double wavelength = 793e-9;
    std::optional<Regime> regime;
    std::optional<double> theta;
    int n_phi = 256;
    int n_z = 400;
    SweepSpec sweep;
    std::optional<std::string> output;

    /// <r>: r_avg, or drive / scale, or the scheme's operating point.
    double resolved_r_avg() const;
    /// Regime, or the one implied by theta; small-angle when neither is set.
    Regime resolved_regime() const;
    MediumSpec medium() const;
    /// Throws config_error when the fields contradict each other.
    void check() const;
};

/// Applies a JSON config document onto `base`; `source` names it in diagnostics.
SimConfig apply_config(SimConfig base, const nlohmann::json& doc, const std::string& source);
SimConfig load_config_file(const std::filesystem::path& path);

/**
 * Entry point behind the isg executable. args excludes the program name.
 * Returns 0 on success, 2 on configuration errors, 1 on numerical failures.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace isg::cli

#endif // ISG_CLI_HPP
