#ifndef ISG_BENCH_HPP
#define ISG_BENCH_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <isg/diffraction.hpp>
#include <isg/engraving.hpp>
#include <isg/kinetics.hpp>

namespace isg {

/// (1/L) int_0^L alpha(z, phi) dz, trapezoidal on the depth grid.
ArrayX depth_averaged_absorption(const GratingProfile& profile);

/// A value quoted next to a dataset so plots can mark it.
struct ReferenceValue
{
    std::string label;
    double value = 0.0;
    std::string kind;   ///< "reference-simulated", "measured" or "closed-form"
    std::string column; ///< dataset column the value belongs to, may be empty
    std::optional<double> at; ///< abscissa of the marker, if any
};

struct FigureDataset
{
    std::string id;
    std::vector<std::string> columns;
    Eigen::MatrixXd table;
    std::map<std::string, std::string> metadata;
    std::vector<ReferenceValue> references;

    std::string to_csv() const;
    std::string file_name() const { return "figure_" + id + ".csv"; }
};

struct FigureOverrides
{
    std::optional<LevelScheme> scheme;
    std::optional<double> drive; ///< zeta<r> or xi<r>
    std::optional<Regime> regime;
    int n_phi = 256;
    int n_z = 400;
};

std::vector<std::string> figure_ids();

/**
 * Builds the dataset behind a figure:
 *   "2"      entrance profiles of the standard scheme over drives
 *   "3"      entrance profiles of the interlaced scheme over drives
 *   "5"      replica alignment scan in frequency
 *   "6"      depth evolution alpha(z, phi) at alpha0 z = 0, 0.5, ..., 2
 *   "7"      efficiency versus alpha0 L, six curves
 *   "9-calc" depth-averaged profile, collinear interlaced grating at xi<r> = 6
 * Unknown ids throw config_error.
 */
FigureDataset reproduce_figure(std::string_view id, const FigureOverrides& overrides = {});

/// Linear map of pulse pairs per cycle 1..2000 onto xi<r> in [0.005, 11.3].
double drive_from_pair_count(int pairs);

struct ExperimentRow
{
    std::string quantity;
    std::string unit;
    double measured = 0.0;        ///< laboratory value, quoted
    double reference_simulated = 0.0; ///< simulation value quoted with it
    double simulated = 0.0;       ///< this simulator
};

/**
 * Measured values against simulation at the experimental operating point
 * (alpha0 L = 2, xi<r> swept over the pair-count range). Measured numbers
 * are constants; they include hardware effects the model does not have.
 */
std::vector<ExperimentRow> experiment_reference(const SweepOptions& options = {});

/// Writes every dataset CSV plus manifest.json into `dir`; returns the manifest text.
std::string write_datasets(const std::filesystem::path& dir,
                           const std::vector<FigureDataset>& datasets,
                           const std::vector<ExperimentRow>& experiment = {});

/// Manifest JSON for datasets whose CSVs live next to it; experiment rows are listed when given.
std::string manifest_json(const std::vector<FigureDataset>& datasets,
                          const std::vector<ExperimentRow>& experiment = {});

} // namespace isg

#endif // ISG_BENCH_HPP
