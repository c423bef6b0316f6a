#include <isg/bench.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include <isg/excitation.hpp>
#include <isg/io.hpp>

namespace isg {

ArrayX depth_averaged_absorption(const GratingProfile& profile)
{
    const Eigen::Index rows = profile.alpha.rows();
    if (rows == 0) {
        throw domain_error("empty grating profile");
    }
    if (rows == 1 || profile.length == 0.0) {
        return profile.alpha.row(0).transpose().array();
    }
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(profile.alpha.cols());
    for (Eigen::Index i = 0; i + 1 < rows; ++i) {
        const double dz = profile.z(i + 1) - profile.z(i);
        acc += 0.5 * dz * (profile.alpha.row(i) + profile.alpha.row(i + 1));
    }
    return (acc / profile.length).transpose().array();
}

std::string FigureDataset::to_csv() const
{
    std::ostringstream out;
    write_table(out, columns, table);
    return out.str();
}

std::vector<std::string> figure_ids()
{
    return {"2", "3", "5", "6", "7", "9-calc"};
}

double drive_from_pair_count(int pairs)
{
    if (pairs < 1 || pairs > 2000) {
        throw domain_error("pair count must lie in [1, 2000]");
    }
    return 0.005 + (11.3 - 0.005) * static_cast<double>(pairs - 1) / 1999.0;
}

namespace {

std::string tag(double v)
{
    return format_double(v);
}

void common_metadata(FigureDataset& d, const LevelScheme& scheme, const FigureOverrides& o)
{
    d.metadata["scheme"] = std::string(scheme_name(scheme));
    d.metadata["n_phi"] = std::to_string(o.n_phi);
    d.metadata["n_z"] = std::to_string(o.n_z);
}

FigureDataset entrance_family(std::string id, const LevelScheme& scheme,
                              const std::vector<double>& drives, const FigureOverrides& o)
{
    const PhaseGrid grid(o.n_phi);
    FigureDataset d;
    d.id = std::move(id);
    d.columns.push_back("phi");
    d.table.resize(grid.size(), static_cast<Eigen::Index>(drives.size()) + 1);
    d.table.col(0) = grid.values().matrix();
    for (std::size_t j = 0; j < drives.size(); ++j) {
        const auto field = sinusoidal_pump(grid, drives[j] / drive_scale(scheme));
        d.table.col(static_cast<Eigen::Index>(j) + 1) = entrance_profile(scheme, field, 1.0).matrix();
        d.columns.push_back("alpha_rel_" + tag(drives[j]));
    }
    common_metadata(d, scheme, o);
    d.metadata["regime"] = std::string(regime_name(Regime::entrance_only));
    d.metadata["drive_name"] = is_interlaced(scheme) ? "xi<r>" : "zeta<r>";
    d.metadata["optical_depth"] = "0";
    return d;
}

FigureDataset figure_2(const FigureOverrides& o)
{
    const LevelScheme scheme = o.scheme.value_or(tmyag_standard());
    if (is_interlaced(scheme)) {
        throw config_error("figure 2 shows the standard scheme");
    }
    auto d = entrance_family("2", scheme, {0.1, 0.3, 0.9, 2.0, 6.0}, o);
    d.references.push_back({"entrance contrast at zeta<r> = 0.9", 0.63, "reference-simulated",
                            "alpha_rel_0.9", std::nullopt});
    return d;
}

FigureDataset figure_3(const FigureOverrides& o)
{
    const LevelScheme scheme = o.scheme.value_or(tmyag_isg());
    if (!is_interlaced(scheme)) {
        throw config_error("figure 3 shows an interlaced scheme");
    }
    auto d = entrance_family("3", scheme, {0.1, 0.5, 2.0, 6.0, 30.0}, o);
    d.references.push_back({"entrance contrast at xi<r> = 30", 1.97, "reference-simulated",
                            "alpha_rel_30", std::nullopt});
    return d;
}

FigureDataset figure_5(const FigureOverrides& o)
{
    const LevelScheme scheme = o.scheme.value_or(tmyag_isg());
    const double drive = o.drive.value_or(1.0);
    ReplicaScanConfig cfg;
    cfg.r_avg = drive / xi(scheme);
    const ReplicaScan scan = replica_alignment_scan(scheme, cfg);

    FigureDataset d;
    d.id = "5";
    d.columns = {"nu_hz", "r"};
    d.table.resize(scan.nu.size(), static_cast<Eigen::Index>(scan.ratios.size()) + 2);
    d.table.col(0) = scan.nu.matrix();
    d.table.col(1) = scan.r.matrix();
    for (std::size_t j = 0; j < scan.ratios.size(); ++j) {
        d.table.col(static_cast<Eigen::Index>(j) + 2) = scan.alpha_rel[j].matrix();
        d.columns.push_back("alpha_rel_ratio_" + tag(scan.ratios[j]));
    }
    common_metadata(d, scheme, o);
    d.metadata["drive"] = tag(drive);
    d.metadata["regime"] = std::string(regime_name(Regime::entrance_only));
    d.metadata["optical_depth"] = "0";
    d.metadata["tau_s"] = tag(cfg.tau);
    d.metadata["pulse_fwhm_s"] = tag(cfg.pulse_fwhm);
    d.metadata["bins_per_period"] = std::to_string(cfg.bins_per_period);
    return d;
}

FigureDataset figure_6(const FigureOverrides& o)
{
    const LevelScheme scheme = o.scheme.value_or(tmyag_isg());
    const double drive = o.drive.value_or(is_interlaced(scheme) ? 30.0 : 0.9);
    const Regime regime = o.regime.value_or(Regime::small_angle);
    const double od = 2.0;

    const auto field = sinusoidal_pump(PhaseGrid(o.n_phi), drive / drive_scale(scheme));
    EngraveOptions eo;
    eo.n_z = o.n_z;
    const GratingProfile p =
        engrave(scheme, field, MediumSpec::from_depth(od, 2.5e-3), regime, eo);

    const std::vector<double> depths{0.0, 0.5, 1.0, 1.5, 2.0};
    FigureDataset d;
    d.id = "6";
    d.columns.push_back("phi");
    d.table.resize(p.grid.size(), static_cast<Eigen::Index>(depths.size()) + 1);
    d.table.col(0) = p.grid.values().matrix();
    for (std::size_t j = 0; j < depths.size(); ++j) {
        const auto row = static_cast<Eigen::Index>(std::lround(depths[j] / od * o.n_z));
        d.table.col(static_cast<Eigen::Index>(j) + 1) = p.alpha.row(row).transpose() / p.alpha0;
        d.columns.push_back("alpha_rel_z" + tag(depths[j]));
    }
    common_metadata(d, scheme, o);
    d.metadata["drive"] = tag(drive);
    d.metadata["regime"] = std::string(regime_name(regime));
    d.metadata["optical_depth"] = tag(od);

    const bool isg = is_interlaced(scheme);
    d.references.push_back({"entrance contrast", isg ? 1.97 : 0.63, "reference-simulated",
                            "alpha_rel_z0", std::nullopt});
    if (isg && regime == Regime::large_angle) {
        d.references.push_back({"output contrast", 1.57, "reference-simulated", "alpha_rel_z2", std::nullopt});
    } else if (!isg) {
        d.references.push_back({"output contrast", regime == Regime::large_angle ? 0.35 : 0.41,
                                "reference-simulated", "alpha_rel_z2", std::nullopt});
    }
    return d;
}

FigureDataset figure_7(const FigureOverrides& o)
{
    const std::vector<double> depths = linear_range(0.05, 3.0, 0.05);
    SweepOptions so;
    so.n_phi = o.n_phi;
    so.n_z = o.n_z;

    const LevelScheme standard = tmyag_standard();
    const LevelScheme isg = o.scheme && is_interlaced(*o.scheme) ? *o.scheme : tmyag_isg();
    const double isg_drive = o.drive.value_or(30.0);
    const double std_r = 0.9 / zeta(standard);
    const double isg_r = isg_drive / xi(isg);

    const std::vector<EfficiencyCurve> curves{
        efficiency_vs_depth(standard, std_r, Regime::small_angle, depths, so),
        efficiency_vs_depth(standard, std_r, Regime::large_angle, depths, so),
        efficiency_vs_depth(isg, isg_r, Regime::small_angle, depths, so),
        efficiency_vs_depth(isg, isg_r, Regime::large_angle, depths, so),
        ideal_efficiency_vs_depth(IdealKind::sinusoidal, depths, so),
        ideal_efficiency_vs_depth(IdealKind::square, depths, so),
    };

    FigureDataset d;
    d.id = "7";
    d.columns = {"optical_depth",   "eta_standard_small", "eta_standard_large", "eta_isg_small",
                 "eta_isg_large",   "eta_ideal_sinusoidal", "eta_ideal_square"};
    d.table.resize(static_cast<Eigen::Index>(depths.size()), 7);
    for (std::size_t i = 0; i < depths.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        d.table(row, 0) = depths[i];
        for (std::size_t c = 0; c < curves.size(); ++c) {
            d.table(row, static_cast<Eigen::Index>(c) + 1) = curves[c].eta[i];
        }
    }
    d.metadata["scheme"] = "standard3, " + std::string(scheme_name(isg));
    d.metadata["optical_depth"] = "0.05:3:0.05";
    d.metadata["standard_drive"] = "0.9";
    d.metadata["isg_drive"] = tag(isg_drive);
    d.metadata["n_phi"] = std::to_string(o.n_phi);
    d.metadata["n_z"] = std::to_string(o.n_z);
    d.metadata["regime"] = "small-angle, large-angle, uniform-ideal";
    d.metadata["isg_small_max"] = tag(curves[2].max_eta());
    d.metadata["isg_small_argmax"] = tag(curves[2].argmax_x());
    d.metadata["isg_large_max"] = tag(curves[3].max_eta());
    d.metadata["isg_large_argmax"] = tag(curves[3].argmax_x());

    d.references = {
        {"ISG small angle at alpha0 L = 2", 0.183, "reference-simulated", "eta_isg_small", 2.0},
        {"ISG large angle maximum", 0.116, "reference-simulated", "eta_isg_large", 1.8},
        {"standard small angle ceiling", 0.0175, "reference-simulated", "eta_standard_small", std::nullopt},
        {"standard large angle maximum", 0.015, "reference-simulated", "eta_standard_large", std::nullopt},
        {"uniform sinusoid at alpha0 L = 2", eta_uniform(1.0, 0.5, 2.0), "closed-form",
         "eta_ideal_sinusoidal", 2.0},
        {"uniform square at alpha0 L = 2", eta_uniform(1.0, 2.0 / std::numbers::pi, 2.0),
         "closed-form", "eta_ideal_square", 2.0},
    };
    return d;
}

FigureDataset figure_9(const FigureOverrides& o)
{
    const LevelScheme scheme = o.scheme.value_or(tmyag_isg());
    const double drive = o.drive.value_or(6.0);
    const double od = 2.0;
    const auto field = sinusoidal_pump(PhaseGrid(o.n_phi), drive / drive_scale(scheme));
    EngraveOptions eo;
    eo.n_z = o.n_z;
    const GratingProfile p = engrave(scheme, field, MediumSpec::from_depth(od, 2.5e-3),
                                     o.regime.value_or(Regime::small_angle), eo);
    const ArrayX avg = depth_averaged_absorption(p) / p.alpha0;

    FigureDataset d;
    d.id = "9-calc";
    d.columns = {"phi", "alpha_avg_rel"};
    d.table.resize(p.grid.size(), 2);
    d.table.col(0) = p.grid.values().matrix();
    d.table.col(1) = avg.matrix();
    common_metadata(d, scheme, o);
    d.metadata["drive"] = tag(drive);
    d.metadata["optical_depth"] = tag(od);
    d.metadata["regime"] = std::string(regime_name(p.regime));
    d.metadata["contrast"] = tag(contrast(avg, 1.0));
    d.references = {
        {"calculated depth-averaged contrast", 1.82, "reference-simulated", "alpha_avg_rel", std::nullopt},
        {"measured depth-averaged contrast", 1.60, "measured", "alpha_avg_rel", std::nullopt},
    };
    return d;
}

} // namespace

FigureDataset reproduce_figure(std::string_view id, const FigureOverrides& overrides)
{
    if (id == "2") {
        return figure_2(overrides);
    }
    if (id == "3") {
        return figure_3(overrides);
    }
    if (id == "5") {
        return figure_5(overrides);
    }
    if (id == "6") {
        return figure_6(overrides);
    }
    if (id == "7") {
        return figure_7(overrides);
    }
    if (id == "9-calc" || id == "9") {
        return figure_9(overrides);
    }
    throw config_error("unknown figure id '" + std::string(id) + "'");
}

std::vector<ExperimentRow> experiment_reference(const SweepOptions& options)
{
    const LevelScheme scheme = tmyag_isg();
    std::vector<double> drives;
    for (int pairs : {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 1500, 2000}) {
        drives.push_back(drive_from_pair_count(pairs));
    }
    const auto small = efficiency_vs_drive(scheme, 2.0, Regime::small_angle, drives, options);
    const auto large = efficiency_vs_drive(scheme, 2.0, Regime::large_angle, drives, options);

    FigureOverrides fo;
    fo.n_phi = options.n_phi;
    fo.n_z = options.n_z;
    const FigureDataset avg = reproduce_figure("9-calc", fo);

    return {
        {"max efficiency, small angle", "fraction", 0.11, 0.165, small.max_eta()},
        {"max efficiency, large angle", "fraction", 0.063, 0.103, large.max_eta()},
        {"depth-averaged contrast, xi<r> = 6", "dimensionless", 1.60, 1.82,
         contrast(avg.table.col(1), 1.0)},
    };
}

std::string manifest_json(const std::vector<FigureDataset>& datasets,
                          const std::vector<ExperimentRow>& experiment)
{
    nlohmann::ordered_json root;
    root["generator"] = "isg";
    root["datasets"] = nlohmann::ordered_json::array();
    for (const auto& d : datasets) {
        const std::string csv = d.to_csv();
        nlohmann::ordered_json entry;
        entry["id"] = d.id;
        entry["file"] = d.file_name();
        entry["columns"] = d.columns;
        entry["rows"] = d.table.rows();
        entry["sha256"] = sha256_hex(csv);
        entry["metadata"] = d.metadata;
        entry["references"] = nlohmann::ordered_json::array();
        for (const auto& r : d.references) {
            nlohmann::ordered_json ref{{"label", r.label},
                                       {"value", r.value},
                                       {"kind", r.kind},
                                       {"column", r.column}};
            ref["at"] = r.at ? nlohmann::ordered_json(*r.at) : nlohmann::ordered_json(nullptr);
            entry["references"].push_back(std::move(ref));
        }
        root["datasets"].push_back(std::move(entry));
    }
    if (!experiment.empty()) {
        root["experiment"] = nlohmann::ordered_json::array();
        for (const auto& row : experiment) {
            root["experiment"].push_back({{"quantity", row.quantity},
                                          {"unit", row.unit},
                                          {"measured", row.measured},
                                          {"reference_simulated", row.reference_simulated},
                                          {"simulated", row.simulated}});
        }
    }
    return root.dump(2) + "\n";
}

std::string write_datasets(const std::filesystem::path& dir,
                           const std::vector<FigureDataset>& datasets,
                           const std::vector<ExperimentRow>& experiment)
{
    std::filesystem::create_directories(dir);
    for (const auto& d : datasets) {
        std::ofstream out(dir / d.file_name(), std::ios::binary);
        if (!out) {
            throw error("cannot write " + (dir / d.file_name()).string());
        }
        out << d.to_csv();
    }
    const std::string manifest = manifest_json(datasets, experiment);
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) {
        throw error("cannot write " + (dir / "manifest.json").string());
    }
    out << manifest;
    return manifest;
}

} // namespace isg
