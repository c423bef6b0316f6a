#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include <isg/bench.hpp>
#include <isg/diffraction.hpp>
#include <isg/excitation.hpp>
#include <isg/io.hpp>
#include <isg/validation.hpp>

namespace isg::cli {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& what)
{
    throw config_error("field '" + field + "': " + what);
}

double number(const json& v, const std::string& field)
{
    if (!v.is_number()) {
        bad_field(field, "expected a number, got " + v.dump());
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        bad_field(field, "not finite");
    }
    return x;
}

int integer(const json& v, const std::string& field)
{
    if (!v.is_number_integer()) {
        bad_field(field, "expected an integer, got " + v.dump());
    }
    return v.get<int>();
}

std::string text(const json& v, const std::string& field)
{
    if (!v.is_string()) {
        bad_field(field, "expected a string, got " + v.dump());
    }
    return v.get<std::string>();
}

const json& object(const json& v, const std::string& field)
{
    if (!v.is_object()) {
        bad_field(field, "expected an object, got " + v.dump());
    }
    return v;
}

void only_keys(const json& obj, const std::string& prefix, std::initializer_list<std::string_view> keys)
{
    for (const auto& [key, value] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            bad_field(prefix + key, "unknown key");
        }
    }
}

std::string join(const std::string& prefix, const std::string& key)
{
    return prefix.empty() ? key : prefix + "." + key;
}

const std::string num_re = R"(([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))";

double unit_seconds(const std::string& unit)
{
    if (unit == "s") {
        return 1.0;
    }
    if (unit == "ms") {
        return 1e-3;
    }
    if (unit == "us" || unit == "\xC2\xB5s") {
        return 1e-6;
    }
    return 1e-9;
}

} // namespace

double parse_rate(const json& value, const std::string& field)
{
    if (value.is_number()) {
        return number(value, field);
    }
    const std::string s = text(value, field);
    static const std::regex inverse("^\\s*1\\s*/\\s*" + num_re + "\\s*(s|ms|us|\xC2\xB5s|ns)\\s*$");
    static const std::regex plain("^\\s*" + num_re + "\\s*(/s|s\\^-1)?\\s*$");
    std::smatch m;
    if (std::regex_match(s, m, inverse)) {
        const double t = std::stod(m[1]) * unit_seconds(m[2]);
        if (!(t > 0.0)) {
            bad_field(field, "lifetime must be positive in '" + s + "'");
        }
        return 1.0 / t;
    }
    if (std::regex_match(s, m, plain)) {
        return std::stod(m[1]);
    }
    bad_field(field, "cannot read rate '" + s + "' (use s^-1 or a form like \"1/800us\")");
}

double parse_frequency(const json& value, const std::string& field)
{
    if (value.is_number()) {
        return number(value, field);
    }
    const std::string s = text(value, field);
    static const std::regex re("^\\s*" + num_re + "\\s*(Hz|kHz|MHz|GHz)?\\s*$");
    std::smatch m;
    if (!std::regex_match(s, m, re)) {
        bad_field(field, "cannot read frequency '" + s + "' (use Hz or a form like \"600kHz\")");
    }
    const std::string unit = m[2];
    const double scale = unit == "kHz" ? 1e3 : unit == "MHz" ? 1e6 : unit == "GHz" ? 1e9 : 1.0;
    return std::stod(m[1]) * scale;
}

namespace {

LevelScheme scheme_from_json(const json& v, const std::string& field)
{
    if (v.is_string()) {
        try {
            return preset(v.get<std::string>());
        } catch (const config_error& e) {
            bad_field(field, e.what());
        }
    }
    object(v, field);

    LevelScheme scheme;
    std::string type;
    if (v.contains("preset")) {
        if (v.contains("type")) {
            bad_field(field, "give either 'preset' or 'type', not both");
        }
        try {
            scheme = preset(text(v["preset"], join(field, "preset")));
        } catch (const config_error& e) {
            bad_field(join(field, "preset"), e.what());
        }
        type = std::string(scheme_name(scheme));
    } else if (v.contains("type")) {
        type = text(v["type"], join(field, "type"));
        if (type == "standard3") {
            scheme = Standard3{0, 0, 0};
        } else if (type == "lambda3") {
            scheme = Lambda3{0, 0, 0};
        } else if (type == "tm5") {
            scheme = Tm5{0, 0, 0, 0, 0, 0, 0};
        } else {
            bad_field(join(field, "type"), "expected standard3, lambda3 or tm5");
        }
    } else {
        bad_field(field, "needs 'preset' or 'type'");
    }
    const bool from_preset = v.contains("preset");

    auto rate = [&](const char* key, double& slot, bool required) {
        if (v.contains(key)) {
            slot = parse_rate(v[key], join(field, key));
        } else if (required && !from_preset) {
            bad_field(join(field, key), "missing");
        }
    };
    auto freq = [&](const char* key, double& slot) {
        if (v.contains(key)) {
            slot = parse_frequency(v[key], join(field, key));
        } else if (!from_preset) {
            bad_field(join(field, key), "missing");
        }
    };

    if (auto* s = std::get_if<Standard3>(&scheme)) {
        only_keys(v, field + ".", {"preset", "type", "gamma_a", "gamma_b", "gamma_m"});
        rate("gamma_a", s->gamma_a, true);
        rate("gamma_b", s->gamma_b, true);
        rate("gamma_m", s->gamma_m, true);
    } else if (auto* l = std::get_if<Lambda3>(&scheme)) {
        only_keys(v, field + ".", {"preset", "type", "gamma_e", "gamma_z", "delta_g"});
        rate("gamma_e", l->gamma_e, true);
        rate("gamma_z", l->gamma_z, true);
        freq("delta_g", l->delta_g);
    } else {
        auto& t = std::get<Tm5>(scheme);
        only_keys(v, field + ".",
                  {"preset", "type", "gamma_a", "gamma_b", "gamma_c", "gamma_m", "gamma_z",
                   "delta_g", "delta_e"});
        rate("gamma_a", t.gamma_a, true);
        rate("gamma_b", t.gamma_b, true);
        rate("gamma_c", t.gamma_c, false);
        rate("gamma_m", t.gamma_m, true);
        rate("gamma_z", t.gamma_z, true);
        freq("delta_g", t.delta_g);
        freq("delta_e", t.delta_e);
    }
    try {
        validate(scheme);
    } catch (const domain_error& e) {
        bad_field(field, e.what());
    }
    return scheme;
}

std::vector<double> sweep_values(const json& v, const std::string& field)
{
    object(v, field);
    if (v.contains("values")) {
        if (v.contains("from") || v.contains("to") || v.contains("step")) {
            bad_field(field, "give either 'values' or 'from'/'to'/'step'");
        }
        const json& arr = v["values"];
        if (!arr.is_array() || arr.empty()) {
            bad_field(join(field, "values"), "expected a non-empty array");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            out.push_back(number(arr[i], join(field, "values[" + std::to_string(i) + "]")));
        }
        return out;
    }
    if (v.contains("from") || v.contains("to") || v.contains("step")) {
        for (const char* key : {"from", "to", "step"}) {
            if (!v.contains(key)) {
                bad_field(join(field, key), "missing");
            }
        }
        try {
            return linear_range(number(v["from"], join(field, "from")),
                                number(v["to"], join(field, "to")),
                                number(v["step"], join(field, "step")));
        } catch (const domain_error& e) {
            bad_field(field, e.what());
        }
    }
    return {};
}

std::string canonical_parameter(const std::string& name, const std::string& field)
{
    if (name == "optical_depth" || name == "od") {
        return "optical_depth";
    }
    if (name == "drive" || name == "xr") {
        return "drive";
    }
    bad_field(field, "expected optical_depth or drive, got '" + name + "'");
}

} // namespace

SimConfig apply_config(SimConfig cfg, const json& doc, const std::string& source)
{
    try {
        object(doc, "<root>");
        only_keys(doc, "",
                  {"scheme", "drive", "r_avg", "optical_depth", "regime", "geometry", "grid",
                   "sweep", "output"});
        if (doc.contains("scheme")) {
            cfg.scheme = scheme_from_json(doc["scheme"], "scheme");
            cfg.scheme_set = true;
        }
        if (doc.contains("drive")) {
            cfg.drive = number(doc["drive"], "drive");
            cfg.r_avg.reset();
        }
        if (doc.contains("r_avg")) {
            if (doc.contains("drive")) {
                bad_field("r_avg", "give either 'drive' or 'r_avg'");
            }
            cfg.r_avg = number(doc["r_avg"], "r_avg");
            cfg.drive.reset();
        }
        if (doc.contains("optical_depth")) {
            cfg.optical_depth = number(doc["optical_depth"], "optical_depth");
        }
        if (doc.contains("regime") && doc.contains("geometry")) {
            bad_field("regime", "give either 'regime' or 'geometry' (theta, wavelength, length)");
        }
        if (doc.contains("regime")) {
            try {
                cfg.regime = parse_regime(text(doc["regime"], "regime"));
            } catch (const config_error& e) {
                bad_field("regime", e.what());
            }
            cfg.theta.reset();
        }
        if (doc.contains("geometry")) {
            const json& g = object(doc["geometry"], "geometry");
            only_keys(g, "geometry.", {"theta", "wavelength", "length"});
            if (!g.contains("theta")) {
                bad_field("geometry.theta", "missing");
            }
            cfg.theta = number(g["theta"], "geometry.theta");
            cfg.regime.reset();
            if (g.contains("wavelength")) {
                cfg.wavelength = number(g["wavelength"], "geometry.wavelength");
            }
            if (g.contains("length")) {
                cfg.length = number(g["length"], "geometry.length");
            }
        }
        if (doc.contains("grid")) {
            const json& g = object(doc["grid"], "grid");
            only_keys(g, "grid.", {"n_phi", "n_z"});
            if (g.contains("n_phi")) {
                cfg.n_phi = integer(g["n_phi"], "grid.n_phi");
            }
            if (g.contains("n_z")) {
                cfg.n_z = integer(g["n_z"], "grid.n_z");
            }
        }
        if (doc.contains("sweep")) {
            const json& s = object(doc["sweep"], "sweep");
            only_keys(s, "sweep.", {"parameter", "values", "from", "to", "step"});
            if (s.contains("parameter")) {
                cfg.sweep.parameter =
                    canonical_parameter(text(s["parameter"], "sweep.parameter"), "sweep.parameter");
            }
            cfg.sweep.values = sweep_values(s, "sweep");
        }
        if (doc.contains("output")) {
            cfg.output = text(doc["output"], "output");
        }
    } catch (const config_error& e) {
        throw config_error(source + ": " + e.what());
    }
    return cfg;
}

SimConfig load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error(path.string() + ": cannot open config file");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error(path.string() + ": " + e.what());
    }
    return apply_config(SimConfig{}, doc, path.string());
}

double SimConfig::resolved_r_avg() const
{
    if (r_avg) {
        return *r_avg;
    }
    const double d = drive.value_or(is_interlaced(scheme) ? 30.0 : 0.9);
    return d / drive_scale(scheme);
}

MediumSpec SimConfig::medium() const
{
    MediumSpec m = MediumSpec::from_depth(optical_depth, length, wavelength);
    m.theta = theta;
    return m;
}

Regime SimConfig::resolved_regime() const
{
    if (regime) {
        return *regime;
    }
    if (!theta) {
        return Regime::small_angle;
    }
    const PhaseMatching pm = max_phase_matched_order(medium());
    switch (pm.regime) {
    case PhaseMatchRegime::small_angle:
        return Regime::small_angle;
    case PhaseMatchRegime::large_angle:
        return Regime::large_angle;
    case PhaseMatchRegime::ambiguous:
        break;
    }
    throw config_error("field 'geometry.theta': " + format_double(*theta) +
                       " rad is between the small- and large-angle bands (critical angle " +
                       format_double(pm.critical_angle) + " rad); set 'regime' instead");
}

void SimConfig::check() const
{
    if (drive && r_avg) {
        bad_field("drive", "give either drive or r_avg");
    }
    if (drive && !(*drive >= 0.0)) {
        bad_field("drive", "must be non-negative");
    }
    if (r_avg && !(*r_avg >= 0.0)) {
        bad_field("r_avg", "must be non-negative");
    }
    if (regime && theta) {
        bad_field("regime", "give either a regime or a geometry (theta, wavelength, length)");
    }
    if (regime && *regime == Regime::uniform_ideal) {
        bad_field("regime", "uniform-ideal gratings are selected with --ideal");
    }
    if (!(optical_depth > 0.0)) {
        bad_field("optical_depth", "must be positive");
    }
    if (!(length > 0.0)) {
        bad_field("geometry.length", "must be positive");
    }
    if (!(wavelength > 0.0)) {
        bad_field("geometry.wavelength", "must be positive");
    }
    if (theta && !(*theta >= 0.0)) {
        bad_field("geometry.theta", "must be non-negative");
    }
    if (n_phi < 16 || n_phi % 2 != 0) {
        bad_field("grid.n_phi", "must be even and at least 16");
    }
    if (n_z < 50 || n_z % 2 != 0) {
        bad_field("grid.n_z", "must be even and at least 50");
    }
}

namespace {

struct Flags
{
    std::string config;
    std::string preset;
    std::optional<double> drive;
    std::optional<double> r_avg;
    std::optional<double> od;
    std::string regime;
    std::optional<double> theta;
    std::optional<double> wavelength;
    std::optional<double> length;
    std::optional<int> n_phi;
    std::optional<int> n_z;
    std::string out;
    bool quiet = false;
};

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "JSON config file (flags override it)");
    sub->add_option("--preset", f.preset, "tmyag-standard, tmyag-isg or tmyag-lambda");
    sub->add_option("--xr", f.drive, "drive: zeta<r> (standard) or xi<r> (interlaced)");
    sub->add_option("--r-avg", f.r_avg, "reduced average pumping rate <r>");
    sub->add_option("--od", f.od, "optical depth alpha0*L");
    sub->add_option("--regime", f.regime, "entrance-only, small-angle or large-angle");
    sub->add_option("--theta", f.theta, "beam angle, rad (selects the regime)");
    sub->add_option("--lambda", f.wavelength, "wavelength, m");
    sub->add_option("--length", f.length, "crystal length, m");
    sub->add_option("--n-phi", f.n_phi, "phase samples per period");
    sub->add_option("--n-z", f.n_z, "depth steps");
    sub->add_option("--out", f.out, "output path, '-' for standard output");
    sub->add_flag("--quiet,-q", f.quiet, "no progress or warnings on standard error");
}

SimConfig build_config(const Flags& f)
{
    SimConfig cfg = f.config.empty() ? SimConfig{} : load_config_file(f.config);
    if (!f.preset.empty()) {
        cfg.scheme = preset(f.preset);
        cfg.scheme_set = true;
    }
    if (f.drive && f.r_avg) {
        bad_field("--xr", "give either --xr or --r-avg");
    }
    if (f.drive) {
        cfg.drive = f.drive;
        cfg.r_avg.reset();
    }
    if (f.r_avg) {
        cfg.r_avg = f.r_avg;
        cfg.drive.reset();
    }
    if (f.od) {
        cfg.optical_depth = *f.od;
    }
    const bool geometry_flag = f.theta.has_value();
    if (!f.regime.empty() && geometry_flag) {
        bad_field("--regime", "give either --regime or --theta");
    }
    if (!f.regime.empty()) {
        cfg.regime = parse_regime(f.regime);
        cfg.theta.reset();
    }
    if (geometry_flag) {
        cfg.theta = f.theta;
        cfg.regime.reset();
    }
    if (f.wavelength) {
        cfg.wavelength = *f.wavelength;
    }
    if (f.length) {
        cfg.length = *f.length;
    }
    if (f.n_phi) {
        cfg.n_phi = *f.n_phi;
    }
    if (f.n_z) {
        cfg.n_z = *f.n_z;
    }
    if (!f.out.empty()) {
        cfg.output = f.out;
    }
    cfg.check();
    return cfg;
}

class Session
{
public:
    Session(std::ostream& out, std::ostream& err, bool quiet) : out_(out), err_(err), quiet_(quiet) {}

    void info(const std::string& line) const
    {
        if (!quiet_) {
            err_ << line << '\n';
        }
    }

    void warnings(const std::vector<std::string>& lines) const
    {
        for (const auto& w : lines) {
            info("warning: " + w);
        }
    }

    /// `-` streams to `out`; an unset target lands in the default output directory.
    void emit(const std::optional<std::string>& target, const std::string& default_name,
              const std::string& content) const
    {
        if (target && *target == "-") {
            out_ << content;
            return;
        }
        const std::filesystem::path path = target ? std::filesystem::path(*target)
                                                  : output_dir() / default_name;
        if (path.has_parent_path()) {
            std::filesystem::create_directories(path.parent_path());
        }
        std::ofstream file(path, std::ios::binary);
        if (!file || !(file << content)) {
            throw error("cannot write " + path.string());
        }
        info("wrote " + path.string());
    }

    static std::filesystem::path output_dir()
    {
        const char* env = std::getenv("ISG_OUTPUT_DIR");
        return env && *env ? std::filesystem::path(env) : std::filesystem::path(".");
    }

    std::ostream& out() const { return out_; }

private:
    std::ostream& out_;
    std::ostream& err_;
    bool quiet_;
};

std::string drive_label(const LevelScheme& scheme)
{
    return is_interlaced(scheme) ? "xi<r>" : "zeta<r>";
}

int cmd_engrave(const SimConfig& cfg, const Session& s)
{
    const Regime regime = cfg.resolved_regime();
    const double r_avg = cfg.resolved_r_avg();
    const ExcitationField field = sinusoidal_pump(PhaseGrid(cfg.n_phi), r_avg);
    EngraveOptions eo;
    eo.n_z = cfg.n_z;
    const GratingProfile p = engrave(cfg.scheme, field, cfg.medium(), regime, eo);
    s.warnings(p.warnings);

    std::ostringstream csv;
    write_profile_csv(csv, p);
    s.emit(cfg.output, "profile.csv", csv.str());

    const Eigen::Index last = p.alpha.rows() - 1;
    s.info(std::string(scheme_name(cfg.scheme)) + " " + std::string(regime_name(regime)) + ", " +
           drive_label(cfg.scheme) + " = " + format_double(r_avg * drive_scale(cfg.scheme)) +
           ", alpha0 L = " + format_double(cfg.optical_depth) + ": contrast " +
           format_double(contrast(p.alpha.row(0), p.alpha0)) + " -> " +
           format_double(contrast(p.alpha.row(last), p.alpha0)));
    return 0;
}

ordered_json complex_json(std::complex<double> z)
{
    return ordered_json::array({z.real(), z.imag()});
}

int cmd_probe(const SimConfig& cfg, const std::string& ideal, const Session& s)
{
    ordered_json doc;
    FourierGrating grating;
    const MediumSpec medium = cfg.medium();
    if (!ideal.empty()) {
        IdealKind kind;
        if (ideal == "sinusoidal" || ideal == "sinusoid") {
            kind = IdealKind::sinusoidal;
        } else if (ideal == "square") {
            kind = IdealKind::square;
        } else {
            bad_field("--ideal", "expected sinusoidal or square, got '" + ideal + "'");
        }
        grating = fourier_coefficients(ideal_grating(kind, medium, PhaseGrid(cfg.n_phi), cfg.n_z), 1);
        doc["scheme"] = kind == IdealKind::sinusoidal ? "ideal-sinusoidal" : "ideal-square";
        doc["regime"] = regime_name(Regime::uniform_ideal);
        doc["drive"] = nullptr;
    } else {
        const Regime regime = cfg.resolved_regime();
        const double r_avg = cfg.resolved_r_avg();
        const ExcitationField field = sinusoidal_pump(PhaseGrid(cfg.n_phi), r_avg);
        EngraveOptions eo;
        eo.n_z = cfg.n_z;
        if (regime == Regime::large_angle) {
            auto res = engrave_large_angle(cfg.scheme, field, medium, eo);
            s.warnings(res.profile.warnings);
            grating = std::move(res.fourier);
        } else {
            const GratingProfile p = engrave(cfg.scheme, field, medium, regime, eo);
            s.warnings(p.warnings);
            grating = fourier_coefficients(p, 1);
        }
        doc["scheme"] = scheme_name(cfg.scheme);
        doc["regime"] = regime_name(regime);
        doc["drive"] = r_avg * drive_scale(cfg.scheme);
    }
    const ProbeResult r = probe_efficiency(grating);
    doc["optical_depth"] = cfg.optical_depth;
    doc["n_phi"] = cfg.n_phi;
    doc["n_z"] = cfg.n_z;
    doc["eta"] = r.eta;
    doc["transmission"] = r.transmission;
    doc["e0_out"] = complex_json(r.e0_out);
    doc["e1_out"] = complex_json(r.e1_out);
    s.emit(cfg.output, "probe.json", doc.dump(2) + "\n");
    s.info("eta = " + format_double(r.eta) + ", T0 = " + format_double(r.transmission));
    return 0;
}

struct SweepFlags
{
    std::string parameter;
    std::optional<double> from, to, step;
    std::string ideal;
};

int cmd_sweep(SimConfig cfg, const SweepFlags& f, const Session& s)
{
    if (!f.parameter.empty()) {
        cfg.sweep.parameter = canonical_parameter(f.parameter, "--param");
        cfg.sweep.values.clear();
    }
    if (f.from || f.to || f.step) {
        if (!(f.from && f.to && f.step)) {
            bad_field("--from", "--from, --to and --step go together");
        }
        cfg.sweep.values = linear_range(*f.from, *f.to, *f.step);
    }
    std::vector<double> values = cfg.sweep.values;
    if (values.empty()) {
        values = cfg.sweep.parameter == "optical_depth"
                     ? linear_range(0.05, 3.0, 0.05)
                     : std::vector<double>{0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5,
                                           1.0,   2.0,  5.0,  10.0, 20.0, 30.0};
    }
    SweepOptions so;
    so.n_phi = cfg.n_phi;
    so.n_z = cfg.n_z;
    so.length = cfg.length;

    EfficiencyCurve curve;
    if (!f.ideal.empty()) {
        if (cfg.sweep.parameter != "optical_depth") {
            bad_field("--ideal", "ideal gratings sweep optical_depth only");
        }
        if (f.ideal != "sinusoidal" && f.ideal != "square") {
            bad_field("--ideal", "expected sinusoidal or square, got '" + f.ideal + "'");
        }
        curve = ideal_efficiency_vs_depth(
            f.ideal == "square" ? IdealKind::square : IdealKind::sinusoidal, values, so);
    } else if (cfg.sweep.parameter == "optical_depth") {
        curve = efficiency_vs_depth(cfg.scheme, cfg.resolved_r_avg(), cfg.resolved_regime(), values, so);
    } else {
        curve = efficiency_vs_drive(cfg.scheme, cfg.optical_depth, cfg.resolved_regime(), values, so);
    }

    std::ostringstream csv;
    write_curve_csv(csv, curve);
    s.emit(cfg.output, "curve.csv", csv.str());
    s.info("max eta = " + format_double(curve.max_eta()) + " at " + curve.parameter + " = " +
           format_double(curve.argmax_x()));
    return 0;
}

int cmd_figure(const SimConfig& cfg, const std::string& id, const Session& s)
{
    FigureOverrides fo;
    if (cfg.scheme_set) {
        fo.scheme = cfg.scheme;
    }
    if (cfg.drive || cfg.r_avg) {
        fo.drive = cfg.resolved_r_avg() * drive_scale(cfg.scheme);
    }
    if (cfg.regime || cfg.theta) {
        fo.regime = cfg.resolved_regime();
    }
    fo.n_phi = cfg.n_phi;
    fo.n_z = cfg.n_z;

    const std::vector<std::string> ids = id == "all" ? figure_ids() : std::vector<std::string>{id};
    std::vector<FigureDataset> datasets;
    std::vector<ExperimentRow> experiment;
    for (const auto& one : ids) {
        if (one == "experiment") {
            continue;
        }
        s.info("figure " + one + " ...");
        datasets.push_back(reproduce_figure(one, fo));
    }
    if (id == "all" || id == "experiment") {
        SweepOptions so;
        so.n_phi = cfg.n_phi;
        so.n_z = cfg.n_z;
        s.info("experiment reference ...");
        experiment = experiment_reference(so);
    }

    if (cfg.output && *cfg.output == "-") {
        if (datasets.size() == 1 && experiment.empty()) {
            s.out() << datasets.front().to_csv();
        } else {
            s.out() << manifest_json(datasets, experiment);
        }
        return 0;
    }
    const std::filesystem::path dir = cfg.output ? std::filesystem::path(*cfg.output)
                                                 : Session::output_dir();
    write_datasets(dir, datasets, experiment);
    s.info("wrote " + std::to_string(datasets.size()) + " dataset(s) and manifest.json to " +
           dir.string());
    for (const auto& row : experiment) {
        s.info(row.quantity + ": measured " + format_double(row.measured) + ", simulated " +
               format_double(row.simulated));
    }
    return 0;
}

struct OracleFlags
{
    std::optional<double> drive_prime;
    std::optional<double> r_prime;
    std::string model = "auto";
    std::optional<double> t_end;
};

int cmd_oracle(const SimConfig& cfg, const OracleFlags& f, const Session& s)
{
    if (f.drive_prime && f.r_prime) {
        bad_field("--xr-prime", "give either --xr-prime or --r-prime");
    }
    const double scale = drive_scale(cfg.scheme);
    const double r = cfg.resolved_r_avg();
    const double rp = f.r_prime ? *f.r_prime : f.drive_prime ? *f.drive_prime / scale : 0.0;
    if (!(rp >= 0.0)) {
        bad_field("--r-prime", "must be non-negative");
    }
    OracleOptions oo;
    if (f.model == "full") {
        oo.model = RateModel::full;
    } else if (f.model == "ground-only" || f.model == "ground_only") {
        oo.model = RateModel::ground_only;
    } else if (f.model == "auto") {
        oo.model = is_interlaced(cfg.scheme) ? RateModel::ground_only : RateModel::full;
    } else {
        bad_field("--model", "expected auto, full or ground-only");
    }
    const double t_end = f.t_end.value_or(default_oracle_time(cfg.scheme));
    if (!(t_end > 0.0)) {
        bad_field("--t-end", "must be positive");
    }

    const PopulationState state = transient_oracle(cfg.scheme, r, rp, t_end, oo);
    const auto oracle = state.differences();
    const auto closed = steady_state(cfg.scheme, r, rp);
    double worst = std::abs(oracle.first - closed.first);
    if (closed.has_second) {
        worst = std::max(worst, std::abs(oracle.second - closed.second));
    }

    ordered_json doc;
    doc["scheme"] = scheme_name(cfg.scheme);
    doc["model"] = oo.model == RateModel::full ? "full" : "ground-only";
    doc["r"] = r;
    doc["r_prime"] = is_interlaced(cfg.scheme) ? rp : 0.0;
    doc["t_end"] = t_end;
    doc["steps"] = state.steps;
    ordered_json pops;
    for (std::size_t i = 0; i < state.labels.size(); ++i) {
        pops[state.labels[i]] = state.fractions(static_cast<Eigen::Index>(i));
    }
    doc["populations"] = pops;
    doc["oracle"] = {{"first", oracle.first}};
    doc["closed_form"] = {{"first", closed.first}};
    if (closed.has_second) {
        doc["oracle"]["second"] = oracle.second;
        doc["closed_form"]["second"] = closed.second;
    }
    doc["max_difference"] = worst;
    doc["max_drift"] = state.max_drift;
    doc["richardson_error"] = state.richardson_error;
    doc["agrees"] = worst <= 1e-6;
    s.emit(cfg.output, "oracle.json", doc.dump(2) + "\n");
    s.info("oracle vs closed form: max difference " + format_double(worst));
    return 0;
}

int cmd_validate(const SimConfig& cfg, int points, std::uint64_t seed, const Session& s)
{
    SuiteOptions so;
    so.oracle_points = points;
    so.seed = seed;
    so.n_phi = cfg.n_phi;
    so.n_z = cfg.n_z;
    std::ostringstream report;
    int failures = 0;
    run_invariant_suite(so, [&](const CheckResult& c) {
        const std::string line = std::string(c.passed ? "PASS" : "FAIL") + "  " + c.name + ": " + c.detail;
        report << line << '\n';
        failures += c.passed ? 0 : 1;
        if (cfg.output && *cfg.output != "-") {
            s.info(line);
        }
    });
    if (cfg.output) {
        s.emit(cfg.output, "validate.txt", report.str());
    } else {
        s.out() << report.str();
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Interlaced spin grating engraving and diffraction simulator", "isg"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    Flags flags;
    auto* engrave_cmd = app.add_subcommand("engrave", "engrave a grating, write alpha(z, phi) as CSV");
    auto* probe_cmd = app.add_subcommand("probe", "probe diffraction efficiency as JSON");
    auto* sweep_cmd = app.add_subcommand("sweep", "efficiency curve over alpha0 L or drive, CSV");
    auto* figure_cmd = app.add_subcommand("figure", "figure datasets (CSV) plus manifest.json");
    auto* oracle_cmd = app.add_subcommand("oracle", "transient rate equations against the closed form");
    auto* validate_cmd = app.add_subcommand("validate", "run the invariant suite");
    for (auto* sub : {engrave_cmd, probe_cmd, sweep_cmd, figure_cmd, oracle_cmd, validate_cmd}) {
        add_common(sub, flags);
    }

    std::string ideal;
    probe_cmd->add_option("--ideal", ideal, "uniform ideal grating: sinusoidal or square");

    SweepFlags sweep_flags;
    sweep_cmd->add_option("--param", sweep_flags.parameter, "optical_depth (od) or drive (xr)");
    sweep_cmd->add_option("--from", sweep_flags.from, "first value");
    sweep_cmd->add_option("--to", sweep_flags.to, "last value");
    sweep_cmd->add_option("--step", sweep_flags.step, "increment");
    sweep_cmd->add_option("--ideal", sweep_flags.ideal, "sweep a uniform ideal grating instead");

    std::string figure_id = "all";
    figure_cmd->add_option("id", figure_id, "2, 3, 5, 6, 7, 9-calc, experiment or all");

    OracleFlags oracle_flags;
    oracle_cmd->add_option("--xr-prime", oracle_flags.drive_prime, "replica drive xi<r'>");
    oracle_cmd->add_option("--r-prime", oracle_flags.r_prime, "replica reduced rate r'");
    oracle_cmd->add_option("--model", oracle_flags.model, "auto, full or ground-only");
    oracle_cmd->add_option("--t-end", oracle_flags.t_end, "integration time, s");

    int points = 100;
    std::uint64_t seed = SuiteOptions{}.seed;
    validate_cmd->add_option("--points", points, "random oracle points per scheme");
    validate_cmd->add_option("--seed", seed, "oracle sampling seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        const SimConfig cfg = build_config(flags);
        const Session session(out, err, flags.quiet);
        if (engrave_cmd->parsed()) {
            return cmd_engrave(cfg, session);
        }
        if (probe_cmd->parsed()) {
            return cmd_probe(cfg, ideal, session);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(cfg, sweep_flags, session);
        }
        if (figure_cmd->parsed()) {
            return cmd_figure(cfg, figure_id, session);
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle(cfg, oracle_flags, session);
        }
        if (points < 1) {
            bad_field("--points", "must be at least 1");
        }
        return cmd_validate(cfg, points, seed, session);
    } catch (const convergence_error& e) {
        err << "isg: convergence error: " << e.what() << '\n';
        return 1;
    } catch (const config_error& e) {
        err << "isg: config error: " << e.what() << '\n';
        return 2;
    } catch (const domain_error& e) {
        err << "isg: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const grid_resolution_error& e) {
        err << "isg: grid error: " << e.what() << '\n';
        return 2;
    } catch (const scheme_mismatch& e) {
        err << "isg: scheme error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "isg: " << e.what() << '\n';
        return 1;
    }
}

} // namespace isg::cli
