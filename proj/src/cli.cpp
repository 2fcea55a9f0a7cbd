#include "omx/cli.hpp"

#include "omx/errors.hpp"
#include "omx/formalisms.hpp"
#include "omx/observables.hpp"
#include "omx/params.hpp"
#include "omx/spectra.hpp"
#include "omx/stability.hpp"
#include "omx/steady.hpp"
#include "omx/timedomain.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#ifndef OMX_DEFAULT_FIXTURE_DIR
#define OMX_DEFAULT_FIXTURE_DIR "data/fixtures"
#endif
#ifndef OMX_VERSION
#define OMX_VERSION "0.0.0"
#endif

namespace omx::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fixture_dir()
{
    if (const char* env = std::getenv("OMX_FIXTURE_DIR"); env && *env)
        return env;
    return OMX_DEFAULT_FIXTURE_DIR;
}

std::string version()
{
    return OMX_VERSION;
}

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double hz(double rad_s)
{
    return rad_s / phys::two_pi;
}

struct Common {
    std::string config;
    std::string fixture;
    std::string formalism; // empty: the subcommand's default
    std::string out;
    unsigned threads = 0;
    double power_w = -1.0;
    double temp_k = -1.0;
};

struct Source {
    RawConfig raw;
    std::string origin;
};

Source load_source(const Common& c)
{
    if (c.config.empty() == c.fixture.empty())
        throw ConfigError("give exactly one of --config or --fixture");
    Source s;
    if (!c.config.empty()) {
        s.raw = load_config(c.config);
        s.origin = c.config;
    } else {
        const fs::path path = fs::path(fixture_dir()) / (c.fixture + ".json");
        if (!fs::exists(path))
            throw ConfigError("unknown fixture '" + c.fixture + "' (looked in " + fixture_dir() + ")");
        s.raw = load_config(path);
        s.origin = "fixture:" + c.fixture;
    }
    if (c.power_w >= 0.0)
        s.raw.power_w = c.power_w;
    if (c.temp_k >= 0.0)
        s.raw.temp_k = c.temp_k;
    return s;
}

unsigned thread_count(const Common& c)
{
    if (c.threads)
        return c.threads;
    if (const char* env = std::getenv("OMX_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v <= 0)
            throw ConfigError("OMX_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return 0;
}

ordered_json raw_json(const RawConfig& r)
{
    return ordered_json::parse(serialize_config(r));
}

// A single value or an inclusive start:stop:step range, in input units.
std::vector<double> parse_values(const std::string& text)
{
    if (text.find(':') == std::string::npos) {
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used == text.size())
                return {v};
        } catch (const std::exception&) {
        }
        throw ConfigError("cannot parse number '" + text + "'");
    }
    auto v = FrequencyGrid::parse_hz(text).values();
    for (auto& x : v)
        x /= phys::two_pi;
    return v;
}

std::vector<double> parse_hz_values(const std::string& text)
{
    auto v = parse_values(text);
    for (auto& x : v)
        x *= phys::two_pi;
    return v;
}

Formalism formalism_or(const Common& c, Formalism fallback)
{
    return c.formalism.empty() ? fallback : parse_formalism(c.formalism);
}

BranchPolicy parse_branch(const std::string& s)
{
    if (s == "lowest")
        return BranchPolicy::lowest();
    if (s == "highest")
        return BranchPolicy::highest();
    try {
        std::size_t used = 0;
        const int i = std::stoi(s, &used);
        if (used == s.size() && i >= 0)
            return BranchPolicy::index(i);
    } catch (const std::exception&) {
    }
    throw ConfigError("--branch must be lowest, highest or a non-negative index");
}

std::vector<double> log_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ':');)
        parts.push_back(tok);
    if (parts.size() != 3)
        throw ConfigError("--power-log expects lo:hi:count");
    double lo = 0, hi = 0;
    long n = 0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        n = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("--power-log expects lo:hi:count");
    }
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw ConfigError("--power-log needs 0 < lo < hi and count >= 2");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    return v;
}

// Result sink: --out file or the caller's stream, plus the manifest.
class Sink {
public:
    Sink(const Common& c, std::ostream& fallback) : path_(c.out), fallback_(fallback)
    {
        if (!path_.empty()) {
            file_.open(path_, std::ios::binary);
            if (!file_)
                throw ConfigError("cannot open output '" + path_ + "'");
        }
    }
    std::ostream& stream() { return path_.empty() ? fallback_ : file_; }

    void side_file(const std::string& suffix, const ordered_json& j)
    {
        if (path_.empty())
            return;
        std::ofstream f(path_ + suffix, std::ios::binary);
        f << j.dump(2) << '\n';
        if (!f)
            throw ConfigError("cannot write '" + path_ + suffix + "'");
    }

    bool to_file() const { return !path_.empty(); }

private:
    std::string path_;
    std::ostream& fallback_;
    std::ofstream file_;
};

void csv_row(std::ostream& os, std::initializer_list<std::string> cells)
{
    bool first = true;
    for (const auto& c : cells) {
        if (!first)
            os << ',';
        os << c;
        first = false;
    }
    os << '\n';
}

void check_finite(std::initializer_list<double> vs)
{
    for (double v : vs)
        if (!std::isfinite(v))
            throw NumericError("non-finite value in output");
}

ordered_json cmatrix_json(const CMatrix& m)
{
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

struct Options {
    Common common;
    std::string delta = "0";
    std::string branch = "lowest";
    bool no_s = false;
    std::string grid;
    std::string noise = "additive";
    std::string temp_grid;
    std::string phonons = "coherent";
    double w_hz = 0.0;
    std::vector<double> nbars;
    std::vector<double> mbars;
    std::vector<double> powers;
    std::string power_log;
    std::string alpha_csv;
    std::string t_grid;
    std::string fixtures_action;
    std::string fixture_name;
};

void run_steady(const Options& o, const OmParams& p, Sink& sink)
{
    const auto policy = parse_branch(o.branch);
    auto& os = sink.stream();
    csv_row(os, {"delta_hz", "nbar", "re_bbar", "im_bbar", "re_alpha", "im_alpha", "mbar", "branch_count"});
    for (double D : parse_hz_values(o.delta)) {
        const auto ss = steady_state(p, D, policy);
        check_finite({ss.nbar, ss.bbar.real(), ss.bbar.imag(), ss.alpha.real(), ss.alpha.imag(), ss.mbar});
        csv_row(os, {num(hz(D)), num(ss.nbar), num(ss.bbar.real()), num(ss.bbar.imag()), num(ss.alpha.real()),
                     num(ss.alpha.imag()), num(ss.mbar), std::to_string(ss.branch_count)});
    }
}

void run_matrix(const Options& o, const OmParams& p, Sink& sink)
{
    const auto tag = formalism_or(o.common, Formalism::SecondOrder3);
    const auto ds = parse_hz_values(o.delta);
    if (ds.size() != 1)
        throw ConfigError("matrix takes a single --delta-hz value");
    const auto ss = steady_state(p, ds.front(), parse_branch(o.branch));
    const auto sys = build_system(tag, p, ss, {.include_s = !o.no_s});
    ordered_json j;
    j["formalism"] = std::string(formalism_name(tag));
    j["delta_hz"] = hz(ss.Delta);
    j["basis"] = sys.basis_labels;
    j["M"] = cmatrix_json(sys.M);
    j["noise_in"] = cmatrix_json(sys.noise_in);
    j["drive"] = cmatrix_json(sys.drive);
    j["drive_printed"] = sys.drive_printed;
    j["steady"] = {{"nbar", ss.nbar},
                   {"bbar", {ss.bbar.real(), ss.bbar.imag()}},
                   {"alpha", {ss.alpha.real(), ss.alpha.imag()}},
                   {"mbar", ss.mbar},
                   {"branch_count", ss.branch_count}};
    sink.stream() << j.dump(2) << '\n';
}

void run_spectrum(const Options& o, const OmParams& p, Sink& sink)
{
    const auto tag = formalism_or(o.common, Formalism::SecondOrder3);
    const auto ds = parse_hz_values(o.delta);
    if (ds.size() != 1)
        throw ConfigError("spectrum takes a single --delta-hz value");
    const double D = ds.front();
    const auto ss = steady_state(p, D, parse_branch(o.branch));
    const FrequencyGrid grid = o.grid.empty() ? FrequencyGrid(D - 2.0 * p.Omega, D + 2.0 * p.Omega, p.Omega / 250.0)
                                              : FrequencyGrid::parse_hz(o.grid);
    const auto sys = build_system(tag, p, ss);
    const double m = thermal_occupancy(p.Omega, p.T);
    SpectrumResult r;
    if (o.noise == "additive")
        r = spectrum_additive(sys, grid, m);
    else if (o.noise == "multiplicative")
        r = spectrum_multiplicative(sys, p, ss, grid, m);
    else
        throw ConfigError("--noise must be additive or multiplicative");

    auto& os = sink.stream();
    csv_row(os, {"omega_hz", "s_total", "s_cavity", "s_sb1", "s_sb2"});
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        check_finite({r.total[i], r.cavity[i], r.sb1[i], r.sb2[i]});
        csv_row(os, {num(hz(grid.at(i))), num(r.total[i]), num(r.cavity[i]), num(r.sb1[i]), num(r.sb2[i])});
        flagged += !r.flagged.empty() && r.flagged[i];
    }
    ordered_json side;
    side["flagged_bins"] = flagged;
    side["nbar"] = ss.nbar;
    side["thermal_occupancy"] = m;
    sink.side_file(".spectrum.json", side);
}

void run_shift(const Options& o, const OmParams& p, Sink& sink)
{
    auto& os = sink.stream();
    const bool thermal = o.phonons == "thermal";
    if (!thermal && o.phonons != "coherent")
        throw ConfigError("--phonons must be coherent or thermal");
    if (!o.temp_grid.empty()) {
        // Temperature sweep at the given detuning, thermal phonons.
        const auto ds = parse_hz_values(o.delta);
        if (ds.size() != 1)
            throw ConfigError("a temperature sweep takes a single --delta-hz value");
        const auto temps = parse_values(o.temp_grid);
        csv_row(os, {"temp_k", "dOmega_hz", "domega_hz", "dGamma_hz", "dkappa_hz", "tie"});
        for (double T : temps) {
            if (T < 0.0)
                throw ConfigError("temperatures must be non-negative");
            const auto pt = p.with_temperature(T);
            const auto r = resonance_shifts(pt, steady_state(pt, ds.front()), PhononSource::Thermal);
            check_finite({r.dOmega, r.domega, r.dGamma, r.dkappa});
            csv_row(os, {num(T), num(hz(r.dOmega)), num(hz(r.domega)), num(hz(r.dGamma)), num(hz(r.dkappa)),
                         r.tie ? "1" : "0"});
        }
        return;
    }
    csv_row(os, {"delta_hz", "dOmega_hz", "domega_hz", "dGamma_hz", "dkappa_hz", "tie"});
    const auto policy = parse_branch(o.branch);
    for (double D : parse_hz_values(o.delta)) {
        const auto r = resonance_shifts(p, steady_state(p, D, policy), thermal ? PhononSource::Thermal
                                                                              : PhononSource::Coherent);
        check_finite({r.dOmega, r.domega, r.dGamma, r.dkappa});
        csv_row(os, {num(hz(D)), num(hz(r.dOmega)), num(hz(r.domega)), num(hz(r.dGamma)), num(hz(r.dkappa)),
                     r.tie ? "1" : "0"});
    }
}

void run_spring(const Options& o, const OmParams& p, Sink& sink)
{
    const double w = o.w_hz != 0.0 ? phys::two_pi * o.w_hz : p.Omega;
    auto& os = sink.stream();
    csv_row(os, {"delta_hz", "dOmega_corr_hz", "dGamma_corr_hz", "dOmega_std_hz", "dGamma_std_hz", "dOmega_weak_hz"});
    const auto policy = parse_branch(o.branch);
    for (double D : parse_hz_values(o.delta)) {
        const auto ss = steady_state(p, D, policy);
        const auto s = spring_corrected(p, ss, w, D);
        const auto weak = spring_weak_coupling(p, ss, D);
        check_finite({s.dOmega_corr, s.dGamma_corr, s.dOmega_std, s.dGamma_std, weak.dOmega});
        csv_row(os, {num(hz(D)), num(hz(s.dOmega_corr)), num(hz(s.dGamma_corr)), num(hz(s.dOmega_std)),
                     num(hz(s.dGamma_std)), num(hz(weak.dOmega))});
    }
}

void run_inequiv(const Options& o, const OmParams& p, Sink& sink)
{
    const auto nbars = o.nbars.empty() ? std::vector<double>{10, 100, 1000, 10000} : o.nbars;
    const auto mbars = o.mbars.empty() ? std::vector<double>{0} : o.mbars;
    auto& os = sink.stream();
    csv_row(os, {"nbar", "mbar", "dDelta_numeric_hz", "dDelta_asymptotic_hz", "observable", "tie"});
    for (double n : nbars)
        for (double m : mbars) {
            if (n < 0.0 || m < 0.0)
                throw ConfigError("--nbar and --mbar values must be non-negative");
            SteadyState ss;
            ss.nbar = n;
            ss.abar = std::sqrt(n);
            ss.mbar = m;
            const auto num_r = sideband_inequivalence_numeric(p, ss);
            const auto asym = sideband_inequivalence_asymptotic(p, n, m);
            check_finite({num_r.dDelta, asym.first});
            csv_row(os, {num(n), num(m), num(hz(num_r.dDelta)), num(hz(asym.first)),
                         inequivalence_observable(p, n, m) ? "1" : "0", num_r.tie ? "1" : "0"});
        }
}

void run_stability(const Options& o, const OmParams& p, Sink& sink)
{
    const auto deltas = parse_hz_values(o.delta);
    std::vector<double> powers;
    if (!o.power_log.empty() && !o.powers.empty())
        throw ConfigError("give --power-w or --power-log, not both");
    powers = o.power_log.empty() ? o.powers : log_grid(o.power_log);
    if (powers.empty())
        throw ConfigError("stability needs --power-w or --power-log");
    std::sort(powers.begin(), powers.end());

    PhaseMapOptions opts;
    opts.threads = thread_count(o.common);
    opts.nonlinear = formalism_or(o.common, Formalism::ThirdOrder5);
    const auto map = phase_map(p, deltas, powers, opts);

    auto& os = sink.stream();
    csv_row(os, {"delta_hz", "power_w", "cls_linear", "cls_nonlinear", "nbar"});
    for (std::size_t i = 0; i < deltas.size(); ++i)
        for (std::size_t j = 0; j < powers.size(); ++j) {
            const auto k = map.index(i, j);
            csv_row(os, {num(hz(deltas[i])), num(powers[j]), stability_name(map.linear[k]),
                         stability_name(map.nonlinear[k]), num(map.nbar[k])});
        }

    auto opt = [](double v) { return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v); };
    ordered_json summary;
    summary["nonlinear_formalism"] = std::string(formalism_name(map.nonlinear_tag));
    summary["p_th_blue"] = opt(map.p_th_blue);
    summary["p_th_red"] = opt(map.p_th_red);
    summary["n_cr_empirical"] = opt(map.n_cr_empirical);
    summary["n_cr_heuristic"] = critical_photon_number(p).n_cr;
    if (sink.to_file())
        sink.side_file(".summary.json", summary);
    else
        sink.stream() << "# " << summary.dump() << '\n';
}

AlphaSeries read_alpha_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open alpha CSV '" + path + "'");
    std::vector<double> t;
    std::vector<cplx> a;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::stringstream ss(line);
        std::string c0, c1, c2;
        if (!std::getline(ss, c0, ',') || !std::getline(ss, c1, ',') || !std::getline(ss, c2))
            throw ConfigError("alpha CSV line " + std::to_string(lineno) + ": expected t_s,re_alpha,im_alpha");
        try {
            const double tv = std::stod(c0);
            t.push_back(tv);
            a.emplace_back(std::stod(c1), std::stod(c2));
        } catch (const std::exception&) {
            if (t.empty() && lineno == 1)
                continue; // header
            throw ConfigError("alpha CSV line " + std::to_string(lineno) + ": not numeric");
        }
    }
    return AlphaSeries(std::move(t), std::move(a));
}

std::vector<double> parse_t_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ':');)
        parts.push_back(tok);
    if (parts.size() != 3)
        throw ConfigError("--t-grid expects start:stop:count (seconds)");
    double a = 0, b = 0;
    long n = 0;
    try {
        a = std::stod(parts[0]);
        b = std::stod(parts[1]);
        n = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("--t-grid expects start:stop:count (seconds)");
    }
    if (!(b > a) || n < 2)
        throw ConfigError("--t-grid needs stop > start and count >= 2");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

void run_pulse(const Options& o, const OmParams& p, Sink& sink)
{
    const auto tag = formalism_or(o.common, Formalism::SecondOrder3);
    const auto ds = parse_hz_values(o.delta);
    if (ds.size() != 1)
        throw ConfigError("pulse takes a single --delta-hz value");
    AlphaSeries alpha = o.alpha_csv.empty() ? AlphaSeries::constant(steady_state(p, ds.front()).alpha)
                                            : read_alpha_csv(o.alpha_csv);
    if (o.t_grid.empty())
        throw ConfigError("pulse needs --t-grid start:stop:count");
    const auto r = evolve_pulsed(p, ds.front(), alpha, tag, parse_t_grid(o.t_grid));
    const auto sys = build_system(tag, p, steady_state(p, ds.front()));

    auto& os = sink.stream();
    os << "t_s";
    for (const auto& label : sys.basis_labels)
        os << ",re_" << label << ",im_" << label;
    os << '\n';
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        os << num(r.times[k]);
        for (const auto& traj : r.trajectories) {
            check_finite({traj[k].real(), traj[k].imag()});
            os << ',' << num(traj[k].real()) << ',' << num(traj[k].imag());
        }
        os << '\n';
    }
    ordered_json side;
    side["steps"] = r.step_count;
    side["max_step_error"] = r.max_step_error;
    sink.side_file(".pulse.json", side);
}

void run_fixtures(const Options& o, std::ostream& os)
{
    const fs::path dir = fixture_dir();
    if (o.fixtures_action == "show") {
        if (o.fixture_name.empty())
            throw ConfigError("fixtures show needs a name");
        const fs::path path = dir / (o.fixture_name + ".json");
        if (!fs::exists(path))
            throw ConfigError("unknown fixture '" + o.fixture_name + "'");
        os << serialize_config(load_config(path)) << '\n';
        return;
    }
    if (o.fixtures_action != "list")
        throw ConfigError("fixtures action must be list or show");
    std::vector<fs::path> files;
    if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json")
                files.push_back(e.path());
    std::sort(files.begin(), files.end());
    csv_row(os, {"name", "power_w", "lambda_m", "omega_m_hz", "q_opt", "q_mech", "g0_hz", "temp_k", "C0", "C"});
    for (const auto& f : files) {
        const RawConfig raw = load_config(f);
        const OmParams p = derive_rates(raw);
        const double nbar = raw.power_w > 0.0 ? steady_state(p, 0.0).nbar : 0.0;
        const auto coop = cooperativity(p, nbar);
        csv_row(os, {f.stem().string(), num(raw.power_w), num(raw.lambda_m), num(raw.omega_m_hz), num(raw.q_opt),
                     num(raw.q_mech), num(raw.g0_hz), num(raw.temp_k), num(coop.C0), num(coop.C)});
    }
}

void add_common(CLI::App* sub, Common& c, bool power_override)
{
    sub->add_option("--config", c.config, "JSON config file");
    sub->add_option("--fixture", c.fixture, "named fixture from the fixture directory");
    sub->add_option("--formalism", c.formalism, "lin3, lin4, so3, to5, full6 or min3");
    sub->add_option("--out", c.out, "output file (default: standard output)");
    sub->add_option("--threads", c.threads, "worker threads (default: $OMX_THREADS or all cores)");
    if (power_override)
        sub->add_option("--power-w", c.power_w, "override the pump power, W");
    sub->add_option("--temp-k", c.temp_k, "override the bath temperature, K");
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Higher-order operator optomechanics toolkit", "omx"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    Options o;
    auto* steady = app.add_subcommand("steady", "steady-state photon number and amplitudes over a detuning sweep");
    auto* matrix = app.add_subcommand("matrix", "coefficient, noise and drive matrices as JSON");
    auto* spectrum = app.add_subcommand("spectrum", "output noise spectrum");
    auto* shift = app.add_subcommand("shift", "eigenvalue-based resonance shifts");
    auto* spring = app.add_subcommand("spring", "corrected and standard spring effect");
    auto* inequiv = app.add_subcommand("inequiv", "side-band inequivalence, numeric and asymptotic");
    auto* stability = app.add_subcommand("stability", "stability phase map over detuning and power");
    auto* pulse = app.add_subcommand("pulse", "time evolution under a sampled drive");
    auto* fixtures = app.add_subcommand("fixtures", "list or show the shipped fixtures");

    for (auto* sub : {steady, matrix, spectrum, shift, spring, inequiv, stability, pulse}) {
        add_common(sub, o.common, sub != stability);
        sub->add_option("--delta-hz", o.delta, "detuning in Hz, value or start:stop:step");
        sub->add_option("--branch", o.branch, "steady-state branch: lowest, highest or an index");
    }
    matrix->add_flag("--no-s", o.no_s, "drop s = g0*bbar from the sideband diagonals");
    spectrum->add_option("--grid", o.grid, "probe grid start:stop:step in Hz");
    spectrum->add_option("--noise", o.noise, "additive or multiplicative");
    shift->add_option("--temp-grid", o.temp_grid, "temperature sweep start:stop:step in K (thermal phonons)");
    shift->add_option("--phonons", o.phonons, "coherent or thermal");
    spring->add_option("--w-hz", o.w_hz, "probe frequency in Hz (default: mechanical frequency)");
    inequiv->add_option("--nbar", o.nbars, "photon numbers")->delimiter(',');
    inequiv->add_option("--mbar", o.mbars, "coherent phonon numbers")->delimiter(',');
    stability->add_option("--power-w", o.powers, "pump powers in W, comma separated")->delimiter(',');
    stability->add_option("--power-log", o.power_log, "log-spaced powers lo:hi:count in W");
    pulse->add_option("--alpha-csv", o.alpha_csv, "drive samples t_s,re_alpha,im_alpha");
    pulse->add_option("--t-grid", o.t_grid, "output times start:stop:count in s");
    fixtures->add_option("action", o.fixtures_action, "list or show")->required();
    fixtures->add_option("name", o.fixture_name, "fixture to show");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return exit_config;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (fixtures->parsed()) {
            run_fixtures(o, out);
            return exit_ok;
        }
        const Source src = load_source(o.common);
        const OmParams p = derive_rates(src.raw);
        Sink sink(o.common, out);
        CLI::App* used = app.get_subcommands().front();
        const std::string name = used->get_name();
        if (name == "steady")
            run_steady(o, p, sink);
        else if (name == "matrix")
            run_matrix(o, p, sink);
        else if (name == "spectrum")
            run_spectrum(o, p, sink);
        else if (name == "shift")
            run_shift(o, p, sink);
        else if (name == "spring")
            run_spring(o, p, sink);
        else if (name == "inequiv")
            run_inequiv(o, p, sink);
        else if (name == "stability")
            run_stability(o, p, sink);
        else
            run_pulse(o, p, sink);
        sink.stream().flush();

        ordered_json manifest;
        manifest["tool"] = "omx";
        manifest["version"] = version();
        manifest["subcommand"] = name;
        manifest["args"] = args;
        manifest["source"] = src.origin;
        manifest["config"] = raw_json(src.raw);
        manifest["formalism"] = o.common.formalism.empty() ? "default" : o.common.formalism;
        manifest["delta_hz"] = o.delta;
        if (!o.grid.empty())
            manifest["grid_hz"] = o.grid;
        manifest["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        sink.side_file(".manifest.json", manifest);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const CapabilityError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_ok;
}

} // namespace omx::cli
