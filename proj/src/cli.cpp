#include "ptomit/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptomit/analysis.hpp"
#include "ptomit/errors.hpp"
#include "ptomit/linear_response.hpp"
#include "ptomit/oracle.hpp"
#include "ptomit/params.hpp"
#include "ptomit/stability.hpp"
#include "ptomit/version.hpp"

namespace ptomit::cli
{

using nlohmann::json;

namespace
{

struct Common
{
    std::string config;
    std::string out;
    unsigned threads = 1;
    std::vector<std::string> overrides;
};

struct Grid
{
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;

    std::vector<double> values(double unit) const
    {
        if (points == 0)
        {
            throw ConfigError("grid needs at least one point");
        }
        if (points > 1 && !(max > min))
        {
            throw ConfigError("grid max must exceed min");
        }
        auto v = linspace(min, max, points);
        for (double& x : v)
        {
            x *= unit;
        }
        return v;
    }

    json describe(const char* unit) const { return {{"min", min}, {"max", max}, {"points", points}, {"unit", unit}}; }
};

struct JobContext
{
    SystemParams params;
    json manifest;
    std::vector<std::string> outputs;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw ConfigError("cannot write output file '" + path + "'");
    }
    out << content;
    if (!out)
    {
        throw ConfigError("failed writing output file '" + path + "'");
    }
}

// A run manifest fed back as config contributes its "params" block.
json load_config_document(const Common& c)
{
    json doc = json::object();
    if (!c.config.empty())
    {
        try
        {
            doc = json::parse(read_file(c.config));
        }
        catch (const json::parse_error& e)
        {
            throw ConfigError("config '" + c.config + "' is not valid JSON: " + e.what());
        }
        if (doc.is_object() && doc.contains("params") && doc["params"].is_object())
        {
            doc = json(doc["params"]);
        }
    }
    for (const auto& o : c.overrides)
    {
        apply_override(doc, o);
    }
    return doc;
}

class Csv
{
public:
    explicit Csv(std::initializer_list<std::string> header)
    {
        bool first = true;
        for (const auto& h : header)
        {
            buf_ << (first ? "" : ",") << h;
            first = false;
        }
        buf_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... cells)
    {
        bool first = true;
        ((buf_ << (first ? "" : ",") << cell(cells), first = false), ...);
        buf_ << '\n';
    }

    std::string str() const { return buf_.str(); }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(const char* v) { return v; }
    static std::string cell(const std::string& v) { return v; }

    std::ostringstream buf_;
};

void finish(JobContext& ctx, const Common& c)
{
    ctx.manifest["outputs"] = ctx.outputs;
    write_file(c.out + ".manifest.json", ctx.manifest.dump(2) + "\n");
}

void job_spectrum(JobContext& ctx, const Common& c, const Grid& omega, double delay_step, bool allow_unstable)
{
    const SystemParams& p = ctx.params;
    if (!allow_unstable)
    {
        require_stable(p, "spectrum");
    }
    SpectrumOptions opt;
    opt.threads = c.threads;
    opt.delay_step = delay_step * p.omega_m;
    const auto grid = omega.values(p.omega_m);
    const Spectrum s = spectrum(p, grid, opt);
    Csv csv{"omega_over_omega_m", "re_tp", "im_tp", "abs_tp", "abs_tp_sq", "psi_rad", "tau_g_s", "omega_rad_s"};
    for (const auto& r : s.responses)
    {
        csv.row(r.omega / p.omega_m, r.t_p.real(), r.t_p.imag(), r.abs_t, r.abs_t * r.abs_t, r.psi, r.tau_g, r.omega);
    }
    write_file(c.out, csv.str());
    ctx.outputs.push_back(c.out);
    ctx.manifest["grids"]["omega"] = omega.describe("omega_m");
    ctx.manifest["delay_step_over_omega_m"] = delay_step;
    ctx.manifest["allow_unstable"] = allow_unstable;
    ctx.manifest["results"] = {{"n_cav", s.state.n_cav},
                               {"params_fingerprint", std::to_string(s.params_fingerprint)}};
}

void job_stability_map(JobContext& ctx, const Common& c, const Grid& g2mag, const Grid& phi2, double mu)
{
    const SystemParams& p = ctx.params;
    const double mu_abs = std::isnan(mu) ? p.mu_mag : mu * p.gamma_span();
    const auto map = stability_map(p, g2mag.values(p.g1_mag), phi2.values(1.0), mu_abs, c.threads);
    Csv csv{"g2_mag_over_g1", "phi2_rad", "status", "margin_rad_s", "margin_over_gamma_span", "g2_mag_rad_s"};
    for (std::size_t i = 0; i < map.g2_mags.size(); ++i)
    {
        for (std::size_t j = 0; j < map.phi2s.size(); ++j)
        {
            const double margin = map.margins[i * map.phi2s.size() + j];
            csv.row(p.g1_mag > 0 ? map.g2_mags[i] / p.g1_mag : 0.0, map.phi2s[j], to_string(map.at(i, j)), margin,
                    margin / p.gamma_span(), map.g2_mags[i]);
        }
    }
    write_file(c.out, csv.str());
    ctx.outputs.push_back(c.out);
    ctx.manifest["grids"]["g2_mag"] = g2mag.describe("g1_mag");
    ctx.manifest["grids"]["phi2"] = phi2.describe("rad");
    ctx.manifest["mu_over_gamma_span"] = mu_abs / p.gamma_span();
    ctx.manifest["results"] = {{"stable_cells", map.count(CellStatus::stable)},
                               {"unstable_cells", map.count(CellStatus::unstable)},
                               {"failed_cells", map.count(CellStatus::steady_state_failed)}};
}

void job_root_loci(JobContext& ctx, const Common& c, const Grid& phi2)
{
    const SystemParams& p = ctx.params;
    RootLocusOptions opt;
    opt.threads = c.threads;
    const auto locus = mechanical_root_loci(p, phi2.values(1.0), opt);
    Csv csv{"phi2_rad", "track", "re_lambda_rad_s", "im_lambda_rad_s", "re_over_gamma_span", "im_over_omega_m",
            "ep_neighborhood"};
    for (std::size_t i = 0; i < locus.phi2_grid.size(); ++i)
    {
        for (int t = 0; t < 2; ++t)
        {
            const cplx z = locus.tracks[static_cast<std::size_t>(t)][i];
            csv.row(locus.phi2_grid[i], t, z.real(), z.imag(), z.real() / p.gamma_span(), z.imag() / p.omega_m,
                    static_cast<bool>(locus.ep_neighborhood[i]));
        }
    }
    write_file(c.out, csv.str());
    ctx.outputs.push_back(c.out);
    ctx.manifest["grids"]["phi2"] = phi2.describe("rad");
}

void job_map2d(JobContext& ctx, const Common& c, const Grid& omega, const Grid& mu, double phi2)
{
    const SystemParams& p = ctx.params;
    const double phase = std::isnan(phi2) ? p.g2_phase : phi2;
    const auto m = map2d(p, omega.values(p.omega_m), mu.values(p.gamma_span()), phase, c.threads);
    Csv csv{"mu_over_gamma_span", "omega_over_omega_m", "abs_tp", "mu_rad_s", "omega_rad_s"};
    for (std::size_t i = 0; i < m.mus.size(); ++i)
    {
        for (std::size_t j = 0; j < m.omegas.size(); ++j)
        {
            csv.row(m.mus[i] / m.gamma_span, m.omegas[j] / m.omega_m, m.at(i, j), m.mus[i], m.omegas[j]);
        }
    }
    write_file(c.out, csv.str());
    ctx.outputs.push_back(c.out);
    ctx.manifest["grids"]["omega"] = omega.describe("omega_m");
    ctx.manifest["grids"]["mu"] = mu.describe("gamma1-gamma2");
    ctx.manifest["phi2_rad"] = m.phi2;
    json errors = json::array();
    for (const auto& e : m.errors)
    {
        errors.push_back({{"row", e.row}, {"col", e.col}, {"message", e.message}});
    }
    ctx.manifest["cell_errors"] = errors;
}

void job_bandwidth(JobContext& ctx, const Common& c, const Grid& omega, const Grid& phi2, const std::string& mode,
                   bool delay)
{
    const SystemParams& p = ctx.params;
    SweepOptions opt;
    opt.threads = c.threads;
    opt.omega_grid = omega.values(p.omega_m);
    static const std::map<std::string, BandMode> modes{
        {"auto", BandMode::automatic}, {"split", BandMode::split}, {"single", BandMode::single}};
    opt.mode = modes.at(mode);
    const auto phis = phi2.values(1.0);
    const SweepTable t = delay ? delay_bandwidth_sweep(p, phis, opt) : gain_bandwidth_sweep(p, phis, opt);
    Csv csv{"phi2_rad", "band", "status", "peak_omega_over_omega_m", "peak_value", "hwhm_rad_s", "hwhm_over_omega_m",
            "product", "total_product", "asymmetric_truncation", "peak_omega_rad_s"};
    for (const auto& row : t.rows)
    {
        for (const auto& b : row.bands)
        {
            csv.row(row.axis_value, to_string(b.band), to_string(b.status), b.peak_omega / p.omega_m, b.peak_value,
                    b.hwhm, b.hwhm / p.omega_m, b.product, row.total, b.asymmetric_truncation, b.peak_omega);
        }
    }
    write_file(c.out, csv.str());
    ctx.outputs.push_back(c.out);
    ctx.manifest["grids"]["omega"] = omega.describe("omega_m");
    ctx.manifest["grids"]["phi2"] = phi2.describe("rad");
    ctx.manifest["band_mode"] = mode;
    ctx.manifest["quantity"] = delay ? "tau_g_s" : "abs_tp";
}

void job_ep(JobContext& ctx, const Common& c, const std::vector<double>& bracket)
{
    const SystemParams& p = ctx.params;
    if (bracket.size() != 2)
    {
        throw ConfigError("--bracket takes two values");
    }
    const double span = p.gamma_span();
    const EPResult r = locate_ep(p, bracket[0] * span, bracket[1] * span);
    json out = {
        {"mu_ep_over_gamma_span", r.mu_ep / span},
        {"mu_ep_rad_s", r.mu_ep},
        {"gap_at_ep_rad_s", r.gap_at_ep},
        {"gap_at_ep_over_gamma_span", r.gap_at_ep / span},
        {"bracket_over_gamma_span", {bracket[0], bracket[1]}},
        {"phi2_rad", p.g2_phase},
        {"coalesced", r.coalesced},
    };
    write_file(c.out, out.dump(2) + "\n");
    ctx.outputs.push_back(c.out);
    ctx.manifest["results"] = out;
}

void job_oracle(JobContext& ctx, const Common& c, const Grid& omega, double rel_tol)
{
    const SystemParams& p = ctx.params;
    OracleOptions opt;
    opt.rel_tol = rel_tol;
    const auto cmp = oracle_compare(p, omega.values(p.omega_m), opt, c.threads);
    Csv csv{"omega_over_omega_m", "re_a1m_formula", "im_a1m_formula", "re_a1m_oracle", "im_a1m_oracle", "rel_error",
            "transient_decay", "omega_rad_s"};
    for (const auto& pt : cmp.points)
    {
        csv.row(pt.omega / p.omega_m, pt.formula.real(), pt.formula.imag(), pt.measured.real(), pt.measured.imag(),
                pt.rel_error, pt.transient_decay, pt.omega);
    }
    write_file(c.out, csv.str());
    ctx.outputs.push_back(c.out);
    ctx.manifest["grids"]["omega"] = omega.describe("omega_m");
    ctx.manifest["results"] = {{"max_rel_error", cmp.max_rel_error}, {"rel_tol", rel_tol}};
}

} // namespace

std::string format_number(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Closed-contour PT-symmetric optomechanics: steady state, OMIT spectra, stability and bandwidth jobs"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common common;
    Grid omega{0.98, 1.02, 2001};
    Grid oracle_omega{0.99, 1.01, 5};
    Grid g2mag{0.0, 4.0, 81};
    Grid phi2_full{0.0, kTwoPi, 65};
    Grid phi2_half{0.0, kPi, 181};
    Grid phi2_sweep{0.0, kTwoPi, 33};
    Grid mu{0.05, 0.6, 111};
    double delay_step = 1e-6;
    double mu_fixed = std::nan("");
    double phi2_fixed = std::nan("");
    double rel_tol = OracleOptions{}.rel_tol;
    bool allow_unstable = false;
    std::string band_mode = "auto";
    std::vector<double> bracket{0.15, 0.35};

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON config (or a run manifest)")->check(CLI::ExistingFile);
        sub->add_option("--out", common.out, "output file")->required();
        sub->add_option("--threads", common.threads, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_option("--set", common.overrides, "override a config key, KEY=VALUE")->allow_extra_args(false);
    };
    auto add_grid = [](CLI::App* sub, const std::string& name, Grid& g, const std::string& unit) {
        sub->add_option("--" + name + "-min", g.min, name + " grid start (" + unit + ")")->capture_default_str();
        sub->add_option("--" + name + "-max", g.max, name + " grid end (" + unit + ")")->capture_default_str();
        sub->add_option("--" + name + "-points", g.points, name + " grid points")->capture_default_str();
    };

    auto* spec = app.add_subcommand("spectrum", "probe transmission, phase and group delay over omega");
    add_common(spec);
    add_grid(spec, "omega", omega, "omega_m");
    spec->add_option("--delay-step", delay_step, "group-delay stencil (omega_m)")->capture_default_str();
    spec->add_flag("--allow-unstable", allow_unstable, "skip the stability check (e.g. zero-pump reference)");

    auto* smap = app.add_subcommand("stability-map", "stable/unstable cells over |g2| and phi2");
    add_common(smap);
    add_grid(smap, "g2mag", g2mag, "g1");
    add_grid(smap, "phi2", phi2_full, "rad");
    smap->add_option("--mu", mu_fixed, "|mu| in units of gamma1-gamma2 (default: config)");

    auto* loci = app.add_subcommand("root-loci", "mechanical eigenvalue tracks over phi2");
    add_common(loci);
    add_grid(loci, "phi2", phi2_half, "rad");

    auto* m2d = app.add_subcommand("map2d", "|t_p| over omega and |mu|");
    add_common(m2d);
    add_grid(m2d, "omega", omega, "omega_m");
    add_grid(m2d, "mu", mu, "gamma1-gamma2");
    m2d->add_option("--phi2", phi2_fixed, "phase of g2 (default: config)");

    auto* gbw = app.add_subcommand("gain-bw", "peak |t_p|, HWHM and products over phi2");
    auto* dbw = app.add_subcommand("delay-bw", "peak group delay, HWHM and products over phi2");
    for (auto* sub : {gbw, dbw})
    {
        add_common(sub);
        add_grid(sub, "omega", omega, "omega_m");
        add_grid(sub, "phi2", phi2_sweep, "rad");
        sub->add_option("--band-mode", band_mode, "auto | split | single")
            ->check(CLI::IsMember({"auto", "split", "single"}))
            ->capture_default_str();
    }

    auto* ep = app.add_subcommand("ep", "locate the exceptional point on the |mu| axis");
    add_common(ep);
    ep->add_option("--bracket", bracket, "search interval in units of gamma1-gamma2")->expected(2);

    auto* orc = app.add_subcommand("oracle-check", "closed-form A1- against time-domain integration");
    add_common(orc);
    add_grid(orc, "omega", oracle_omega, "omega_m");
    orc->add_option("--rel-tol", rel_tol, "integrator relative tolerance")->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::CallForVersion&)
    {
        out << kVersion << "\n";
        return kExitOk;
    }
    catch (const CLI::ParseError& e)
    {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App* job = app.get_subcommands().front();
    try
    {
        JobContext ctx;
        const json doc = load_config_document(common);
        ctx.params = from_config(doc);
        ctx.manifest = {
            {"tool", "ptomit"},
            {"version", kVersion},
            {"job", job->get_name()},
            {"params", serialize(ctx.params)},
            {"normalized", serialize_normalized(ctx.params)},
            {"grids", json::object()},
        };

        if (job == spec)
        {
            job_spectrum(ctx, common, omega, delay_step, allow_unstable);
        }
        else if (job == smap)
        {
            job_stability_map(ctx, common, g2mag, phi2_full, mu_fixed);
        }
        else if (job == loci)
        {
            job_root_loci(ctx, common, phi2_half);
        }
        else if (job == m2d)
        {
            job_map2d(ctx, common, omega, mu, phi2_fixed);
        }
        else if (job == gbw || job == dbw)
        {
            job_bandwidth(ctx, common, omega, phi2_sweep, band_mode, job == dbw);
        }
        else if (job == ep)
        {
            job_ep(ctx, common, bracket);
        }
        else if (job == orc)
        {
            job_oracle(ctx, common, oracle_omega, rel_tol);
        }
        finish(ctx, common);
        out << "wrote " << common.out << "\n";
        return kExitOk;
    }
    catch (const PhysicsError& e)
    {
        err << "physics error: " << e.what() << "\n";
        return kExitPhysics;
    }
    catch (const std::invalid_argument& e)
    {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const json::exception& e)
    {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("ptomit");
    for (const auto& a : args)
    {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace ptomit::cli
