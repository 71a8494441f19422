#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "minsurf/canonical.hpp"
#include "minsurf/congruence.hpp"
#include "minsurf/families.hpp"
#include "minsurf/surfgeom.hpp"
#include "minsurf/weierstrass.hpp"

using namespace minsurf;
using nlohmann::json;

namespace {

struct SurfaceSpec {
    std::string text;  // as given on the command line
    std::optional<WeierstrassPair> pair;
    std::optional<Chart> chart;
    std::optional<families::Degree6Coeffs> coeffs;
    std::optional<GridSpec> domain;  // suggested by the spec itself
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MinsurfError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Complex complex_from_json(const json& j) {
    if (j.is_number()) return Complex(j.get<Real>(), 0);
    if (j.is_array() && j.size() == 2) return Complex(j[0].get<Real>(), j[1].get<Real>());
    if (j.is_string()) {
        const auto e = analytic::parse(j.get<std::string>());
        return analytic::eval(e, Complex(0, 0)).value;
    }
    throw MinsurfError("expected a number, [re, im] pair or constant expression");
}

Real param_of(const json& params, const char* name, std::optional<Real> fallback = {}) {
    if (params.contains(name)) return params.at(name).get<Real>();
    if (fallback) return *fallback;
    throw MinsurfError(std::string("missing family parameter '") + name + "'");
}

SurfaceSpec family_spec(const std::string& name, const json& params) {
    SurfaceSpec spec;
    using namespace families;
    if (name == "r1") {
        spec.coeffs = r1_coeffs(param_of(params, "a1"), param_of(params, "i1"));
    } else if (name == "r2") {
        spec.coeffs = r2_coeffs(param_of(params, "a2"), param_of(params, "i2"));
    } else if (name == "assoc") {
        spec.coeffs = assoc_coeffs(param_of(params, "a1"), param_of(params, "i1"),
                                   param_of(params, "t", 0.0));
    } else if (name == "s") {
        spec.coeffs = s_coeffs(param_of(params, "a1"), param_of(params, "a2"),
                               param_of(params, "c3"), param_of(params, "d3"));
    } else if (name == "s1") {
        spec.coeffs = s_coeffs(param_of(params, "a1"), 0, param_of(params, "c3"), 0);
    } else if (name == "s2") {
        spec.coeffs = s_coeffs(0, param_of(params, "a2"), 0, param_of(params, "d3"));
    } else if (name == "degree6") {
        if (!params.contains("coeffs"))
            throw MinsurfError("family 'degree6' needs a 'coeffs' object (13 named 3-vectors)");
        spec.coeffs = coeffs_from_json(params.at("coeffs").dump());
    } else {
        throw MinsurfError("unknown family '" + name +
                           "' (expected r1, r2, assoc, s, s1, s2 or degree6)");
    }
    spec.chart = degree6_chart(*spec.coeffs);
    return spec;
}

// positional parameter order of the compact family form name[p1,p2,...]
const std::map<std::string, std::vector<const char*>> kCompactParams = {
    {"r1", {"a1", "i1"}},   {"r2", {"a2", "i2"}}, {"assoc", {"a1", "i1", "t"}},
    {"s", {"a1", "a2", "c3", "d3"}}, {"s1", {"a1", "c3"}}, {"s2", {"a2", "d3"}},
};

SurfaceSpec parse_spec(const std::string& text) {
    SurfaceSpec spec;
    spec.text = text;

    json j;
    if (!text.empty() && text.front() == '@') {
        j = json::parse(slurp(text.substr(1)));
    } else if (!text.empty() && text.front() == '{') {
        j = json::parse(text);
    } else if (auto open = text.find('['); open != std::string::npos && text.back() == ']') {
        // compact family form: name[p1,p2,...]
        const std::string name = text.substr(0, open);
        auto it = kCompactParams.find(name);
        if (it == kCompactParams.end()) throw MinsurfError("unknown family '" + name + "'");
        std::vector<Real> vals;
        std::stringstream ss(text.substr(open + 1, text.size() - open - 2));
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != it->second.size())
            throw MinsurfError("family '" + name + "' takes " +
                               std::to_string(it->second.size()) + " parameters");
        json params;
        for (std::size_t k = 0; k < vals.size(); ++k) params[it->second[k]] = vals[k];
        SurfaceSpec fam = family_spec(name, params);
        fam.text = text;
        return fam;
    } else {
        throw MinsurfError("cannot parse surface spec '" + text +
                           "' (expected name[...], {json} or @file.json)");
    }

    if (j.contains("domain")) {
        GridSpec g;
        const auto& d = j.at("domain");
        if (d.contains("range")) {
            const auto& r = d.at("range");
            g.u0 = r[0].get<Real>();
            g.u1 = r[1].get<Real>();
            g.v0 = r[2].get<Real>();
            g.v1 = r[3].get<Real>();
        }
        if (d.contains("grid")) {
            g.nu = d.at("grid")[0].get<int>();
            g.nv = d.at("grid")[1].get<int>();
        }
        spec.domain = g;
    }

    if (j.contains("weierstrass")) {
        const auto& w = j.at("weierstrass");
        const Complex z0 = w.contains("z0") ? complex_from_json(w.at("z0")) : Complex(0, 0);
        spec.pair = make_weierstrass_pair(analytic::parse(w.at("f").get<std::string>()),
                                          analytic::parse(w.at("g").get<std::string>()), z0);
        return spec;
    }
    if (j.contains("family")) {
        const auto& f = j.at("family");
        SurfaceSpec fam = family_spec(f.at("name").get<std::string>(),
                                      f.contains("params") ? f.at("params") : json::object());
        fam.text = text;
        fam.domain = spec.domain;
        return fam;
    }
    if (j.contains("chart_file")) {
        spec.coeffs = families::coeffs_from_json(slurp(j.at("chart_file").get<std::string>()));
        spec.chart = families::degree6_chart(*spec.coeffs);
        return spec;
    }
    if (j.contains("chart")) {
        const auto& c = j.at("chart");
        const analytic::Expr ex = analytic::parse(c.at("x").get<std::string>());
        const analytic::Expr ey = analytic::parse(c.at("y").get<std::string>());
        const analytic::Expr ez = analytic::parse(c.at("z").get<std::string>());
        Chart chart;
        chart.provenance = Chart::Provenance::external;
        chart.position = [ex, ey, ez](Real u, Real v) {
            analytic::ParamMap b{{"u", Complex(u, 0)}, {"v", Complex(v, 0)}};
            return Vec3(analytic::eval_value(ex, b).real(), analytic::eval_value(ey, b).real(),
                        analytic::eval_value(ez, b).real());
        };
        spec.chart = chart;
        return spec;
    }
    throw MinsurfError("surface spec must contain 'weierstrass', 'family', 'chart' or 'chart_file'");
}

Chart spec_chart(const SurfaceSpec& spec) {
    if (spec.chart) return *spec.chart;
    if (spec.pair) return chart_real(*spec.pair);
    throw MinsurfError("spec has no chart");
}

WeierstrassPair spec_pair(const SurfaceSpec& spec, std::string* note = nullptr) {
    if (spec.pair) return *spec.pair;
    const ExtractedPair e = extract_pair(spec_chart(spec));
    if (note) *note = "generators extracted from chart, fit residual " + std::to_string(e.fit_residual);
    return e.pair;
}

// ---------------------------------------------------------------------------
// shared CLI state

struct Common {
    std::string grid_text, range_text, json_path, config_path;
    std::vector<std::string> tol_kv;
    Tolerances tol;

    GridSpec grid(const std::optional<GridSpec>& from_spec) const {
        GridSpec g = from_spec.value_or(GridSpec{});
        if (!range_text.empty()) {
            std::stringstream ss(range_text);
            std::string tok;
            std::vector<Real> vals;
            while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
            if (vals.size() == 2) {
                g.u0 = g.v0 = vals[0];
                g.u1 = g.v1 = vals[1];
            } else if (vals.size() == 4) {
                g.u0 = vals[0];
                g.u1 = vals[1];
                g.v0 = vals[2];
                g.v1 = vals[3];
            } else {
                throw MinsurfError("--range expects 'lo,hi' or 'u0,u1,v0,v1'");
            }
        }
        if (!grid_text.empty()) {
            const auto x = grid_text.find('x');
            if (x == std::string::npos) throw MinsurfError("--grid expects NxM");
            g.nu = std::stoi(grid_text.substr(0, x));
            g.nv = std::stoi(grid_text.substr(x + 1));
        }
        if (g.nu < 3 || g.nv < 3) throw MinsurfError("grid resolution must be at least 3");
        return g;
    }

    void apply_tolerances() {
        auto set = [&](const std::string& key, Real v) {
            if (key == "quadrature_abs") tol.quadrature_abs = v;
            else if (key == "ode") tol.ode = v;
            else if (key == "branch_point") tol.branch_point = v;
            else if (key == "minimal") tol.minimal = v;
            else if (key == "isothermal") tol.isothermal = v;
            else if (key == "system") tol.system = v;
            else if (key == "pde_residual") tol.pde_residual = v;
            else if (key == "curvature_match") tol.curvature_match = v;
            else if (key == "cloud_rms") tol.cloud_rms = v;
            else if (key == "mobius_fit") tol.mobius_fit = v;
            else if (key == "fit_residual") tol.fit_residual = v;
            else throw MinsurfError("unknown tolerance key '" + key + "'");
        };
        if (!config_path.empty()) {
            const json cfg = json::parse(slurp(config_path));
            if (cfg.contains("tolerances"))
                for (const auto& [k, v] : cfg.at("tolerances").items()) set(k, v.get<Real>());
        }
        for (const std::string& kv : tol_kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw MinsurfError("--tol expects key=value");
            set(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
        }
    }
};

int emit(const Common& common, json report, bool pass,
         const std::chrono::steady_clock::time_point& started) {
    report["wall_time_s"] =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - started).count();
    report["pass"] = pass;
    const std::string text = report.dump(2);
    if (!common.json_path.empty()) {
        std::ofstream out(common.json_path);
        if (!out) throw MinsurfError("cannot write " + common.json_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
    return pass ? 0 : 1;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MinsurfError("cannot write " + path);
    out << content;
}

std::string obj_mesh(const Chart& chart, const GridSpec& grid) {
    std::string out;
    char buf[160];
    for (int iu = 0; iu < grid.nu; ++iu)
        for (int iv = 0; iv < grid.nv; ++iv) {
            const Vec3 p = chart.position(grid.u0 + iu * grid.du(), grid.v0 + iv * grid.dv());
            std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
            out += buf;
        }
    for (int iu = 0; iu + 1 < grid.nu; ++iu)
        for (int iv = 0; iv + 1 < grid.nv; ++iv) {
            const int a = iu * grid.nv + iv + 1;  // 1-based, row-major
            const int b = a + grid.nv;
            std::snprintf(buf, sizeof(buf), "f %d %d %d\nf %d %d %d\n", a, b, a + 1, b, b + 1,
                          a + 1);
            out += buf;
        }
    return out;
}

json minimality_json(const MinimalityReport& m) {
    return {{"pass", m.pass},
            {"residual", m.residual},
            {"max_abs_H", m.max_abs_H},
            {"max_nu", m.max_nu},
            {"degenerate_nodes", m.degenerate_nodes}};
}

json isothermal_json(const IsothermalReport& r) {
    return {{"pass", r.pass},
            {"max_EG_rel", r.max_eg},
            {"max_F_rel", r.max_f},
            {"degenerate_nodes", r.degenerate_nodes}};
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_check(const Common& common, const std::string& spec_text) {
    const auto started = std::chrono::steady_clock::now();
    const SurfaceSpec spec = parse_spec(spec_text);
    const Chart chart = spec_chart(spec);
    const GridSpec grid = common.grid(spec.domain);

    json report{{"command", "check"}, {"inputs", {{"spec", spec_text}}}};
    report["grid"] = {{"range", {grid.u0, grid.u1, grid.v0, grid.v1}}, {"size", {grid.nu, grid.nv}}};

    bool pass = true;
    if (spec.coeffs && spec.coeffs->all_zero()) {
        report["checks"]["degenerate"] = true;
        return emit(common, report, false, started);
    }
    const MinimalityReport minimal = check_minimal(chart, grid, common.tol.minimal);
    const IsothermalReport iso = check_isothermal(chart, grid, common.tol.isothermal);
    report["checks"]["minimal"] = minimality_json(minimal);
    report["checks"]["isothermal"] = isothermal_json(iso);
    pass = minimal.pass && iso.pass;
    if (spec.coeffs) {
        const families::SystemResidual res = families::check_system(*spec.coeffs);
        const bool ok = res.all_exact_zero() || res.max_abs() <= common.tol.system;
        report["checks"]["system"] = {{"pass", ok},
                                      {"exact_zero", res.all_exact_zero()},
                                      {"max_abs", res.max_abs()}};
        pass = pass && ok;
    }
    return emit(common, report, pass, started);
}

int cmd_congruent(const Common& common, const std::string& a_text, const std::string& b_text,
                  bool homothety, const std::string& branch) {
    const auto started = std::chrono::steady_clock::now();
    const SurfaceSpec sa = parse_spec(a_text), sb = parse_spec(b_text);
    auto input = [](const SurfaceSpec& s) {
        return s.pair ? SurfaceInput::from_pair(*s.pair) : SurfaceInput::from_chart(*s.chart);
    };
    DecideOptions opts;
    opts.up_to_homothety = homothety;
    opts.tol = common.tol;
    if (branch == "alternate") opts.branch_a = opts.branch_b = -1;
    const CongruenceReport rep = decide_congruence(input(sa), input(sb), opts);

    json report{{"command", "congruent"},
                {"inputs", {{"a", a_text}, {"b", b_text}, {"homothety", homothety}}},
                {"result", json::parse(congruence_report_to_json(rep))}};
    const bool pass = rep.decided && rep.congruent;
    const int rc = emit(common, report, pass, started);
    return rep.decided ? rc : 2;
}

int cmd_canonical(const Common& common, const std::string& spec_text, Real wradius, Real anchor_re,
                  Real anchor_im, int nu_n, const std::string& branch, const std::string& nu_csv,
                  const std::string& form_json) {
    const auto started = std::chrono::steady_clock::now();
    const SurfaceSpec spec = parse_spec(spec_text);
    std::string note;
    const WeierstrassPair pair = spec_pair(spec, &note);
    const Complex z0(anchor_re, anchor_im);

    Real radius = wradius;
    if (radius <= 0) {
        const Real nu0 = nu_closed(pair, z0);
        if (!(nu0 > 0)) throw MinsurfError("normal curvature vanishes at the anchor; pick another");
        radius = 0.25 / std::sqrt(nu0);
    }
    TransformOptions topt;
    topt.initial_sign = (branch == "alternate") ? -1 : +1;
    topt.ode_tol = common.tol.ode;
    const CanonicalForm cf =
        transform_to_canonical(pair, WDomain::disk(Complex(0, 0), radius), z0, topt);
    const NuField field = canonical_nu(cf, nu_n);
    const Real residual = nu_field_pde_residual(field);

    json report{{"command", "canonical"}, {"inputs", {{"spec", spec_text}}}};
    if (!note.empty()) report["inputs"]["note"] = note;
    report["anchor"] = {{"z0", {z0.real(), z0.imag()}}, {"w0", {0.0, 0.0}}};
    report["w_radius"] = radius;
    report["grid_n"] = nu_n;
    report["pde_residual"] = residual;
    json outputs = json::array();
    if (!nu_csv.empty()) {
        std::string csv = "w_re,w_im,nu\n";
        char buf[128];
        for (int ix = 0; ix < field.nx; ++ix)
            for (int iy = 0; iy < field.ny; ++iy) {
                if (!field.mask(ix, iy)) continue;
                const Complex w = field.node(ix, iy);
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", w.real(), w.imag(),
                              field.values(ix, iy));
                csv += buf;
            }
        write_file(nu_csv, csv);
        outputs.push_back(nu_csv);
    }
    if (!form_json.empty()) {
        write_file(form_json, canonical_form_to_json(cf));
        outputs.push_back(form_json);
    }
    report["outputs"] = outputs;
    return emit(common, report, residual <= common.tol.pde_residual, started);
}

int cmd_export(const Common& common, const std::string& spec_text, const std::string& format,
               const std::string& out_path) {
    const auto started = std::chrono::steady_clock::now();
    const SurfaceSpec spec = parse_spec(spec_text);
    const Chart chart = spec_chart(spec);
    const GridSpec grid = common.grid(spec.domain);

    json report{{"command", "export"},
                {"inputs", {{"spec", spec_text}, {"format", format}}},
                {"grid", {{"range", {grid.u0, grid.u1, grid.v0, grid.v1}},
                          {"size", {grid.nu, grid.nv}}}}};
    if (format == "obj") {
        write_file(out_path, obj_mesh(chart, grid));
    } else if (format == "csv") {
        write_file(out_path, curvature_csv(curvature_grid(chart, grid)));
    } else {
        throw MinsurfError("unknown export format '" + format + "' (obj or csv)");
    }
    report["outputs"] = {out_path};
    return emit(common, report, true, started);
}

int cmd_assoc(const Common& common, const std::string& spec_text, Real t, const std::string& format,
              const std::string& out_path) {
    const auto started = std::chrono::steady_clock::now();
    const SurfaceSpec spec = parse_spec(spec_text);
    std::string note;
    const WeierstrassPair pair = spec_pair(spec, &note);
    const Chart chart = chart_assoc(pair, t);
    const GridSpec grid = common.grid(spec.domain);

    json report{{"command", "assoc"}, {"inputs", {{"spec", spec_text}, {"t", t}}}};
    if (!note.empty()) report["inputs"]["note"] = note;
    const MinimalityReport minimal = check_minimal(chart, grid, common.tol.minimal);
    const IsothermalReport iso = check_isothermal(chart, grid, common.tol.isothermal);
    report["checks"]["minimal"] = minimality_json(minimal);
    report["checks"]["isothermal"] = isothermal_json(iso);
    json outputs = json::array();
    if (!out_path.empty()) {
        if (format != "obj") throw MinsurfError("assoc export supports only obj");
        write_file(out_path, obj_mesh(chart, grid));
        outputs.push_back(out_path);
    }
    report["outputs"] = outputs;
    return emit(common, report, minimal.pass && iso.pass, started);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimal-surface toolkit: generator pairs, canonical parameters, congruence"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--grid", common.grid_text, "grid resolution NxM (default 21x21)");
    app.add_option("--range", common.range_text, "parameter range lo,hi or u0,u1,v0,v1");
    app.add_option("--tol", common.tol_kv, "tolerance override key=value (repeatable)");
    app.add_option("--json", common.json_path, "also write the JSON report to this file");
    app.add_option("--config", common.config_path, "JSON config file with a 'tolerances' object");

    std::string spec_a, spec_b, format = "obj", out_path, branch = "principal";
    std::string nu_csv, form_json;
    bool homothety = false;
    Real t = 0, wradius = -1, anchor_re = 1, anchor_im = 0;
    int nu_n = 41;

    CLI::App* check = app.add_subcommand("check", "minimality / isothermality / coefficient system");
    check->fallthrough();
    check->add_option("spec", spec_a, "surface spec")->required();

    CLI::App* congruent = app.add_subcommand("congruent", "decide congruence of two surfaces");
    congruent->fallthrough();
    congruent->add_option("spec_a", spec_a, "first surface")->required();
    congruent->add_option("spec_b", spec_b, "second surface")->required();
    congruent->add_flag("--homothety", homothety, "decide up to homothety");
    congruent->add_option("--branch", branch, "square-root branch at the anchor")
        ->check(CLI::IsMember({"principal", "alternate"}));

    CLI::App* canonical = app.add_subcommand("canonical", "transform to canonical parameters");
    canonical->fallthrough();
    canonical->add_option("spec", spec_a, "surface spec")->required();
    canonical->add_option("--wradius", wradius, "w-domain radius (default from curvature scale)");
    canonical->add_option("--anchor-re", anchor_re, "anchor z0 real part (default 1)");
    canonical->add_option("--anchor-im", anchor_im, "anchor z0 imaginary part");
    canonical->add_option("--nu-grid", nu_n, "nu grid resolution (default 41)");
    canonical->add_option("--branch", branch, "square-root branch at the anchor")
        ->check(CLI::IsMember({"principal", "alternate"}));
    canonical->add_option("--nu-csv", nu_csv, "write the nu grid to this CSV file");
    canonical->add_option("--form-json", form_json, "write the canonical form to this JSON file");

    CLI::App* exportc = app.add_subcommand("export", "export a mesh or curvature grid");
    exportc->fallthrough();
    exportc->add_option("spec", spec_a, "surface spec")->required();
    exportc->add_option("--format", format, "obj or csv")->required();
    exportc->add_option("--out", out_path, "output path")->required();

    CLI::App* assoc = app.add_subcommand("assoc", "associated-family member of a surface");
    assoc->fallthrough();
    assoc->add_option("spec", spec_a, "surface spec")->required();
    assoc->add_option("--t", t, "family angle")->required();
    assoc->add_option("--format", format, "obj");
    assoc->add_option("--out", out_path, "optional mesh output path");

    CLI11_PARSE(app, argc, argv);

    try {
        common.apply_tolerances();
        if (check->parsed()) return cmd_check(common, spec_a);
        if (congruent->parsed())
            return cmd_congruent(common, spec_a, spec_b, homothety, branch);
        if (canonical->parsed())
            return cmd_canonical(common, spec_a, wradius, anchor_re, anchor_im, nu_n, branch,
                                 nu_csv, form_json);
        if (exportc->parsed()) return cmd_export(common, spec_a, format, out_path);
        if (assoc->parsed()) return cmd_assoc(common, spec_a, t, format, out_path);
    } catch (const std::exception& e) {
        json err{{"error", e.what()}};
        std::cout << err.dump(2) << "\n";
        return 2;
    }
    return 2;
}
