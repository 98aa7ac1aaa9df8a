#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "warpgeom/dgeom.hpp"
#include "warpgeom/error.hpp"
#include "warpgeom/harness.hpp"
#include "warpgeom/mesh_io.hpp"
#include "warpgeom/modelspace.hpp"
#include "warpgeom/report.hpp"
#include "warpgeom/surfaces.hpp"

namespace warpgeom::cli {

using nlohmann::json;

namespace {

// Raised for problems with the configuration itself (exit code 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const char* const kSubcommands[] = {"model", "surface", "quotients", "capacity", "exit-time", "ends", "tone", "verify"};

bool is_subcommand(const std::string& s) {
    for (const char* c : kSubcommands)
        if (s == c) return true;
    return false;
}

// A --config document is a flat JSON object whose keys are flag names. Its
// tokens are spliced in right after the subcommand, so explicit flags, which
// come later, win.
std::vector<std::string> config_tokens(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config file " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
    std::vector<std::string> out;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config" || key == "command") continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
        } else if (value.is_string()) {
            out.push_back(flag);
            out.push_back(value.get<std::string>());
        } else if (value.is_number()) {
            out.push_back(flag);
            std::ostringstream os;
            os << std::setprecision(17) << value.get<double>();
            out.push_back(os.str());
        } else {
            throw UsageError("config key '" + key + "' must be a string, number or boolean");
        }
    }
    return out;
}

std::vector<std::string> merged_args(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::optional<std::string> cfg;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) cfg = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
    }
    if (!cfg) return args;
    std::vector<std::string> extra = config_tokens(*cfg);
    auto sub = std::find_if(args.begin() + 1, args.end(), is_subcommand);
    if (sub == args.end()) throw UsageError("--config needs a subcommand");
    args.insert(sub + 1, extra.begin(), extra.end());
    return args;
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError(std::string(what) + " expects a:b, got '" + text + "'");
    try {
        std::size_t p1 = 0, p2 = 0;
        const double a = std::stod(text.substr(0, colon), &p1);
        const double b = std::stod(text.substr(colon + 1), &p2);
        if (p1 != colon || p2 != text.size() - colon - 1) throw std::invalid_argument("trailing");
        return {a, b};
    } catch (const std::logic_error&) {
        throw UsageError(std::string(what) + " expects two numbers a:b, got '" + text + "'");
    }
}

// "dim=2,warp=sinh(r)": everything after "warp=" is the warp text, so
// expressions may contain commas.
void apply_model_spec(const std::string& spec, RunConfig& cfg) {
    std::string head = spec;
    if (const auto w = spec.find("warp="); w != std::string::npos) {
        cfg.warp = spec.substr(w + 5);
        head = spec.substr(0, w);
    }
    std::stringstream ss(head);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item.rfind("dim=", 0) == 0) {
            try {
                cfg.dim = std::stoi(item.substr(4));
            } catch (const std::logic_error&) {
                throw UsageError("--model: bad dim in '" + spec + "'");
            }
        } else {
            throw UsageError("--model: unknown key '" + item + "' (expected dim=..., warp=...)");
        }
    }
}

RadiusGrid grid_or(const std::optional<std::string>& text, RadiusGrid fallback) {
    if (!text) return fallback;
    try {
        return RadiusGrid::parse(*text);
    } catch (const Error& e) {
        throw UsageError(std::string("--grid: ") + e.what());
    }
}

std::string verdict_word(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

void print_checks(const VerificationReport& rep, std::ostream& out) {
    for (const auto& c : rep.checks) {
        out << std::left << std::setw(13) << verdict_word(c.verdict) << c.id << "  " << c.inequality << "  lhs=" << c.lhs
            << " rhs=" << c.rhs << " margin=" << c.margin << " tol=" << c.tolerance;
        if (c.at) out << " at R=" << *c.at;
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << '\n';
    }
    for (const auto& s : rep.not_testable) out << std::left << std::setw(13) << "NOT-TESTABLE" << s << '\n';
    out << "summary: " << rep.count(Verdict::Pass) << " pass, " << rep.count(Verdict::Fail) << " fail, "
        << rep.count(Verdict::Inconclusive) << " inconclusive\n";
}

json config_json(const RunConfig& c) {
    json j{{"command", c.subcommand}, {"dim", c.dim},         {"warp", c.warp},   {"surface", c.surface},
           {"mesh", c.mesh_path.string()}, {"format", c.mesh_format}, {"pole", c.pole}, {"nu", c.nu},
           {"nv", c.nv},          {"atol", c.atol},       {"rtol", c.rtol},   {"solver_tol", c.solver_tol},
           {"strict", c.strict}};
    json params = json::object();
    for (const auto& [k, v] : c.surface_params) params[k] = v;
    j["surface_params"] = params;
    auto opt = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
    };
    opt("grid", c.grid);
    opt("capacity", c.capacity);
    opt("exit_time", c.exit_R);
    opt("rho", c.rho);
    opt("R", c.R);
    opt("t", c.t);
    opt("R0", c.R0);
    opt("tone_grid", c.tone_grid);
    return j;
}

struct Outputs {
    json results = json::object();
    std::optional<VerificationReport> report;
    std::optional<std::string> curves_csv;
    const TriMesh* mesh = nullptr;
};

void write_outputs(const RunConfig& cfg, const Outputs& o, const std::vector<std::string>& args, std::ostream& out) {
    if (!cfg.write) return;
    const std::filesystem::path dir = cfg.outdir / (cfg.run_name.empty() ? cfg.subcommand : cfg.run_name);
    std::filesystem::create_directories(dir);

    json report{{"config", config_json(cfg)}, {"results", o.results}};
    if (o.report) report["verification"] = to_json(*o.report);
    std::ofstream(dir / "report.json") << dump(report);
    if (o.curves_csv) std::ofstream(dir / "curves.csv") << *o.curves_csv;
    if (o.mesh) {
        std::ofstream off(dir / "mesh.off");
        write_off(*o.mesh, off);
    }
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream stamp;
    stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    json meta{{"timestamp", stamp.str()},
              {"argv", args},
              {"threads", cfg.threads},
              {"outdir", cfg.outdir.string()},
              {"run_name", cfg.run_name.empty() ? cfg.subcommand : cfg.run_name}};
    std::ofstream(dir / "meta.json") << dump(meta);
    out << "wrote " << dir.string() << '\n';
}

class Runner {
public:
    Runner(RunConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out) {
        opts_.quad.abs_tol = cfg_.atol;
        opts_.quad.rel_tol = cfg_.rtol;
        opts_.solver.rel_tol = cfg_.solver_tol;
        opts_.threads = cfg_.threads;
    }

    // Config validation: anything thrown here is a usage error.
    void prepare() {
        try {
            if (cfg_.dim < 2) throw UsageError("--dim must be at least 2");
            model_.emplace(cfg_.dim, Warping::from_text(cfg_.warp));
        } catch (const Error& e) {
            throw UsageError(std::string("model: ") + e.what());
        }
        if (!needs_mesh()) return;
        if (cfg_.pole.size() != 3) throw UsageError("--pole expects x,y,z");
        const Vec3 pole{cfg_.pole[0], cfg_.pole[1], cfg_.pole[2]};
        if (!cfg_.mesh_path.empty()) {
            if (!std::filesystem::exists(cfg_.mesh_path))
                throw UsageError("mesh file " + cfg_.mesh_path.string() + " does not exist");
            MeshFormat fmt{};
            try {
                fmt = parse_mesh_format(cfg_.mesh_format);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
            mesh_.emplace(load_mesh(cfg_.mesh_path, fmt, pole));
            return;
        }
        if (cfg_.surface.empty()) {
            if (cfg_.subcommand == "tone") return;  // model-only tone report
            throw UsageError("give --surface <name> or --mesh <file>");
        }
        ParamSurface s;
        try {
            s = builtin_surface(cfg_.surface, cfg_.surface_params);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        if (cfg_.nu < 8 || cfg_.nv < 8) throw UsageError("--res/--nu/--nv must be at least 8");
        std::vector<double> refine;
        mesh_.emplace(tessellate(s, cfg_.nu, cfg_.nv, refine, pole));
    }

    Outputs execute() {
        Outputs o = dispatch();
        if (mesh_) o.mesh = &*mesh_;
        return o;
    }

private:
    Outputs dispatch() {
        const std::string& sub = cfg_.subcommand;
        if (sub == "model") return model();
        if (sub == "surface") return surface();
        if (sub == "quotients") return quotients();
        if (sub == "capacity") return capacity();
        if (sub == "exit-time") return exit_time();
        if (sub == "ends") return ends();
        if (sub == "tone") return tone();
        return verify();
    }

    bool needs_mesh() const { return cfg_.subcommand != "model"; }

    const TriMesh& mesh() const { return *mesh_; }
    const ModelSpace& model_space() const { return *model_; }

    double window() const { return mesh().min_truncation_radius(); }

    RadiusGrid default_curve_grid() const {
        const double rt = std::isfinite(window()) ? window() : mesh().max_radius();
        // below a few edge lengths the discrete disc is too coarse to compare
        const double lo = std::min(std::max(rt / 20.0, 8.0 * typical_edge_length(mesh())), 0.45 * rt);
        return RadiusGrid::linspace(lo, 0.9 * rt, 18);
    }

    Outputs model() {
        const ModelSpace& m = model_space();
        Outputs o;
        const double top = std::isfinite(m.warp().domain_bound()) ? 0.99 * m.warp().domain_bound() : 5.0;
        const RadiusGrid grid = grid_or(cfg_.grid, RadiusGrid::linspace(top / 50.0, top, 50));
        std::ostringstream csv;
        write_model_csv(m, grid, csv, opts_.quad);
        o.curves_csv = csv.str();

        o.results["model"] = m.describe();
        o.results["balance"] = to_json(m.balance_check(grid, opts_.quad));
        out_ << m.describe() << '\n';
        if (cfg_.capacity) {
            const auto [rho, R] = parse_pair(*cfg_.capacity, "--capacity");
            const double cap = m.capacity(rho, R, opts_.quad);
            o.results["capacity"] = {{"rho", rho}, {"R", R}, {"value", cap}};
            out_ << "capacity(" << rho << ", " << R << ") = " << std::setprecision(10) << cap << '\n'
                 << std::setprecision(6);
        }
        if (cfg_.exit_R) {
            const double e = m.mean_exit_time(*cfg_.exit_R, 0.0, opts_.quad);
            o.results["exit_time"] = {{"R", *cfg_.exit_R}, {"center", e}};
            out_ << "mean exit time E_R(0), R = " << *cfg_.exit_R << ": " << std::setprecision(10) << e << '\n'
                 << std::setprecision(6);
        }
        if (!std::isfinite(m.warp().domain_bound())) {
            const RadiusGrid lim = default_limit_grid();
            const auto par = m.parabolicity(opts_.quad);
            const auto tone = m.tone_upper_limit(lim, opts_.quad);
            const auto cheeger = m.cheeger_bound(lim, opts_.quad);
            const auto cw = m.ends_coefficient(lim, opts_.quad);
            o.results["parabolicity"] = to_json(par);
            o.results["tone_limit"] = to_json(tone);
            o.results["cheeger"] = to_json(cheeger);
            o.results["C_w"] = to_json(cw);
            out_ << "parabolicity: " << to_string(par.verdict) << '\n'
                 << "tone limit: " << tone.reported << (tone.divergent ? " (divergent)" : "") << '\n'
                 << "L: " << cheeger.L << ", Cheeger lower bound 1/(4L^2): " << cheeger.lower_bound << '\n'
                 << "C_w: " << cw.reported << (cw.divergent ? " (divergent)" : "") << '\n';
        }
        return o;
    }

    Outputs surface() {
        Outputs o;
        const double residual = minimality_residual(mesh());
        o.results["pole"] = cfg_.pole;
        o.results["max_radius"] = mesh().max_radius();
        o.results["min_truncation_radius"] = number_json(window());
        o.results["minimality_residual"] = residual;
        o.results["vertices"] = mesh().vertex_count();
        o.results["faces"] = mesh().face_count();
        o.results["label"] = mesh().label;
        out_ << mesh().label << ": " << mesh().vertex_count() << " vertices, " << mesh().face_count()
             << " faces, max r " << mesh().max_radius() << ", window " << window() << ", residual " << residual
             << '\n';
        return o;
    }

    Outputs quotients() {
        Outputs o;
        const QuotientCurve curve = quotient_curves(mesh(), model_space(), grid_or(cfg_.grid, default_curve_grid()), opts_);
        std::ostringstream csv;
        write_curve_csv(curve, csv);
        o.curves_csv = csv.str();
        o.results["curve"] = to_json(curve);
        VerificationReport rep;
        rep.append(verify_isoperimetric(curve, opts_));
        rep.append(verify_flux_eq_volume(curve, opts_));
        rep.checks.push_back(volume_flux_tail(curve, opts_));
        o.report = std::move(rep);
        return o;
    }

    std::pair<double, double> annulus() const {
        const double rho = cfg_.rho.value_or(1.0);
        const double R = cfg_.R.value_or(std::isfinite(window()) ? std::min(0.5 * window(), 4.0 * rho) : 4.0 * rho);
        if (!(rho > 0.0) || !(rho < R)) throw UsageError("need 0 < --rho < --R");
        return {rho, R};
    }

    Outputs capacity() {
        Outputs o;
        const auto [rho, R] = annulus();
        const CapacityResult cap = capacity_discrete(clip(mesh(), rho, R), TruncationPolicy::Error, opts_.solver);
        o.results["capacity"] = to_json(cap);
        o.results["model_capacity"] = model_space().capacity(rho, R, opts_.quad);
        out_ << "capacity(" << rho << ", " << R << ") = " << std::setprecision(10) << cap.capacity << " (model "
             << model_space().capacity(rho, R, opts_.quad) << ")\n" << std::setprecision(6);
        VerificationReport rep;
        rep.append(verify_capacity_sandwich(mesh(), model_space(), rho, R, opts_));
        rep.append(verify_euclidean_sandwich(mesh(), rho, R, opts_));
        o.report = std::move(rep);
        return o;
    }

    Outputs exit_time() {
        Outputs o;
        const double R = cfg_.R.value_or(std::isfinite(window()) ? 0.5 * window() : 1.0);
        VerificationReport rep;
        rep.append(exit_time_comparison(mesh(), model_space(), R, opts_));
        o.results["R"] = R;
        o.report = std::move(rep);
        return o;
    }

    std::pair<double, double> ends_radii() const {
        const double t = cfg_.t.value_or(0.9 * window());
        const double R = cfg_.R.value_or(t / 10.0);
        if (!(R > 0.0) || !(t > R)) throw UsageError("need 0 < --R < --t for the ends bound");
        return {R, t};
    }

    Outputs ends() {
        Outputs o;
        const auto [R, t] = ends_radii();
        const EndsReport e = ends_bound(mesh(), model_space(), R, t, opts_);
        o.results["ends"] = to_json(e);
        out_ << "ends with respect to D_" << R << ": " << e.ends.count << ", bound " << e.bound << '\n';
        VerificationReport rep;
        rep.append(e.checks);
        o.report = std::move(rep);
        return o;
    }

    Outputs tone() {
        Outputs o;
        const bool with_mesh = mesh_.has_value();
        const double R0 = cfg_.R0.value_or(1.0);
        RadiusGrid grid;
        if (with_mesh) grid = grid_or(cfg_.grid, RadiusGrid::linspace(R0 + 1.0, std::min(0.5 * window(), R0 + 5.0), 4));
        const ToneReport t = tone_report(with_mesh ? &*mesh_ : nullptr, model_space(), R0, grid, opts_);
        o.results["tone"] = to_json(t);
        out_ << "tone bounds: " << t.lower << " <= lambda* <= " << t.upper << '\n';
        if (!t.lambda.empty()) {
            std::ostringstream csv;
            csv << "R [length],lambda1 [1/length^2]\n" << std::setprecision(17);
            for (std::size_t i = 0; i < t.lambda.size(); ++i) csv << t.radii[i] << ',' << t.lambda[i] << '\n';
            o.curves_csv = csv.str();
        }
        VerificationReport rep;
        rep.append(t.checks);
        o.report = std::move(rep);
        return o;
    }

    Outputs verify() {
        Outputs o;
        SuiteConfig sc;
        sc.grid = grid_or(cfg_.grid, default_curve_grid());
        const auto [rho, R] = annulus();
        sc.rho = rho;
        sc.R = R;
        sc.ends_t = cfg_.t.value_or(0.9 * window());
        sc.ends_R = rho;
        if (!(sc.ends_t > sc.ends_R)) throw UsageError("need --t > --rho for the ends bound");
        sc.R0 = cfg_.R0.value_or(rho);
        sc.tone_grid = grid_or(cfg_.tone_grid, RadiusGrid::linspace(0.5 * (rho + R), R, 3));
        const SuiteResult s = run_suite(mesh(), model_space(), sc, opts_);
        std::ostringstream csv;
        write_curve_csv(s.curve, csv);
        o.curves_csv = csv.str();
        o.results["curve"] = to_json(s.curve);
        o.results["ends"] = to_json(s.ends);
        o.results["tone"] = to_json(s.tone);
        o.report = s.report;
        return o;
    }

    RunConfig cfg_;
    std::ostream& out_;
    HarnessOptions opts_;
    std::optional<ModelSpace> model_;
    std::optional<TriMesh> mesh_;
};

void add_common(CLI::App* sub, RunConfig& cfg, std::optional<std::string>& model_spec,
                std::map<std::string, std::optional<double>>& params, std::optional<int>& res) {
    sub->add_option("--dim", cfg.dim, "model dimension m");
    sub->add_option("--warp", cfg.warp, "warping function in r, or b=<curvature>");
    sub->add_option("--model", model_spec, "model as dim=<m>,warp=<expr>");
    sub->add_option("--surface", cfg.surface, "builtin surface: plane, catenoid, helicoid, enneper");
    for (const char* p : {"a", "c", "extent", "vmax", "umax"})
        sub->add_option(std::string("--") + p, params[p], std::string("surface parameter ") + p);
    sub->add_option("--res", res, "grid resolution (sets --nu and --nv)");
    sub->add_option("--nu", cfg.nu, "grid resolution along u");
    sub->add_option("--nv", cfg.nv, "grid resolution along v");
    sub->add_option("--mesh", cfg.mesh_path, "OFF or OBJ mesh file");
    sub->add_option("--format", cfg.mesh_format, "mesh format: auto, off, obj");
    sub->add_option("--pole", cfg.pole, "pole x,y,z")->delimiter(',')->expected(3);
    sub->add_option("--grid", cfg.grid, "radius grid a:b:n");
    sub->add_option("--rho", cfg.rho, "inner radius");
    sub->add_option("--R", cfg.R, "outer radius");
    sub->add_option("--t", cfg.t, "ends bound radius t > R");
    sub->add_option("--R0", cfg.R0, "end decomposition radius");
    sub->add_option("--tone-grid", cfg.tone_grid, "radii for the discrete eigenvalue trend, a:b:n");
    sub->add_option("--capacity", cfg.capacity, "model capacity of the annulus rho:R");
    sub->add_option("--exit-time", cfg.exit_R, "model mean exit time E_R(0) for this R");
    sub->add_option("--atol", cfg.atol, "quadrature absolute tolerance");
    sub->add_option("--rtol", cfg.rtol, "quadrature relative tolerance");
    sub->add_option("--solver-tol", cfg.solver_tol, "conjugate gradient relative residual");
    sub->add_option("--outdir", cfg.outdir, "output directory")->envname("WARPGEOM_OUTDIR");
    sub->add_option("--run-name", cfg.run_name, "subdirectory of --outdir (default: subcommand)");
    sub->add_option("--threads", cfg.threads, "thread budget (0: all cores)")->envname("WARPGEOM_THREADS");
    sub->add_flag("--strict", cfg.strict, "inconclusive checks fail the run");
    sub->add_flag("!--no-write", cfg.write, "print only, write no files");
    sub->add_option("--config", "JSON config file; flags override its values");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    try {
        args = merged_args(argc, argv);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    RunConfig cfg;
    std::optional<std::string> model_spec;
    std::map<std::string, std::optional<double>> params;
    std::optional<int> res;

    CLI::App app{"Comparison-geometry quantities of model spaces and checks on minimal surfaces", "warpgeom"};
    app.require_subcommand(1, 1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::map<std::string, std::string> help = {
        {"model", "model-space profile and scalar results"},
        {"surface", "build a builtin surface mesh and write it as OFF"},
        {"quotients", "volume and flux quotient curves"},
        {"capacity", "discrete capacity of an extrinsic annulus and the sandwich checks"},
        {"exit-time", "discrete mean exit time against the model"},
        {"ends", "end count against the ends bound"},
        {"tone", "fundamental tone bounds"},
        {"verify", "the full suite of checks"}};
    for (const char* name : kSubcommands) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        add_common(sub, cfg, model_spec, params, res);
        sub->callback([&cfg, name] { cfg.subcommand = name; });
    }

    std::vector<const char*> cargv;
    for (const auto& a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (model_spec) apply_model_spec(*model_spec, cfg);
        for (const auto& [k, v] : params)
            if (v) cfg.surface_params[k] = *v;
        if (res) cfg.nu = cfg.nv = *res;
        // The catenoid's neck sits at r = a, so the generic annulus would
        // start on it; use the annulus of the figure instead.
        if (cfg.surface == "catenoid") {
            const double a = cfg.surface_params.count("a") ? cfg.surface_params.at("a") : 1.0;
            if (!cfg.rho) cfg.rho = 1.5 * a;
            if (!cfg.R) cfg.R = 6.0 * a;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    Runner runner(cfg, out);
    try {
        runner.prepare();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kComputation;
    }

    Outputs outputs;
    try {
        outputs = runner.execute();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "computation failed: " << e.what() << '\n';
        return kComputation;
    }

    if (outputs.report) print_checks(*outputs.report, out);
    try {
        write_outputs(cfg, outputs, args, out);
    } catch (const std::exception& e) {
        err << "cannot write outputs: " << e.what() << '\n';
        return kComputation;
    }
    if (outputs.report && outputs.report->failed(cfg.strict)) return kChecksFailed;
    return kOk;
}

}  // namespace warpgeom::cli
