// Config-driven entry point: runs convergence studies over the embedded-domain
// Poisson solver and emits CSV reports, log-log SVG charts, matrix dumps, and
// ghost diagnostics. `compare` merges several runs into one table and checks
// the accuracy ordering of the methods.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ghostfd/analysis.hpp"
#include "ghostfd/assembly.hpp"
#include "ghostfd/domains.hpp"
#include "ghostfd/solver.hpp"
#include "ghostfd/svg.hpp"

using namespace ghostfd;

namespace {

struct RunConfig {
    std::string method = "M3";
    std::string domain = "circle";      // circle | flower | path to a level-set file
    std::string solution = "";          // sin-product | log-product (default by domain)
    std::vector<int> n_values{20, 40, 80, 160};
    double tol = 1e-12;
    bool iterative = false;
    std::string source = "extrapolate";  // extrapolate | analytic
    std::string closure = "extend";      // as-classified | extend | promote
    std::string outdir;
    bool emit_csv = true;
    bool emit_svg = false;
    bool emit_matrix = false;
    bool emit_ghost_diag = false;
    bool tolerate_failures = false;
    bool serial = false;
};

[[noreturn]] void config_error(const std::string& msg) {
    std::cerr << "config error: " << msg << "\n";
    std::exit(2);
}

Method parse_method(const std::string& s) {
    if (s == "M1" || s == "m1" || s == "1") return Method::M1;
    if (s == "M2" || s == "m2" || s == "2") return Method::M2;
    if (s == "M3" || s == "m3" || s == "3") return Method::M3;
    config_error("unknown method '" + s + "' (expected M1, M2 or M3)");
}

DomainSpec parse_domain(const std::string& s) {
    if (s == "circle") return DomainSpec::circle();
    if (s == "flower") return DomainSpec::flower();
    if (std::filesystem::exists(s)) return DomainSpec::from_file(s);
    config_error("unknown domain '" + s + "' (expected circle, flower, or a level-set file path)");
}

ManufacturedSolution parse_solution(const std::string& s, const std::string& domain) {
    if (s == "sin-product") return ManufacturedSolution::sin_product();
    if (s == "log-product") return ManufacturedSolution::log_product();
    if (s.empty())  // the pairing used throughout the study tables
        return domain == "flower" ? ManufacturedSolution::log_product()
                                  : ManufacturedSolution::sin_product();
    config_error("unknown solution '" + s + "' (expected sin-product or log-product)");
}

SourceMode parse_source(const std::string& s) {
    if (s == "extrapolate") return SourceMode::Extrapolate;
    if (s == "analytic") return SourceMode::Analytic;
    config_error("unknown source mode '" + s + "'");
}

ClosureMode parse_closure(const std::string& s) {
    if (s == "as-classified") return ClosureMode::AsClassified;
    if (s == "extend") return ClosureMode::Extend;
    if (s == "promote") return ClosureMode::Promote;
    config_error("unknown closure mode '" + s + "'");
}

// Key-value config file, one `key = value` per line, '#' comments. Keys mirror
// the long flags. Values already set on the command line win.
void load_config_file(const std::string& path, RunConfig& cfg,
                      const std::map<std::string, bool>& flag_seen) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    auto seen = [&](const std::string& key) {
        auto it = flag_seen.find(key);
        return it != flag_seen.end() && it->second;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (eq == std::string::npos)
            config_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (seen(key)) continue;  // command line overrides the file
        if (key == "method") cfg.method = val;
        else if (key == "domain") cfg.domain = val;
        else if (key == "solution") cfg.solution = val;
        else if (key == "Ns") {
            cfg.n_values.clear();
            std::stringstream ss(val);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) cfg.n_values.push_back(std::atoi(tok.c_str()));
        } else if (key == "tol") cfg.tol = std::atof(val.c_str());
        else if (key == "iterative") cfg.iterative = val == "true" || val == "1";
        else if (key == "source") cfg.source = val;
        else if (key == "closure") cfg.closure = val;
        else if (key == "outdir") cfg.outdir = val;
        else if (key == "csv") cfg.emit_csv = val == "true" || val == "1";
        else if (key == "svg") cfg.emit_svg = val == "true" || val == "1";
        else if (key == "matrix-dump") cfg.emit_matrix = val == "true" || val == "1";
        else if (key == "ghost-diag") cfg.emit_ghost_diag = val == "true" || val == "1";
        else if (key == "tolerate-failures") cfg.tolerate_failures = val == "true" || val == "1";
        else if (key == "serial") cfg.serial = val == "true" || val == "1";
        else config_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

std::string resolve_outdir(const RunConfig& cfg) {
    if (!cfg.outdir.empty()) return cfg.outdir;
    if (const char* env = std::getenv("GHOST_ELLIPTIC_OUTDIR"); env && *env) return env;
    return ".";
}

StudyConfig to_study_config(const RunConfig& cfg) {
    if (cfg.n_values.empty()) config_error("N list is empty");
    for (size_t k = 1; k < cfg.n_values.size(); ++k)
        if (cfg.n_values[k] <= cfg.n_values[k - 1])
            config_error("N list must be strictly increasing");
    for (int n : cfg.n_values)
        if (n < 8) config_error("N must be at least 8, got " + std::to_string(n));

    StudyConfig sc;
    sc.method = parse_method(cfg.method);
    sc.domain = parse_domain(cfg.domain);
    sc.solution = parse_solution(cfg.solution, cfg.domain);
    sc.n_values = cfg.n_values;
    sc.solver.tol = cfg.tol;
    sc.solver.iterative = cfg.iterative;
    sc.source_mode = parse_source(cfg.source);
    sc.closure = parse_closure(cfg.closure);
    sc.policy = cfg.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
    return sc;
}

std::string study_tag(const ConvergenceReport& rep) {
    std::string m = to_string(rep.method);
    for (char& c : m)
        if (c == ' ') c = '_';
    return m + "_" + rep.domain_name;
}

void emit_svg_charts(const std::filesystem::path& dir, const ConvergenceReport& rep) {
    std::vector<SvgSeries> err;
    SvgSeries e1u{"e1_u", "#1f77b4", {}}, einfu{"einf_u", "#ff7f0e", {}};
    SvgSeries e1g{"e1_grad", "#2ca02c", {}}, einfg{"einf_grad", "#d62728", {}};
    SvgSeries cond{"cond_est", "#9467bd", {}};
    for (const StudyRow& r : rep.rows) {
        if (!r.ok) continue;
        e1u.points.emplace_back(r.n, r.e1_u);
        einfu.points.emplace_back(r.n, r.einf_u);
        e1g.points.emplace_back(r.n, r.e1_grad);
        einfg.points.emplace_back(r.n, r.einf_grad);
        if (r.cond_est > 0.0 && std::isfinite(r.cond_est))
            cond.points.emplace_back(r.n, r.cond_est);
    }
    const std::string tag = study_tag(rep);
    write_loglog_svg((dir / (tag + "_errors.svg")).string(),
                     "relative errors, " + tag, {e1u, einfu, e1g, einfg}, {2.0, 4.0});
    if (!cond.points.empty())
        write_loglog_svg((dir / (tag + "_cond.svg")).string(), "condition estimate, " + tag,
                         {cond}, {-2.0});
}

void emit_diagnostics(const std::filesystem::path& dir, const RunConfig& cfg,
                      const StudyConfig& sc) {
    const ProblemData data{
        sc.solution.f, sc.solution.u,
        [&sc](double x, double y, double nx, double ny) {
            const Gradient2 g = sc.solution.grad_u(x, y);
            return g.dx * nx + g.dy * ny;
        }};
    for (int n : sc.n_values) {
        const GridSpec spec(n);
        const GridField phi = sample_levelset(sc.domain, spec);
        const AnalyticLevelSet ls{
            [&sc](double x, double y) { return sc.domain.phi(x, y); },
            [&sc](double x, double y) { return sc.domain.grad_phi(x, y); }};
        const AssemblyResult res =
            assemble(sc.method, phi, data, default_bc_rule(), sc.source_mode, sc.closure,
                     sc.domain.analytic() ? &ls : nullptr, sc.policy);
        const std::string base = study_tag({sc.method, sc.domain.name()}) + "_N" +
                                 std::to_string(n);
        if (cfg.emit_matrix) {
            std::ofstream ms(dir / (base + "_matrix.txt"));
            write_matrix_dump(ms, res.system);
            std::ofstream rs(dir / (base + "_rhs.txt"));
            write_rhs_dump(rs, res.system);
        }
        if (cfg.emit_ghost_diag) {
            std::ofstream gs(dir / (base + "_ghosts.csv"));
            gs << "i,j,layer,bc,sx,sy,rx,ry,theta_x,theta_y,bx,by,nx,ny\n";
            char buf[256];
            for (const GhostRecord& g : res.ghosts) {
                std::snprintf(buf, sizeof buf,
                              "%d,%d,%s,%s,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                              g.i, g.j, to_string(g.layer),
                              g.bc == BcKind::Dirichlet ? "dirichlet" : "neumann", g.sx, g.sy,
                              g.rx, g.ry, g.theta_x, g.theta_y, g.bx, g.by, g.nx, g.ny);
                gs << buf;
            }
        }
    }
}

int do_run(const RunConfig& cfg) {
    const StudyConfig sc = to_study_config(cfg);
    const std::filesystem::path dir = resolve_outdir(cfg);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    const ConvergenceReport rep = run_convergence_study(sc);

    if (cfg.emit_csv) {
        std::ofstream os(dir / (study_tag(rep) + ".csv"));
        write_csv(os, rep);
    }
    write_csv(std::cout, rep);
    if (cfg.emit_svg) emit_svg_charts(dir, rep);
    if (cfg.emit_matrix || cfg.emit_ghost_diag) emit_diagnostics(dir, cfg, sc);

    if (!rep.all_ok() && !cfg.tolerate_failures) {
        for (const StudyRow& r : rep.rows)
            if (!r.ok) std::cerr << "N=" << r.n << " failed: " << r.message << "\n";
        return 1;
    }
    return 0;
}

int do_compare(const std::vector<std::string>& config_paths, const RunConfig& overrides,
               const std::map<std::string, bool>& flag_seen) {
    if (config_paths.size() < 2) config_error("compare needs at least two config files");
    std::vector<ConvergenceReport> reports;
    std::string domain, solution;
    for (const std::string& path : config_paths) {
        RunConfig cfg = overrides;
        load_config_file(path, cfg, flag_seen);
        const StudyConfig sc = to_study_config(cfg);
        if (reports.empty()) {
            domain = sc.domain.name();
            solution = sc.solution.name;
        } else if (sc.domain.name() != domain || sc.solution.name != solution) {
            config_error("compare runs must share domain and solution (got " + sc.domain.name() +
                         "/" + sc.solution.name + " vs " + domain + "/" + solution + ")");
        }
        reports.push_back(run_convergence_study(sc));
    }
    const CompareReport cmp = compare_reports(reports);

    const std::filesystem::path dir = resolve_outdir(overrides);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    {
        std::ofstream os(dir / ("compare_" + domain + ".csv"));
        write_compare_csv(os, cmp);
    }
    write_compare_csv(std::cout, cmp);

    if (cmp.m3_m2_comparable)
        std::cout << "method 3 strictly more accurate than method 2 at every N: "
                  << (cmp.m3_below_m2 ? "yes" : "no") << "\n";
    for (Method m : cmp.non_convergent)
        std::cout << "non-convergent: " << to_string(m) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourth-order ghost-point Poisson solver on level-set domains"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::vector<std::string> compare_configs;
    std::map<std::string, bool> flag_seen;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--method", cfg.method, "M1, M2 or M3");
        cmd->add_option("--domain", cfg.domain, "circle, flower, or level-set file");
        cmd->add_option("--solution", cfg.solution, "sin-product or log-product");
        cmd->add_option("--Ns", cfg.n_values, "grid sizes, ascending")->delimiter(',');
        cmd->add_option("--tol", cfg.tol, "solver residual tolerance");
        cmd->add_flag("--iterative", cfg.iterative, "BiCGSTAB+ILUT instead of sparse LU");
        cmd->add_option("--source", cfg.source, "extrapolate or analytic");
        cmd->add_option("--closure", cfg.closure, "as-classified, extend or promote");
        cmd->add_option("--outdir", cfg.outdir,
                        "output directory (fallback: $GHOST_ELLIPTIC_OUTDIR, then .)");
        cmd->add_flag("--csv,!--no-csv", cfg.emit_csv, "write the per-run CSV");
        cmd->add_flag("--svg", cfg.emit_svg, "write log-log SVG charts");
        cmd->add_flag("--matrix-dump", cfg.emit_matrix, "dump matrices and right-hand sides");
        cmd->add_flag("--ghost-diag", cfg.emit_ghost_diag, "dump per-ghost diagnostics");
        cmd->add_flag("--tolerate-failures", cfg.tolerate_failures,
                      "exit 0 even when some N fail (Method 1 studies)");
        cmd->add_flag("--serial", cfg.serial, "disable OpenMP parallelism");
    };

    CLI::App* run = app.add_subcommand("run", "run one convergence study");
    add_common(run);
    run->add_option("--config", config_path, "key-value config file; flags override");

    CLI::App* compare = app.add_subcommand("compare", "run and merge several studies");
    add_common(compare);
    compare->add_option("configs", compare_configs, "config files, one per study")
        ->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    CLI::App* active = run->parsed() ? run : compare;
    for (const std::string& name :
         {"--method", "--domain", "--solution", "--Ns", "--tol", "--iterative", "--source",
          "--closure", "--outdir", "--csv", "--svg", "--matrix-dump", "--ghost-diag",
          "--tolerate-failures", "--serial"})
        if (const CLI::Option* o = active->get_option_no_throw(name); o && o->count() > 0)
            flag_seen[name.substr(2)] = true;

    try {
        if (run->parsed()) {
            if (!config_path.empty()) load_config_file(config_path, cfg, flag_seen);
            return do_run(cfg);
        }
        return do_compare(compare_configs, cfg, flag_seen);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
