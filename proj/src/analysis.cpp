#include "ghostfd/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace ghostfd {

static const double kNaN = std::numeric_limits<double>::quiet_NaN();

static double axis_derivative(const GridField& u, const Classification& cls, int i, int j,
                              bool x_axis) {
    const GridSpec& spec = u.spec;
    auto valid = [&](int t, bool internal_only) {
        const int ii = x_axis ? i + t : i;
        const int jj = x_axis ? j : j + t;
        if (!spec.contains(ii, jj)) return false;
        const NodeClass c = cls.at(ii, jj);
        return internal_only ? c == NodeClass::Internal : is_active(c);
    };
    auto valid5 = [&](int s, bool internal_only) {
        for (int t = -2 + s; t <= 2 + s; ++t)
            if (!valid(t, internal_only)) return false;
        return true;
    };
    // shift away from the nearer boundary when the centered stencil is blocked
    int pref = -1;
    if (!valid(2, false))
        pref = -1;
    else if (!valid(-2, false))
        pref = 1;

    // Ghost values solve boundary interpolation equations and carry larger
    // errors than internal values, so stencils built from internal nodes only
    // are preferred; ghost-including stencils are the thin-region fallback.
    int chosen = 100;
    for (bool internal_only : {true, false}) {
        for (int a = 0; a <= 3 && chosen == 100; ++a) {
            for (int sgn : {pref, -pref}) {
                const int s = sgn * a;
                if (valid5(s, internal_only)) {
                    chosen = s;
                    break;
                }
                if (a == 0) break;
            }
        }
        if (chosen != 100) break;
    }
    if (chosen == 100)
        throw std::runtime_error("gradient_field: no valid 5-point stencil within shift 3 at (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");

    const auto w = quartic_derivative_weights(2.0 - chosen).c;
    double sum = 0.0;
    for (int p = 0; p < 5; ++p) {
        const int t = -2 + chosen + p;
        sum += w[p] * (x_axis ? u(i + t, j) : u(i, j + t));
    }
    return sum / spec.h;
}

VectorField gradient_field(const GridField& u, const Classification& cls) {
    const GridSpec& spec = u.spec;
    VectorField g{GridField(spec, kNaN), GridField(spec, kNaN)};
    const int na = spec.nodes_per_axis();
    for (int k = 0; k < spec.num_nodes(); ++k) {
        if (cls.labels[k] != NodeClass::Internal) continue;
        const int i = k % na, j = k / na;
        g.x.values[k] = axis_derivative(u, cls, i, j, true);
        g.y.values[k] = axis_derivative(u, cls, i, j, false);
    }
    return g;
}

double relative_error(const GridField& u_h, const std::function<double(double, double)>& exact,
                      const std::vector<int>& nodes, NormP p) {
    const GridSpec& spec = u_h.spec;
    const int na = spec.nodes_per_axis();
    double num = 0.0, den = 0.0;
    for (int k : nodes) {
        const double e = exact(spec.x(k % na), spec.y(k / na));
        const double d = std::abs(u_h.values[k] - e);
        if (p == NormP::L1) {
            num += d;
            den += std::abs(e);
        } else {
            num = std::max(num, d);
            den = std::max(den, std::abs(e));
        }
    }
    if (!(den > 0.0)) throw std::runtime_error("relative_error: zero denominator");
    return num / den;
}

double relative_gradient_error(const VectorField& g_h,
                               const std::function<Gradient2(double, double)>& exact,
                               const std::vector<int>& nodes, NormP p) {
    const GridSpec& spec = g_h.x.spec;
    const int na = spec.nodes_per_axis();
    double num = 0.0, den = 0.0;
    for (int k : nodes) {
        const Gradient2 e = exact(spec.x(k % na), spec.y(k / na));
        const double d = std::hypot(g_h.x.values[k] - e.dx, g_h.y.values[k] - e.dy);
        const double m = std::hypot(e.dx, e.dy);
        if (p == NormP::L1) {
            num += d;
            den += m;
        } else {
            num = std::max(num, d);
            den = std::max(den, m);
        }
    }
    if (!(den > 0.0)) throw std::runtime_error("relative_gradient_error: zero denominator");
    return num / den;
}

static double lsq_slope(const std::vector<std::pair<double, double>>& xy) {
    const double n = static_cast<double>(xy.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double fit_order(const std::vector<std::pair<int, double>>& error_vs_n) {
    if (error_vs_n.size() < 3)
        throw std::invalid_argument("fit_order: need at least 3 grid levels");
    std::vector<std::pair<double, double>> xy;
    for (auto [n, e] : error_vs_n) {
        if (!(e > 0.0) || !std::isfinite(e))
            throw std::invalid_argument("fit_order: errors must be positive and finite");
        xy.emplace_back(std::log(2.0 / n), std::log(e));
    }
    return lsq_slope(xy);
}

bool ConvergenceReport::all_ok() const {
    if (rows.empty()) return false;
    for (const StudyRow& r : rows)
        if (!r.ok) return false;
    return true;
}

static double fit_column(const ConvergenceReport& rep, double StudyRow::* col) {
    std::vector<std::pair<int, double>> pts;
    for (const StudyRow& r : rep.rows)
        if (r.ok && std::isfinite(r.*col) && r.*col > 0.0) pts.emplace_back(r.n, r.*col);
    if (pts.size() < 3) return kNaN;
    return fit_order(pts);
}

ConvergenceReport run_convergence_study(const StudyConfig& cfg) {
    if (cfg.n_values.empty())
        throw std::invalid_argument("run_convergence_study: empty N list");
    if (!std::is_sorted(cfg.n_values.begin(), cfg.n_values.end()) ||
        std::adjacent_find(cfg.n_values.begin(), cfg.n_values.end()) != cfg.n_values.end())
        throw std::invalid_argument("run_convergence_study: N list must be strictly increasing");
    if (!cfg.domain.analytic())
        throw std::invalid_argument("run_convergence_study: convergence studies need an analytic domain");

    ConvergenceReport rep;
    rep.method = cfg.method;
    rep.domain_name = cfg.domain.name();
    rep.u_exa_name = cfg.solution.name;

    const ProblemData data{
        cfg.solution.f,
        cfg.solution.u,
        [&cfg](double x, double y, double nx, double ny) {
            const Gradient2 g = cfg.solution.grad_u(x, y);
            return g.dx * nx + g.dy * ny;
        }};

    for (int n : cfg.n_values) {
        StudyRow row;
        row.n = n;
        row.h = 2.0 / n;
        row.cond_est = kNaN;
        row.e1_u = row.einf_u = row.e1_grad = row.einf_grad = kNaN;
        try {
            const GridSpec spec(n);
            const GridField phi = sample_levelset(cfg.domain, spec);

            const AnalyticLevelSet ls{
                [&cfg](double x, double y) { return cfg.domain.phi(x, y); },
                [&cfg](double x, double y) { return cfg.domain.grad_phi(x, y); }};

            const auto t0 = std::chrono::steady_clock::now();
            const AssemblyResult asmres = assemble(cfg.method, phi, data, default_bc_rule(),
                                                   cfg.source_mode, cfg.closure, &ls, cfg.policy);

            // the manufactured log solution must stay in its domain of definition
            if (cfg.solution.name == "log-product") {
                const int na = spec.nodes_per_axis();
                for (int k : asmres.cls.active_nodes())
                    if (1.0 + 3.0 * spec.x(k % na) * spec.y(k / na) <= 0.0)
                        throw std::runtime_error("log(1+3xy) undefined on an active node");
            }

            const SolveReport sol = solve(asmres.system, cfg.solver);
            const auto t1 = std::chrono::steady_clock::now();
            row.solve_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

            GridField u(spec);
            u.values = sol.solution;
            const std::vector<int> active = asmres.cls.active_nodes();
            const std::vector<int> internal = asmres.cls.internal_nodes();
            row.e1_u = relative_error(u, cfg.solution.u, active, NormP::L1);
            row.einf_u = relative_error(u, cfg.solution.u, active, NormP::LInf);
            const VectorField grad = gradient_field(u, asmres.cls);
            row.e1_grad = relative_gradient_error(grad, cfg.solution.grad_u, internal, NormP::L1);
            row.einf_grad = relative_gradient_error(grad, cfg.solution.grad_u, internal, NormP::LInf);

            if (cfg.estimate_condition) row.cond_est = condition_estimate(asmres.system);

            int layer2 = 0, layer2_small = 0;
            for (const GhostRecord& g : asmres.ghosts) {
                if (g.layer != NodeClass::GhostStar2) continue;
                ++layer2;
                const double c0x = quartic_value_weights(g.theta_x).c[0];
                const double c0y = quartic_value_weights(g.theta_y).c[0];
                if (std::min(std::abs(c0x), std::abs(c0y)) < 1e-3) ++layer2_small;
            }
            row.layer2_small_c0_fraction = layer2 > 0 ? double(layer2_small) / layer2 : 0.0;

            row.ok = true;
            if (!sol.converged) row.message = sol.message;  // finding, not a failure
        } catch (const std::exception& e) {
            row.ok = false;
            row.message = e.what();
        }
        rep.rows.push_back(row);
    }

    rep.order_e1_u = fit_column(rep, &StudyRow::e1_u);
    rep.order_einf_u = fit_column(rep, &StudyRow::einf_u);
    rep.order_e1_grad = fit_column(rep, &StudyRow::e1_grad);
    rep.order_einf_grad = fit_column(rep, &StudyRow::einf_grad);

    std::vector<std::pair<double, double>> kn;
    for (const StudyRow& r : rep.rows)
        if (r.ok && std::isfinite(r.cond_est) && r.cond_est > 0.0)
            kn.emplace_back(std::log(double(r.n)), std::log(r.cond_est));
    rep.cond_slope = kn.size() >= 3 ? lsq_slope(kn) : kNaN;
    return rep;
}

static std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const ConvergenceReport& rep) {
    os << "method,domain,N,h,e1_u,einf_u,e1_grad,einf_grad,cond_est,solve_ms\n";
    for (const StudyRow& r : rep.rows) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.solve_ms);
        os << to_string(rep.method) << ',' << rep.domain_name << ',' << r.n << ',' << g17(r.h)
           << ',' << g17(r.e1_u) << ',' << g17(r.einf_u) << ',' << g17(r.e1_grad) << ','
           << g17(r.einf_grad) << ',' << g17(r.cond_est) << ',' << ms << '\n';
    }
    os << to_string(rep.method) << ',' << rep.domain_name << ",order,," << g17(rep.order_e1_u)
       << ',' << g17(rep.order_einf_u) << ',' << g17(rep.order_e1_grad) << ','
       << g17(rep.order_einf_grad) << ',' << g17(rep.cond_slope) << ",\n";
    for (const StudyRow& r : rep.rows)
        if (!r.message.empty())
            os << "# N=" << r.n << (r.ok ? " note: " : " failed: ") << r.message << '\n';
}

CompareReport compare_reports(const std::vector<ConvergenceReport>& reports) {
    CompareReport cmp;
    cmp.reports = reports;
    const ConvergenceReport* m2 = nullptr;
    const ConvergenceReport* m3 = nullptr;
    for (const auto& r : reports) {
        if (r.method == Method::M2) m2 = &r;
        if (r.method == Method::M3) m3 = &r;

        bool nonconv = !r.all_ok() || !(r.order_e1_u >= 1.0);
        for (size_t t = 1; t + 0 < r.rows.size() && !nonconv; ++t)
            if (r.rows[t].ok && r.rows[t - 1].ok && r.rows[t].einf_u >= r.rows[t - 1].einf_u)
                nonconv = true;
        if (nonconv) cmp.non_convergent.push_back(r.method);
    }
    if (m2 && m3 && m2->all_ok() && m3->all_ok() && m2->rows.size() == m3->rows.size()) {
        cmp.m3_m2_comparable = true;
        cmp.m3_below_m2 = true;
        for (size_t t = 0; t < m2->rows.size(); ++t) {
            const StudyRow &a = m2->rows[t], &b = m3->rows[t];
            if (a.n != b.n || !(b.e1_u < a.e1_u) || !(b.einf_u < a.einf_u) ||
                !(b.e1_grad < a.e1_grad) || !(b.einf_grad < a.einf_grad))
                cmp.m3_below_m2 = false;
        }
    }
    return cmp;
}

void write_compare_csv(std::ostream& os, const CompareReport& cmp) {
    os << "domain,u_exa,N";
    for (const auto& r : cmp.reports)
        os << ',' << to_string(r.method) << "_e1_u," << to_string(r.method) << "_einf_u,"
           << to_string(r.method) << "_e1_grad," << to_string(r.method) << "_einf_grad,"
           << to_string(r.method) << "_cond";
    os << '\n';
    if (cmp.reports.empty()) return;
    const auto& first = cmp.reports.front();
    for (size_t t = 0; t < first.rows.size(); ++t) {
        os << first.domain_name << ',' << first.u_exa_name << ',' << first.rows[t].n;
        for (const auto& r : cmp.reports) {
            const StudyRow* row = t < r.rows.size() ? &r.rows[t] : nullptr;
            if (row && row->n == first.rows[t].n)
                os << ',' << g17(row->e1_u) << ',' << g17(row->einf_u) << ',' << g17(row->e1_grad)
                   << ',' << g17(row->einf_grad) << ',' << g17(row->cond_est);
            else
                os << ",,,,,";
        }
        os << '\n';
    }
    os << "# m3_below_m2," << (cmp.m3_m2_comparable ? (cmp.m3_below_m2 ? "true" : "false") : "n/a")
       << '\n';
    for (Method m : cmp.non_convergent) os << "# non_convergent," << to_string(m) << '\n';
}

}  // namespace ghostfd
