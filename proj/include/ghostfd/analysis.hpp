#pragma once

#include <iosfwd>

#include "ghostfd/domains.hpp"
#include "ghostfd/solver.hpp"

namespace ghostfd {

enum class NormP { L1, LInf };

struct VectorField {
    GridField x, y;
};

/// Fourth-order gradient on every internal node: centered 5-point formula where
/// both axis neighbors at distances 1 and 2 are valid, otherwise the shifted
/// 5-point formula with derivative weights at the matching integer offset.
VectorField gradient_field(const GridField& u, const Classification& cls);

/// Relative discrete p-norm error over the given node set.
double relative_error(const GridField& u_h, const std::function<double(double, double)>& exact,
                      const std::vector<int>& nodes, NormP p);

/// Gradient variant: pointwise vector modulus before norming, internal nodes.
double relative_gradient_error(const VectorField& g_h,
                               const std::function<Gradient2(double, double)>& exact,
                               const std::vector<int>& nodes, NormP p);

/// Least-squares slope of log e against log h, h = 2/N. Needs >= 3 levels.
double fit_order(const std::vector<std::pair<int, double>>& error_vs_n);

struct StudyRow {
    int n = 0;
    double h = 0.0;
    double e1_u = 0.0, einf_u = 0.0;
    double e1_grad = 0.0, einf_grad = 0.0;
    double cond_est = 0.0;
    double solve_ms = 0.0;
    double layer2_small_c0_fraction = 0.0;  // Method 2 conditioning diagnostic
    bool ok = false;
    std::string message;
};

struct ConvergenceReport {
    Method method = Method::M1;
    std::string domain_name;
    std::string u_exa_name;
    std::vector<StudyRow> rows;
    // fitted orders; NaN when fewer than 3 usable levels
    double order_e1_u = 0.0, order_einf_u = 0.0;
    double order_e1_grad = 0.0, order_einf_grad = 0.0;
    double cond_slope = 0.0;  // log-log slope of kappa vs N

    bool all_ok() const;
};

struct StudyConfig {
    Method method = Method::M3;
    DomainSpec domain = DomainSpec::circle();
    ManufacturedSolution solution = ManufacturedSolution::sin_product();
    std::vector<int> n_values{20, 40, 80, 160};
    SolverOptions solver;
    SourceMode source_mode = SourceMode::Extrapolate;
    ClosureMode closure = ClosureMode::Extend;
    bool estimate_condition = true;
    ExecPolicy policy = ExecPolicy::Parallel;
};

/// Full per-N pipeline: sample phi, manufacture data, assemble, solve, measure.
/// Per-N failures are recorded in the report rather than thrown.
ConvergenceReport run_convergence_study(const StudyConfig& cfg);

/// CSV schema: method,domain,N,h,e1_u,einf_u,e1_grad,einf_grad,cond_est,solve_ms
/// plus a footer row carrying the fitted orders.
void write_csv(std::ostream& os, const ConvergenceReport& report);

struct CompareReport {
    std::vector<ConvergenceReport> reports;
    bool m3_below_m2 = false;      // Method 3 errors strictly below Method 2 at every N
    bool m3_m2_comparable = false; // both methods present and fully successful
    std::vector<Method> non_convergent;
};

CompareReport compare_reports(const std::vector<ConvergenceReport>& reports);
void write_compare_csv(std::ostream& os, const CompareReport& cmp);

}  // namespace ghostfd
