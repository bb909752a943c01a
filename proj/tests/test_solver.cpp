#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ghostfd/domains.hpp"
#include "ghostfd/solver.hpp"

using namespace ghostfd;

namespace {

SparseSystem diagonal(const std::vector<double>& d, const std::vector<double>& b) {
    SparseSystem sys;
    sys.dim = int(d.size());
    for (int k = 0; k < sys.dim; ++k) sys.entries.push_back({k, k, d[k]});
    sys.rhs = b;
    sys.row_kind.assign(sys.dim, RowKind::InteriorStar);
    return sys;
}

ProblemData data_from(const ManufacturedSolution& sol) {
    ProblemData d;
    d.f = sol.f;
    d.g_dirichlet = sol.u;
    d.g_neumann = [sol](double x, double y, double nx, double ny) {
        const Gradient2 g = sol.grad_u(x, y);
        return nx * g.dx + ny * g.dy;
    };
    return d;
}

AssemblyResult assemble_domain(Method method, const DomainSpec& dom, int n) {
    const GridSpec spec(n);
    const GridField phi = sample_levelset(dom, spec);
    const AnalyticLevelSet ls{[&dom](double x, double y) { return dom.phi(x, y); },
                              [&dom](double x, double y) { return dom.grad_phi(x, y); }};
    return assemble(method, phi, data_from(ManufacturedSolution::sin_product()),
                    default_bc_rule(), SourceMode::Extrapolate, ClosureMode::Extend, &ls,
                    ExecPolicy::Serial);
}

}  // namespace

TEST_CASE("identity systems solve trivially with unit condition number") {
    const std::vector<double> b = {1.0, -2.0, 0.5, 7.0};
    const SparseSystem sys = diagonal({1, 1, 1, 1}, b);
    const SolveReport rep = solve(sys);
    REQUIRE(rep.converged);
    for (int k = 0; k < 4; ++k) CHECK(rep.solution[k] == doctest::Approx(b[k]).epsilon(1e-14));
    CHECK(rep.residual_norm <= 1e-14);
    CHECK(condition_estimate(sys) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("diagonal systems expose the exact 1-norm condition number") {
    const SparseSystem sys = diagonal({1.0, 2.0, 5.0, 10.0}, {1, 1, 1, 1});
    CHECK(condition_estimate(sys) == doctest::Approx(10.0).epsilon(1e-8));
    const SolveReport rep = solve(sys);
    CHECK(rep.solution[3] == doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("condition estimates are invariant under global row scaling") {
    SparseSystem sys = diagonal({3.0, 6.0, 30.0}, {1, 1, 1});
    const double base = condition_estimate(sys);
    for (Triplet& t : sys.entries) t.value *= 1e6;
    CHECK(condition_estimate(sys) == doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("singular systems throw instead of returning garbage") {
    SparseSystem sys = diagonal({1.0, 0.0}, {1, 1});
    CHECK_THROWS(solve(sys));
}

TEST_CASE("the estimator tracks the dense 1-norm condition number") {
    // Dense oracle: kappa_1 = ||A||_1 ||A^-1||_1 computed outright at N = 20.
    const AssemblyResult res = assemble_domain(Method::M2, DomainSpec::circle(), 20);
    const int n = res.system.dim;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (const Triplet& t : res.system.entries) A(t.row, t.col) += t.value;
    const double norm_a = A.cwiseAbs().colwise().sum().maxCoeff();
    const Eigen::MatrixXd inv = A.partialPivLu().inverse();
    const double norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();
    const double dense = norm_a * norm_inv;

    const double est = condition_estimate(res.system);
    CHECK(est <= 3.0 * dense);
    CHECK(est >= dense / 3.0);
}

TEST_CASE("manufactured problems are recovered from their own right-hand side") {
    // Solve A u = A u* with u* the sampled truth: isolates the linear algebra
    // from the discretization error.
    for (Method method : {Method::M2, Method::M3}) {
        for (int n : {20, 40, 80}) {
            const AssemblyResult res = assemble_domain(method, DomainSpec::circle(), n);
            const GridSpec spec(n);
            std::vector<double> ustar(res.system.dim, 0.0);
            const ManufacturedSolution sol = ManufacturedSolution::sin_product();
            for (int k : res.cls.active_nodes())
                ustar[k] = sol.u(spec.x(k % (n + 1)), spec.y(k / (n + 1)));
            SparseSystem sys = res.system;
            std::vector<double> b(sys.dim, 0.0);
            for (const Triplet& t : sys.entries) b[t.row] += t.value * ustar[t.col];
            sys.rhs = b;
            const SolveReport rep = solve(sys);
            REQUIRE(rep.converged);
            double emax = 0.0;
            for (int k : res.cls.internal_nodes())
                emax = std::max(emax, std::abs(rep.solution[k] - ustar[k]));
            CHECK(emax <= 1e-9);
        }
    }
}

TEST_CASE("direct solves of assembled systems reach the residual tolerance") {
    const AssemblyResult res = assemble_domain(Method::M3, DomainSpec::circle(), 20);
    const SolveReport rep = solve(res.system);
    CHECK(rep.converged);
    CHECK(rep.residual_norm <= 1e-12);
    CHECK(rep.iterations == 0);  // direct path
}

TEST_CASE("the iterative path agrees with the direct path") {
    const AssemblyResult res = assemble_domain(Method::M3, DomainSpec::circle(), 20);
    const SolveReport direct = solve(res.system);
    SolverOptions opt;
    opt.iterative = true;
    opt.tol = 1e-11;
    const SolveReport iter = solve(res.system, opt);
    REQUIRE(iter.converged);
    CHECK(iter.iterations > 0);
    double dmax = 0.0;
    for (int k = 0; k < res.system.dim; ++k)
        dmax = std::max(dmax, std::abs(direct.solution[k] - iter.solution[k]));
    CHECK(dmax <= 1e-7);
}
