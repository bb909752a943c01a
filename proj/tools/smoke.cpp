#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ghostfd/analysis.hpp"
#include "ghostfd/solver.hpp"

using namespace ghostfd;

static const char* cls_name(NodeClass c) {
    switch (c) {
        case NodeClass::Internal: return "int";
        case NodeClass::GhostStar1: return "g1 ";
        case NodeClass::GhostStar2: return "g2 ";
        case NodeClass::GhostBox: return "gb ";
        default: return "ina";
    }
}

static int run_matrix(ClosureMode closure) {
    for (Method m : {Method::M1, Method::M2, Method::M3})
        for (const char* dom : {"circle", "flower"}) {
            StudyConfig cfg;
            cfg.method = m;
            cfg.closure = closure;
            cfg.domain = dom[0] == 'c' ? DomainSpec::circle() : DomainSpec::flower();
            cfg.solution = dom[0] == 'c' ? ManufacturedSolution::sin_product()
                                         : ManufacturedSolution::log_product();
            cfg.n_values = {20, 40, 80, 160};
            auto rep = run_convergence_study(cfg);
            std::printf("== %s %s ==\n", to_string(m), dom);
            for (auto& r : rep.rows)
                std::printf("N=%3d ok=%d e1=%.3e einf=%.3e g1=%.3e ginf=%.3e k=%.3e %s\n", r.n,
                            (int)r.ok, r.e1_u, r.einf_u, r.e1_grad, r.einf_grad, r.cond_est,
                            r.message.c_str());
            std::printf("orders: %.2f %.2f %.2f %.2f cond slope %.2f\n", rep.order_e1_u,
                        rep.order_einf_u, rep.order_e1_grad, rep.order_einf_grad, rep.cond_slope);
        }
    return 0;
}

int main(int argc, char** argv) {
    auto closure_arg = [](const char* s) {
        if (!std::strcmp(s, "promote")) return ClosureMode::Promote;
        if (!std::strcmp(s, "pin")) return ClosureMode::AsClassified;
        return ClosureMode::Extend;
    };
    if (argc > 1 && !std::strcmp(argv[1], "matrix"))
        return run_matrix(argc > 2 ? closure_arg(argv[2]) : ClosureMode::Extend);
    Method m = Method::M2;
    if (argc > 1 && !std::strcmp(argv[1], "M1")) m = Method::M1;
    if (argc > 1 && !std::strcmp(argv[1], "M3")) m = Method::M3;
    const bool circle = argc <= 2 || !std::strcmp(argv[2], "circle");
    const int n = argc > 3 ? std::atoi(argv[3]) : 40;

    StudyConfig cfg;
    cfg.method = m;
    cfg.domain = circle ? DomainSpec::circle() : DomainSpec::flower();
    cfg.solution = circle ? ManufacturedSolution::sin_product() : ManufacturedSolution::log_product();

    const GridSpec spec(n);
    const int na = spec.nodes_per_axis();
    const GridField phi = sample_levelset(cfg.domain, spec);
    const ProblemData data{cfg.solution.f, cfg.solution.u,
                           [&cfg](double x, double y, double nx, double ny) {
                               const Gradient2 g = cfg.solution.grad_u(x, y);
                               return g.dx * nx + g.dy * ny;
                           }};
    const AnalyticLevelSet ls{[&cfg](double x, double y) { return cfg.domain.phi(x, y); },
                              [&cfg](double x, double y) { return cfg.domain.grad_phi(x, y); }};
    const ClosureMode closure = argc > 4 ? closure_arg(argv[4]) : ClosureMode::Extend;
    const AssemblyResult ar =
        assemble(m, phi, data, default_bc_rule(), SourceMode::Extrapolate, closure, &ls);

    // row defects of the exact solution (inactive nodes keep their pinned zero)
    std::vector<double> uex(spec.num_nodes(), 0.0);
    for (int k = 0; k < spec.num_nodes(); ++k)
        if (is_active(ar.cls.labels[k])) uex[k] = cfg.solution.u(spec.x(k % na), spec.y(k / na));
    std::vector<double> defect(spec.num_nodes(), 0.0);
    for (const Triplet& t : ar.system.entries) defect[t.row] += t.value * uex[t.col];
    for (int k = 0; k < spec.num_nodes(); ++k) defect[k] -= ar.system.rhs[k];
    // scale interior rows by h^2 so defects are comparable across row kinds
    for (int k = 0; k < spec.num_nodes(); ++k)
        if (ar.system.row_kind[k] == RowKind::InteriorStar ||
            ar.system.row_kind[k] == RowKind::InteriorBox)
            defect[k] *= spec.h * spec.h;

    std::vector<int> ghost_of(spec.num_nodes(), -1);
    for (int g = 0; g < (int)ar.ghosts.size(); ++g)
        ghost_of[linear_index(ar.ghosts[g].i, ar.ghosts[g].j, spec)] = g;

    std::vector<int> order(spec.num_nodes());
    for (int k = 0; k < spec.num_nodes(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(defect[a]) > std::abs(defect[b]); });
    std::printf("-- top row defects (interior scaled by h^2) --\n");
    for (int t = 0; t < 20; ++t) {
        const int k = order[t];
        const int i = k % na, j = k / na;
        std::printf("(%3d,%3d) %s defect=% .3e", i, j, cls_name(ar.cls.labels[k]), defect[k]);
        if (ghost_of[k] >= 0) {
            const GhostRecord& r = ar.ghosts[ghost_of[k]];
            int n_inactive = 0;
            for (int s : r.stencil)
                if (!is_active(ar.cls.labels[s])) ++n_inactive;
            std::printf("  dir=(%+d,%+d) r=(%d,%d) th=(%.3f,%.3f) B=(%.4f,%.4f) bc=%c inact=%d",
                        r.dirx, r.diry, r.rx, r.ry, r.theta_x, r.theta_y, r.bx, r.by,
                        r.bc == BcKind::Dirichlet ? 'D' : 'N', n_inactive);
        }
        std::printf("\n");
    }

    if (argc > 7 && !std::strcmp(argv[5], "row")) {
        const int ri = std::atoi(argv[6]), rj = std::atoi(argv[7]);
        const int rk = ri + rj * na;
        std::printf("row (%d,%d) kind=%d rhs=%.6e\n", ri, rj, (int)ar.system.row_kind[rk],
                    ar.system.rhs[rk]);
        for (const Triplet& t : ar.system.entries)
            if (t.row == rk)
                std::printf("  col (%3d,%3d) %s  %.6e\n", t.col % na, t.col / na,
                            cls_name(ar.cls.labels[t.col]), t.value);
        return 0;
    }
    if (argc > 9 && !std::strcmp(argv[5], "recs")) {
        const int ilo = std::atoi(argv[6]), ihi = std::atoi(argv[7]);
        const int jlo = std::atoi(argv[8]), jhi = std::atoi(argv[9]);
        for (const GhostRecord& r : ar.ghosts) {
            if (r.i < ilo || r.i > ihi || r.j < jlo || r.j > jhi) continue;
            int n_inactive = 0;
            for (int s : r.stencil)
                if (!is_active(ar.cls.labels[s])) ++n_inactive;
            const double c0 = quartic_value_weights(r.theta_x).c[0] *
                              quartic_value_weights(r.theta_y).c[0];
            std::printf(
                "(%3d,%3d) %s dir=(%+d,%+d) r=(%d,%d) th=(%.4f,%.4f) B=(%.4f,%.4f) bc=%c "
                "self=%.3e inact=%d\n",
                r.i, r.j, cls_name(r.layer), r.dirx, r.diry, r.rx, r.ry, r.theta_x, r.theta_y,
                r.bx, r.by, r.bc == BcKind::Dirichlet ? 'D' : 'N', c0, n_inactive);
            const int k = r.i + r.j * (ar.cls.spec.n + 1);
            if (ar.system.row_kind[k] == RowKind::ExternalExtrapolation)
                std::printf("          ^ value-closed\n");
        }
        return 0;
    }
    if (argc > 5 && !std::strcmp(argv[5], "smin")) {
        // sigma_min and its singular vectors via inverse power iteration on A^T A
        Eigen::SparseMatrix<double> A(ar.system.dim, ar.system.dim);
        {
            std::vector<Eigen::Triplet<double>> ts;
            ts.reserve(ar.system.entries.size());
            for (const Triplet& t : ar.system.entries) ts.emplace_back(t.row, t.col, t.value);
            A.setFromTriplets(ts.begin(), ts.end());
        }
        Eigen::SparseMatrix<double> At = A.transpose();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> luA, luAt;
        luA.compute(A);
        luAt.compute(At);
        if (luA.info() != Eigen::Success || luAt.info() != Eigen::Success) {
            std::printf("factorization failed\n");
            return 1;
        }
        Eigen::VectorXd v = Eigen::VectorXd::Ones(ar.system.dim).normalized();
        double smin = 0.0;
        for (int it = 0; it < 80; ++it) {
            Eigen::VectorXd w = luAt.solve(Eigen::VectorXd(luA.solve(v)));
            smin = 1.0 / std::sqrt(w.norm());
            v = w.normalized();
        }
        Eigen::VectorXd u = A * v;  // left vector * sigma
        std::printf("sigma_min ~ %.4e\n", smin);
        std::vector<int> idx(ar.system.dim);
        for (int t = 0; t < ar.system.dim; ++t) idx[t] = t;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
        std::printf("-- right vector (top 12) --\n");
        for (int t = 0; t < 12; ++t)
            std::printf("(%3d,%3d) %s v=% .3e\n", idx[t] % na, idx[t] / na,
                        cls_name(ar.cls.labels[idx[t]]), v(idx[t]));
        Eigen::VectorXd ul = luAt.solve(v);  // left singular vector direction
        ul.normalize();
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return std::abs(ul(a)) > std::abs(ul(b)); });
        std::printf("-- left vector (top 12) --\n");
        for (int t = 0; t < 12; ++t)
            std::printf("(%3d,%3d) %s rowkind=%d u=% .3e\n", idx[t] % na, idx[t] / na,
                        cls_name(ar.cls.labels[idx[t]]), (int)ar.system.row_kind[idx[t]],
                        ul(idx[t]));
        return 0;
    }
    if (argc > 5 && !std::strcmp(argv[5], "svd")) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ar.system.dim, ar.system.dim);
        for (const Triplet& t : ar.system.entries) A(t.row, t.col) += t.value;
        // row equilibration comparison
        Eigen::MatrixXd Aeq = A;
        for (int r = 0; r < ar.system.dim; ++r) {
            const double m = A.row(r).cwiseAbs().maxCoeff();
            if (m > 0) Aeq.row(r) /= m;
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::BDCSVD<Eigen::MatrixXd> svde(Aeq);
        const auto& s = svd.singularValues();
        const auto& se = svde.singularValues();
        std::printf("sigma_max=%.3e  smallest: ", s(0));
        for (int t = 1; t <= 5; ++t) std::printf("%.3e ", s(ar.system.dim - t));
        std::printf("\nequilibrated: sigma_max=%.3e smallest: ", se(0));
        for (int t = 1; t <= 5; ++t) std::printf("%.3e ", se(ar.system.dim - t));
        std::printf("\n-- right singular vector of sigma_min (top 12) --\n");
        Eigen::VectorXd v = svd.matrixV().col(ar.system.dim - 1);
        std::vector<int> idx(ar.system.dim);
        for (int t = 0; t < ar.system.dim; ++t) idx[t] = t;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
        for (int t = 0; t < 12; ++t)
            std::printf("(%3d,%3d) %s v=% .3e\n", idx[t] % na, idx[t] / na,
                        cls_name(ar.cls.labels[idx[t]]), v(idx[t]));
        std::printf("-- left singular vector of sigma_min (top 12) --\n");
        Eigen::VectorXd u = svd.matrixU().col(ar.system.dim - 1);
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return std::abs(u(a)) > std::abs(u(b)); });
        for (int t = 0; t < 12; ++t)
            std::printf("(%3d,%3d) %s rowkind=%d u=% .3e\n", idx[t] % na, idx[t] / na,
                        cls_name(ar.cls.labels[idx[t]]), (int)ar.system.row_kind[idx[t]], u(idx[t]));
        return 0;
    }

    const SolveReport sol = solve(ar.system);
    std::printf("-- solve: converged=%d %s --\n", (int)sol.converged, sol.message.c_str());
    std::vector<int> act = ar.cls.active_nodes();
    std::sort(act.begin(), act.end(), [&](int a, int b) {
        return std::abs(sol.solution[a] - uex[a]) > std::abs(sol.solution[b] - uex[b]);
    });
    std::printf("-- top solution errors --\n");
    for (int t = 0; t < 12; ++t) {
        const int k = act[t];
        std::printf("(%3d,%3d) %s err=% .3e u=% .3e uex=% .3e\n", k % na, k / na,
                    cls_name(ar.cls.labels[k]), sol.solution[k] - uex[k], sol.solution[k], uex[k]);
    }
    return 0;
}
