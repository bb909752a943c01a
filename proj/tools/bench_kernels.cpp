// Compares the serial reference implementation of the hot kernels against the
// OpenMP path: node classification, ghost-record construction (projections),
// and full system assembly. Also cross-checks that both paths produce
// identical output before timing them.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "ghostfd/assembly.hpp"
#include "ghostfd/domains.hpp"

using namespace ghostfd;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count());
    }
    return best;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-24s %10.1f ms %10.1f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
    int n = 320;
    int reps = 3;
    for (int a = 1; a + 1 < argc; a += 2) {
        if (!std::strcmp(argv[a], "--n")) n = std::atoi(argv[a + 1]);
        if (!std::strcmp(argv[a], "--reps")) reps = std::atoi(argv[a + 1]);
    }

    const DomainSpec dom = DomainSpec::flower();
    const GridSpec spec(n);
    const GridField phi = sample_levelset(dom, spec);
    const AnalyticLevelSet ls{[&dom](double x, double y) { return dom.phi(x, y); },
                              [&dom](double x, double y) { return dom.grad_phi(x, y); }};
    const ManufacturedSolution sol = ManufacturedSolution::log_product();
    const ProblemData data{sol.f, sol.u,
                           [&sol](double x, double y, double nx, double ny) {
                               const Gradient2 g = sol.grad_u(x, y);
                               return g.dx * nx + g.dy * ny;
                           }};

    std::printf("flower domain, N = %d (%d nodes), best of %d runs\n", n,
                spec.num_nodes(), reps);
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    // correctness cross-check before timing
    {
        const Classification a = classify_points(phi, StencilFamily::Box, ExecPolicy::Serial);
        const Classification b = classify_points(phi, StencilFamily::Box, ExecPolicy::Parallel);
        if (a.labels != b.labels) {
            std::fprintf(stderr, "classification mismatch between serial and parallel\n");
            return 1;
        }
        const AssemblyResult sa = assemble(Method::M3, phi, data, default_bc_rule(),
                                           SourceMode::Extrapolate, ClosureMode::Extend, &ls,
                                           ExecPolicy::Serial);
        const AssemblyResult pa = assemble(Method::M3, phi, data, default_bc_rule(),
                                           SourceMode::Extrapolate, ClosureMode::Extend, &ls,
                                           ExecPolicy::Parallel);
        if (sa.system.entries.size() != pa.system.entries.size()) {
            std::fprintf(stderr, "assembly mismatch between serial and parallel\n");
            return 1;
        }
        for (size_t k = 0; k < sa.system.entries.size(); ++k)
            if (sa.system.entries[k].value != pa.system.entries[k].value ||
                sa.system.entries[k].row != pa.system.entries[k].row ||
                sa.system.entries[k].col != pa.system.entries[k].col) {
                std::fprintf(stderr, "assembly mismatch between serial and parallel\n");
                return 1;
            }
        std::printf("serial/parallel outputs identical\n\n");
    }

    row("classify_points",
        seconds([&] { classify_points(phi, StencilFamily::Box, ExecPolicy::Serial); }, reps),
        seconds([&] { classify_points(phi, StencilFamily::Box, ExecPolicy::Parallel); }, reps));

    const Classification cls = classify_points(phi, StencilFamily::Box);
    row("build_ghost_records",
        seconds([&] { build_ghost_records(cls, phi, Method::M3, default_bc_rule(), &ls,
                                          ExecPolicy::Serial); },
                reps),
        seconds([&] { build_ghost_records(cls, phi, Method::M3, default_bc_rule(), &ls,
                                          ExecPolicy::Parallel); },
                reps));

    const GridField f = [&] {
        GridField out(spec, 0.0);
        for (int k : cls.internal_nodes())
            out.values[k] = sol.f(spec.x(k % (n + 1)), spec.y(k / (n + 1)));
        return out;
    }();
    row("extend_source",
        seconds([&] { extend_source(f, phi, cls, ExecPolicy::Serial); }, reps),
        seconds([&] { extend_source(f, phi, cls, ExecPolicy::Parallel); }, reps));

    row("assemble (M3)",
        seconds([&] { assemble(Method::M3, phi, data, default_bc_rule(),
                               SourceMode::Extrapolate, ClosureMode::Extend, &ls,
                               ExecPolicy::Serial); },
                reps),
        seconds([&] { assemble(Method::M3, phi, data, default_bc_rule(),
                               SourceMode::Extrapolate, ClosureMode::Extend, &ls,
                               ExecPolicy::Parallel); },
                reps));
    return 0;
}
