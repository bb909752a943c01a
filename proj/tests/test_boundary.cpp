#include <doctest.h>

#include <cmath>
#include <set>

#include "ghostfd/boundary.hpp"
#include "ghostfd/domains.hpp"

using namespace ghostfd;

namespace {

GridField sampled(const DomainSpec& dom, const GridSpec& spec) {
    return sample_levelset(dom, spec);
}

AnalyticLevelSet analytic_of(const DomainSpec& dom) {
    return AnalyticLevelSet{[&dom](double x, double y) { return dom.phi(x, y); },
                            [&dom](double x, double y) { return dom.grad_phi(x, y); }};
}

}  // namespace

TEST_CASE("quadrant signs point toward the interior") {
    const GridSpec spec(16);

    SUBCASE("phi = x: interior on the left, sx = -1, sy = 0") {
        GridField phi(spec, 0.0);
        for (int j = 0; j <= spec.n; ++j)
            for (int i = 0; i <= spec.n; ++i) phi(i, j) = spec.x(i);
        const auto [sx, sy] = quadrant_signs(phi, 10, 8);
        CHECK(sx == -1);
        CHECK(sy == 0);
    }
    SUBCASE("phi = -y: interior above, sy = +1") {
        GridField phi(spec, 0.0);
        for (int j = 0; j <= spec.n; ++j)
            for (int i = 0; i <= spec.n; ++i) phi(i, j) = -spec.y(j);
        const auto [sx, sy] = quadrant_signs(phi, 8, 4);
        CHECK(sx == 0);
        CHECK(sy == 1);
    }
    SUBCASE("edge nodes fall back to one-sided differences") {
        GridField phi(spec, 0.0);
        for (int j = 0; j <= spec.n; ++j)
            for (int i = 0; i <= spec.n; ++i) phi(i, j) = spec.x(i);
        const auto [sx, sy] = quadrant_signs(phi, 0, 5);
        CHECK(sx == -1);
        CHECK(sy == 0);
    }
}

TEST_CASE("upwind stencils enumerate 25 distinct in-grid nodes, ghost first") {
    const GridSpec spec(16);

    const auto s = upwind_stencil(10, 10, -1, -1, 1, 1, spec);
    CHECK(s[0] == linear_index(10, 10, spec));
    CHECK(s[1] == linear_index(9, 10, spec));       // p = 1, q = 0
    CHECK(s[5] == linear_index(10, 9, spec));       // p = 0, q = 1
    CHECK(s[24] == linear_index(6, 6, spec));       // far corner p = q = 4
    CHECK(std::set<int>(s.begin(), s.end()).size() == 25);

    SUBCASE("steps double the reach") {
        const auto w = upwind_stencil(10, 10, -1, 1, 2, 1, spec);
        CHECK(w[1] == linear_index(8, 10, spec));
        CHECK(w[24] == linear_index(2, 14, spec));
    }
    SUBCASE("stencils leaving the rectangle throw") {
        CHECK_THROWS(upwind_stencil(2, 10, -1, 1, 1, 1, spec));
        CHECK_THROWS(upwind_stencil(10, 10, -1, 1, 2, 2, GridSpec(12)));
    }
}

TEST_CASE("circle boundary points are the exact radial projections") {
    // On a circle the closest boundary point of any node has a closed form:
    // B = c + R (g - c)/|g - c|. Every ghost record's (bx, by) must match it.
    const DomainSpec dom = DomainSpec::circle();
    const AnalyticLevelSet ls = analytic_of(dom);

    for (Method method : {Method::M2, Method::M3}) {
        for (int n : {20, 40, 80}) {
            const GridSpec spec(n);
            const GridField phi = sampled(dom, spec);
            const Classification cls = classify_points(phi, family_of(method));
            const auto recs =
                build_ghost_records(cls, phi, method, default_bc_rule(), &ls, ExecPolicy::Serial);
            REQUIRE(!recs.empty());
            for (const GhostRecord& rec : recs) {
                const double gx = spec.x(rec.i), gy = spec.y(rec.j);
                const double d = std::hypot(gx - dom.cx, gy - dom.cy);
                REQUIRE(d > 0.0);
                const double ex = dom.cx + dom.radius * (gx - dom.cx) / d;
                const double ey = dom.cy + dom.radius * (gy - dom.cy) / d;
                CHECK(std::abs(rec.bx - ex) <= 1e-10 * spec.h);
                CHECK(std::abs(rec.by - ey) <= 1e-10 * spec.h);
            }
        }
    }
}

TEST_CASE("flower boundary points lie on the zero level set") {
    const DomainSpec dom = DomainSpec::flower();
    const AnalyticLevelSet ls = analytic_of(dom);

    for (Method method : {Method::M2, Method::M3}) {
        for (int n : {20, 40, 80}) {
            const GridSpec spec(n);
            const GridField phi = sampled(dom, spec);
            const Classification cls = classify_points(phi, family_of(method));
            const auto recs =
                build_ghost_records(cls, phi, method, default_bc_rule(), &ls, ExecPolicy::Serial);
            REQUIRE(!recs.empty());
            for (const GhostRecord& rec : recs) CHECK(std::abs(dom.phi(rec.bx, rec.by)) <= 1e-10);
        }
    }
}

TEST_CASE("boundary points carry valid interpolation parameters and normals") {
    const DomainSpec dom = DomainSpec::circle();
    const GridSpec spec(40);
    const GridField phi = sampled(dom, spec);

    for (Method method : {Method::M1, Method::M2, Method::M3}) {
        const Classification cls = classify_points(phi, family_of(method));
        const auto recs =
            build_ghost_records(cls, phi, method, default_bc_rule(), nullptr, ExecPolicy::Serial);
        REQUIRE(!recs.empty());
        for (const GhostRecord& rec : recs) {
            // theta within the quartic stencil (small negative slack only)
            CHECK(rec.theta_x >= -1e-9);
            CHECK(rec.theta_y >= -1e-9);
            CHECK(rec.theta_x <= 4.5);
            CHECK(rec.theta_y <= 4.5);
            // B sits inside the closed stencil quadrant
            const double gx = spec.x(rec.i), gy = spec.y(rec.j);
            CHECK(rec.dirx * (rec.bx - gx) >= -1e-9);
            CHECK(rec.diry * (rec.by - gy) >= -1e-9);
            // unit normal pointing outward: along +(g - c) for the circle
            CHECK(std::hypot(rec.nx, rec.ny) == doctest::Approx(1.0).epsilon(1e-12));
            const double d = std::hypot(gx - dom.cx, gy - dom.cy);
            CHECK(rec.nx * (gx - dom.cx) / d + rec.ny * (gy - dom.cy) / d > 0.9);
        }
    }
}

TEST_CASE("grid projection distance matches the sampled signed distance") {
    // The circle level set is a signed distance function, so |B - g| must agree
    // with phi(g) for every ghost g up to interpolation error.
    const DomainSpec dom = DomainSpec::circle();
    const GridSpec spec(40);
    const GridField phi = sampled(dom, spec);
    const Classification cls = classify_points(phi, StencilFamily::Box);
    const auto recs =
        build_ghost_records(cls, phi, Method::M3, default_bc_rule(), nullptr, ExecPolicy::Serial);
    REQUIRE(!recs.empty());
    for (const GhostRecord& rec : recs) {
        const double gx = spec.x(rec.i), gy = spec.y(rec.j);
        const double dist = std::hypot(rec.bx - gx, rec.by - gy);
        CHECK(std::abs(dist - phi(rec.i, rec.j)) <= 5e-3 * spec.h);
    }
}

TEST_CASE("records assign boundary kinds by the rule at the boundary point") {
    const DomainSpec dom = DomainSpec::circle();
    const GridSpec spec(20);
    const GridField phi = sampled(dom, spec);
    const Classification cls = classify_points(phi, StencilFamily::Star);
    const auto recs =
        build_ghost_records(cls, phi, Method::M2, default_bc_rule(), nullptr, ExecPolicy::Serial);
    int dirichlet = 0, neumann = 0;
    for (const GhostRecord& rec : recs) {
        const BcKind want = rec.bx <= 0.0 ? BcKind::Dirichlet : BcKind::Neumann;
        CHECK(rec.bc == want);
        (rec.bc == BcKind::Dirichlet ? dirichlet : neumann)++;
    }
    CHECK(dirichlet > 0);  // the mixed split really exercises both branches
    CHECK(neumann > 0);
}

TEST_CASE("one record per ghost node, matching the classification") {
    const DomainSpec dom = DomainSpec::flower();
    const GridSpec spec(40);
    const GridField phi = sampled(dom, spec);
    for (Method method : {Method::M1, Method::M2, Method::M3}) {
        const Classification cls = classify_points(phi, family_of(method));
        const auto recs =
            build_ghost_records(cls, phi, method, default_bc_rule(), nullptr, ExecPolicy::Serial);
        std::set<int> seen;
        for (const GhostRecord& rec : recs) {
            CHECK(is_ghost(cls.at(rec.i, rec.j)));
            CHECK(rec.layer == cls.at(rec.i, rec.j));
            seen.insert(linear_index(rec.i, rec.j, spec));
        }
        int ghosts = 0;
        for (NodeClass c : cls.labels)
            if (is_ghost(c)) ++ghosts;
        CHECK(int(seen.size()) == ghosts);
        CHECK(int(recs.size()) == ghosts);
    }
}

TEST_CASE("literal stencils take the plain upwind quadrant with the method steps") {
    const DomainSpec dom = DomainSpec::circle();
    const GridSpec spec(20);
    const GridField phi = sampled(dom, spec);
    const Classification cls = classify_points(phi, StencilFamily::Star);
    const auto recs = build_ghost_records(cls, phi, Method::M2, default_bc_rule(), nullptr,
                                          ExecPolicy::Serial, StencilPolicy::Literal);
    for (const GhostRecord& rec : recs) {
        const auto [sx, sy] = quadrant_signs(phi, rec.i, rec.j);
        CHECK(rec.sx == sx);
        CHECK(rec.sy == sy);
        const auto [wrx, wry] = ghost_steps(Method::M2, rec.layer);
        CHECK(rec.rx == wrx);
        CHECK(rec.ry == wry);
        const int dx = sx == 0 ? 1 : sx, dy = sy == 0 ? 1 : sy;
        CHECK(rec.stencil == upwind_stencil(rec.i, rec.j, dx, dy, wrx, wry, spec));
    }
}

TEST_CASE("projection is a fixed point on the boundary") {
    // Starting the analytic walk from a record that already sits on the zero
    // level set must return (essentially) the same point.
    const DomainSpec dom = DomainSpec::circle();
    const AnalyticLevelSet ls = analytic_of(dom);
    const GridSpec spec(40);
    const GridField phi = sampled(dom, spec);
    const Classification cls = classify_points(phi, StencilFamily::Star);
    const auto recs =
        build_ghost_records(cls, phi, Method::M2, default_bc_rule(), &ls, ExecPolicy::Serial);
    REQUIRE(!recs.empty());
    for (size_t k = 0; k < recs.size(); k += 7) {
        const GhostRecord& rec = recs[k];
        const ProjectionResult again = project_to_boundary(ls, spec, rec, phi.max_abs());
        CHECK(std::abs(dom.phi(again.bx, again.by)) <= 1e-12 * phi.max_abs());
        CHECK(std::hypot(again.bx - rec.bx, again.by - rec.by) <= 1e-9);
    }
}
