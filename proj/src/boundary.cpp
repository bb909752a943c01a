#include "ghostfd/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ghostfd {

BcRule default_bc_rule() {
    return [](double x, double) { return x <= 0.0 ? BcKind::Dirichlet : BcKind::Neumann; };
}

static int sgn(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

std::pair<int, int> quadrant_signs(const GridField& phi, int i, int j) {
    const GridSpec& spec = phi.spec;
    if (!spec.contains(i, j)) throw std::out_of_range("quadrant_signs: node outside grid");
    // one-sided fallback on the rectangle edge
    const double left = phi(i == 0 ? i : i - 1, j);
    const double right = phi(i == spec.n ? i : i + 1, j);
    const double bottom = phi(i, j == 0 ? j : j - 1);
    const double top = phi(i, j == spec.n ? j : j + 1);
    const int sx = sgn(left - right);
    const int sy = sgn(bottom - top);
    if (sx == 0 && sy == 0)
        throw std::runtime_error("quadrant_signs: degenerate level-set gradient at node (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
    return {sx, sy};
}

std::array<int, 25> upwind_stencil(int i, int j, int dirx, int diry, int rx, int ry,
                                   const GridSpec& spec) {
    std::array<int, 25> st{};
    for (int q = 0; q < 5; ++q) {
        for (int p = 0; p < 5; ++p) {
            const int ii = i + dirx * rx * p;
            const int jj = j + diry * ry * q;
            if (!spec.contains(ii, jj))
                throw std::runtime_error("upwind_stencil: stencil of ghost (" + std::to_string(i) +
                                         "," + std::to_string(j) + ") leaves the rectangle");
            st[p + 5 * q] = linear_index(ii, jj, spec);
        }
    }
    return st;
}

ProjectionResult project_to_boundary(const GridField& phi, const GhostRecord& rec) {
    const GridSpec& spec = phi.spec;
    std::array<double, 25> pv;
    for (int k = 0; k < 25; ++k) pv[k] = phi.values[rec.stencil[k]];

    const double tol = 1e-13 * phi.max_abs();
    const double eps = spec.h / 10.0;
    const double x0 = spec.x(rec.i), y0 = spec.y(rec.j);
    double x = x0, y = y0;

    // The geometric step contracts the residual by roughly (1 - eps) per
    // iteration, so the budget must scale with 1/h.
    const int max_iter = 400000;
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        double tx = rec.dirx * (x - x0) / (rec.rx * spec.h);
        double ty = rec.diry * (y - y0) / (rec.ry * spec.h);
        // clamp the iterate to the stencil trust region; the walk then slides
        // along its edge (or fails the convergence check below)
        tx = std::clamp(tx, -0.5, 4.5);
        ty = std::clamp(ty, -0.5, 4.5);
        x = x0 + rec.dirx * tx * rec.rx * spec.h;
        y = y0 + rec.diry * ty * rec.ry * spec.h;
        const double val = biquartic_eval(pv, tx, ty);
        best = std::min(best, std::abs(val));
        if (std::abs(val) <= tol) {
            // A foot behind the quadrant cannot serve this stencil; fall
            // through to the in-quadrant bisection below instead.
            if (tx >= -1e-9 && ty >= -1e-9) return {x, y, tx, ty, it};
            break;
        }

        const Gradient2 g = biquartic_grad(pv, tx, ty, rec.dirx, rec.diry, rec.rx, rec.ry, spec.h);
        const double g2 = g.dx * g.dx + g.dy * g.dy;
        if (!(g2 > 0.0))
            throw std::runtime_error("project_to_boundary: vanishing level-set gradient");
        // walk against the gradient: reduces |phi~| from either side of the zero set
        x -= eps * val * g.dx / g2;
        y -= eps * val * g.dy / g2;
    }
    // The walk can stall against the trust-region edge when the quadrant's
    // zero set lies off its downhill path (concave notches). The interpolant
    // still changes sign between the ghost (phi >= 0) and any internal stencil
    // node, so bisect along the segment to the nearest opposite-sign node.
    if (biquartic_eval(pv, 0.0, 0.0) >= 0.0) {
        int bp = -1, bq = -1;
        for (int q = 0; q < 5; ++q)
            for (int p = 0; p < 5; ++p)
                if (pv[p + 5 * q] < 0.0 &&
                    (bp < 0 || p * p + q * q < bp * bp + bq * bq)) {
                    bp = p;
                    bq = q;
                }
        if (bp >= 0) {
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double val = biquartic_eval(pv, mid * bp, mid * bq);
                if (std::abs(val) <= tol) {
                    const double tx = mid * bp, ty = mid * bq;
                    return {x0 + rec.dirx * tx * rec.rx * spec.h,
                            y0 + rec.diry * ty * rec.ry * spec.h, tx, ty, max_iter + it};
                }
                (val >= 0.0 ? lo : hi) = mid;
            }
        }
    }
    throw std::runtime_error("project_to_boundary: no convergence for ghost (" +
                             std::to_string(rec.i) + "," + std::to_string(rec.j) +
                             "), best |phi~| = " + std::to_string(best));
}

ProjectionResult project_to_boundary(const AnalyticLevelSet& ls, const GridSpec& spec,
                                     const GhostRecord& rec, double tol_scale,
                                     double start_nudge) {
    const double tol = 1e-13 * tol_scale;
    const double eps = spec.h / 10.0;
    const double x0 = spec.x(rec.i), y0 = spec.y(rec.j);
    double x = x0 + start_nudge * spec.h * rec.dirx;
    double y = y0 + start_nudge * spec.h * rec.diry;

    const int max_iter = 400000;
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        const double val = ls.phi(x, y);
        best = std::min(best, std::abs(val));
        if (std::abs(val) <= tol) {
            const double tx = rec.dirx * (x - x0) / (rec.rx * spec.h);
            const double ty = rec.diry * (y - y0) / (rec.ry * spec.h);
            return {x, y, tx, ty, it};
        }
        const Gradient2 g = ls.grad(x, y);
        const double g2 = g.dx * g.dx + g.dy * g.dy;
        if (!(g2 > 0.0))
            throw std::runtime_error("project_to_boundary: vanishing level-set gradient");
        x -= eps * val * g.dx / g2;
        y -= eps * val * g.dy / g2;
    }
    throw std::runtime_error("project_to_boundary: no convergence for ghost (" +
                             std::to_string(rec.i) + "," + std::to_string(rec.j) +
                             "), best |phi| = " + std::to_string(best));
}

static bool near_integer(double t) { return std::abs(t - std::round(t)) < 1e-9; }

// One stencil + projection attempt with fixed directions and steps. Returns
// false when the stencil leaves the rectangle, the walk fails, B falls outside
// the stencil quadrant or its reach, or (with require_active) the stencil
// touches an inactive node whose pinned zero would poison the interpolation.
static bool try_record(GhostRecord& rec, const GridField& phi, const Classification& cls,
                       const AnalyticLevelSet* analytic, int dirx, int diry, int rx, int ry,
                       bool require_active, std::string* why) {
    const GridSpec& spec = phi.spec;
    rec.dirx = dirx;
    rec.diry = diry;
    rec.rx = rx;
    rec.ry = ry;
    try {
        rec.stencil = upwind_stencil(rec.i, rec.j, dirx, diry, rx, ry, spec);
        if (require_active)
            for (int s : rec.stencil)
                if (!is_active(cls.labels[s])) {
                    if (why) *why = "stencil touches an inactive node";
                    return false;
                }
        ProjectionResult pr = analytic ? project_to_boundary(*analytic, spec, rec, phi.max_abs())
                                       : project_to_boundary(phi, rec);
        // B landing exactly on a grid node duplicates that node's own boundary
        // row and makes the system singular; this only happens when the walk
        // starts on an exact symmetry axis, so break the symmetry and retry.
        if (analytic && near_integer(pr.theta_x) && near_integer(pr.theta_y) &&
            (std::round(pr.theta_x) != 0.0 || std::round(pr.theta_y) != 0.0))
            pr = project_to_boundary(*analytic, spec, rec, phi.max_abs(), 0.25);
        if (pr.theta_x < -1e-9 || pr.theta_y < -1e-9) {
            if (why) *why = "boundary point outside the stencil quadrant";
            return false;
        }
        if (pr.theta_x > 4.5 || pr.theta_y > 4.5) {
            if (why) *why = "boundary point beyond the stencil reach";
            return false;
        }
        rec.bx = pr.bx;
        rec.by = pr.by;
        rec.theta_x = std::max(pr.theta_x, 0.0);
        rec.theta_y = std::max(pr.theta_y, 0.0);
        return true;
    } catch (const std::exception& e) {
        if (why) *why = e.what();
        return false;
    }
}

// The interpolation degenerates when theta approaches the c0 root at 1
// (vanishing self-weight); past this threshold the stencil is widened.
static constexpr double kWidenThreshold = 0.5;

static double self_weight(const GhostRecord& rec) {
    return std::abs(quartic_value_weights(rec.theta_x).c[0] *
                    quartic_value_weights(rec.theta_y).c[0]);
}

// B almost on a grid line: theta within this zone of a nonzero integer kills
// the self-weight outright. A boundary piece grazing a grid line produces a
// run of such rows whose equations nearly coincide, so the block they form is
// close to singular even though each row looks consistent on its own.
static bool near_c0_root(double t) {
    const double r = std::round(t);
    return r >= 1.0 && std::abs(t - r) < 0.05;
}
static constexpr double kRescueFloor = 0.05;
// Fire the rescue only for genuinely degenerate rows; mildly small self-weights
// are better served by the original narrow stencil (wider steps multiply the
// interpolation remainder by (r_x r_y)^5 and can dominate the coarse-grid error).
static constexpr double kRescueTrigger = 0.01;
static constexpr int kMaxRescueStep = 3;

std::vector<GhostRecord> build_ghost_records(const Classification& cls, const GridField& phi,
                                             Method method, const BcRule& rule,
                                             const AnalyticLevelSet* analytic, ExecPolicy policy,
                                             StencilPolicy stencils) {
    const GridSpec& spec = cls.spec;
    if (family_of(method) != cls.family)
        throw std::invalid_argument("build_ghost_records: classification family does not match method");

    const int na = spec.nodes_per_axis();
    std::vector<int> ghost_nodes;
    for (int k = 0; k < spec.num_nodes(); ++k)
        if (is_ghost(cls.labels[k])) ghost_nodes.push_back(k);

    std::vector<GhostRecord> records(ghost_nodes.size());
    parallel_for(static_cast<int>(ghost_nodes.size()), policy, [&](int g) {
        const int k = ghost_nodes[g];
        GhostRecord rec;
        rec.i = k % na;
        rec.j = k / na;
        rec.layer = cls.labels[k];
        std::tie(rec.sx, rec.sy) = quadrant_signs(phi, rec.i, rec.j);
        const int dx0 = rec.sx == 0 ? 1 : rec.sx;
        const int dy0 = rec.sy == 0 ? 1 : rec.sy;
        const auto [rx, ry] = ghost_steps(method, rec.layer);

        if (stencils == StencilPolicy::Literal) {
            std::string why;
            if (!try_record(rec, phi, cls, analytic, dx0, dy0, rx, ry, false, &why))
                throw std::runtime_error("build_ghost_records: literal stencil failed for ghost (" +
                                         std::to_string(rec.i) + "," + std::to_string(rec.j) +
                                         "): " + why);
            rec.bc = rule(rec.bx, rec.by);
            std::array<double, 25> pv;
            for (int s = 0; s < 25; ++s) pv[s] = phi.values[rec.stencil[s]];
            const Gradient2 gphi = biquartic_grad(pv, rec.theta_x, rec.theta_y, rec.dirx, rec.diry,
                                                  rec.rx, rec.ry, spec.h);
            const double norm = std::hypot(gphi.dx, gphi.dy);
            if (!(norm > 0.0))
                throw std::runtime_error("build_ghost_records: vanishing normal at boundary point");
            rec.nx = gphi.dx / norm;
            rec.ny = gphi.dy / norm;
            records[g] = rec;
            return;
        }

        // The central-difference quadrant can point the wrong way near concave
        // or strongly curved boundary pieces on coarse grids, enlarged stencils
        // may not fit near the rectangle edge, and stencils touching inactive
        // nodes would interpolate through pinned zeros. Walk a preference
        // ladder: mirrored quadrants, then reduced steps, then (as a last
        // resort) stencils with inactive nodes.
        const int combos[4][2] = {{dx0, dy0}, {-dx0, dy0}, {dx0, -dy0}, {-dx0, -dy0}};
        bool ok = false;
        std::string why;
        for (const auto& steps : {std::pair{rx, ry}, std::pair{1, 1}}) {
            for (bool require_active : {true, false}) {
                for (const auto& c : combos)
                    if (try_record(rec, phi, cls, analytic, c[0], c[1], steps.first, steps.second,
                                   require_active, &why)) {
                        ok = true;
                        break;
                    }
                if (ok) break;
            }
            if (ok) break;
        }
        if (!ok)
            throw std::runtime_error("build_ghost_records: no usable quadrant for ghost (" +
                                     std::to_string(rec.i) + "," + std::to_string(rec.j) +
                                     "): " + why);

        // Widen per axis when B falls near or beyond the first cell, where the
        // self-weight c0 vanishes; Method 1 is the fixed-step baseline. Only
        // fully active widened stencils are accepted (near tangency the
        // widened stencil along the boundary would cross into inactive nodes,
        // so the dangerous axis alone gets widened there).
        if (method != Method::M1 && rec.rx == 1 && rec.ry == 1) {
            const int wx = rec.theta_x >= kWidenThreshold ? 2 : 1;
            const int wy = rec.theta_y >= kWidenThreshold ? 2 : 1;
            if (wx != 1 || wy != 1) {
                GhostRecord wide = rec;
                if (try_record(wide, phi, cls, analytic, rec.dirx, rec.diry, wx, wy, true, nullptr))
                    rec = wide;
                else if (wx == 2 && wy == 2 &&
                         (try_record(wide, phi, cls, analytic, rec.dirx, rec.diry, 2, 1, true,
                                     nullptr) ||
                          try_record(wide, phi, cls, analytic, rec.dirx, rec.diry, 1, 2, true,
                                     nullptr)))
                    rec = wide;
            }
        }

        // Root-zone rescue: rescaling the steps moves theta off the root.
        // Accept the narrowest candidate that clears the zone with a healthy
        // self-weight; fully active stencils are preferred, stencils with
        // inactive nodes are a fallback (their pinned entries are substituted
        // away by the assembly closure). Method 1 stays the fixed baseline.
        // The box method keeps a single ghost layer, so every ghost row is the
        // only equation tying its node to the boundary; rescue anything weak.
        // The star method's second layer already runs doubled steps and reacts
        // badly to further changes, so only genuinely degenerate rows qualify.
        const double trigger = kRescueFloor;
        if (method != Method::M1 && (near_c0_root(rec.theta_x) || near_c0_root(rec.theta_y) ||
                                     self_weight(rec) < trigger)) {
            // Cap the physical footprint of rescue candidates: a stencil spans
            // 4*r*h per axis and the interpolation remainder grows with the
            // fifth power of that span, so wide steps only pay off while the
            // span stays a modest fraction of the domain.
            const double span_cap = 0.85;
            const int w_cap = std::max(1, (int)(span_cap / (4.0 * spec.h)));
            GhostRecord best = rec;
            double best_s = self_weight(rec);
            bool done = false;
            for (bool require_active : {true, false}) {
                for (int w = 2; w <= 2 * kMaxRescueStep && !done; ++w) {
                    for (int wx = std::max(1, w - kMaxRescueStep);
                         wx <= std::min(kMaxRescueStep, w - 1) && !done; ++wx) {
                        if (wx > w_cap || w - wx > w_cap) continue;
                        GhostRecord cand = rec;
                        if (!try_record(cand, phi, cls, analytic, rec.dirx, rec.diry, wx, w - wx,
                                        require_active, nullptr))
                            continue;
                        const double s = self_weight(cand);
                        if (!near_c0_root(cand.theta_x) && !near_c0_root(cand.theta_y) &&
                            s >= kRescueFloor) {
                            best = cand;
                            best_s = s;
                            done = true;
                        } else if (s > best_s) {
                            best = cand;
                            best_s = s;
                        }
                    }
                }
                if (done) break;
            }
            rec = best;
        }

        rec.bc = rule(rec.bx, rec.by);

        Gradient2 gphi;
        if (analytic) {
            gphi = analytic->grad(rec.bx, rec.by);
        } else {
            std::array<double, 25> pv;
            for (int s = 0; s < 25; ++s) pv[s] = phi.values[rec.stencil[s]];
            gphi = biquartic_grad(pv, rec.theta_x, rec.theta_y, rec.dirx, rec.diry, rec.rx, rec.ry,
                                  spec.h);
        }
        const double norm = std::hypot(gphi.dx, gphi.dy);
        if (!(norm > 0.0))
            throw std::runtime_error("build_ghost_records: vanishing normal at boundary point");
        rec.nx = gphi.dx / norm;
        rec.ny = gphi.dy / norm;
        records[g] = rec;
    });
    return records;
}

}  // namespace ghostfd
