#pragma once

#include <array>
#include <functional>

#include "ghostfd/classify.hpp"
#include "ghostfd/interp.hpp"

namespace ghostfd {

enum class BcKind : unsigned char { Dirichlet, Neumann };

using BcRule = std::function<BcKind(double x, double y)>;

/// Default split of the boundary: Dirichlet where x <= 0, Neumann elsewhere.
BcRule default_bc_rule();

/// Everything a ghost node needs to contribute its boundary-condition row.
struct GhostRecord {
    int i = 0, j = 0;
    NodeClass layer = NodeClass::Inactive;
    int sx = 0, sy = 0;      // central-difference quadrant signs (may be 0)
    int dirx = 1, diry = 1;  // stencil direction: sign with 0 replaced by +1
    int rx = 1, ry = 1;      // stencil steps
    std::array<int, 25> stencil{};  // flat node indices, entry p + 5q
    double bx = 0.0, by = 0.0;      // boundary projection B
    double theta_x = 0.0, theta_y = 0.0;
    BcKind bc = BcKind::Dirichlet;
    double nx = 0.0, ny = 0.0;  // unit outward normal at B from the discrete phi
};

/// Quadrant signs s = sgn of the central difference of -phi along each axis.
/// Falls back to a one-sided difference on the rectangle edge.
std::pair<int, int> quadrant_signs(const GridField& phi, int i, int j);

/// Ordered 25-node upwind stencil, ghost at corner (p,q)=(0,0).
/// Throws if any node leaves the rectangle.
std::array<int, 25> upwind_stencil(int i, int j, int dirx, int diry, int rx, int ry,
                                   const GridSpec& spec);

struct ProjectionResult {
    double bx = 0.0, by = 0.0;
    double theta_x = 0.0, theta_y = 0.0;
    int iterations = 0;
};

/// Damped walk along the interpolated level-set gradient from the ghost node to
/// the zero level set, on the record's own stencil. Stops at
/// |phi~| <= 1e-13 * max|phi|. The iterate is clamped to the stencil trust
/// region; persistent clamping ends in a convergence error.
ProjectionResult project_to_boundary(const GridField& phi, const GhostRecord& rec);

/// Closed-form level set for projections free of interpolation error.
struct AnalyticLevelSet {
    std::function<double(double, double)> phi;
    std::function<Gradient2(double, double)> grad;
};

/// Same walk on an analytic level set; finds the foot of the normal from the
/// ghost node. start_nudge shifts the walk's starting point by that many cells
/// along (dirx,diry) to break exact symmetries. tol_scale is typically
/// max|phi| over the grid.
ProjectionResult project_to_boundary(const AnalyticLevelSet& ls, const GridSpec& spec,
                                     const GhostRecord& rec, double tol_scale,
                                     double start_nudge = 0.0);

/// Adaptive (the default) walks a preference ladder over mirrored quadrants and
/// step choices, widens stencils whose boundary point falls near the degenerate
/// c0 root, and rescues near-singular rows by step rescaling. Literal takes the
/// plain upwind quadrant with the method's fixed steps and no repair of any
/// kind, exactly as the assembly pseudocode prescribes.
enum class StencilPolicy { Adaptive, Literal };

/// Builds one record per ghost node. When `analytic` level-set callbacks are
/// supplied the projection runs on them; otherwise it runs on the grid
/// interpolant. The central-difference quadrant gets mirrored fallbacks, and
/// stencils are widened to steps 2 when the boundary point falls near the
/// degenerate c0 root (Method 1 excepted).
std::vector<GhostRecord> build_ghost_records(const Classification& cls, const GridField& phi,
                                             Method method, const BcRule& rule = default_bc_rule(),
                                             const AnalyticLevelSet* analytic = nullptr,
                                             ExecPolicy policy = ExecPolicy::Parallel,
                                             StencilPolicy stencils = StencilPolicy::Adaptive);

}  // namespace ghostfd
