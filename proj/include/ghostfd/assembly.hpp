#pragma once

#include <iosfwd>

#include "ghostfd/boundary.hpp"

namespace ghostfd {

enum class RowKind : unsigned char {
    InteriorStar,
    InteriorBox,
    GhostDirichlet,
    GhostNeumann,
    ExternalExtrapolation,
    InactiveIdentity
};

struct Triplet {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

/// Coupled internal + ghost system over all (N+1)^2 nodes. Inactive nodes carry
/// identity rows with zero right-hand side. Entries are emitted row-major,
/// column-sorted within a row, duplicates summed.
struct SparseSystem {
    int dim = 0;
    std::vector<Triplet> entries;
    std::vector<double> rhs;
    std::vector<RowKind> row_kind;
};

enum class SourceMode { Extrapolate, Analytic };

/// What to do about inactive nodes referenced by ghost stencils.
/// AsClassified leaves their identity rows in place, so the interpolation sees
/// pinned zeros; exact for convex domains at fine resolution, badly wrong when
/// stencils sweep across thin or concave pieces. Extend (the default) replaces
/// the identity row of every referenced external node with a biquartic
/// extrapolation row from the nearest fully internal 5x5 patch, closing the
/// system in one step. Promote runs close_ghost_set first so every such node
/// carries its own boundary-interpolation equation; promotion couples
/// far-from-boundary nodes through nearly identical boundary rows and can
/// inflate the condition number badly on coarse grids.
enum class ClosureMode { AsClassified, Extend, Promote };

/// Problem data evaluators. g_neumann receives the boundary point and the unit
/// outward normal the ghost row uses.
struct ProblemData {
    std::function<double(double x, double y)> f;
    std::function<double(double x, double y)> g_dirichlet;
    std::function<double(double x, double y, double nx, double ny)> g_neumann;
};

struct Row {
    std::vector<std::pair<int, double>> entries;  // (col, value)
    double rhs = 0.0;
    RowKind kind = RowKind::InactiveIdentity;
};

Row interior_row_star(int i, int j, const Classification& cls, const GridField& f);
Row interior_row_box(int i, int j, const Classification& cls, const GridField& f_ext);
Row ghost_row(const GhostRecord& rec, const ProblemData& data, const GridSpec& spec);

/// Fills the external nodes touched by the box-method source average by
/// biquartic extrapolation from the nearest fully internal 5x5 patch.
GridField extend_source(const GridField& f, const GridField& phi, const Classification& cls,
                        ExecPolicy policy = ExecPolicy::Parallel);

struct AssemblyResult {
    SparseSystem system;
    Classification cls;
    std::vector<GhostRecord> ghosts;
    GridField f_samples;  // source samples actually used (extended for the box method)
};

/// `analytic`, when given, supplies the closed-form level set for boundary
/// projections; phi remains the source of truth for the node classification.
AssemblyResult assemble(Method method, const GridField& phi, const ProblemData& data,
                        const BcRule& rule = default_bc_rule(),
                        SourceMode mode = SourceMode::Extrapolate,
                        ClosureMode closure = ClosureMode::Extend,
                        const AnalyticLevelSet* analytic = nullptr,
                        ExecPolicy policy = ExecPolicy::Parallel,
                        StencilPolicy stencils = StencilPolicy::Adaptive);

/// Coordinate text format: header "rows cols nnz", then one "row col value"
/// triple per line, 17 significant digits.
void write_matrix_dump(std::ostream& os, const SparseSystem& sys);
/// One right-hand-side value per line, 17 significant digits.
void write_rhs_dump(std::ostream& os, const SparseSystem& sys);

}  // namespace ghostfd
