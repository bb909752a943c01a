#include "ghostfd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace ghostfd {

static void require_active(const Classification& cls, int i, int j, const char* who) {
    if (!is_active(cls.at(i, j)))
        throw std::runtime_error(std::string(who) + ": stencil touches inactive node (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
}

static double checked_f(const GridField& f, int i, int j, const char* who) {
    const double v = f(i, j);
    if (!std::isfinite(v))
        throw std::runtime_error(std::string(who) + ": missing source value at node (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
    return v;
}

Row interior_row_star(int i, int j, const Classification& cls, const GridField& f) {
    const GridSpec& spec = cls.spec;
    Row row;
    row.kind = RowKind::InteriorStar;
    const double scale = 1.0 / (12.0 * spec.h * spec.h);
    row.entries.reserve(9);
    row.entries.emplace_back(linear_index(i, j, spec), 60.0 * scale);
    const int off[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto [di, dj] : off) {
        require_active(cls, i + di, j + dj, "interior_row_star");
        require_active(cls, i + 2 * di, j + 2 * dj, "interior_row_star");
        row.entries.emplace_back(linear_index(i + di, j + dj, spec), -16.0 * scale);
        row.entries.emplace_back(linear_index(i + 2 * di, j + 2 * dj, spec), 1.0 * scale);
    }
    row.rhs = checked_f(f, i, j, "interior_row_star");
    return row;
}

Row interior_row_box(int i, int j, const Classification& cls, const GridField& f_ext) {
    const GridSpec& spec = cls.spec;
    Row row;
    row.kind = RowKind::InteriorBox;
    const double scale = 1.0 / (6.0 * spec.h * spec.h);
    row.entries.reserve(9);
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            double w = 0.0;
            if (di == 0 && dj == 0)
                w = 20.0;
            else if (di == 0 || dj == 0)
                w = -4.0;
            else
                w = -1.0;
            require_active(cls, i + di, j + dj, "interior_row_box");
            row.entries.emplace_back(linear_index(i + di, j + dj, spec), w * scale);
        }
    }
    row.rhs = (8.0 * checked_f(f_ext, i, j, "interior_row_box") +
               checked_f(f_ext, i + 1, j, "interior_row_box") +
               checked_f(f_ext, i - 1, j, "interior_row_box") +
               checked_f(f_ext, i, j + 1, "interior_row_box") +
               checked_f(f_ext, i, j - 1, "interior_row_box")) / 12.0;
    return row;
}

Row ghost_row(const GhostRecord& rec, const ProblemData& data, const GridSpec& spec) {
    Row row;
    row.entries.reserve(25);
    if (rec.bc == BcKind::Dirichlet) {
        row.kind = RowKind::GhostDirichlet;
        const auto cx = quartic_value_weights(rec.theta_x).c;
        const auto cy = quartic_value_weights(rec.theta_y).c;
        for (int q = 0; q < 5; ++q)
            for (int p = 0; p < 5; ++p)
                row.entries.emplace_back(rec.stencil[p + 5 * q], cx[p] * cy[q]);
        row.rhs = data.g_dirichlet(rec.bx, rec.by);
    } else {
        row.kind = RowKind::GhostNeumann;
        const auto cx = quartic_value_weights(rec.theta_x).c;
        const auto cy = quartic_value_weights(rec.theta_y).c;
        const auto dx = quartic_derivative_weights(rec.theta_x).c;
        const auto dy = quartic_derivative_weights(rec.theta_y).c;
        const double fx = rec.nx * rec.dirx / (rec.rx * spec.h);
        const double fy = rec.ny * rec.diry / (rec.ry * spec.h);
        for (int q = 0; q < 5; ++q)
            for (int p = 0; p < 5; ++p)
                row.entries.emplace_back(rec.stencil[p + 5 * q],
                                         fx * dx[p] * cy[q] + fy * cx[p] * dy[q]);
        row.rhs = data.g_neumann(rec.bx, rec.by, rec.nx, rec.ny);
    }
    return row;
}

// Locates, for any node, the nearest 5x5 patch of eligible nodes (fully
// internal, or fully active) to extrapolate from. Thin or concave pieces can
// hold no such patch nearby, so all candidate corners within reach are scanned
// and the shortest reach wins (ties broken by scan order for determinism).
class InternalPatchFinder {
public:
    enum class Eligible { Internal, Active };

    InternalPatchFinder(const Classification& cls, Eligible which)
        : InternalPatchFinder(cls, [&](int k) {
              return which == Eligible::Internal ? cls.labels[k] == NodeClass::Internal
                                                 : is_active(cls.labels[k]);
          }) {}

    InternalPatchFinder(const Classification& cls, const std::function<bool(int)>& eligible)
        : na_(cls.spec.nodes_per_axis()) {
        ps_.assign((na_ + 1) * (na_ + 1), 0);  // prefix sums of the eligibility indicator
        for (int j = 0; j < na_; ++j)
            for (int i = 0; i < na_; ++i)
                ps_[(i + 1) + (j + 1) * (na_ + 1)] =
                    (eligible(i + j * na_) ? 1 : 0) + ps_[i + (j + 1) * (na_ + 1)] +
                    ps_[(i + 1) + j * (na_ + 1)] - ps_[i + j * (na_ + 1)];
    }

    /// Lower-left corner (i0,j0) of the chosen patch. A patch containing the
    /// excluded node is skipped (extrapolating a node from a patch holding it
    /// would collapse to the identity).
    std::pair<int, int> find(int i, int j, const char* who, int ex_i = -1, int ex_j = -1) const {
        constexpr int kMaxReach = 16;
        int best_i = -1, best_j = -1, best_cost = std::numeric_limits<int>::max();
        const int lo_i = std::max(0, i - 4 - kMaxReach), hi_i = std::min(na_ - 5, i + kMaxReach);
        const int lo_j = std::max(0, j - 4 - kMaxReach), hi_j = std::min(na_ - 5, j + kMaxReach);
        for (int j0 = lo_j; j0 <= hi_j; ++j0) {
            for (int i0 = lo_i; i0 <= hi_i; ++i0) {
                if (internal_count(i0, j0) != 25) continue;
                if (ex_i >= i0 && ex_i <= i0 + 4 && ex_j >= j0 && ex_j <= j0 + 4) continue;
                const int rx = std::max({i0 - i, i - (i0 + 4), 0});
                const int ry = std::max({j0 - j, j - (j0 + 4), 0});
                // Extrapolation weights grow multiplicatively with the offset
                // on each axis, so the total offset is what must stay small;
                // max(rx, ry) would tie a straight offset with a diagonal one.
                const int cost = rx + ry;
                if (cost < best_cost) {
                    best_cost = cost;
                    best_i = i0;
                    best_j = j0;
                }
            }
        }
        if (best_i < 0)
            throw std::runtime_error(std::string(who) + ": no fully internal patch within reach " +
                                     std::to_string(kMaxReach) + " of node (" + std::to_string(i) +
                                     "," + std::to_string(j) +
                                     "); domain too thin at this resolution");
        return {best_i, best_j};
    }

private:
    int internal_count(int i0, int j0) const {  // 5x5 patch with corner (i0,j0)
        return ps_[(i0 + 5) + (j0 + 5) * (na_ + 1)] - ps_[i0 + (j0 + 5) * (na_ + 1)] -
               ps_[(i0 + 5) + j0 * (na_ + 1)] + ps_[i0 + j0 * (na_ + 1)];
    }

    int na_;
    std::vector<int> ps_;
};

GridField extend_source(const GridField& f, const GridField& phi, const Classification& cls,
                        ExecPolicy policy) {
    const GridSpec& spec = cls.spec;
    GridField out = f;
    const int na = spec.nodes_per_axis();

    // external nodes touched by the five-point source average of an internal node
    std::vector<int> needed;
    for (int k = 0; k < spec.num_nodes(); ++k) {
        if (cls.labels[k] == NodeClass::Internal) continue;
        const int i = k % na, j = k / na;
        for (auto [ii, jj] : neighbor_set(i, j, NeighborKind::StarDist1, spec)) {
            if (cls.at(ii, jj) == NodeClass::Internal) {
                needed.push_back(k);
                break;
            }
        }
    }

    const InternalPatchFinder finder(cls, InternalPatchFinder::Eligible::Internal);
    parallel_for(static_cast<int>(needed.size()), policy, [&](int t) {
        const int k = needed[t];
        const int i = k % na, j = k / na;
        const auto [i0, j0] = finder.find(i, j, "extend_source");
        std::array<double, 25> vals{};
        for (int q = 0; q < 5; ++q)
            for (int p = 0; p < 5; ++p) vals[p + 5 * q] = f(i0 + p, j0 + q);
        out.values[k] =
            biquartic_eval(vals, static_cast<double>(i - i0), static_cast<double>(j - j0));
    });
    return out;
}

static SparseSystem finalize_rows(std::vector<Row>& rows) {
    SparseSystem sys;
    sys.dim = static_cast<int>(rows.size());
    sys.rhs.resize(rows.size());
    sys.row_kind.resize(rows.size());
    size_t nnz = 0;
    for (const Row& r : rows) nnz += r.entries.size();
    sys.entries.reserve(nnz);
    for (int k = 0; k < sys.dim; ++k) {
        Row& r = rows[k];
        std::sort(r.entries.begin(), r.entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t t = 0; t < r.entries.size(); ++t) {
            if (!sys.entries.empty() && sys.entries.back().row == k &&
                sys.entries.back().col == r.entries[t].first)
                sys.entries.back().value += r.entries[t].second;  // sum duplicates
            else
                sys.entries.push_back({k, r.entries[t].first, r.entries[t].second});
        }
        sys.rhs[k] = r.rhs;
        sys.row_kind[k] = r.kind;
    }
    return sys;
}

AssemblyResult assemble(Method method, const GridField& phi, const ProblemData& data,
                        const BcRule& rule, SourceMode mode, ClosureMode closure,
                        const AnalyticLevelSet* analytic, ExecPolicy policy,
                        StencilPolicy stencils) {
    const GridSpec& spec = phi.spec;
    const StencilFamily family = family_of(method);

    Classification cls = classify_points(phi, family, policy);
    if (closure == ClosureMode::Promote) cls = close_ghost_set(cls, phi, method);
    std::vector<GhostRecord> ghosts =
        build_ghost_records(cls, phi, method, rule, analytic, policy, stencils);

    const int na = spec.nodes_per_axis();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    GridField f(spec, nan);
    for (int k = 0; k < spec.num_nodes(); ++k) {
        const bool sample = cls.labels[k] == NodeClass::Internal ||
                            (mode == SourceMode::Analytic && is_active(cls.labels[k]));
        if (sample) f.values[k] = data.f(spec.x(k % na), spec.y(k / na));
    }
    if (family == StencilFamily::Box && mode == SourceMode::Extrapolate)
        f = extend_source(f, phi, cls, policy);

    std::vector<int> ghost_index(spec.num_nodes(), -1);
    for (int g = 0; g < static_cast<int>(ghosts.size()); ++g)
        ghost_index[linear_index(ghosts[g].i, ghosts[g].j, spec)] = g;

    // Adjacent ghosts can project to nearly coincident feet: a layer pair
    // facing an axis-aligned boundary piece, or stacked ghosts where the
    // boundary grazes a grid line. Their rows then impose the same boundary
    // equation twice and the pair is nearly singular. Keep the boundary row on
    // the member with the healthier self-weight; the other ghost gets a plain
    // biquartic extrapolation row for its value instead.
    std::vector<char> value_closed(ghosts.size(), 0);
    if (closure == ClosureMode::Extend && !ghosts.empty()) {
        auto self_w = [](const GhostRecord& r) {
            return std::abs(quartic_value_weights(r.theta_x).c[0] *
                            quartic_value_weights(r.theta_y).c[0]);
        };
        std::vector<int> order(ghosts.size());
        for (int g = 0; g < static_cast<int>(order.size()); ++g) order[g] = g;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return self_w(ghosts[a]) > self_w(ghosts[b]);
        });
        // A nearly coincident foot always closes the row; a foot merely nearby
        // only does when the row barely references its own unknown (a healthy
        // duplicate still pins its ghost and carries little risk).
        const double near2 = 0.1 * spec.h * 0.1 * spec.h;
        const double far2 = 0.25 * spec.h * 0.25 * spec.h;
        std::vector<int> kept;
        kept.reserve(ghosts.size());
        for (int g : order) {
            const double tol2 = self_w(ghosts[g]) < 0.1 ? far2 : near2;
            bool dup = false;
            for (int a : kept) {
                if (ghosts[a].bc != ghosts[g].bc) continue;
                const double dx = ghosts[a].bx - ghosts[g].bx;
                const double dy = ghosts[a].by - ghosts[g].by;
                if (dx * dx + dy * dy < tol2) {
                    dup = true;
                    break;
                }
            }
            if (dup)
                value_closed[g] = 1;
            else
                kept.push_back(g);
        }
    }

    // Patches for the value rows must avoid every value-closed ghost: two such
    // ghosts extrapolating through each other produce an exactly dependent
    // row pair.
    const InternalPatchFinder value_finder(cls, [&](int k) {
        if (!is_active(cls.labels[k])) return false;
        const int g = ghost_index[k];
        return g < 0 || !value_closed[g];
    });

    // Ghost stencils can reference inactive nodes where the domain is thin or
    // concave. Under Extend, such a reference is replaced in place by a
    // biquartic extrapolation from the nearest fully active patch (ghost nodes
    // carry accurate boundary rows, so patches may run through them; that
    // keeps the reach and the extrapolation weights small). Substituting into
    // the ghost row rather than adding an equation per external node keeps the
    // near-boundary coupling free of weakly constrained unknowns.
    const InternalPatchFinder finder(cls, InternalPatchFinder::Eligible::Active);
    auto inline_external = [&](Row& row) {
        std::vector<std::pair<int, double>> extra;
        for (auto& [col, value] : row.entries) {
            if (cls.labels[col] != NodeClass::Inactive) continue;
            const auto [i0, j0] = finder.find(col % na, col / na, "assemble");
            const auto cx = quartic_value_weights(col % na - i0).c;
            const auto cy = quartic_value_weights(col / na - j0).c;
            for (int q = 0; q < 5; ++q)
                for (int p = 0; p < 5; ++p)
                    extra.emplace_back(linear_index(i0 + p, j0 + q, spec),
                                       value * cx[p] * cy[q]);
            value = 0.0;  // entry moved onto the patch; dropped below
        }
        std::erase_if(row.entries, [&](const std::pair<int, double>& e) {
            return e.second == 0.0 && cls.labels[e.first] == NodeClass::Inactive;
        });
        row.entries.insert(row.entries.end(), extra.begin(), extra.end());
    };

    std::vector<Row> rows(spec.num_nodes());
    parallel_for(spec.num_nodes(), policy, [&](int k) {
        const int i = k % na, j = k / na;
        switch (cls.labels[k]) {
            case NodeClass::Internal:
                rows[k] = family == StencilFamily::Star ? interior_row_star(i, j, cls, f)
                                                        : interior_row_box(i, j, cls, f);
                break;
            case NodeClass::GhostStar1:
            case NodeClass::GhostStar2:
            case NodeClass::GhostBox:
                if (value_closed[ghost_index[k]]) {
                    Row& row = rows[k];
                    row.kind = RowKind::ExternalExtrapolation;
                    const auto [i0, j0] = value_finder.find(i, j, "assemble");
                    const auto cx = quartic_value_weights(static_cast<double>(i - i0)).c;
                    const auto cy = quartic_value_weights(static_cast<double>(j - j0)).c;
                    row.entries.reserve(26);
                    row.entries.emplace_back(k, 1.0);
                    for (int q = 0; q < 5; ++q)
                        for (int p = 0; p < 5; ++p)
                            row.entries.emplace_back(linear_index(i0 + p, j0 + q, spec),
                                                     -cx[p] * cy[q]);
                    row.rhs = 0.0;
                } else {
                    rows[k] = ghost_row(ghosts[ghost_index[k]], data, spec);
                    if (closure == ClosureMode::Extend) inline_external(rows[k]);
                }
                break;
            case NodeClass::Inactive:
                rows[k].kind = RowKind::InactiveIdentity;
                rows[k].entries.emplace_back(k, 1.0);
                rows[k].rhs = 0.0;
                break;
        }
    });

    AssemblyResult res{finalize_rows(rows), std::move(cls), std::move(ghosts), std::move(f)};
    return res;
}

void write_matrix_dump(std::ostream& os, const SparseSystem& sys) {
    char buf[64];
    os << sys.dim << ' ' << sys.dim << ' ' << sys.entries.size() << '\n';
    for (const Triplet& t : sys.entries) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", t.row, t.col, t.value);
        os << buf;
    }
}

void write_rhs_dump(std::ostream& os, const SparseSystem& sys) {
    char buf[40];
    for (double v : sys.rhs) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        os << buf;
    }
}

}  // namespace ghostfd
