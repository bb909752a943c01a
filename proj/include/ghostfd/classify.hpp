#pragma once

#include "ghostfd/grid.hpp"
#include "ghostfd/parallel.hpp"

namespace ghostfd {

enum class Method { M1, M2, M3 };

enum class StencilFamily { Star, Box };

inline StencilFamily family_of(Method m) {
    return m == Method::M3 ? StencilFamily::Box : StencilFamily::Star;
}

enum class NodeClass : unsigned char { Internal, GhostStar1, GhostStar2, GhostBox, Inactive };

inline bool is_ghost(NodeClass c) {
    return c == NodeClass::GhostStar1 || c == NodeClass::GhostStar2 || c == NodeClass::GhostBox;
}
inline bool is_active(NodeClass c) { return c != NodeClass::Inactive; }

const char* to_string(NodeClass c);
const char* to_string(Method m);

/// Per-node labels for one stencil family. Internal iff phi < 0 at the node.
struct Classification {
    GridSpec spec;
    StencilFamily family;
    std::vector<NodeClass> labels;

    NodeClass at(int i, int j) const { return labels[linear_index(i, j, spec)]; }
    int count(NodeClass c) const;
    std::vector<int> nodes_with(NodeClass c) const;  // flat indices in row-major order
    std::vector<int> active_nodes() const;           // internal + ghost
    std::vector<int> internal_nodes() const;
};

/// Labels every node as internal, ghost (per the neighbor-set definitions of the
/// chosen family) or inactive. phi == 0 counts as external.
Classification classify_points(const GridField& phi, StencilFamily family,
                               ExecPolicy policy = ExecPolicy::Parallel);

/// Steps (r_x, r_y) a method assigns to a ghost of the given class.
std::pair<int, int> ghost_steps(Method method, NodeClass c);

/// Promotes inactive nodes covered by ghost stencils (and re-checks the
/// promoted ones) until every ghost's 5x5 stencil contains only internal or
/// ghost nodes. Promoted nodes get the family's outer ghost label.
Classification close_ghost_set(const Classification& cls, const GridField& phi, Method method);

}  // namespace ghostfd
