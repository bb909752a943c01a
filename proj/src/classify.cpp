#include "ghostfd/classify.hpp"

#include <cmath>

#include "ghostfd/boundary.hpp"

namespace ghostfd {

const char* to_string(NodeClass c) {
    switch (c) {
        case NodeClass::Internal: return "internal";
        case NodeClass::GhostStar1: return "ghost-star-1";
        case NodeClass::GhostStar2: return "ghost-star-2";
        case NodeClass::GhostBox: return "ghost-box";
        case NodeClass::Inactive: return "inactive";
    }
    return "?";
}

const char* to_string(Method m) {
    switch (m) {
        case Method::M1: return "M1";
        case Method::M2: return "M2";
        case Method::M3: return "M3";
    }
    return "?";
}

int Classification::count(NodeClass c) const {
    int n = 0;
    for (NodeClass l : labels) n += (l == c);
    return n;
}

std::vector<int> Classification::nodes_with(NodeClass c) const {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(labels.size()); ++k)
        if (labels[k] == c) out.push_back(k);
    return out;
}

std::vector<int> Classification::active_nodes() const {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(labels.size()); ++k)
        if (is_active(labels[k])) out.push_back(k);
    return out;
}

std::vector<int> Classification::internal_nodes() const { return nodes_with(NodeClass::Internal); }

Classification classify_points(const GridField& phi, StencilFamily family, ExecPolicy policy) {
    const GridSpec& spec = phi.spec;
    for (double v : phi.values)
        if (std::isnan(v)) throw std::invalid_argument("classify_points: NaN in level set");

    Classification cls{spec, family, std::vector<NodeClass>(phi.values.size(), NodeClass::Inactive)};
    const int na = spec.nodes_per_axis();

    auto internal = [&](int ii, int jj) { return phi(ii, jj) < 0.0; };

    parallel_for(spec.num_nodes(), policy, [&](int k) {
        const int i = k % na, j = k / na;
        if (internal(i, j)) {
            cls.labels[k] = NodeClass::Internal;
            return;
        }
        auto has_internal = [&](NeighborKind kind) {
            for (auto [ii, jj] : neighbor_set(i, j, kind, spec))
                if (internal(ii, jj)) return true;
            return false;
        };
        if (family == StencilFamily::Star) {
            if (has_internal(NeighborKind::StarDist1))
                cls.labels[k] = NodeClass::GhostStar1;
            else if (has_internal(NeighborKind::StarDist2))
                cls.labels[k] = NodeClass::GhostStar2;
        } else {
            if (has_internal(NeighborKind::Box)) cls.labels[k] = NodeClass::GhostBox;
        }
    });
    return cls;
}

std::pair<int, int> ghost_steps(Method method, NodeClass c) {
    if (method == Method::M2 && c == NodeClass::GhostStar2) return {2, 2};
    return {1, 1};
}

Classification close_ghost_set(const Classification& cls0, const GridField& phi, Method method) {
    Classification cls = cls0;
    const GridSpec& spec = cls.spec;
    const int na = spec.nodes_per_axis();
    const NodeClass promoted_label =
        cls.family == StencilFamily::Star ? NodeClass::GhostStar2 : NodeClass::GhostBox;

    for (int round = 0; round < 64; ++round) {
        int promoted = 0;
        for (int k = 0; k < spec.num_nodes(); ++k) {
            if (!is_ghost(cls.labels[k])) continue;
            const int i = k % na, j = k / na;
            auto [sx, sy] = quadrant_signs(phi, i, j);
            auto [rx, ry] = ghost_steps(method, cls.labels[k]);
            std::array<int, 25> st;
            try {
                st = upwind_stencil(i, j, sx == 0 ? 1 : sx, sy == 0 ? 1 : sy, rx, ry, spec);
            } catch (const std::exception&) {
                throw std::runtime_error(
                    "close_ghost_set: stencil of ghost (" + std::to_string(i) + "," +
                    std::to_string(j) + ") leaves the rectangle; domain too close to the bounding box");
            }
            for (int idx : st) {
                if (cls.labels[idx] == NodeClass::Inactive) {
                    cls.labels[idx] = promoted_label;
                    ++promoted;
                }
            }
        }
        if (promoted == 0) return cls;
    }
    throw std::runtime_error("close_ghost_set: promotion loop did not reach a fixed point");
}

}  // namespace ghostfd
