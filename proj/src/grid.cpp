#include "ghostfd/grid.hpp"

namespace ghostfd {

std::vector<std::pair<int, int>> neighbor_set(int i, int j, NeighborKind kind,
                                              const GridSpec& spec) {
    std::vector<std::pair<int, int>> out;
    auto push = [&](int ii, int jj) {
        if (spec.contains(ii, jj)) out.emplace_back(ii, jj);
    };
    switch (kind) {
        case NeighborKind::StarDist1:
        case NeighborKind::StarDist2: {
            const int k = kind == NeighborKind::StarDist1 ? 1 : 2;
            push(i - k, j);
            push(i + k, j);
            push(i, j - k);
            push(i, j + k);
            break;
        }
        case NeighborKind::Box:
            for (int dj = -1; dj <= 1; ++dj)
                for (int di = -1; di <= 1; ++di)
                    if (di != 0 || dj != 0) push(i + di, j + dj);
            break;
    }
    return out;
}

}  // namespace ghostfd
