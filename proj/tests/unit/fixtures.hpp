#pragma once

#include <vector>

#include "repgraph/dataset.hpp"
#include "repgraph/graph.hpp"

namespace fixtures {

// Five values a..e with multiplicities (1,3,4,3,1). Triangle abc at distance
// 1, de at 1, bd and ce at 2, everything else 3: six minimum spanning trees
// whose union is {ab, ac, bc, bd, ce, de}.
inline repgraph::DistanceMatrix five_values() {
    return repgraph::DistanceMatrix(5, {0, 1, 1, 3, 3,  //
                                        1, 0, 1, 2, 3,  //
                                        1, 1, 0, 3, 2,  //
                                        3, 2, 3, 0, 1,  //
                                        3, 3, 2, 1, 0});
}

inline repgraph::SimilarityGraph five_values_c0() {
    return repgraph::SimilarityGraph(5, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 4}, {3, 4}});
}

inline repgraph::DistinctTable five_values_table(std::vector<std::size_t> n1u) {
    const std::vector<std::size_t> m{1, 3, 4, 3, 1};
    std::vector<std::size_t> n2u(5);
    for (std::size_t u = 0; u < 5; ++u) n2u[u] = m[u] - n1u[u];
    return repgraph::DistinctTable::from_counts(std::move(n1u), std::move(n2u));
}

}  // namespace fixtures
