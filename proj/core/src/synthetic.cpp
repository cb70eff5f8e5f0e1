#include "recloss/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "recloss/rng.hpp"

namespace recloss {

InteractionDataset synthetic_uniform(int n_users, int n_items, double density,
                                     std::uint64_t seed) {
    if (n_users < 1 || n_items < 1) throw std::invalid_argument("synthetic: empty dimensions");
    auto rng = make_rng(seed, "synthetic-uniform");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n_users; ++u)
        for (int i = 0; i < n_items; ++i)
            if (coin(rng) < density) pairs.emplace_back(u, i);
    for (int u = 0; u < n_users; ++u) pairs.emplace_back(u, u % n_items);
    for (int i = 0; i < n_items; ++i) pairs.emplace_back(i % n_users, i);
    return InteractionDataset::from_pairs(n_users, n_items, std::move(pairs));
}

InteractionDataset synthetic_blocks(int n_users, int n_items, int n_groups, double in_group_p,
                                    double global_p, std::uint64_t seed) {
    if (n_groups < 1) throw std::invalid_argument("synthetic: n_groups must be >= 1");
    auto rng = make_rng(seed, "synthetic-blocks");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n_users; ++u) {
        const int g = u % n_groups;
        for (int i = 0; i < n_items; ++i) {
            double p;
            if (i % n_groups == g) {
                p = in_group_p;
            } else {
                // popularity skew: low item indices are globally popular
                const double rank = static_cast<double>(i) / n_items;
                p = global_p * (1.0 - rank) * (1.0 - rank);
            }
            if (coin(rng) < p) pairs.emplace_back(u, i);
        }
        // anchors keep every user splittable
        pairs.emplace_back(u, g);
        pairs.emplace_back(u, n_groups + g);
    }
    return InteractionDataset::from_pairs(n_users, n_items, std::move(pairs));
}

}  // namespace recloss
