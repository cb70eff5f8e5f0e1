#pragma once

#include <cstdint>

#include "recloss/dataset.hpp"

namespace recloss {

// Random generators backing the verification suites and the end-to-end
// sanity runs. Deterministic given the seed.

// Independent coin flips with uniform density; every user and item is kept
// non-empty by anchor interactions.
InteractionDataset synthetic_uniform(int n_users, int n_items, double density,
                                     std::uint64_t seed);

// Block structure plus a popularity-skewed global component: users mostly
// interact inside their group, occasionally with globally popular items.
// Learnable by matrix factorization while keeping the plain popularity
// ranking weak.
InteractionDataset synthetic_blocks(int n_users, int n_items, int n_groups, double in_group_p,
                                    double global_p, std::uint64_t seed);

}  // namespace recloss
