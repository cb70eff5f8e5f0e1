#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace recloss {

// Implicit-feedback interactions in indexed sparse form: for every user the
// sorted list of interacted items, and the transpose. Immutable after
// construction; safe to share across threads.
struct InteractionDataset {
    int n_users = 0;
    int n_items = 0;
    std::vector<std::vector<int>> pos_by_user;  // I_u+ per user, sorted ascending
    std::vector<std::vector<int>> pos_by_item;  // U_i+ per item, sorted ascending
    std::int64_t n_interactions = 0;

    // Builds both index directions from a pair list; sorts and de-duplicates.
    static InteractionDataset from_pairs(int n_users, int n_items,
                                         std::vector<std::pair<int, int>> pairs);

    bool has_interaction(int u, int i) const;
    std::vector<std::pair<int, int>> to_pairs() const;

    // Cross-checks the structural invariants; throws on violation.
    void validate() const;
};

enum class PairFormat { pairs, adjacency };

PairFormat pair_format_from_string(const std::string& s);

struct SplitSpec {
    // Strategy is leave-ratio-out per user: ceil(test_fraction * |I_u+|) items
    // go to test, capped at |I_u+| - 1; users with a single interaction keep
    // everything in train.
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct PopularityTable {
    std::vector<std::int64_t> counts;  // |U_i+| per item
    std::vector<double> probs;         // counts / n_interactions
};

// Reads a whitespace-separated interaction file. `pairs` format: one "u i"
// pair per line. `adjacency` format: one "u i1 i2 ..." line per user.
// An optional "# dims <n_users> <n_items>" first line overrides the
// 1 + max-index dimension inference.
InteractionDataset load_interactions(const std::string& path, PairFormat format);

// Deterministic per-user split; the selection is a seeded shuffle of each
// user's item list, independent across users.
std::pair<InteractionDataset, InteractionDataset> split(const InteractionDataset& ds,
                                                        const SplitSpec& spec);

PopularityTable popularity(const InteractionDataset& ds);

// Writes the dataset in pairs format, sorted by (u, i); byte-stable. The
// "# dims" header pins n_users/n_items so reloading reproduces the dataset
// even when trailing users or items have no interactions.
void save_pairs(const InteractionDataset& ds, const std::string& path,
                bool with_dims_header = true);

// Raw-id ingestion: arbitrary non-negative ids are remapped to contiguous
// 0-based indices in first-seen order. raw id for dense index k is
// user_raw_ids[k] / item_raw_ids[k].
struct DensifiedDataset {
    InteractionDataset data;
    std::vector<std::int64_t> user_raw_ids;
    std::vector<std::int64_t> item_raw_ids;
};

DensifiedDataset load_densified(const std::string& path, PairFormat format);

// One "raw_id index" line per entity.
void save_id_map(const std::vector<std::int64_t>& raw_ids, const std::string& path);

}  // namespace recloss
