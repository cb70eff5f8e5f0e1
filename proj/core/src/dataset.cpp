#include "recloss/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "recloss/rng.hpp"

namespace recloss {

InteractionDataset InteractionDataset::from_pairs(int n_users, int n_items,
                                                  std::vector<std::pair<int, int>> pairs) {
    if (n_users < 0 || n_items < 0)
        throw std::invalid_argument("dataset: negative dimensions");
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    InteractionDataset ds;
    ds.n_users = n_users;
    ds.n_items = n_items;
    ds.pos_by_user.resize(n_users);
    ds.pos_by_item.resize(n_items);
    for (const auto& [u, i] : pairs) {
        if (u < 0 || u >= n_users || i < 0 || i >= n_items)
            throw std::out_of_range("dataset: pair (" + std::to_string(u) + "," +
                                    std::to_string(i) + ") outside (" + std::to_string(n_users) +
                                    "," + std::to_string(n_items) + ")");
        ds.pos_by_user[u].push_back(i);
        ds.pos_by_item[i].push_back(u);
    }
    ds.n_interactions = static_cast<std::int64_t>(pairs.size());
    return ds;
}

bool InteractionDataset::has_interaction(int u, int i) const {
    if (u < 0 || u >= n_users) return false;
    const auto& v = pos_by_user[u];
    return std::binary_search(v.begin(), v.end(), i);
}

std::vector<std::pair<int, int>> InteractionDataset::to_pairs() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(n_interactions));
    for (int u = 0; u < n_users; ++u)
        for (int i : pos_by_user[u]) out.emplace_back(u, i);
    return out;
}

void InteractionDataset::validate() const {
    if (static_cast<int>(pos_by_user.size()) != n_users ||
        static_cast<int>(pos_by_item.size()) != n_items)
        throw std::runtime_error("dataset: index size mismatch");
    std::int64_t by_user = 0, by_item = 0;
    for (int u = 0; u < n_users; ++u) {
        const auto& v = pos_by_user[u];
        if (!std::is_sorted(v.begin(), v.end()))
            throw std::runtime_error("dataset: pos_by_user not sorted");
        if (std::adjacent_find(v.begin(), v.end()) != v.end())
            throw std::runtime_error("dataset: duplicate (u,i) pair");
        for (int i : v)
            if (i < 0 || i >= n_items) throw std::runtime_error("dataset: item index out of range");
        by_user += static_cast<std::int64_t>(v.size());
    }
    for (int i = 0; i < n_items; ++i) {
        const auto& v = pos_by_item[i];
        if (!std::is_sorted(v.begin(), v.end()))
            throw std::runtime_error("dataset: pos_by_item not sorted");
        for (int u : v) {
            if (u < 0 || u >= n_users) throw std::runtime_error("dataset: user index out of range");
            if (!has_interaction(u, i))
                throw std::runtime_error("dataset: pos_by_item pair missing from pos_by_user");
        }
        by_item += static_cast<std::int64_t>(v.size());
    }
    if (by_user != n_interactions || by_item != n_interactions)
        throw std::runtime_error("dataset: interaction count mismatch");
}

PairFormat pair_format_from_string(const std::string& s) {
    if (s == "pairs") return PairFormat::pairs;
    if (s == "adjacency") return PairFormat::adjacency;
    throw std::invalid_argument("unknown pair format '" + s + "' (expected pairs|adjacency)");
}

namespace {

struct RawRead {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    std::int64_t dims_users = -1;  // -1: no header override
    std::int64_t dims_items = -1;
};

RawRead read_raw(const std::string& path, PairFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("dataset: cannot open " + path);
    RawRead out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string word;
            if (hs >> word && word == "dims") {
                if (!(hs >> out.dims_users >> out.dims_items))
                    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                             ": malformed dims header");
            }
            continue;
        }
        std::istringstream ls(line);
        std::vector<std::int64_t> fields;
        std::int64_t x;
        while (ls >> x) fields.push_back(x);
        if (!ls.eof()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed line (non-integer token)");
        }
        if (fields.empty()) continue;  // blank line
        for (std::int64_t f : fields)
            if (f < 0)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": negative index");
        if (format == PairFormat::pairs) {
            if (fields.size() != 2)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": expected 'u i', got " +
                                         std::to_string(fields.size()) + " fields");
            out.pairs.emplace_back(fields[0], fields[1]);
        } else {
            for (size_t k = 1; k < fields.size(); ++k)
                out.pairs.emplace_back(fields[0], fields[k]);
        }
    }
    if (out.pairs.empty()) throw std::runtime_error("dataset: " + path + " has no interactions");
    return out;
}

}  // namespace

InteractionDataset load_interactions(const std::string& path, PairFormat format) {
    RawRead raw = read_raw(path, format);
    std::int64_t max_u = -1, max_i = -1;
    for (const auto& [u, i] : raw.pairs) {
        max_u = std::max(max_u, u);
        max_i = std::max(max_i, i);
    }
    std::int64_t n_users = raw.dims_users >= 0 ? raw.dims_users : max_u + 1;
    std::int64_t n_items = raw.dims_items >= 0 ? raw.dims_items : max_i + 1;
    constexpr std::int64_t kMaxDense = 50'000'000;
    if (n_users > kMaxDense || n_items > kMaxDense)
        throw std::runtime_error("dataset: indices too large for direct load; use densified load");
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(raw.pairs.size());
    for (const auto& [u, i] : raw.pairs)
        pairs.emplace_back(static_cast<int>(u), static_cast<int>(i));
    return InteractionDataset::from_pairs(static_cast<int>(n_users), static_cast<int>(n_items),
                                          std::move(pairs));
}

DensifiedDataset load_densified(const std::string& path, PairFormat format) {
    RawRead raw = read_raw(path, format);
    DensifiedDataset out;
    std::unordered_map<std::int64_t, int> umap, imap;
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(raw.pairs.size());
    for (const auto& [ru, ri] : raw.pairs) {
        auto [uit, unew] = umap.try_emplace(ru, static_cast<int>(out.user_raw_ids.size()));
        if (unew) out.user_raw_ids.push_back(ru);
        auto [iit, inew] = imap.try_emplace(ri, static_cast<int>(out.item_raw_ids.size()));
        if (inew) out.item_raw_ids.push_back(ri);
        pairs.emplace_back(uit->second, iit->second);
    }
    out.data = InteractionDataset::from_pairs(static_cast<int>(out.user_raw_ids.size()),
                                              static_cast<int>(out.item_raw_ids.size()),
                                              std::move(pairs));
    return out;
}

std::pair<InteractionDataset, InteractionDataset> split(const InteractionDataset& ds,
                                                        const SplitSpec& spec) {
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
        throw std::invalid_argument("split: test_fraction must be in (0,1)");
    std::vector<std::pair<int, int>> train_pairs, test_pairs;
    for (int u = 0; u < ds.n_users; ++u) {
        const auto& items = ds.pos_by_user[u];
        const auto n = static_cast<int>(items.size());
        if (n < 2) {
            for (int i : items) train_pairs.emplace_back(u, i);
            continue;
        }
        int n_test = static_cast<int>(std::ceil(spec.test_fraction * n));
        n_test = std::min(n_test, n - 1);
        std::vector<int> shuffled = items;
        // Per-user stream: adding or removing other users never perturbs
        // this user's selection.
        auto rng = make_rng(spec.seed, "split", static_cast<std::uint64_t>(u));
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (int k = 0; k < n; ++k) {
            if (k < n_test)
                test_pairs.emplace_back(u, shuffled[k]);
            else
                train_pairs.emplace_back(u, shuffled[k]);
        }
    }
    return {InteractionDataset::from_pairs(ds.n_users, ds.n_items, std::move(train_pairs)),
            InteractionDataset::from_pairs(ds.n_users, ds.n_items, std::move(test_pairs))};
}

PopularityTable popularity(const InteractionDataset& ds) {
    if (ds.n_interactions <= 0) throw std::invalid_argument("popularity: empty dataset");
    PopularityTable table;
    table.counts.resize(ds.n_items);
    table.probs.resize(ds.n_items);
    for (int i = 0; i < ds.n_items; ++i)
        table.counts[i] = static_cast<std::int64_t>(ds.pos_by_item[i].size());
    const double total = static_cast<double>(ds.n_interactions);
    for (int i = 0; i < ds.n_items; ++i) table.probs[i] = table.counts[i] / total;
    return table;
}

void save_pairs(const InteractionDataset& ds, const std::string& path, bool with_dims_header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dataset: cannot write " + path);
    if (with_dims_header) out << "# dims " << ds.n_users << " " << ds.n_items << "\n";
    for (int u = 0; u < ds.n_users; ++u)
        for (int i : ds.pos_by_user[u]) out << u << " " << i << "\n";
}

void save_id_map(const std::vector<std::int64_t>& raw_ids, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dataset: cannot write " + path);
    for (size_t k = 0; k < raw_ids.size(); ++k) out << raw_ids[k] << " " << k << "\n";
}

}  // namespace recloss
