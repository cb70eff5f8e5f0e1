#include "recloss/sampling.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace recloss {

NegativeMode negative_mode_from_string(const std::string& s) {
    if (s == "uniform-all") return NegativeMode::uniform_all;
    if (s == "uniform-unobserved") return NegativeMode::uniform_unobserved;
    if (s == "popularity") return NegativeMode::popularity;
    throw std::invalid_argument("unknown negative mode '" + s +
                                "' (expected uniform-all|uniform-unobserved|popularity)");
}

const char* to_string(NegativeMode m) {
    switch (m) {
        case NegativeMode::uniform_all: return "uniform-all";
        case NegativeMode::uniform_unobserved: return "uniform-unobserved";
        case NegativeMode::popularity: return "popularity";
    }
    return "?";
}

TauMode tau_mode_from_string(const std::string& s) {
    if (s == "topk") return TauMode::topk;
    if (s == "proportional") return TauMode::proportional;
    throw std::invalid_argument("unknown tau mode '" + s + "' (expected topk|proportional)");
}

const char* to_string(TauMode m) {
    return m == TauMode::topk ? "topk" : "proportional";
}

void SamplerConfig::validate(bool debiased_loss_active) const {
    if (n_negatives < 1) throw std::invalid_argument("sampler: n_negatives must be >= 1");
    if (m_extra_positives < 0)
        throw std::invalid_argument("sampler: m_extra_positives must be >= 0");
    if (debiased_loss_active && m_extra_positives < 1)
        throw std::invalid_argument(
            "sampler: debiased losses require m_extra_positives >= 1");
    if (shared_pool && negative_mode == NegativeMode::uniform_unobserved)
        throw std::invalid_argument(
            "sampler: shared_pool requires a user-agnostic negative mode");
}

void TauPolicy::validate() const {
    if (mode == TauMode::topk && k < 1) throw std::invalid_argument("tau: topk needs k >= 1");
    if (mode == TauMode::proportional && alpha < 0.0)
        throw std::invalid_argument("tau: alpha must be >= 0");
}

double tau_plus(const TauPolicy& policy, const InteractionDataset& ds, int u) {
    if (u < 0 || u >= ds.n_users) throw std::out_of_range("tau_plus: user index out of range");
    const auto n_pos = static_cast<double>(ds.pos_by_user[u].size());
    if (n_pos < 1.0) throw std::invalid_argument("tau_plus: user has no positive items");
    const double n_items = static_cast<double>(ds.n_items);
    double v = policy.mode == TauMode::topk ? (n_pos + policy.k) / n_items
                                            : (1.0 + policy.alpha) * n_pos / n_items;
    return std::min(v, 1.0 - 1e-9);
}

AliasTable::AliasTable(const std::vector<double>& probs) {
    const int n = static_cast<int>(probs.size());
    if (n == 0) throw std::invalid_argument("alias table: empty distribution");
    threshold_.assign(n, 0.0);
    alias_.assign(n, 0);
    // Vose's method: buckets scaled to mean 1, split into small/large.
    std::vector<double> scaled(n);
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("alias table: negative probability");
        sum += p;
    }
    if (sum <= 0.0) throw std::invalid_argument("alias table: zero-mass distribution");
    for (int i = 0; i < n; ++i) scaled[i] = probs[i] * n / sum;
    std::vector<int> small, large;
    for (int i = n - 1; i >= 0; --i) (scaled[i] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
        int s = small.back(), l = large.back();
        small.pop_back();
        threshold_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (int i : large) threshold_[i] = 1.0;
    for (int i : small) threshold_[i] = 1.0;  // numerical leftovers
}

int AliasTable::sample(std::mt19937_64& rng) const {
    const int n = static_cast<int>(threshold_.size());
    std::uniform_int_distribution<int> bucket(0, n - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int k = bucket(rng);
    return coin(rng) < threshold_[k] ? k : alias_[k];
}

ItemSampler::ItemSampler(SamplerConfig cfg, const InteractionDataset& ds)
    : cfg_(cfg), ds_(&ds) {
    if (ds.n_items < 1) throw std::invalid_argument("sampler: dataset has no items");
    if (cfg_.negative_mode == NegativeMode::popularity) {
        PopularityTable table = popularity(ds);
        pop_probs_ = std::move(table.probs);
        alias_ = std::make_unique<AliasTable>(pop_probs_);
    }
}

namespace {

// k-th (0-based) item of I \ I_u+ given the sorted positive list.
int kth_unobserved(const std::vector<int>& pos, int k) {
    int lo = 0, hi = static_cast<int>(pos.size());
    // smallest j such that pos[j] - j > k
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (pos[mid] - mid > k)
            hi = mid;
        else
            lo = mid + 1;
    }
    return k + lo;
}

}  // namespace

void ItemSampler::sample_negatives(int u, std::mt19937_64& rng, std::vector<int>& out) const {
    out.clear();
    out.reserve(cfg_.n_negatives);
    const int n_items = ds_->n_items;
    switch (cfg_.negative_mode) {
        case NegativeMode::uniform_all: {
            std::uniform_int_distribution<int> d(0, n_items - 1);
            for (int k = 0; k < cfg_.n_negatives; ++k) out.push_back(d(rng));
            break;
        }
        case NegativeMode::uniform_unobserved: {
            const auto& pos = ds_->pos_by_user[u];
            const int n_unobserved = n_items - static_cast<int>(pos.size());
            if (n_unobserved <= 0)
                throw std::runtime_error("sampler: user " + std::to_string(u) +
                                         " has no unobserved items");
            std::uniform_int_distribution<int> d(0, n_unobserved - 1);
            for (int k = 0; k < cfg_.n_negatives; ++k)
                out.push_back(kth_unobserved(pos, d(rng)));
            break;
        }
        case NegativeMode::popularity: {
            for (int k = 0; k < cfg_.n_negatives; ++k) out.push_back(alias_->sample(rng));
            break;
        }
    }
}

std::vector<int> ItemSampler::sample_negatives(int u, std::mt19937_64& rng) const {
    std::vector<int> out;
    sample_negatives(u, rng, out);
    return out;
}

std::vector<int> ItemSampler::sample_extra_positives(int u, int m, std::mt19937_64& rng) const {
    const auto& pos = ds_->pos_by_user[u];
    if (pos.empty())
        throw std::runtime_error("sampler: user " + std::to_string(u) + " has no positives");
    std::vector<int> out;
    out.reserve(m);
    std::uniform_int_distribution<int> d(0, static_cast<int>(pos.size()) - 1);
    for (int k = 0; k < m; ++k) out.push_back(pos[d(rng)]);
    return out;
}

double ItemSampler::draw_prob(int u, int item) const {
    switch (cfg_.negative_mode) {
        case NegativeMode::uniform_all:
            return 1.0 / ds_->n_items;
        case NegativeMode::uniform_unobserved: {
            const int n_unobserved = ds_->n_items - static_cast<int>(ds_->pos_by_user[u].size());
            return ds_->has_interaction(u, item) ? 0.0 : 1.0 / n_unobserved;
        }
        case NegativeMode::popularity:
            return pop_probs_[item];
    }
    return 0.0;
}

}  // namespace recloss
