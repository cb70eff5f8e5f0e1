#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "recloss/dataset.hpp"

namespace recloss {

enum class NegativeMode { uniform_all, uniform_unobserved, popularity };

NegativeMode negative_mode_from_string(const std::string& s);
const char* to_string(NegativeMode m);

struct SamplerConfig {
    NegativeMode negative_mode = NegativeMode::uniform_all;
    int n_negatives = 1;         // N, per positive example
    int m_extra_positives = 0;   // M, required >= 1 by debiased losses
    bool shared_pool = false;    // one negative list per batch instead of per example
    std::uint64_t seed = 0;

    void validate(bool debiased_loss_active) const;
};

enum class TauMode { topk, proportional };

TauMode tau_mode_from_string(const std::string& s);
const char* to_string(TauMode m);

// Policy for the per-user positive-class prior tau_u+.
//   topk:         (|I_u+| + k) / |I|
//   proportional: (1 + alpha) * |I_u+| / |I|
// Result is clamped into (0, 1 - 1e-9].
struct TauPolicy {
    TauMode mode = TauMode::proportional;
    int k = 20;
    double alpha = 0.0;

    void validate() const;
};

double tau_plus(const TauPolicy& policy, const InteractionDataset& ds, int u);

// Walker alias table for O(1) draws from a fixed discrete distribution.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& probs);
    int sample(std::mt19937_64& rng) const;

private:
    std::vector<double> threshold_;
    std::vector<int> alias_;
};

// Negative / extra-positive sampling over one dataset. All draws are with
// replacement. Tables are immutable after construction; callers own their
// rng state, so concurrent sampling across users is safe.
class ItemSampler {
public:
    ItemSampler(SamplerConfig cfg, const InteractionDataset& ds);

    std::vector<int> sample_negatives(int u, std::mt19937_64& rng) const;
    void sample_negatives(int u, std::mt19937_64& rng, std::vector<int>& out) const;

    std::vector<int> sample_extra_positives(int u, int m, std::mt19937_64& rng) const;

    // Per-draw probability of `item` being sampled as a negative for user u
    // under the configured mode; used for sampled-softmax corrections.
    double draw_prob(int u, int item) const;

    const SamplerConfig& config() const { return cfg_; }

private:
    SamplerConfig cfg_;
    const InteractionDataset* ds_;
    std::vector<double> pop_probs_;
    std::unique_ptr<AliasTable> alias_;
};

}  // namespace recloss
