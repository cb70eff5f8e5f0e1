#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "recloss/model.hpp"

namespace recloss {

enum class LossFamily {
    softmax_full,
    sampled_softmax,
    infonce,
    debiased_infonce,
    mine,
    mine_plus,
    bpr,
    mse,
    debiased_mse,
    ccl,
    debiased_ccl,
};

LossFamily loss_family_from_string(const std::string& s);
const char* to_string(LossFamily f);
std::vector<LossFamily> all_loss_families();

bool is_debiased(LossFamily f);
bool uses_temperature(LossFamily f);  // infonce, debiased_infonce, mine_plus
ScoreMode default_score_mode(LossFamily f);

// neg_weight sentinel: resolve to the family default at evaluation time
// (N for debiased InfoNCE, 1 otherwise).
inline constexpr double kAutoNegWeight = -1.0;

struct LossSpec {
    LossFamily family = LossFamily::infonce;
    double temperature = 1.0;            // t, temperature families only
    double neg_weight = kAutoNegWeight;  // lambda
    double margin = 0.0;                 // epsilon, CCL families only
    double ccl_weight = 1.0;             // w, biased pointwise negative weight
    ScoreMode score_mode = ScoreMode::dot;
    // The debiased pointwise bracket is clamped at 0 by default; switch off
    // to run the unclamped estimator.
    bool clamp_bracket = true;

    static LossSpec for_family(LossFamily f);

    double resolved_neg_weight(int n_negatives) const;
    void validate() const;
};

// One training example's scores: one positive, N sampled "negatives"
// (drawn from the full pool, so possibly contaminated), and for debiased
// losses M extra positives plus the user's class prior tau_u+.
struct ScoreBatch {
    double pos = 0.0;
    std::vector<double> negs;
    std::vector<double> extra_pos;
    double tau_plus = 0.0;
    std::vector<double> proposal_probs;  // q(j), sampled softmax only
};

struct LossOutput {
    double value = 0.0;
    double d_pos = 0.0;
    std::vector<double> d_negs;
    std::vector<double> d_extra_pos;
};

// Family dispatch. Temperature families receive raw (cosine) scores and
// divide by t internally.
LossOutput eval_loss(const LossSpec& spec, const ScoreBatch& b);

LossOutput loss_sampled_softmax(const LossSpec& spec, const ScoreBatch& b);
LossOutput loss_infonce(const LossSpec& spec, const ScoreBatch& b);
LossOutput loss_debiased_infonce(const LossSpec& spec, const ScoreBatch& b);
LossOutput loss_mine(const LossSpec& spec, const ScoreBatch& b);
LossOutput loss_mine_plus(const LossSpec& spec, const ScoreBatch& b);
LossOutput loss_bpr(const LossSpec& spec, const ScoreBatch& b);
LossOutput loss_pointwise(const LossSpec& spec, const ScoreBatch& b, double weight);
LossOutput loss_debiased_pointwise(const LossSpec& spec, const ScoreBatch& b);

// Full-catalog softmax has its own shape: the scores of every positive item
// of the user plus the scores of the whole catalog.
struct FullSoftmaxOutput {
    double value = 0.0;
    std::vector<double> d_pos_scores;
    std::vector<double> d_all_scores;
};

FullSoftmaxOutput loss_softmax_full(std::span<const double> pos_scores,
                                    std::span<const double> all_scores);

// Hash of the kink/clamp activation pattern (ReLU on/off, bracket floor
// active). Two evaluations with equal signatures lie in the same smooth
// region, so central differences are valid between them.
std::uint64_t activation_signature(const LossSpec& spec, const ScoreBatch& b);

// Worst relative error between analytic derivatives and central finite
// differences over all score inputs; inputs whose +/-h perturbations change
// the activation signature are skipped.
double grad_check(const LossSpec& spec, const ScoreBatch& b, double h);

// Stable helpers shared across modules.
double log_sum_exp(std::span<const double> xs);
double softplus(double x);
double sigmoid(double x);

}  // namespace recloss
