#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recloss/dataset.hpp"
#include "recloss/losses.hpp"
#include "recloss/model.hpp"
#include "recloss/sampling.hpp"

namespace recloss {

struct TrainConfig {
    int batch_size = 512;
    double lr = 1e-4;
    double lr_floor = 1e-6;
    double lr_decay = 0.5;
    int plateau_patience = 5;  // evaluations without improvement before decay
    double l2_reg = 0.0;
    int max_epochs = 500;
    int d = 64;
    InitScheme init_scheme = InitScheme::normal;
    double init_sigma = 0.1;
    SamplerConfig sampler;
    TauPolicy tau;
    LossSpec loss;
    int eval_every = 5;  // epochs between validation evaluations
    int eval_k = 20;
    std::uint64_t seed = 42;
    // Ablation: stop gradients through the extra-positive correction scores.
    bool freeze_extra_pos_grads = false;

    void validate(const InteractionDataset& train_ds) const;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double recall = 0.0;  // last computed validation Recall@K; NaN before first eval
    double lr = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> records;
    std::string stop_reason;
};

// SGD/Adam training of an MF model under any loss family. Each epoch visits
// every training pair once in seeded shuffled order; per positive, N
// negatives (and M extra positives for debiased families) are sampled, the
// loss kernel is evaluated on the example's scores, and its derivatives are
// pushed through the scoring function into the embedding tables.
// Deterministic given the config seed. Pass an empty valid_ds to disable
// validation and the plateau schedule.
std::pair<MfModel, TrainHistory> train(const TrainConfig& cfg,
                                       const InteractionDataset& train_ds,
                                       const InteractionDataset& valid_ds);

// CSV: "epoch,loss,recall20,lr"
void write_history_csv(const TrainHistory& history, std::ostream& out);

// Adam with moment tables per embedding matrix; only touched rows are
// updated, with the usual global-step bias correction (beta1 = 0.9,
// beta2 = 0.999, eps = 1e-8).
class AdamOptimizer {
public:
    AdamOptimizer(int rows, int cols);
    void step(Eigen::MatrixXd& table, const Eigen::MatrixXd& grads,
              const std::vector<int>& touched_rows, double lr);

private:
    Eigen::MatrixXd m_, v_;
    long t_ = 0;
};

// --- building blocks shared by train(), gradient_suite() and the tests ---

ScoreBatch build_score_batch(const MfModel& m, int u, int pos_item, std::span<const int> negs,
                             std::span<const int> extras, double tau_plus_value,
                             std::span<const double> proposal_probs = {});

// Adds d_score * d score(u,i) / d embeddings into the gradient tables,
// including the cosine normalization chain rule (zero-norm rows contribute
// zero gradient, matching the scoring convention).
void accumulate_score_grad(const MfModel& m, int u, int i, double d_score,
                           Eigen::MatrixXd& user_grad, Eigen::MatrixXd& item_grad);

// Routes a loss kernel's output back to the embeddings of one example.
void backprop_example(const MfModel& m, int u, int pos_item, std::span<const int> negs,
                      std::span<const int> extras, const LossOutput& out, double scale,
                      bool freeze_extra_pos, Eigen::MatrixXd& user_grad,
                      Eigen::MatrixXd& item_grad);

struct EmbeddingGradCheck {
    double worst_rel_error = 0.0;
    long n_checked = 0;
    long n_skipped = 0;  // kink-adjacent or zero-norm coordinates
};

// Central finite differences of the example loss with respect to every
// embedding coordinate, compared against the analytic backprop path.
EmbeddingGradCheck embedding_grad_check(const MfModel& m, const LossSpec& spec, int u,
                                        int pos_item, std::span<const int> negs,
                                        std::span<const int> extras, double tau_plus_value,
                                        double h);

struct GradientSuiteResult {
    LossFamily family;
    double worst_rel_error = 0.0;
    long n_checked = 0;
    long n_skipped = 0;
};

struct GradientSuiteReport {
    std::vector<GradientSuiteResult> results;
    double worst_rel_error() const;
};

// Runs embedding_grad_check for every loss family on random micro models.
GradientSuiteReport gradient_suite(int instances_per_family, std::uint64_t seed);

}  // namespace recloss
