#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "recloss/dataset.hpp"

namespace recloss {

// Weighted matrix factorization solved by alternating closed-form ridge
// systems. Two objectives share the solver:
//
//   original:  sum_{(u,i) in S} (y_ui - 1)^2 + alpha0 * sum_u sum_i y_ui^2
//              + lambda * (sum_u (|I_u+| + alpha0 |I|)^nu ||w_u||^2 + items)
//
//   debiased:  the observed term is re-weighted by a constant c and the
//              alpha0 mass on observed cells is removed in proportion:
//              sum_u [ sum_{i in I_u+} ( c (y_ui - 1)^2 - c alpha0 y_ui^2 )
//                      + alpha0 sum_{t in I} y_ut^2 ] + same regularizer.
//
// Per-user normal equations:
//   original:  (Hs' Hs + alpha0 G + lambda_u I) w = Hs' 1
//   debiased:  (c(1 - alpha0) Hs' Hs + alpha0 G + lambda_u I) w = c Hs' 1
// with G the item Gram matrix and lambda_u = lambda (|I_u+| + alpha0 |I|)^nu.
// The debiased right-hand side uses the exact coordinate minimizer, so every
// half-sweep is a strict coordinate descent step on its own objective.
struct IalsConfig {
    int d = 16;
    double alpha0 = 0.1;   // unobserved weight, must be in (0,1) for debiased
    double lambda = 1e-3;  // global regularization
    double nu = 0.0;       // frequency-scaling exponent
    double c = 1.0;        // constant debias weight c_u; 1 = no up-weighting
    int iters = 10;
    std::uint64_t seed = 0;
    bool debiased = false;

    void validate() const;
};

struct EaseConfig {
    double lambda = 1.0;
    double alpha = 0.0;  // debias strength, c_u - 1; must satisfy alpha < 1
    bool debiased = false;

    void validate() const;
};

struct LinearModel {
    enum class Kind { ials, ease };
    Kind kind = Kind::ials;
    Eigen::MatrixXd user_factors;  // ials: n_users x d
    Eigen::MatrixXd item_factors;  // ials: n_items x d
    Eigen::MatrixXd weights;       // ease: n_items x n_items, zero diagonal
};

LinearModel ials_fit(const InteractionDataset& train, const IalsConfig& cfg);

// Objective value for the configured variant; evaluated by direct summation,
// independent of the solver path.
double ials_objective(const InteractionDataset& train, const IalsConfig& cfg,
                      const Eigen::MatrixXd& user_factors, const Eigen::MatrixXd& item_factors);

// Exposed half-steps (one closed-form solve per user / per item) for the
// equivalence certification.
void ials_half_step_users(const InteractionDataset& train, const IalsConfig& cfg,
                          const Eigen::MatrixXd& item_factors, Eigen::MatrixXd& user_factors);
void ials_half_step_items(const InteractionDataset& train, const IalsConfig& cfg,
                          const Eigen::MatrixXd& user_factors, Eigen::MatrixXd& item_factors);

// (alpha0', lambda') = (alpha0, lambda) / ((1 - alpha0) c).
std::pair<double, double> remap_ials_params(double alpha0, double lambda, double c);

struct Theorem1Report {
    double max_cosine_deviation_users = 0.0;  // max_u 1 - |cos(w_deb, w_orig)|
    double max_cosine_deviation_items = 0.0;
    double k_users = 0.0;                     // fitted global scalar per side
    double k_items = 0.0;
    double max_k_rel_deviation_users = 0.0;   // max_u |w_deb - k w_orig| / |w_deb|
    double max_k_rel_deviation_items = 0.0;
    double max_sweep_cosine_deviation = 0.0;  // worst half-step over the tracked run
    long topk_matching_users = 0;
    long topk_total_users = 0;
    bool topk_identical = false;
};

// Certifies that one debiased half-step equals one original half-step with
// remapped parameters up to a single global scalar, then tracks both
// trajectories for `sweeps` alternating sweeps. Factor scale is a gauge
// freedom of the factorization and is quotiented out between half-steps
// (both runs normalized to unit Frobenius norm); rankings are invariant
// under that rescaling. Requires nu = 0.
Theorem1Report verify_theorem1(const InteractionDataset& train, int d, double alpha0,
                               double lambda, double c, std::uint64_t seed, int sweeps = 10,
                               int topk = 20);

// Item-item ridge autoencoder with zero diagonal.
//   original:  P = (X'X + lambda I)^-1,            W = I - P dMat(1 / diag(P))
//   debiased:  P = (X'X + lambda/(1-alpha) I)^-1,  W = (I - P dMat(1 / diag(P))) / (1-alpha)
LinearModel ease_fit(const InteractionDataset& train, const EaseConfig& cfg);

// lambda' = lambda / ((1 - alpha) * c_u); certification uses c_u = 1, the
// remap of the simplified debiased objective.
double ease_lambda_remap(double lambda, double alpha, double c_u = 1.0);

struct Theorem2Report {
    double max_rel_deviation = 0.0;  // elementwise, (1-alpha) W_deb vs W(lambda')
    long topk_matching_users = 0;
    long topk_total_users = 0;
    bool topk_identical = false;
};

Theorem2Report verify_theorem2(const InteractionDataset& train, double lambda, double alpha,
                               int topk = 10);

// Full item score vector for one user.
Eigen::VectorXd linear_scores(const LinearModel& m, const InteractionDataset& train, int u);

void save_linear(const LinearModel& m, const std::string& prefix);
LinearModel load_linear(const std::string& prefix);

}  // namespace recloss
