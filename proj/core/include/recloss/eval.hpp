#pragma once

#include <Eigen/Dense>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "recloss/dataset.hpp"
#include "recloss/linear.hpp"
#include "recloss/model.hpp"

namespace recloss {

struct EvalReport {
    int k = 0;
    double recall_at_k = 0.0;
    double ndcg_at_k = 0.0;
    long n_users_evaluated = 0;
    std::vector<double> per_user_recall;  // filled when keep_per_user
    std::vector<double> per_user_ndcg;
};

using ScoresFn = std::function<Eigen::VectorXd(int u)>;

// Full-ranking top-K evaluation. Per user with a non-empty test set:
// training positives are masked to -inf, the top K items are taken by score
// with ties broken by ascending item index, and
//   Recall@K = |TopK  cap Test(u)| / |Test(u)|
//   NDCG@K   = DCG@K / IDCG@K with 1/log2(rank+1) gains.
// Users without test items are excluded from the means.
EvalReport evaluate(const ScoresFn& scores_fn, const InteractionDataset& train,
                    const InteractionDataset& test, int k, bool keep_per_user = false);

// Every user gets the same ranking: items by descending train popularity.
ScoresFn popularity_baseline(const InteractionDataset& train);

ScoresFn model_scores(const MfModel& model);
ScoresFn linear_model_scores(const LinearModel& model, const InteractionDataset& train);

// CSV row "model,loss,K,recall,ndcg,n_users".
void write_eval_csv(const EvalReport& report, const std::string& model_label,
                    const std::string& loss_label, std::ostream& out, bool header = true);

std::string format_eval_table(const EvalReport& report, const std::string& model_label,
                              const std::string& loss_label);

}  // namespace recloss
