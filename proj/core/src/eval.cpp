#include "recloss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace recloss {

EvalReport evaluate(const ScoresFn& scores_fn, const InteractionDataset& train,
                    const InteractionDataset& test, int k, bool keep_per_user) {
    if (k < 1) throw std::invalid_argument("evaluate: K must be >= 1");
    if (train.n_items != test.n_items || train.n_users != test.n_users)
        throw std::invalid_argument("evaluate: train/test dimension mismatch");
    if (test.n_interactions == 0) throw std::invalid_argument("evaluate: empty test set");

    EvalReport report;
    report.k = k;
    double recall_sum = 0.0, ndcg_sum = 0.0;

    std::vector<int> idx(train.n_items);
    for (int u = 0; u < test.n_users; ++u) {
        const auto& test_items = test.pos_by_user[u];
        if (test_items.empty()) continue;

        Eigen::VectorXd scores = scores_fn(u);
        if (scores.size() != train.n_items)
            throw std::invalid_argument("evaluate: scores_fn returned wrong length");
        for (int i : train.pos_by_user[u]) scores(i) = -std::numeric_limits<double>::infinity();

        std::iota(idx.begin(), idx.end(), 0);
        const int kk = std::min<int>(k, train.n_items);
        std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(), [&](int a, int b) {
            if (scores(a) != scores(b)) return scores(a) > scores(b);
            return a < b;
        });

        int hits = 0;
        double dcg = 0.0;
        for (int r = 0; r < kk; ++r) {
            if (std::binary_search(test_items.begin(), test_items.end(), idx[r])) {
                ++hits;
                dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
            }
        }
        double idcg = 0.0;
        const int ideal = std::min<int>(kk, static_cast<int>(test_items.size()));
        for (int r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);

        const double recall = static_cast<double>(hits) / static_cast<double>(test_items.size());
        const double ndcg = idcg > 0.0 ? dcg / idcg : 0.0;
        recall_sum += recall;
        ndcg_sum += ndcg;
        ++report.n_users_evaluated;
        if (keep_per_user) {
            report.per_user_recall.push_back(recall);
            report.per_user_ndcg.push_back(ndcg);
        }
    }
    if (report.n_users_evaluated == 0) throw std::invalid_argument("evaluate: no evaluable users");
    report.recall_at_k = recall_sum / report.n_users_evaluated;
    report.ndcg_at_k = ndcg_sum / report.n_users_evaluated;
    return report;
}

ScoresFn popularity_baseline(const InteractionDataset& train) {
    if (train.n_interactions == 0)
        throw std::invalid_argument("popularity_baseline: empty train set");
    Eigen::VectorXd pop(train.n_items);
    for (int i = 0; i < train.n_items; ++i)
        pop(i) = static_cast<double>(train.pos_by_item[i].size());
    return [pop](int) { return pop; };
}

ScoresFn model_scores(const MfModel& model) {
    const MfModel* m = &model;
    return [m](int u) { return score_all_items(*m, u); };
}

ScoresFn linear_model_scores(const LinearModel& model, const InteractionDataset& train) {
    const LinearModel* m = &model;
    const InteractionDataset* ds = &train;
    return [m, ds](int u) { return linear_scores(*m, *ds, u); };
}

void write_eval_csv(const EvalReport& report, const std::string& model_label,
                    const std::string& loss_label, std::ostream& out, bool header) {
    if (header) out << "model,loss,K,recall,ndcg,n_users\n";
    out.precision(10);
    out << model_label << "," << loss_label << "," << report.k << "," << report.recall_at_k << ","
        << report.ndcg_at_k << "," << report.n_users_evaluated << "\n";
}

std::string format_eval_table(const EvalReport& report, const std::string& model_label,
                              const std::string& loss_label) {
    std::ostringstream os;
    os.precision(6);
    os << "model=" << model_label << " loss=" << loss_label << "\n"
       << "  Recall@" << report.k << " = " << report.recall_at_k << "\n"
       << "  NDCG@" << report.k << "   = " << report.ndcg_at_k << "\n"
       << "  users      = " << report.n_users_evaluated << "\n";
    return os.str();
}

}  // namespace recloss
