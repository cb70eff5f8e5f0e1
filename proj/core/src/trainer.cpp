#include "recloss/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "recloss/eval.hpp"
#include "recloss/rng.hpp"

namespace recloss {

void TrainConfig::validate(const InteractionDataset& train_ds) const {
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (d < 1) throw std::invalid_argument("train: d must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    if (eval_every < 1) throw std::invalid_argument("train: eval_every must be >= 1");
    if (plateau_patience < 1) throw std::invalid_argument("train: plateau_patience must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("train: lr must be > 0");
    if (!(lr_decay > 0.0 && lr_decay < 1.0))
        throw std::invalid_argument("train: lr_decay must be in (0,1)");
    if (!(lr_floor < lr)) throw std::invalid_argument("train: lr_floor must be < lr");
    if (l2_reg < 0.0) throw std::invalid_argument("train: l2_reg must be >= 0");
    if (init_sigma < 0.0) throw std::invalid_argument("train: init_sigma must be >= 0");
    if (eval_k < 1) throw std::invalid_argument("train: eval_k must be >= 1");
    loss.validate();
    sampler.validate(is_debiased(loss.family));
    tau.validate();
    if (loss.family == LossFamily::softmax_full && train_ds.n_items > 50000)
        throw std::invalid_argument(
            "train: softmax_full scores the whole catalog; limited to 50k items");
}

ScoreBatch build_score_batch(const MfModel& m, int u, int pos_item, std::span<const int> negs,
                             std::span<const int> extras, double tau_plus_value,
                             std::span<const double> proposal_probs) {
    ScoreBatch b;
    b.pos = score(m, u, pos_item);
    b.negs.reserve(negs.size());
    for (int j : negs) b.negs.push_back(score(m, u, j));
    b.extra_pos.reserve(extras.size());
    for (int k : extras) b.extra_pos.push_back(score(m, u, k));
    b.tau_plus = tau_plus_value;
    b.proposal_probs.assign(proposal_probs.begin(), proposal_probs.end());
    return b;
}

void accumulate_score_grad(const MfModel& m, int u, int i, double d_score,
                           Eigen::MatrixXd& user_grad, Eigen::MatrixXd& item_grad) {
    if (d_score == 0.0) return;
    const auto w = m.user_emb.row(u);
    const auto h = m.item_emb.row(i);
    if (m.score_mode == ScoreMode::dot) {
        user_grad.row(u) += d_score * h;
        item_grad.row(i) += d_score * w;
        return;
    }
    const double nw = w.norm(), nh = h.norm();
    if (nw < 1e-12 || nh < 1e-12) return;  // score is pinned to 0 there
    const double inv = 1.0 / (nw * nh);
    const double s = w.dot(h) * inv;
    user_grad.row(u) += d_score * (h * inv - (s / (nw * nw)) * w);
    item_grad.row(i) += d_score * (w * inv - (s / (nh * nh)) * h);
}

void backprop_example(const MfModel& m, int u, int pos_item, std::span<const int> negs,
                      std::span<const int> extras, const LossOutput& out, double scale,
                      bool freeze_extra_pos, Eigen::MatrixXd& user_grad,
                      Eigen::MatrixXd& item_grad) {
    accumulate_score_grad(m, u, pos_item, scale * out.d_pos, user_grad, item_grad);
    for (size_t j = 0; j < negs.size(); ++j)
        accumulate_score_grad(m, u, negs[j], scale * out.d_negs[j], user_grad, item_grad);
    if (!freeze_extra_pos) {
        for (size_t k = 0; k < extras.size(); ++k)
            accumulate_score_grad(m, u, extras[k], scale * out.d_extra_pos[k], user_grad,
                                  item_grad);
    }
}

AdamOptimizer::AdamOptimizer(int rows, int cols)
    : m_(Eigen::MatrixXd::Zero(rows, cols)), v_(Eigen::MatrixXd::Zero(rows, cols)) {}

void AdamOptimizer::step(Eigen::MatrixXd& table, const Eigen::MatrixXd& grads,
                         const std::vector<int>& touched_rows, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    const int cols = static_cast<int>(table.cols());
    for (int r : touched_rows) {
        for (int c = 0; c < cols; ++c) {
            const double g = grads(r, c);
            m_(r, c) = beta1 * m_(r, c) + (1.0 - beta1) * g;
            v_(r, c) = beta2 * v_(r, c) + (1.0 - beta2) * g * g;
            table(r, c) -= lr * (m_(r, c) / bc1) / (std::sqrt(v_(r, c) / bc2) + eps);
        }
    }
}

namespace {

struct TouchedRows {
    std::vector<char> flag;
    std::vector<int> list;

    explicit TouchedRows(int n) : flag(n, 0) {}
    void mark(int r) {
        if (!flag[r]) {
            flag[r] = 1;
            list.push_back(r);
        }
    }
    void clear(Eigen::MatrixXd& grads) {
        for (int r : list) {
            grads.row(r).setZero();
            flag[r] = 0;
        }
        list.clear();
    }
};

std::vector<double> proposal_for(const ItemSampler& sampler, int u,
                                 const std::vector<int>& negs) {
    // Expected draw count N * p(j): the correction that makes the sampled
    // denominator an unbiased estimate of the full-catalog sum.
    std::vector<double> q(negs.size());
    const double n = static_cast<double>(negs.size());
    for (size_t j = 0; j < negs.size(); ++j) q[j] = n * sampler.draw_prob(u, negs[j]);
    return q;
}

}  // namespace

std::pair<MfModel, TrainHistory> train(const TrainConfig& cfg, const InteractionDataset& train_ds,
                                       const InteractionDataset& valid_ds) {
    cfg.validate(train_ds);
    const bool debiased = is_debiased(cfg.loss.family);
    const bool full_softmax = cfg.loss.family == LossFamily::softmax_full;
    const bool needs_proposal = cfg.loss.family == LossFamily::sampled_softmax;
    const bool has_valid = valid_ds.n_interactions > 0;
    if (has_valid &&
        (valid_ds.n_users != train_ds.n_users || valid_ds.n_items != train_ds.n_items))
        throw std::invalid_argument("train: train/valid dimension mismatch");

    MfModel model = init_model(train_ds.n_users, train_ds.n_items, cfg.d, cfg.init_scheme,
                               cfg.init_sigma, substream_seed(cfg.seed, "init"),
                               cfg.loss.score_mode);
    SamplerConfig sampler_cfg = cfg.sampler;
    ItemSampler sampler(sampler_cfg, train_ds);

    std::vector<double> tau(train_ds.n_users, 0.0);
    if (debiased) {
        for (int u = 0; u < train_ds.n_users; ++u)
            if (!train_ds.pos_by_user[u].empty()) tau[u] = tau_plus(cfg.tau, train_ds, u);
    }

    auto pairs = train_ds.to_pairs();
    if (pairs.empty()) throw std::invalid_argument("train: empty training set");

    Eigen::MatrixXd user_grad = Eigen::MatrixXd::Zero(train_ds.n_users, cfg.d);
    Eigen::MatrixXd item_grad = Eigen::MatrixXd::Zero(train_ds.n_items, cfg.d);
    TouchedRows touched_users(train_ds.n_users), touched_items(train_ds.n_items);
    AdamOptimizer user_opt(train_ds.n_users, cfg.d), item_opt(train_ds.n_items, cfg.d);

    TrainHistory history;
    double lr = cfg.lr;
    double best_recall = -std::numeric_limits<double>::infinity();
    double last_recall = std::numeric_limits<double>::quiet_NaN();
    int evals_without_improvement = 0;
    std::string stop_reason = "max_epochs";

    std::vector<int> negs, extras, shared_negs;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        auto shuffle_rng = make_rng(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch));
        std::shuffle(pairs.begin(), pairs.end(), shuffle_rng);
        auto sample_rng = make_rng(cfg.seed, "sampler", static_cast<std::uint64_t>(epoch));

        double loss_sum = 0.0;
        long n_examples = 0;
        const long n_pairs = static_cast<long>(pairs.size());
        for (long start = 0; start < n_pairs; start += cfg.batch_size) {
            const long end = std::min<long>(start + cfg.batch_size, n_pairs);
            const double scale = 1.0 / static_cast<double>(end - start);
            double batch_loss = 0.0;

            if (cfg.sampler.shared_pool) sampler.sample_negatives(0, sample_rng, shared_negs);

            for (long p = start; p < end; ++p) {
                const auto [u, i] = pairs[p];
                if (full_softmax) {
                    const Eigen::VectorXd all = score_all_items(model, u);
                    const double pos_score = all(i);
                    const auto out = loss_softmax_full(
                        std::span<const double>(&pos_score, 1),
                        std::span<const double>(all.data(), all.size()));
                    batch_loss += out.value;
                    accumulate_score_grad(model, u, i, scale * out.d_pos_scores[0], user_grad,
                                          item_grad);
                    for (int j = 0; j < train_ds.n_items; ++j) {
                        accumulate_score_grad(model, u, j, scale * out.d_all_scores[j], user_grad,
                                              item_grad);
                        touched_items.mark(j);
                    }
                    touched_users.mark(u);
                } else {
                    const std::vector<int>& batch_negs =
                        cfg.sampler.shared_pool
                            ? shared_negs
                            : (sampler.sample_negatives(u, sample_rng, negs), negs);
                    if (debiased)
                        extras = sampler.sample_extra_positives(u, cfg.sampler.m_extra_positives,
                                                                sample_rng);
                    else
                        extras.clear();
                    std::vector<double> proposal;
                    if (needs_proposal) proposal = proposal_for(sampler, u, batch_negs);
                    const ScoreBatch b =
                        build_score_batch(model, u, i, batch_negs, extras, tau[u], proposal);
                    const LossOutput out = eval_loss(cfg.loss, b);
                    batch_loss += out.value;
                    backprop_example(model, u, i, batch_negs, extras, out, scale,
                                     cfg.freeze_extra_pos_grads, user_grad, item_grad);
                    touched_users.mark(u);
                    touched_items.mark(i);
                    for (int j : batch_negs) touched_items.mark(j);
                    if (!cfg.freeze_extra_pos_grads)
                        for (int k : extras) touched_items.mark(k);
                }
                ++n_examples;
            }

            if (!std::isfinite(batch_loss)) {
                std::ostringstream os;
                os << "train: non-finite loss (family=" << to_string(cfg.loss.family)
                   << " epoch=" << epoch << " batch_start=" << start << " lr=" << lr << ")";
                throw std::runtime_error(os.str());
            }
            loss_sum += batch_loss;

            if (cfg.l2_reg > 0.0) {
                for (int r : touched_users.list)
                    user_grad.row(r) += 2.0 * cfg.l2_reg * model.user_emb.row(r);
                for (int r : touched_items.list)
                    item_grad.row(r) += 2.0 * cfg.l2_reg * model.item_emb.row(r);
            }
            user_opt.step(model.user_emb, user_grad, touched_users.list, lr);
            item_opt.step(model.item_emb, item_grad, touched_items.list, lr);
            touched_users.clear(user_grad);
            touched_items.clear(item_grad);
        }

        const double epoch_loss = loss_sum / static_cast<double>(n_examples);

        if (has_valid && epoch % cfg.eval_every == 0) {
            last_recall =
                evaluate(model_scores(model), train_ds, valid_ds, cfg.eval_k).recall_at_k;
            if (last_recall > best_recall + 1e-5) {
                best_recall = last_recall;
                evals_without_improvement = 0;
            } else if (++evals_without_improvement >= cfg.plateau_patience) {
                lr *= cfg.lr_decay;
                evals_without_improvement = 0;
            }
        }

        history.records.push_back({epoch, epoch_loss, last_recall, lr});
        if (lr < cfg.lr_floor) {
            stop_reason = "lr_floor";
            break;
        }
    }

    history.stop_reason = stop_reason;
    return {std::move(model), std::move(history)};
}

void write_history_csv(const TrainHistory& history, std::ostream& out) {
    out << "epoch,loss,recall20,lr\n";
    out.precision(10);
    for (const auto& r : history.records)
        out << r.epoch << "," << r.train_loss << "," << r.recall << "," << r.lr << "\n";
}

namespace {

double example_loss_value(const MfModel& m, const LossSpec& spec, int u, int pos_item,
                          std::span<const int> negs, std::span<const int> extras,
                          double tau_value) {
    if (spec.family == LossFamily::softmax_full) {
        const Eigen::VectorXd all = score_all_items(m, u);
        const double pos_score = all(pos_item);
        return loss_softmax_full(std::span<const double>(&pos_score, 1),
                                 std::span<const double>(all.data(), all.size()))
            .value;
    }
    std::vector<double> proposal;
    if (spec.family == LossFamily::sampled_softmax)
        proposal.assign(negs.size(), 1.0);  // fixed unit weights for checking
    const ScoreBatch b = build_score_batch(m, u, pos_item, negs, extras, tau_value, proposal);
    return eval_loss(spec, b).value;
}

std::uint64_t model_signature(const MfModel& m, const LossSpec& spec, int u, int pos_item,
                              std::span<const int> negs, std::span<const int> extras,
                              double tau_value) {
    if (spec.family == LossFamily::softmax_full) return 0;
    std::vector<double> proposal;
    if (spec.family == LossFamily::sampled_softmax) proposal.assign(negs.size(), 1.0);
    return activation_signature(spec,
                                build_score_batch(m, u, pos_item, negs, extras, tau_value,
                                                  proposal));
}

}  // namespace

EmbeddingGradCheck embedding_grad_check(const MfModel& m, const LossSpec& spec, int u,
                                        int pos_item, std::span<const int> negs,
                                        std::span<const int> extras, double tau_plus_value,
                                        double h) {
    if (!(h >= 1e-7 && h <= 1e-3))
        throw std::invalid_argument("embedding_grad_check: h must be in [1e-7, 1e-3]");

    // Analytic gradients via the training backprop path.
    Eigen::MatrixXd user_grad = Eigen::MatrixXd::Zero(m.n_users(), m.dim());
    Eigen::MatrixXd item_grad = Eigen::MatrixXd::Zero(m.n_items(), m.dim());
    if (spec.family == LossFamily::softmax_full) {
        const Eigen::VectorXd all = score_all_items(m, u);
        const double pos_score = all(pos_item);
        const auto out = loss_softmax_full(std::span<const double>(&pos_score, 1),
                                           std::span<const double>(all.data(), all.size()));
        accumulate_score_grad(m, u, pos_item, out.d_pos_scores[0], user_grad, item_grad);
        for (int j = 0; j < m.n_items(); ++j)
            accumulate_score_grad(m, u, j, out.d_all_scores[j], user_grad, item_grad);
    } else {
        std::vector<double> proposal;
        if (spec.family == LossFamily::sampled_softmax) proposal.assign(negs.size(), 1.0);
        const ScoreBatch b = build_score_batch(m, u, pos_item, negs, extras, tau_plus_value,
                                               proposal);
        const LossOutput out = eval_loss(spec, b);
        backprop_example(m, u, pos_item, negs, extras, out, 1.0, false, user_grad, item_grad);
    }

    EmbeddingGradCheck result;
    MfModel probe = m;
    auto check_coord = [&](Eigen::MatrixXd& table, const Eigen::MatrixXd& analytic_table, int r,
                           int c) {
        const bool zero_norm_cosine =
            m.score_mode == ScoreMode::cosine && table.row(r).norm() < 1e-12;
        if (zero_norm_cosine) {
            ++result.n_skipped;  // gradient defined as 0 by convention
            return;
        }
        const double saved = table(r, c);
        table(r, c) = saved - 10.0 * h;
        const std::uint64_t sig_lo =
            model_signature(probe, spec, u, pos_item, negs, extras, tau_plus_value);
        table(r, c) = saved + 10.0 * h;
        const std::uint64_t sig_hi =
            model_signature(probe, spec, u, pos_item, negs, extras, tau_plus_value);
        if (sig_lo != sig_hi) {
            table(r, c) = saved;
            ++result.n_skipped;
            return;
        }
        table(r, c) = saved - h;
        const double lo = example_loss_value(probe, spec, u, pos_item, negs, extras,
                                             tau_plus_value);
        table(r, c) = saved + h;
        const double hi = example_loss_value(probe, spec, u, pos_item, negs, extras,
                                             tau_plus_value);
        table(r, c) = saved;
        const double fd = (hi - lo) / (2.0 * h);
        const double analytic = analytic_table(r, c);
        const double err = std::abs(analytic - fd) / (std::abs(analytic) + std::abs(fd) + 1.0);
        result.worst_rel_error = std::max(result.worst_rel_error, err);
        ++result.n_checked;
    };

    for (int r = 0; r < probe.n_users(); ++r)
        for (int c = 0; c < probe.dim(); ++c) check_coord(probe.user_emb, user_grad, r, c);
    for (int r = 0; r < probe.n_items(); ++r)
        for (int c = 0; c < probe.dim(); ++c) check_coord(probe.item_emb, item_grad, r, c);
    return result;
}

double GradientSuiteReport::worst_rel_error() const {
    double w = 0.0;
    for (const auto& r : results) w = std::max(w, r.worst_rel_error);
    return w;
}

GradientSuiteReport gradient_suite(int instances_per_family, std::uint64_t seed) {
    GradientSuiteReport report;
    const int n_users = 5, n_items = 9, d = 4;
    for (LossFamily family : all_loss_families()) {
        GradientSuiteResult res;
        res.family = family;
        LossSpec spec = LossSpec::for_family(family);
        if (uses_temperature(family)) spec.temperature = 0.5;
        if (family == LossFamily::ccl || family == LossFamily::debiased_ccl) spec.margin = 0.4;
        if (family == LossFamily::mine_plus) spec.neg_weight = 1.1;

        for (int inst = 0; inst < instances_per_family; ++inst) {
            auto rng = make_rng(seed, to_string(family), static_cast<std::uint64_t>(inst));
            const MfModel m =
                init_model(n_users, n_items, d, InitScheme::normal, 0.7,
                           substream_seed(seed, "suite-model", inst), spec.score_mode);
            std::uniform_int_distribution<int> users(0, n_users - 1), items(0, n_items - 1);
            std::uniform_real_distribution<double> taus(0.05, 0.5);
            const int u = users(rng);
            const int i = items(rng);
            std::vector<int> negs(6), extras(3);
            for (int& x : negs) x = items(rng);
            for (int& x : extras) x = items(rng);
            const double tau = taus(rng);
            const auto check = embedding_grad_check(m, spec, u, i, negs, extras, tau, 1e-5);
            res.worst_rel_error = std::max(res.worst_rel_error, check.worst_rel_error);
            res.n_checked += check.n_checked;
            res.n_skipped += check.n_skipped;
        }
        report.results.push_back(res);
    }
    return report;
}

}  // namespace recloss
