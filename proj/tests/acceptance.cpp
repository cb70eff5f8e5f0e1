// Acceptance suite: numbered end-to-end gates with pinned tolerances.
// Prints one PASS/FAIL line per criterion; the exit code is the number of
// failed criteria. Run a subset with e.g. "acceptance 1 3 7".

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "recloss/bounds.hpp"
#include "recloss/config.hpp"
#include "recloss/dataset.hpp"
#include "recloss/eval.hpp"
#include "recloss/linear.hpp"
#include "recloss/losses.hpp"
#include "recloss/rng.hpp"
#include "recloss/synthetic.hpp"
#include "recloss/trainer.hpp"

using namespace recloss;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct Criterion {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [FAILED: " << what << "]";
        }
    }
};

ScoreBatch random_batch(std::mt19937_64& rng, int n, int m, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    std::uniform_real_distribution<double> taus(0.02, 0.6);
    ScoreBatch b;
    b.pos = d(rng);
    b.negs.resize(n);
    for (double& x : b.negs) x = d(rng);
    b.extra_pos.resize(m);
    for (double& x : b.extra_pos) x = d(rng);
    b.tau_plus = taus(rng);
    return b;
}

// ---- criterion 1: embedding-level gradient certification ------------------

Criterion criterion_gradients() {
    Criterion c;
    auto report = gradient_suite(100, 20250810);
    double worst = 0.0;
    for (const auto& r : report.results) {
        worst = std::max(worst, r.worst_rel_error);
        c.require(r.worst_rel_error < 1e-4,
                  std::string(to_string(r.family)) + " rel err " +
                      std::to_string(r.worst_rel_error));
    }
    c.detail << "11 families x 100 micro-instances, worst rel err " << worst;
    return c;
}

// ---- criterion 2: kernel vs independent direct-formula oracle -------------

Criterion criterion_oracles() {
    Criterion c;
    auto rng = make_rng(7, "acceptance-oracle");
    const int trials = 1000;
    double worst = 0.0;
    auto track = [&](double impl, double want, const char* who) {
        const double err = std::abs(impl - want);
        worst = std::max(worst, err);
        c.require(err < 1e-12, std::string(who) + " abs err " + std::to_string(err));
    };

    for (int i = 0; i < trials; ++i) {
        ScoreBatch b = random_batch(rng, 8, 3, 2.0);

        LossSpec info = LossSpec::for_family(LossFamily::infonce);
        info.temperature = 0.5;
        track(eval_loss(info, b).value, oracle::infonce(b.pos, b.negs, 0.5), "infonce");

        LossSpec dinfo = LossSpec::for_family(LossFamily::debiased_infonce);
        dinfo.temperature = 0.5;
        dinfo.neg_weight = 8.0;
        track(eval_loss(dinfo, b).value,
              oracle::debiased_infonce(b.pos, b.negs, b.extra_pos, b.tau_plus, 0.5, 8.0),
              "debiased_infonce");

        LossSpec mine = LossSpec::for_family(LossFamily::mine);
        track(eval_loss(mine, b).value, oracle::mine(b.pos, b.negs), "mine");

        LossSpec mine_plus = LossSpec::for_family(LossFamily::mine_plus);
        mine_plus.temperature = 0.5;
        mine_plus.neg_weight = 1.1;
        track(eval_loss(mine_plus, b).value, oracle::mine_plus(b.pos, b.negs, 0.5, 1.1),
              "mine_plus");

        LossSpec bpr = LossSpec::for_family(LossFamily::bpr);
        track(eval_loss(bpr, b).value, oracle::bpr(b.pos, b.negs), "bpr");

        LossSpec mse = LossSpec::for_family(LossFamily::mse);
        mse.ccl_weight = 0.7;
        track(eval_loss(mse, b).value, oracle::mse(b.pos, b.negs, 0.7), "mse");

        LossSpec ccl = LossSpec::for_family(LossFamily::ccl);
        ccl.ccl_weight = 1.4;
        ccl.margin = 0.3;
        track(eval_loss(ccl, b).value, oracle::ccl(b.pos, b.negs, 1.4, 0.3), "ccl");

        LossSpec dmse = LossSpec::for_family(LossFamily::debiased_mse);
        dmse.neg_weight = 0.8;
        track(eval_loss(dmse, b).value,
              oracle::debiased_pointwise_mse(b.pos, b.negs, b.extra_pos, b.tau_plus, 0.8, true),
              "debiased_mse");

        LossSpec dccl = LossSpec::for_family(LossFamily::debiased_ccl);
        dccl.neg_weight = 0.7;
        dccl.margin = 0.25;
        track(eval_loss(dccl, b).value,
              oracle::debiased_pointwise_ccl(b.pos, b.negs, b.extra_pos, b.tau_plus, 0.7, 0.25,
                                             true),
              "debiased_ccl");

        LossSpec ssoft = LossSpec::for_family(LossFamily::sampled_softmax);
        ScoreBatch sb = b;
        sb.proposal_probs.resize(sb.negs.size());
        std::uniform_real_distribution<double> qd(0.05, 1.0);
        for (double& q : sb.proposal_probs) q = qd(rng);
        track(eval_loss(ssoft, sb).value,
              oracle::sampled_softmax(sb.pos, sb.negs, sb.proposal_probs), "sampled_softmax");

        std::vector<double> all(12), pos(2);
        std::uniform_real_distribution<double> sd(-2.0, 2.0);
        for (double& x : all) x = sd(rng);
        pos[0] = all[0];
        pos[1] = all[1];
        track(loss_softmax_full(pos, all).value, oracle::softmax_full(pos, all), "softmax_full");
    }
    c.detail << "11 families x " << trials << " random batches, worst abs err " << worst;
    return c;
}

// ---- criterion 3: bound-chain certification --------------------------------

Criterion criterion_bounds() {
    Criterion c;
    const std::vector<int> n_list = {1, 2, 8, 64, 800};
    const std::vector<double> sigmas = {0.01, 1.0, 10.0};
    const int per_cell = 7000;  // 7000 x 15 cells > 1e5 batches
    auto rows = tightness_sweep_gaussian(n_list, sigmas, per_cell, 424242);
    long violations = 0;
    double min_slack = 0.0;
    for (const auto& r : rows) {
        violations += r.violations;
        min_slack = std::min(min_slack, r.min_slack);
    }
    c.require(violations == 0, std::to_string(violations) + " violations");

    // all-equal closed forms, exact per N
    for (int n : n_list) {
        ScoreBatch b;
        b.pos = 0.37;
        b.negs.assign(n, 0.37);
        const auto report = check_info_mine_chain(b);
        const double slack_a = report.checks[0].slack;
        const double slack_c = report.checks[2].slack;
        c.require(std::abs(slack_a - std::log((n + 1.0) / n)) < 1e-12, "slack(a) closed form");
        c.require(std::abs(slack_c - std::log(static_cast<double>(n))) < 1e-12,
                  "slack(c) closed form");
    }
    c.detail << per_cell * n_list.size() * sigmas.size() << " batches over N in {1,2,8,64,800}, "
             << violations << " violations, min slack " << min_slack;
    return c;
}

// ---- criterion 4: theorem 1 (debiased iALS remap) --------------------------

Criterion criterion_theorem1() {
    Criterion c;
    auto ds = synthetic_uniform(200, 150, 0.04, 31337);
    auto report = verify_theorem1(ds, 16, 0.1, 1e-2, 1.5, 2718, 10, 20);
    c.require(report.max_cosine_deviation_users < 1e-10, "user half-step deviation");
    c.require(report.max_cosine_deviation_items < 1e-10, "item half-step deviation");
    c.require(report.max_k_rel_deviation_users < 1e-9, "global scalar constancy (users)");
    c.require(report.max_k_rel_deviation_items < 1e-9, "global scalar constancy (items)");
    c.require(report.max_sweep_cosine_deviation < 1e-10, "tracked sweep deviation");
    c.require(report.topk_identical, "top-20 lists");
    c.detail << "200x150, nu=0, c=1.5: cosine dev "
             << std::max(report.max_cosine_deviation_users, report.max_cosine_deviation_items)
             << ", k=(" << report.k_users << "," << report.k_items << "), top-20 "
             << report.topk_matching_users << "/" << report.topk_total_users;
    return c;
}

// ---- criterion 5: theorem 2 (debiased EASE remap) ---------------------------

Criterion criterion_theorem2() {
    Criterion c;
    double worst = 0.0;
    long matched = 0, total = 0;
    for (int i = 0; i < 20; ++i) {
        auto rng = make_rng(99, "acc-th2", i);
        std::uniform_int_distribution<int> users(20, 60), items(10, 200);
        std::uniform_real_distribution<double> lambdas(0.1, 2.0), alphas(0.0, 0.9);
        auto ds = synthetic_uniform(users(rng), items(rng), 0.08,
                                    substream_seed(99, "acc-th2-ds", i));
        auto report = verify_theorem2(ds, lambdas(rng), alphas(rng), 10);
        worst = std::max(worst, report.max_rel_deviation);
        matched += report.topk_matching_users;
        total += report.topk_total_users;
        c.require(report.max_rel_deviation < 1e-10, "elementwise deviation");
        c.require(report.topk_identical, "top-10 lists");
    }
    c.detail << "20 instances up to 200 items, worst rel dev " << worst << ", top-10 " << matched
             << "/" << total;
    return c;
}

// ---- criterion 6: reduction identities --------------------------------------

Criterion criterion_reductions() {
    Criterion c;
    auto rng = make_rng(11, "acc-reduce");
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        ScoreBatch b = random_batch(rng, 8, 2, 1.0);

        LossSpec dinfo = LossSpec::for_family(LossFamily::debiased_infonce);
        dinfo.temperature = 0.5;
        dinfo.neg_weight = 8.0;
        ScoreBatch zb = b;
        zb.tau_plus = 1e-13;
        LossSpec info = LossSpec::for_family(LossFamily::infonce);
        info.temperature = 0.5;
        const double d1 = std::abs(eval_loss(dinfo, zb).value - eval_loss(info, b).value);
        worst = std::max(worst, d1);
        c.require(d1 < 1e-10, "debiased InfoNCE at tau->0");

        LossSpec plus = LossSpec::for_family(LossFamily::mine_plus);
        plus.temperature = 0.5;
        plus.neg_weight = 1.0;
        LossSpec mine = LossSpec::for_family(LossFamily::mine);
        ScoreBatch scaled = b;
        scaled.pos /= 0.5;
        for (double& x : scaled.negs) x /= 0.5;
        const double d2 = std::abs(eval_loss(plus, b).value - eval_loss(mine, scaled).value);
        worst = std::max(worst, d2);
        c.require(d2 < 1e-10, "MINE+ at lambda=1");
    }

    for (int i = 0; i < 5; ++i) {
        auto ds = synthetic_uniform(25, 18, 0.15, 500 + i);
        EaseConfig orig;
        orig.lambda = 0.3 + 0.2 * i;
        EaseConfig deb = orig;
        deb.alpha = 0.0;
        deb.debiased = true;
        const double d3 = (ease_fit(ds, orig).weights - ease_fit(ds, deb).weights)
                              .cwiseAbs()
                              .maxCoeff();
        worst = std::max(worst, d3);
        c.require(d3 < 1e-10, "debiased EASE at alpha=0");
    }
    c.detail << "three identities, worst deviation " << worst;
    return c;
}

// ---- criterion 7: end-to-end sanity vs popularity ---------------------------

Criterion criterion_end_to_end() {
    Criterion c;
    auto all = synthetic_blocks(1000, 1700, 10, 0.25, 0.014, 12345);
    SplitSpec sp;
    sp.test_fraction = 0.2;
    sp.seed = 9;
    auto [train_full, test_ds] = split(all, sp);
    SplitSpec vs;
    vs.test_fraction = 0.1;
    vs.seed = 10;
    auto [train_ds, valid_ds] = split(train_full, vs);

    const auto pop = evaluate(popularity_baseline(train_full), train_full, test_ds, 20);
    c.detail << "popularity recall@20 " << pop.recall_at_k << ";";

    std::map<std::string, double> recalls;
    for (LossFamily fam : {LossFamily::bpr, LossFamily::infonce, LossFamily::mine_plus,
                           LossFamily::ccl, LossFamily::debiased_ccl, LossFamily::mse}) {
        TrainConfig cfg;
        cfg.loss = LossSpec::for_family(fam);
        if (uses_temperature(fam)) cfg.loss.temperature = 0.2;
        if (fam == LossFamily::ccl || fam == LossFamily::debiased_ccl) cfg.loss.margin = 0.4;
        if (fam == LossFamily::mine_plus) cfg.loss.neg_weight = 1.1;
        cfg.d = 32;
        cfg.batch_size = 512;
        cfg.lr = 3e-3;
        cfg.max_epochs = 30;
        cfg.eval_every = 5;
        cfg.l2_reg = 1e-6;
        cfg.seed = 77;
        cfg.sampler.n_negatives = 64;
        cfg.sampler.m_extra_positives = is_debiased(fam) ? 10 : 0;
        cfg.tau.mode = TauMode::proportional;
        cfg.tau.alpha = 0.5;

        auto [model, hist] = train(cfg, train_ds, valid_ds);
        const auto rep = evaluate(model_scores(model), train_full, test_ds, 20);
        recalls[to_string(fam)] = rep.recall_at_k;
        const double ratio = rep.recall_at_k / pop.recall_at_k;
        c.require(ratio >= 1.2, std::string(to_string(fam)) + " ratio " + std::to_string(ratio));
        c.detail << " " << to_string(fam) << " " << rep.recall_at_k << " (x"
                 << static_cast<int>(ratio * 100) / 100.0 << ")";
    }

    // informational debiased-vs-biased trend at desk scale (not a gate:
    // percent-level deltas sit inside small-scale training noise)
    const double ri =
        100.0 * (recalls["debiased_ccl"] - recalls["ccl"]) / std::max(1e-12, recalls["ccl"]);
    c.detail << "; trend (informational): debiased CCL vs CCL RI " << ri << "%";
    return c;
}

// ---- criterion 8: full-scale reproduction explicitly out of scope ----------

Criterion criterion_full_scale_configs() {
    Criterion c;
#ifndef RECLOSS_SOURCE_DIR
#error "RECLOSS_SOURCE_DIR must point at the repository root"
#endif
    const std::string root = RECLOSS_SOURCE_DIR;

    struct Expected {
        const char* file;
        const char* family;
        std::map<std::string, std::string> keys;
    };
    const std::vector<Expected> expected = {
        {"configs/mine_plus_yelp2018.cfg", "mine_plus",
         {{"loss.temperature", "0.5"}, {"loss.neg_weight", "1.1"},
          {"train.l2_reg", "1e-8"}, {"sampler.n_negatives", "800"}}},
        {"configs/mine_plus_gowalla.cfg", "mine_plus",
         {{"loss.temperature", "0.4"}, {"loss.neg_weight", "1.2"},
          {"sampler.n_negatives", "800"}}},
        {"configs/mine_plus_amazon_books.cfg", "mine_plus",
         {{"loss.temperature", "0.4"}, {"loss.neg_weight", "1.1"},
          {"sampler.n_negatives", "800"}}},
        {"configs/debiased_ccl_yelp2018.cfg", "debiased_ccl",
         {{"loss.neg_weight", "0.4"}, {"loss.margin", "0.9"},
          {"sampler.m_extra_positives", "10"}, {"sampler.n_negatives", "800"}}},
        {"configs/debiased_ccl_gowalla.cfg", "debiased_ccl",
         {{"loss.neg_weight", "0.7"}, {"loss.margin", "0.9"},
          {"sampler.m_extra_positives", "20"}, {"sampler.n_negatives", "800"}}},
        {"configs/debiased_ccl_amazon_books.cfg", "debiased_ccl",
         {{"loss.neg_weight", "0.6"}, {"loss.margin", "0.4"},
          {"sampler.m_extra_positives", "50"}, {"sampler.n_negatives", "800"}}},
    };
    for (const auto& e : expected) {
        Config cfg = Config::parse_file(root + "/" + e.file);
        c.require(cfg.get_string("loss.family") == e.family,
                  std::string(e.file) + " family mismatch");
        for (const auto& [k, v] : e.keys)
            c.require(cfg.get_string(k, "") == v,
                      std::string(e.file) + " " + k + " != " + v);
    }
    c.detail << "full-scale benchmark numbers are multi-hour runs and are not gated here; "
             << expected.size() << " ready configs carry the tuned hyperparameters verbatim";
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
    auto selected = [&](int n) {
        return wanted.empty() || std::find(wanted.begin(), wanted.end(), n) != wanted.end();
    };

    struct Entry {
        int number;
        const char* name;
        double budget_s;
        Criterion (*run)();
    };
    const std::vector<Entry> entries = {
        {1, "gradient certification (< 1e-4, 100 instances/family)", 60.0, criterion_gradients},
        {2, "loss-kernel oracle equivalence (1e-12, 1000 batches/family)", 60.0,
         criterion_oracles},
        {3, "bound chains (a)-(g), >= 1e5 batches, zero violations", 120.0, criterion_bounds},
        {4, "theorem 1: debiased iALS == remapped iALS", 60.0, criterion_theorem1},
        {5, "theorem 2: debiased EASE == remapped EASE", 60.0, criterion_theorem2},
        {6, "reduction identities (<= 1e-10)", 10.0, criterion_reductions},
        {7, "end-to-end: six losses beat popularity by >= 20%", 1800.0, criterion_end_to_end},
        {8, "full-scale benchmark reproduction out of scope; tuned configs shipped", 10.0,
         criterion_full_scale_configs},
    };

    int failures = 0;
    for (const auto& e : entries) {
        if (!selected(e.number)) continue;
        Timer timer;
        Criterion c = e.run();
        const double secs = timer.seconds();
        if (secs > e.budget_s) {
            c.pass = false;
            c.detail << " [FAILED: runtime " << secs << "s over budget " << e.budget_s << "s]";
        }
        std::cout << "criterion " << e.number << ": " << (c.pass ? "PASS" : "FAIL") << " - "
                  << e.name << " (" << c.detail.str() << ", " << secs << "s)\n";
        failures += c.pass ? 0 : 1;
    }
    return failures;
}
