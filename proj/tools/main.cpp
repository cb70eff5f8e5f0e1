// recloss command line: prepare / train / eval / linear / verify / sweep.
// Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "recloss/bounds.hpp"
#include "recloss/config.hpp"
#include "recloss/dataset.hpp"
#include "recloss/eval.hpp"
#include "recloss/linear.hpp"
#include "recloss/losses.hpp"
#include "recloss/model.hpp"
#include "recloss/rng.hpp"
#include "recloss/sampling.hpp"
#include "recloss/synthetic.hpp"
#include "recloss/trainer.hpp"

namespace fs = std::filesystem;
using namespace recloss;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

void apply_overrides(Config& cfg, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
}

const std::vector<std::string>& train_config_keys() {
    static const std::vector<std::string> keys = {
        "data.train",
        "data.test",
        "data.valid_fraction",
        "out.dir",
        "train.batch_size",
        "train.lr",
        "train.lr_floor",
        "train.lr_decay",
        "train.plateau_patience",
        "train.l2_reg",
        "train.max_epochs",
        "train.eval_every",
        "train.seed",
        "train.threads",
        "model.d",
        "model.init",
        "model.init_sigma",
        "loss.family",
        "loss.temperature",
        "loss.neg_weight",
        "loss.margin",
        "loss.ccl_weight",
        "loss.score_mode",
        "loss.clamp_bracket",
        "loss.freeze_extra_pos_grads",
        "sampler.negative_mode",
        "sampler.n_negatives",
        "sampler.m_extra_positives",
        "sampler.shared_pool",
        "tau.mode",
        "tau.k",
        "tau.alpha",
        "eval.k",
    };
    return keys;
}

TrainConfig train_config_from(const Config& cfg) {
    TrainConfig tc;
    tc.batch_size = static_cast<int>(cfg.get_int("train.batch_size", 512));
    tc.lr = cfg.get_double("train.lr", 1e-4);
    tc.lr_floor = cfg.get_double("train.lr_floor", 1e-6);
    tc.lr_decay = cfg.get_double("train.lr_decay", 0.5);
    tc.plateau_patience = static_cast<int>(cfg.get_int("train.plateau_patience", 5));
    tc.l2_reg = cfg.get_double("train.l2_reg", 0.0);
    tc.max_epochs = static_cast<int>(cfg.get_int("train.max_epochs", 500));
    tc.eval_every = static_cast<int>(cfg.get_int("train.eval_every", 5));
    tc.seed = cfg.get_seed("train.seed", 42);
    tc.d = static_cast<int>(cfg.get_int("model.d", 64));
    tc.init_scheme = init_scheme_from_string(cfg.get_string("model.init", "normal"));
    tc.init_sigma = cfg.get_double("model.init_sigma", 0.1);
    tc.eval_k = static_cast<int>(cfg.get_int("eval.k", 20));

    tc.loss = LossSpec::for_family(loss_family_from_string(cfg.get_string("loss.family")));
    if (cfg.has("loss.temperature")) tc.loss.temperature = cfg.get_double("loss.temperature");
    if (cfg.has("loss.neg_weight")) tc.loss.neg_weight = cfg.get_double("loss.neg_weight");
    if (cfg.has("loss.margin")) tc.loss.margin = cfg.get_double("loss.margin");
    if (cfg.has("loss.ccl_weight")) tc.loss.ccl_weight = cfg.get_double("loss.ccl_weight");
    if (cfg.has("loss.score_mode"))
        tc.loss.score_mode = score_mode_from_string(cfg.get_string("loss.score_mode"));
    tc.loss.clamp_bracket = cfg.get_bool("loss.clamp_bracket", true);
    tc.freeze_extra_pos_grads = cfg.get_bool("loss.freeze_extra_pos_grads", false);

    tc.sampler.negative_mode =
        negative_mode_from_string(cfg.get_string("sampler.negative_mode", "uniform-all"));
    tc.sampler.n_negatives = static_cast<int>(cfg.get_int("sampler.n_negatives", 800));
    tc.sampler.m_extra_positives = static_cast<int>(
        cfg.get_int("sampler.m_extra_positives", is_debiased(tc.loss.family) ? 10 : 0));
    tc.sampler.shared_pool = cfg.get_bool("sampler.shared_pool", false);
    tc.sampler.seed = substream_seed(tc.seed, "sampler");

    tc.tau.mode = tau_mode_from_string(cfg.get_string("tau.mode", "proportional"));
    tc.tau.k = static_cast<int>(cfg.get_int("tau.k", 20));
    tc.tau.alpha = cfg.get_double("tau.alpha", 0.0);
    return tc;
}

void set_threads(const Config& cfg) {
#ifdef _OPENMP
    const int threads = static_cast<int>(cfg.get_int("train.threads", 0));
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)cfg;
#endif
}

struct TrainRun {
    MfModel model;
    TrainHistory history;
    InteractionDataset train_ds;  // all known training positives, for masking
    InteractionDataset test_ds;
    bool has_test = false;
    TrainConfig tc;
};

TrainRun run_training(const Config& cfg) {
    TrainRun run;
    run.tc = train_config_from(cfg);
    set_threads(cfg);

    auto full_train = load_interactions(cfg.get_string("data.train"), PairFormat::pairs);
    const double valid_fraction = cfg.get_double("data.valid_fraction", 0.1);
    InteractionDataset train_ds = full_train;
    InteractionDataset valid_ds =
        InteractionDataset::from_pairs(full_train.n_users, full_train.n_items, {});
    if (valid_fraction > 0.0) {
        SplitSpec vs;
        vs.test_fraction = valid_fraction;
        vs.seed = substream_seed(run.tc.seed, "data");
        std::tie(train_ds, valid_ds) = split(full_train, vs);
    }
    run.tc.validate(train_ds);  // fail before any compute

    if (cfg.has("data.test")) {
        run.test_ds = load_interactions(cfg.get_string("data.test"), PairFormat::pairs);
        run.has_test = true;
        if (run.test_ds.n_users != full_train.n_users ||
            run.test_ds.n_items != full_train.n_items)
            throw std::runtime_error("train: test file dimensions do not match train file");
    }

    auto [model, history] = train(run.tc, train_ds, valid_ds);
    run.model = std::move(model);
    run.history = std::move(history);
    run.train_ds = std::move(full_train);
    return run;
}

int cmd_prepare(const std::string& input, const std::string& format, double test_fraction,
                std::uint64_t seed, const std::string& out_dir) {
    auto dd = load_densified(input, pair_format_from_string(format));
    SplitSpec spec;
    spec.test_fraction = test_fraction;
    spec.seed = substream_seed(seed, "data");
    auto [train_ds, test_ds] = split(dd.data, spec);

    fs::create_directories(out_dir);
    save_pairs(train_ds, out_dir + "/train.pairs");
    save_pairs(test_ds, out_dir + "/test.pairs");
    save_id_map(dd.user_raw_ids, out_dir + "/users.map");
    save_id_map(dd.item_raw_ids, out_dir + "/items.map");

    std::ostringstream stats;
    stats << "users=" << dd.data.n_users << " items=" << dd.data.n_items
          << " interactions=" << dd.data.n_interactions << " train=" << train_ds.n_interactions
          << " test=" << test_ds.n_interactions << "\n";
    std::ofstream(out_dir + "/stats.txt") << stats.str();
    std::cout << stats.str();
    return kExitOk;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& sets) {
    Config cfg = Config::parse_file(config_path);
    apply_overrides(cfg, sets);
    cfg.require_known_keys(train_config_keys());

    TrainRun run = run_training(cfg);

    const std::string out_dir = cfg.get_string("out.dir", "out");
    fs::create_directories(out_dir);
    save_checkpoint(run.model, out_dir + "/model");
    cfg.save(out_dir + "/experiment.cfg");
    {
        std::ofstream hist(out_dir + "/history.csv");
        write_history_csv(run.history, hist);
    }
    std::cout << "trained " << to_string(run.tc.loss.family) << ": "
              << run.history.records.size() << " epochs, stop=" << run.history.stop_reason
              << "\n";

    if (run.has_test) {
        auto report = evaluate(model_scores(run.model), run.train_ds, run.test_ds, run.tc.eval_k);
        std::ofstream csv(out_dir + "/eval.csv");
        write_eval_csv(report, "mf", to_string(run.tc.loss.family), csv);
        std::cout << format_eval_table(report, "mf", to_string(run.tc.loss.family));
    }
    return kExitOk;
}

int cmd_eval(const std::string& model_prefix, const std::string& train_path,
             const std::string& test_path, int k, const std::string& out_csv) {
    auto train_ds = load_interactions(train_path, PairFormat::pairs);
    auto test_ds = load_interactions(test_path, PairFormat::pairs);

    std::ifstream meta(model_prefix + ".meta");
    if (!meta) throw std::runtime_error("eval: cannot open " + model_prefix + ".meta");
    std::string key, kind;
    meta >> key >> kind;
    if (key != "kind") throw std::runtime_error("eval: malformed checkpoint meta");

    EvalReport report;
    std::string model_label;
    if (kind == "mf") {
        auto model = load_checkpoint(model_prefix);
        report = evaluate(model_scores(model), train_ds, test_ds, k);
        model_label = "mf";
    } else {
        auto model = load_linear(model_prefix);
        report = evaluate(linear_model_scores(model, train_ds), train_ds, test_ds, k);
        model_label = kind;
    }
    std::cout << format_eval_table(report, model_label, "-");
    if (!out_csv.empty()) {
        std::ofstream csv(out_csv);
        write_eval_csv(report, model_label, "-", csv);
    }
    return kExitOk;
}

int cmd_linear(const std::string& method, const std::string& train_path,
               const std::string& test_path, const std::string& out_dir, int d, double alpha0,
               double lambda, double nu, double c, int iters, double ease_lambda,
               double ease_alpha, std::uint64_t seed, int k) {
    auto train_ds = load_interactions(train_path, PairFormat::pairs);
    LinearModel model;
    if (method == "ials" || method == "ials-debiased") {
        IalsConfig cfg;
        cfg.d = d;
        cfg.alpha0 = alpha0;
        cfg.lambda = lambda;
        cfg.nu = nu;
        cfg.c = c;
        cfg.iters = iters;
        cfg.seed = seed;
        cfg.debiased = method == "ials-debiased";
        model = ials_fit(train_ds, cfg);
    } else if (method == "ease" || method == "ease-debiased") {
        EaseConfig cfg;
        cfg.lambda = ease_lambda;
        cfg.alpha = ease_alpha;
        cfg.debiased = method == "ease-debiased";
        model = ease_fit(train_ds, cfg);
    } else {
        throw std::runtime_error("linear: unknown method '" + method + "'");
    }

    fs::create_directories(out_dir);
    save_linear(model, out_dir + "/linear");
    std::cout << "fitted " << method << " on " << train_ds.n_users << "x" << train_ds.n_items
              << "\n";

    if (!test_path.empty()) {
        auto test_ds = load_interactions(test_path, PairFormat::pairs);
        auto report = evaluate(linear_model_scores(model, train_ds), train_ds, test_ds, k);
        std::ofstream csv(out_dir + "/eval.csv");
        write_eval_csv(report, method, "-", csv);
        std::cout << format_eval_table(report, method, "-");
    }
    return kExitOk;
}

int cmd_verify(const std::string& suite, long trials, std::uint64_t seed,
               const std::string& out_dir) {
    fs::create_directories(out_dir);

    if (suite == "bounds") {
        const std::vector<int> n_list = {1, 2, 8, 64, 800};
        const std::vector<double> sigmas = {0.01, 1.0, 10.0};
        const long cells = static_cast<long>(n_list.size() * sigmas.size());
        const int per_cell = static_cast<int>((trials + cells - 1) / cells);
        auto rows = tightness_sweep_gaussian(n_list, sigmas, per_cell, seed);
        long violations = 0;
        double worst_min_slack = 0.0;
        for (const auto& r : rows) {
            violations += r.violations;
            worst_min_slack = std::min(worst_min_slack, r.min_slack);
        }
        std::ofstream csv(out_dir + "/bounds.csv");
        write_tightness_csv(rows, csv);
        std::cout << "bounds: " << per_cell * cells << " batches, " << violations
                  << " violations (worst min slack " << worst_min_slack << ")\n";
        if (violations > 0) {
            // find and dump one concrete counterexample
            for (double sigma : sigmas) {
                auto sampler = gaussian_batch_sampler(sigma);
                for (int n : n_list)
                    for (int t = 0; t < per_cell; ++t) {
                        auto rng = make_rng(seed, "tightness",
                                            static_cast<std::uint64_t>(n) * 1000003u +
                                                static_cast<std::uint64_t>(t));
                        ScoreBatch b = sampler(n, rng);
                        if (!check_info_mine_chain(b).all_hold() ||
                            !check_bpr_chain(b).all_hold()) {
                            std::ofstream dump(out_dir + "/counterexample.txt");
                            dump.precision(17);
                            dump << "pos " << b.pos << "\nnegs";
                            for (double x : b.negs) dump << " " << x;
                            dump << "\n";
                            std::cerr << "counterexample written to " << out_dir
                                      << "/counterexample.txt\n";
                            return kExitVerificationFailure;
                        }
                    }
            }
            return kExitVerificationFailure;
        }
        return kExitOk;
    }

    if (suite == "theorem1") {
        const long instances = std::max(1L, trials);
        std::ofstream csv(out_dir + "/theorem1.csv");
        csv << "instance,max_cos_dev_users,max_cos_dev_items,k_users,k_items,"
               "max_sweep_cos_dev,topk_matching,topk_total\n";
        csv.precision(12);
        bool ok = true;
        for (long i = 0; i < instances; ++i) {
            auto ds = synthetic_uniform(200, 150, 0.04,
                                        substream_seed(seed, "th1-ds", static_cast<std::uint64_t>(i)));
            auto report = verify_theorem1(ds, 16, 0.1, 1e-2, 1.5,
                                          substream_seed(seed, "th1", static_cast<std::uint64_t>(i)),
                                          10, 20);
            csv << i << "," << report.max_cosine_deviation_users << ","
                << report.max_cosine_deviation_items << "," << report.k_users << ","
                << report.k_items << "," << report.max_sweep_cosine_deviation << ","
                << report.topk_matching_users << "," << report.topk_total_users << "\n";
            const bool pass = report.max_cosine_deviation_users < 1e-10 &&
                              report.max_cosine_deviation_items < 1e-10 &&
                              report.max_sweep_cosine_deviation < 1e-10 && report.topk_identical;
            std::cout << "theorem1 instance " << i << ": " << (pass ? "equivalent" : "DEVIATES")
                      << " (max half-step deviation "
                      << std::max(report.max_cosine_deviation_users,
                                  report.max_cosine_deviation_items)
                      << ", top-20 " << report.topk_matching_users << "/"
                      << report.topk_total_users << ")\n";
            ok = ok && pass;
        }
        return ok ? kExitOk : kExitVerificationFailure;
    }

    if (suite == "theorem2") {
        const long instances = std::max(1L, trials);
        std::ofstream csv(out_dir + "/theorem2.csv");
        csv << "instance,n_users,n_items,lambda,alpha,max_rel_deviation,topk_matching,"
               "topk_total\n";
        csv.precision(12);
        bool ok = true;
        for (long i = 0; i < instances; ++i) {
            auto rng = make_rng(seed, "th2", static_cast<std::uint64_t>(i));
            std::uniform_int_distribution<int> users(20, 60), items(10, 200);
            std::uniform_real_distribution<double> lambdas(0.1, 2.0), alphas(0.0, 0.9);
            const int n_users = users(rng), n_items = items(rng);
            const double lambda = lambdas(rng), alpha = alphas(rng);
            auto ds = synthetic_uniform(n_users, n_items, 0.08,
                                        substream_seed(seed, "th2-ds", static_cast<std::uint64_t>(i)));
            auto report = verify_theorem2(ds, lambda, alpha, 10);
            csv << i << "," << n_users << "," << n_items << "," << lambda << "," << alpha << ","
                << report.max_rel_deviation << "," << report.topk_matching_users << ","
                << report.topk_total_users << "\n";
            const bool pass = report.max_rel_deviation < 1e-10 && report.topk_identical;
            std::cout << "theorem2 instance " << i << ": " << (pass ? "equivalent" : "DEVIATES")
                      << " (max rel deviation " << report.max_rel_deviation << ")\n";
            ok = ok && pass;
        }
        return ok ? kExitOk : kExitVerificationFailure;
    }

    if (suite == "gradients") {
        const int per_family = static_cast<int>(std::max(1L, trials));
        auto report = gradient_suite(per_family, seed);
        std::ofstream csv(out_dir + "/gradients.csv");
        csv << "family,worst_rel_error,checked,skipped\n";
        csv.precision(12);
        bool ok = true;
        for (const auto& r : report.results) {
            csv << to_string(r.family) << "," << r.worst_rel_error << "," << r.n_checked << ","
                << r.n_skipped << "\n";
            std::cout << "gradients " << to_string(r.family) << ": worst " << r.worst_rel_error
                      << " over " << r.n_checked << " coords\n";
            ok = ok && r.worst_rel_error < 1e-4;
        }
        return ok ? kExitOk : kExitVerificationFailure;
    }

    throw std::runtime_error("verify: unknown suite '" + suite +
                             "' (expected bounds|theorem1|theorem2|gradients)");
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values_csv, const std::string& out_csv,
              const std::vector<std::string>& sets) {
    Config base = Config::parse_file(config_path);
    apply_overrides(base, sets);
    base.require_known_keys(train_config_keys());
    const auto& known = train_config_keys();
    if (std::find(known.begin(), known.end(), param) == known.end())
        throw std::runtime_error("sweep: unknown parameter key '" + param + "'");

    std::vector<std::string> values;
    std::string token;
    std::istringstream vs(values_csv);
    while (std::getline(vs, token, ','))
        if (!token.empty()) values.push_back(token);
    if (values.empty()) throw std::runtime_error("sweep: no values given");

    std::ofstream csv(out_csv);
    if (!csv) throw std::runtime_error("sweep: cannot write " + out_csv);
    csv << "param,value,recall20,ndcg20\n";
    csv.precision(10);
    for (const auto& value : values) {
        Config cfg = base;
        cfg.set(param, value);
        TrainRun run = run_training(cfg);
        if (!run.has_test)
            throw std::runtime_error("sweep: data.test is required to score sweep points");
        auto report = evaluate(model_scores(run.model), run.train_ds, run.test_ds, run.tc.eval_k);
        csv << param << "," << value << "," << report.recall_at_k << "," << report.ndcg_at_k
            << "\n";
        std::cout << param << "=" << value << " recall@" << run.tc.eval_k << "="
                  << report.recall_at_k << " ndcg@" << run.tc.eval_k << "=" << report.ndcg_at_k
                  << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recommendation loss laboratory: biased/debiased losses, MINE, iALS and EASE"};
    app.require_subcommand(1);

    auto* prepare = app.add_subcommand("prepare", "load, split and densify an interaction file");
    std::string prep_input, prep_format = "pairs", prep_out = "prepared";
    double prep_fraction = 0.2;
    std::uint64_t prep_seed = 42;
    prepare->add_option("--input", prep_input, "interaction file")->required();
    prepare->add_option("--format", prep_format, "pairs|adjacency");
    prepare->add_option("--test-fraction", prep_fraction, "per-user held-out fraction");
    prepare->add_option("--seed", prep_seed, "split seed");
    prepare->add_option("--out", prep_out, "output directory");

    auto* train_cmd = app.add_subcommand("train", "train an MF model under a configured loss");
    std::string train_config;
    std::vector<std::string> train_sets;
    train_cmd->add_option("--config", train_config, "experiment config file")->required();
    train_cmd->add_option("--set", train_sets, "override config entries (key=value)");

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a test split");
    std::string eval_model, eval_train, eval_test, eval_out;
    int eval_k = 20;
    eval_cmd->add_option("--model", eval_model, "checkpoint prefix")->required();
    eval_cmd->add_option("--train", eval_train, "train pairs file")->required();
    eval_cmd->add_option("--test", eval_test, "test pairs file")->required();
    eval_cmd->add_option("--k", eval_k, "cutoff");
    eval_cmd->add_option("--out", eval_out, "CSV output path");

    auto* linear_cmd = app.add_subcommand("linear", "fit a closed-form linear recommender");
    std::string lin_method, lin_train, lin_test, lin_out = "linear_out";
    int lin_d = 64, lin_iters = 10, lin_k = 20;
    double lin_alpha0 = 0.1, lin_lambda = 1e-2, lin_nu = 1.0, lin_c = 1.5;
    double lin_ease_lambda = 100.0, lin_ease_alpha = 0.3;
    std::uint64_t lin_seed = 42;
    linear_cmd->add_option("--method", lin_method, "ials|ials-debiased|ease|ease-debiased")
        ->required();
    linear_cmd->add_option("--train", lin_train, "train pairs file")->required();
    linear_cmd->add_option("--test", lin_test, "test pairs file");
    linear_cmd->add_option("--out", lin_out, "output directory");
    linear_cmd->add_option("--d", lin_d, "ials factor dimension");
    linear_cmd->add_option("--alpha0", lin_alpha0, "ials unobserved weight");
    linear_cmd->add_option("--lambda", lin_lambda, "ials regularization");
    linear_cmd->add_option("--nu", lin_nu, "ials frequency-scaling exponent");
    linear_cmd->add_option("--c", lin_c, "ials debias weight");
    linear_cmd->add_option("--iters", lin_iters, "alternating sweeps");
    linear_cmd->add_option("--ease-lambda", lin_ease_lambda, "ease regularization");
    linear_cmd->add_option("--ease-alpha", lin_ease_alpha, "ease debias strength");
    linear_cmd->add_option("--seed", lin_seed, "init seed");
    linear_cmd->add_option("--k", lin_k, "evaluation cutoff");

    auto* verify_cmd = app.add_subcommand("verify", "run a numerical certification suite");
    std::string ver_suite, ver_out = "verify_out";
    long ver_trials = 0;
    std::uint64_t ver_seed = 42;
    verify_cmd->add_option("--suite", ver_suite, "bounds|theorem1|theorem2|gradients")
        ->required();
    verify_cmd->add_option("--trials", ver_trials, "trial count (suite-specific default)");
    verify_cmd->add_option("--seed", ver_seed, "suite seed");
    verify_cmd->add_option("--out", ver_out, "evidence directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "train and evaluate along one parameter");
    std::string sweep_config, sweep_param, sweep_values, sweep_out = "sweep.csv";
    std::vector<std::string> sweep_sets;
    sweep_cmd->add_option("--config", sweep_config, "experiment config file")->required();
    sweep_cmd->add_option("--param", sweep_param, "config key to vary")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep_cmd->add_option("--out", sweep_out, "CSV output path");
    sweep_cmd->add_option("--set", sweep_sets, "override config entries (key=value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (prepare->parsed())
            return cmd_prepare(prep_input, prep_format, prep_fraction, prep_seed, prep_out);
        if (train_cmd->parsed()) return cmd_train(train_config, train_sets);
        if (eval_cmd->parsed())
            return cmd_eval(eval_model, eval_train, eval_test, eval_k, eval_out);
        if (linear_cmd->parsed())
            return cmd_linear(lin_method, lin_train, lin_test, lin_out, lin_d, lin_alpha0,
                              lin_lambda, lin_nu, lin_c, lin_iters, lin_ease_lambda,
                              lin_ease_alpha, lin_seed, lin_k);
        if (verify_cmd->parsed()) {
            if (ver_trials <= 0) {
                if (ver_suite == "bounds")
                    ver_trials = 100000;
                else if (ver_suite == "theorem2")
                    ver_trials = 20;
                else if (ver_suite == "theorem1")
                    ver_trials = 3;
                else
                    ver_trials = 20;
            }
            return cmd_verify(ver_suite, ver_trials, ver_seed, ver_out);
        }
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_config, sweep_param, sweep_values, sweep_out, sweep_sets);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
