#include "recloss/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "recloss/rng.hpp"

namespace recloss {

bool BoundReport::all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.holds; });
}

namespace {

BoundCheck make_check(std::string name, double lhs, double rhs) {
    BoundCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = lhs - rhs;
    c.holds = c.slack >= kBoundTolerance;
    return c;
}

// info/mine/bpr at t = 1 on raw scores; the chains are stated on the
// untempered losses.
double info_value(const ScoreBatch& b) {
    return loss_infonce(LossSpec::for_family(LossFamily::infonce), b).value;
}
double mine_value(const ScoreBatch& b) {
    return loss_mine(LossSpec::for_family(LossFamily::mine), b).value;
}
double bpr_value(const ScoreBatch& b) {
    return loss_bpr(LossSpec::for_family(LossFamily::bpr), b).value;
}

struct DiffStats {
    double max_diff;
    double mean_diff;
    double sum_diff;
    double sum_hinge;
};

DiffStats diff_stats(const ScoreBatch& b) {
    DiffStats s{-std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0};
    for (double x : b.negs) {
        const double z = x - b.pos;
        s.max_diff = std::max(s.max_diff, z);
        s.sum_diff += z;
        s.sum_hinge += std::max(0.0, z);
    }
    s.mean_diff = s.sum_diff / static_cast<double>(b.negs.size());
    return s;
}

std::string describe(const ScoreBatch& b) {
    std::ostringstream os;
    os << "pos=" << b.pos << " N=" << b.negs.size();
    return os.str();
}

void finalize(BoundReport& r, const ScoreBatch& b) {
    r.batch_desc = describe(b);
    if (!r.all_hold()) r.counterexample = b;
}

}  // namespace

BoundReport check_info_mine_chain(const ScoreBatch& b) {
    if (b.negs.empty()) throw std::invalid_argument("bounds: needs N >= 1 negatives");
    const double info = info_value(b);
    const double mine = mine_value(b);
    const auto s = diff_stats(b);
    const double n = static_cast<double>(b.negs.size());

    BoundReport r;
    r.checks.push_back(make_check("a_info_ge_mine", info, mine));
    r.checks.push_back(
        make_check("b_hinge_logn1_ge_info", std::max(0.0, s.max_diff) + std::log(n + 1.0), info));
    r.checks.push_back(make_check("c_mine_ge_max", mine, s.max_diff));
    r.checks.push_back(make_check("d_mine_ge_mean_logn", mine, s.mean_diff + std::log(n)));
    finalize(r, b);
    return r;
}

BoundReport check_bpr_chain(const ScoreBatch& b) {
    if (b.negs.empty()) throw std::invalid_argument("bounds: needs N >= 1 negatives");
    const double info = info_value(b);
    const double bpr = bpr_value(b);
    const auto s = diff_stats(b);
    const double n = static_cast<double>(b.negs.size());

    BoundReport r;
    r.checks.push_back(make_check("e_bpr_ge_hinge_sum", bpr, s.sum_hinge));
    r.checks.push_back(make_check("f_bpr_ge_diff_sum", bpr, s.sum_diff));
    r.checks.push_back(make_check("g_info_ge_mean_logn", info, s.mean_diff + std::log(n)));
    finalize(r, b);
    return r;
}

std::vector<std::string> bound_names() {
    return {"a_info_ge_mine",     "b_hinge_logn1_ge_info", "c_mine_ge_max",
            "d_mine_ge_mean_logn", "e_bpr_ge_hinge_sum",    "f_bpr_ge_diff_sum",
            "g_info_ge_mean_logn"};
}

BatchSampler gaussian_batch_sampler(double sigma) {
    return [sigma](int n_negatives, std::mt19937_64& rng) {
        std::normal_distribution<double> dist(0.0, sigma);
        ScoreBatch b;
        b.pos = sigma == 0.0 ? 0.0 : dist(rng);
        b.negs.resize(n_negatives);
        for (double& x : b.negs) x = sigma == 0.0 ? b.pos : dist(rng);
        return b;
    };
}

BatchSampler model_batch_sampler(const MfModel& model, const InteractionDataset& ds) {
    const MfModel* m = &model;
    const InteractionDataset* d = &ds;
    return [m, d](int n_negatives, std::mt19937_64& rng) {
        std::uniform_int_distribution<int> users(0, d->n_users - 1);
        std::uniform_int_distribution<int> items(0, d->n_items - 1);
        int u = users(rng);
        while (d->pos_by_user[u].empty()) u = users(rng);
        const auto& pos = d->pos_by_user[u];
        std::uniform_int_distribution<int> pick(0, static_cast<int>(pos.size()) - 1);
        ScoreBatch b;
        b.pos = score(*m, u, pos[pick(rng)]);
        b.negs.resize(n_negatives);
        for (double& x : b.negs) x = score(*m, u, items(rng));
        return b;
    };
}

std::vector<TightnessRow> tightness_sweep(const BatchSampler& sampler,
                                          const std::vector<int>& n_list, double sigma_label,
                                          int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("tightness_sweep: trials must be >= 1");
    std::vector<TightnessRow> rows;
    const auto names = bound_names();
    for (int n : n_list) {
        std::map<std::string, TightnessRow> acc;
        for (const auto& name : names) {
            TightnessRow r;
            r.inequality = name;
            r.n = n;
            r.sigma = sigma_label;
            r.min_slack = std::numeric_limits<double>::infinity();
            acc[name] = r;
        }
        for (int trial = 0; trial < trials; ++trial) {
            auto rng = make_rng(seed, "tightness", static_cast<std::uint64_t>(n) * 1000003u +
                                                       static_cast<std::uint64_t>(trial));
            const ScoreBatch b = sampler(n, rng);
            for (const auto& report : {check_info_mine_chain(b), check_bpr_chain(b)}) {
                for (const auto& c : report.checks) {
                    auto& r = acc[c.name];
                    r.mean_slack += c.slack;
                    r.min_slack = std::min(r.min_slack, c.slack);
                    if (!c.holds) ++r.violations;
                }
            }
        }
        for (const auto& name : names) {
            acc[name].mean_slack /= trials;
            rows.push_back(acc[name]);
        }
    }
    return rows;
}

std::vector<TightnessRow> tightness_sweep_gaussian(const std::vector<int>& n_list,
                                                   const std::vector<double>& sigmas, int trials,
                                                   std::uint64_t seed) {
    std::vector<TightnessRow> rows;
    for (double sigma : sigmas) {
        auto part = tightness_sweep(gaussian_batch_sampler(sigma), n_list, sigma, trials, seed);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

void write_tightness_csv(const std::vector<TightnessRow>& rows, std::ostream& out) {
    out << "inequality,N,sigma,mean_slack,min_slack,violations\n";
    out.precision(12);
    for (const auto& r : rows)
        out << r.inequality << "," << r.n << "," << r.sigma << "," << r.mean_slack << ","
            << r.min_slack << "," << r.violations << "\n";
}

}  // namespace recloss
