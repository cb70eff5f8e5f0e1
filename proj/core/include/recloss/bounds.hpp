#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "recloss/dataset.hpp"
#include "recloss/losses.hpp"

namespace recloss {

// One pointwise inequality evaluated on a fixed score batch.
// holds <=> slack = lhs - rhs >= -1e-10 (absorbs rounding in tight cases).
struct BoundCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool holds = false;
};

struct BoundReport {
    std::vector<BoundCheck> checks;
    std::string batch_desc;
    std::optional<ScoreBatch> counterexample;  // set when any check fails

    bool all_hold() const;
};

inline constexpr double kBoundTolerance = -1e-10;

// Inequalities relating the sampled InfoNCE and MINE losses on one batch:
//   (a) info >= mine
//   (b) max_j(0, y_uj - y_ui) + log(N+1) >= info
//   (c) mine >= max_j(y_uj - y_ui)
//   (d) mine >= mean_j(y_uj - y_ui) + log N
// All four are algebraic facts on the fixed sample; expectation-level
// approximation steps are measured by tightness_sweep, never asserted.
BoundReport check_info_mine_chain(const ScoreBatch& b);

// Inequalities involving the pairwise BPR loss:
//   (e) bpr >= sum_j max(0, y_uj - y_ui)
//   (f) bpr >= sum_j (y_uj - y_ui)
//   (g) info >= mean_j(y_uj - y_ui) + log N
BoundReport check_bpr_chain(const ScoreBatch& b);

std::vector<std::string> bound_names();

// Aggregated slack statistics per (inequality, N, sigma) cell.
struct TightnessRow {
    std::string inequality;
    int n = 0;
    double sigma = 0.0;
    double mean_slack = 0.0;
    double min_slack = 0.0;
    long violations = 0;
};

// Draws one positive and N negative scores per trial.
using BatchSampler = std::function<ScoreBatch(int n_negatives, std::mt19937_64& rng)>;

BatchSampler gaussian_batch_sampler(double sigma);
BatchSampler model_batch_sampler(const MfModel& model, const InteractionDataset& ds);

std::vector<TightnessRow> tightness_sweep(const BatchSampler& sampler,
                                          const std::vector<int>& n_list, double sigma_label,
                                          int trials, std::uint64_t seed);

// Convenience: gaussian sweep over an (N, sigma) grid.
std::vector<TightnessRow> tightness_sweep_gaussian(const std::vector<int>& n_list,
                                                   const std::vector<double>& sigmas, int trials,
                                                   std::uint64_t seed);

// Header: "inequality,N,sigma,mean_slack,min_slack,violations"
void write_tightness_csv(const std::vector<TightnessRow>& rows, std::ostream& out);

}  // namespace recloss
