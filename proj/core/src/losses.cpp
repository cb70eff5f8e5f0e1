#include "recloss/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace recloss {

LossFamily loss_family_from_string(const std::string& s) {
    if (s == "softmax_full") return LossFamily::softmax_full;
    if (s == "sampled_softmax") return LossFamily::sampled_softmax;
    if (s == "infonce") return LossFamily::infonce;
    if (s == "debiased_infonce") return LossFamily::debiased_infonce;
    if (s == "mine") return LossFamily::mine;
    if (s == "mine_plus") return LossFamily::mine_plus;
    if (s == "bpr") return LossFamily::bpr;
    if (s == "mse") return LossFamily::mse;
    if (s == "debiased_mse") return LossFamily::debiased_mse;
    if (s == "ccl") return LossFamily::ccl;
    if (s == "debiased_ccl") return LossFamily::debiased_ccl;
    throw std::invalid_argument("unknown loss family '" + s + "'");
}

const char* to_string(LossFamily f) {
    switch (f) {
        case LossFamily::softmax_full: return "softmax_full";
        case LossFamily::sampled_softmax: return "sampled_softmax";
        case LossFamily::infonce: return "infonce";
        case LossFamily::debiased_infonce: return "debiased_infonce";
        case LossFamily::mine: return "mine";
        case LossFamily::mine_plus: return "mine_plus";
        case LossFamily::bpr: return "bpr";
        case LossFamily::mse: return "mse";
        case LossFamily::debiased_mse: return "debiased_mse";
        case LossFamily::ccl: return "ccl";
        case LossFamily::debiased_ccl: return "debiased_ccl";
    }
    return "?";
}

std::vector<LossFamily> all_loss_families() {
    return {LossFamily::softmax_full, LossFamily::sampled_softmax, LossFamily::infonce,
            LossFamily::debiased_infonce, LossFamily::mine, LossFamily::mine_plus,
            LossFamily::bpr, LossFamily::mse, LossFamily::debiased_mse, LossFamily::ccl,
            LossFamily::debiased_ccl};
}

bool is_debiased(LossFamily f) {
    return f == LossFamily::debiased_infonce || f == LossFamily::debiased_mse ||
           f == LossFamily::debiased_ccl;
}

bool uses_temperature(LossFamily f) {
    return f == LossFamily::infonce || f == LossFamily::debiased_infonce ||
           f == LossFamily::mine_plus;
}

ScoreMode default_score_mode(LossFamily f) {
    switch (f) {
        case LossFamily::ccl:
        case LossFamily::debiased_ccl:
        case LossFamily::mine_plus:
        case LossFamily::debiased_infonce:
            return ScoreMode::cosine;
        default:
            return ScoreMode::dot;
    }
}

LossSpec LossSpec::for_family(LossFamily f) {
    LossSpec s;
    s.family = f;
    s.score_mode = default_score_mode(f);
    return s;
}

double LossSpec::resolved_neg_weight(int n_negatives) const {
    if (neg_weight != kAutoNegWeight) return neg_weight;
    return family == LossFamily::debiased_infonce ? static_cast<double>(n_negatives) : 1.0;
}

void LossSpec::validate() const {
    if (!(temperature > 0.0)) throw std::invalid_argument("loss: temperature must be > 0");
    if (!uses_temperature(family) && temperature != 1.0)
        throw std::invalid_argument(std::string("loss: temperature does not apply to ") +
                                    to_string(family));
    const bool ccl_family = family == LossFamily::ccl || family == LossFamily::debiased_ccl;
    if (margin != 0.0 && !ccl_family)
        throw std::invalid_argument(std::string("loss: margin does not apply to ") +
                                    to_string(family));
    if (!(margin >= 0.0 && margin < 1.0))
        throw std::invalid_argument("loss: margin must be in [0,1)");
    if (ccl_weight < 0.0) throw std::invalid_argument("loss: ccl_weight must be >= 0");
    if (neg_weight != kAutoNegWeight && neg_weight < 0.0)
        throw std::invalid_argument("loss: neg_weight must be >= 0");
    if ((ccl_family || family == LossFamily::mine_plus) && score_mode != ScoreMode::cosine)
        throw std::invalid_argument(std::string("loss: ") + to_string(family) +
                                    " requires cosine scores");
}

double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    double m = xs[0];
    for (double x : xs) m = std::max(m, x);
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

namespace {

void require_negs(const ScoreBatch& b, const char* who) {
    if (b.negs.empty()) throw std::invalid_argument(std::string(who) + ": needs N >= 1 negatives");
}

void require_debiased_inputs(const ScoreBatch& b, const char* who) {
    if (b.extra_pos.empty())
        throw std::invalid_argument(std::string(who) + ": needs M >= 1 extra positives");
    if (!(b.tau_plus > 0.0 && b.tau_plus < 1.0))
        throw std::invalid_argument(std::string(who) + ": tau_plus must be in (0,1)");
}

// Shift-protected bracket of the debiased InfoNCE estimator:
//   (1/tau-) [ (1/N) sum exp(negs/t) - tau+ (1/M) sum exp(extras/t) ]
// expressed as log(bracket) when positive. Shared by the kernel and the
// activation signature so both agree on when the floor clamps.
struct InfonceBracket {
    double log_bracket = 0.0;
    bool clamped = false;  // bracket <= exp(-1/t)
};

InfonceBracket debiased_infonce_bracket(const LossSpec& spec, const ScoreBatch& b) {
    const double t = spec.temperature;
    const double tau = b.tau_plus, tau_neg = 1.0 - tau;
    double shift = -std::numeric_limits<double>::infinity();
    for (double x : b.negs) shift = std::max(shift, x / t);
    for (double x : b.extra_pos) shift = std::max(shift, x / t);
    double sum_negs = 0.0, sum_extras = 0.0;
    for (double x : b.negs) sum_negs += std::exp(x / t - shift);
    for (double x : b.extra_pos) sum_extras += std::exp(x / t - shift);
    const double inner =
        sum_negs / static_cast<double>(b.negs.size()) -
        tau * sum_extras / static_cast<double>(b.extra_pos.size());

    InfonceBracket out;
    const double log_floor = -1.0 / t;
    if (inner > 0.0) {
        out.log_bracket = shift + std::log(inner) - std::log(tau_neg);
        out.clamped = out.log_bracket <= log_floor;
    } else {
        out.clamped = true;
    }
    if (out.clamped) out.log_bracket = log_floor;
    return out;
}

}  // namespace

LossOutput loss_infonce(const LossSpec& spec, const ScoreBatch& b) {
    require_negs(b, "infonce");
    const double t = spec.temperature;
    const int n = static_cast<int>(b.negs.size());
    std::vector<double> z(n + 1);
    z[0] = 0.0;
    for (int j = 0; j < n; ++j) z[j + 1] = (b.negs[j] - b.pos) / t;
    const double lse = log_sum_exp(z);

    LossOutput out;
    out.value = lse;  // log(1 + sum exp((y_uj - y_ui)/t))
    out.d_negs.resize(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const double s = std::exp(z[j + 1] - lse);
        out.d_negs[j] = s / t;
        total += s;
    }
    out.d_pos = -total / t;
    out.d_extra_pos.assign(b.extra_pos.size(), 0.0);
    return out;
}

LossOutput loss_mine(const LossSpec& spec, const ScoreBatch& b) {
    (void)spec;
    require_negs(b, "mine");
    const double lse = log_sum_exp(b.negs);
    LossOutput out;
    out.value = lse - b.pos;
    out.d_pos = -1.0;
    out.d_negs.resize(b.negs.size());
    for (size_t j = 0; j < b.negs.size(); ++j) out.d_negs[j] = std::exp(b.negs[j] - lse);
    out.d_extra_pos.assign(b.extra_pos.size(), 0.0);
    return out;
}

LossOutput loss_mine_plus(const LossSpec& spec, const ScoreBatch& b) {
    require_negs(b, "mine_plus");
    const double t = spec.temperature;
    const double lambda = spec.resolved_neg_weight(static_cast<int>(b.negs.size()));
    std::vector<double> scaled(b.negs.size());
    for (size_t j = 0; j < b.negs.size(); ++j) scaled[j] = b.negs[j] / t;
    const double lse = log_sum_exp(scaled);
    LossOutput out;
    out.value = lambda * lse - b.pos / t;
    out.d_pos = -1.0 / t;
    out.d_negs.resize(b.negs.size());
    for (size_t j = 0; j < b.negs.size(); ++j)
        out.d_negs[j] = lambda * std::exp(scaled[j] - lse) / t;
    out.d_extra_pos.assign(b.extra_pos.size(), 0.0);
    return out;
}

LossOutput loss_bpr(const LossSpec& spec, const ScoreBatch& b) {
    (void)spec;
    require_negs(b, "bpr");
    LossOutput out;
    out.d_negs.resize(b.negs.size());
    for (size_t j = 0; j < b.negs.size(); ++j) {
        const double diff = b.negs[j] - b.pos;
        out.value += softplus(diff);
        out.d_negs[j] = sigmoid(diff);
        out.d_pos -= out.d_negs[j];
    }
    out.d_extra_pos.assign(b.extra_pos.size(), 0.0);
    return out;
}

LossOutput loss_sampled_softmax(const LossSpec& spec, const ScoreBatch& b) {
    (void)spec;
    require_negs(b, "sampled_softmax");
    if (b.proposal_probs.size() != b.negs.size())
        throw std::invalid_argument("sampled_softmax: proposal_probs must match negatives");
    const int n = static_cast<int>(b.negs.size());
    std::vector<double> z(n + 1);
    z[0] = b.pos;
    for (int j = 0; j < n; ++j) {
        if (!(b.proposal_probs[j] > 0.0))
            throw std::invalid_argument("sampled_softmax: proposal probabilities must be > 0");
        z[j + 1] = b.negs[j] - std::log(b.proposal_probs[j]);
    }
    const double lse = log_sum_exp(z);
    LossOutput out;
    out.value = lse - b.pos;
    out.d_pos = std::exp(b.pos - lse) - 1.0;
    out.d_negs.resize(n);
    for (int j = 0; j < n; ++j) out.d_negs[j] = std::exp(z[j + 1] - lse);
    out.d_extra_pos.assign(b.extra_pos.size(), 0.0);
    return out;
}

LossOutput loss_debiased_infonce(const LossSpec& spec, const ScoreBatch& b) {
    require_negs(b, "debiased_infonce");
    require_debiased_inputs(b, "debiased_infonce");
    const double t = spec.temperature;
    const int n = static_cast<int>(b.negs.size());
    const int m = static_cast<int>(b.extra_pos.size());
    const double tau = b.tau_plus, tau_neg = 1.0 - tau;
    const double lambda = spec.resolved_neg_weight(n);
    const double p = b.pos / t;

    // g = max{ bracket, e^{-1/t} }; the floor keeps the log argument above
    // the theoretical minimum of E[exp(y/t)] for cosine scores.
    const auto bracket = debiased_infonce_bracket(spec, b);
    const bool clamped = bracket.clamped;
    const double log_g = bracket.log_bracket;

    LossOutput out;
    const double arg = std::log(lambda) + log_g - p;
    out.value = softplus(arg);  // log(e^p + lambda g) - p
    out.d_pos = -sigmoid(arg) / t;
    out.d_negs.assign(n, 0.0);
    out.d_extra_pos.assign(m, 0.0);
    if (!clamped) {
        const double log_denom = p + out.value;  // log(e^p + lambda g)
        for (int j = 0; j < n; ++j)
            out.d_negs[j] = lambda / (tau_neg * n * t) * std::exp(b.negs[j] / t - log_denom);
        for (int k = 0; k < m; ++k)
            out.d_extra_pos[k] =
                -lambda * tau / (tau_neg * m * t) * std::exp(b.extra_pos[k] / t - log_denom);
    }
    return out;
}

namespace {

struct PointwisePair {
    double (*pos_loss)(double, double);
    double (*pos_grad)(double, double);
    double (*neg_loss)(double, double);
    double (*neg_grad)(double, double);
};

PointwisePair pointwise_pair(LossFamily f, const char* who) {
    switch (f) {
        case LossFamily::mse:
        case LossFamily::debiased_mse:
            return {[](double y, double) { return (1.0 - y) * (1.0 - y); },
                    [](double y, double) { return 2.0 * (y - 1.0); },
                    [](double y, double) { return y * y; },
                    [](double y, double) { return 2.0 * y; }};
        case LossFamily::ccl:
        case LossFamily::debiased_ccl:
            return {[](double y, double) { return 1.0 - y; },
                    [](double, double) { return -1.0; },
                    [](double y, double eps) { return std::max(0.0, y - eps); },
                    [](double y, double eps) { return y > eps ? 1.0 : 0.0; }};
        default:
            throw std::invalid_argument(std::string(who) + ": not a pointwise family");
    }
}

}  // namespace

LossOutput loss_pointwise(const LossSpec& spec, const ScoreBatch& b, double weight) {
    const auto pw = pointwise_pair(spec.family, "loss_pointwise");
    const double eps = spec.margin;
    LossOutput out;
    out.value = pw.pos_loss(b.pos, eps);
    out.d_pos = pw.pos_grad(b.pos, eps);
    const int n = static_cast<int>(b.negs.size());
    out.d_negs.assign(n, 0.0);
    if (n > 0) {
        for (int j = 0; j < n; ++j) {
            out.value += weight / n * pw.neg_loss(b.negs[j], eps);
            out.d_negs[j] = weight / n * pw.neg_grad(b.negs[j], eps);
        }
    }
    out.d_extra_pos.assign(b.extra_pos.size(), 0.0);
    return out;
}

LossOutput loss_debiased_pointwise(const LossSpec& spec, const ScoreBatch& b) {
    require_negs(b, "debiased_pointwise");
    require_debiased_inputs(b, "debiased_pointwise");
    const auto pw = pointwise_pair(spec.family, "loss_debiased_pointwise");
    const double eps = spec.margin;
    const int n = static_cast<int>(b.negs.size());
    const int m = static_cast<int>(b.extra_pos.size());
    const double tau = b.tau_plus;
    const double lambda = spec.resolved_neg_weight(n);

    double mean_negs = 0.0, mean_extras = 0.0;
    for (double x : b.negs) mean_negs += pw.neg_loss(x, eps);
    mean_negs /= n;
    for (double x : b.extra_pos) mean_extras += pw.neg_loss(x, eps);
    mean_extras /= m;
    const double bracket = mean_negs - tau * mean_extras;
    const bool clamped = spec.clamp_bracket && bracket <= 0.0;

    LossOutput out;
    out.value = tau * pw.pos_loss(b.pos, eps) + lambda * (clamped ? 0.0 : bracket);
    out.d_pos = tau * pw.pos_grad(b.pos, eps);
    out.d_negs.assign(n, 0.0);
    out.d_extra_pos.assign(m, 0.0);
    if (!clamped) {
        for (int j = 0; j < n; ++j) out.d_negs[j] = lambda / n * pw.neg_grad(b.negs[j], eps);
        for (int k = 0; k < m; ++k)
            out.d_extra_pos[k] = -lambda * tau / m * pw.neg_grad(b.extra_pos[k], eps);
    }
    return out;
}

FullSoftmaxOutput loss_softmax_full(std::span<const double> pos_scores,
                                    std::span<const double> all_scores) {
    if (pos_scores.empty())
        throw std::invalid_argument("softmax_full: user has no positive items");
    if (all_scores.empty()) throw std::invalid_argument("softmax_full: empty catalog");
    const double lse_pos = log_sum_exp(pos_scores);
    const double lse_all = log_sum_exp(all_scores);
    FullSoftmaxOutput out;
    out.value = lse_all - lse_pos;
    out.d_pos_scores.resize(pos_scores.size());
    out.d_all_scores.resize(all_scores.size());
    for (size_t i = 0; i < pos_scores.size(); ++i)
        out.d_pos_scores[i] = -std::exp(pos_scores[i] - lse_pos);
    for (size_t j = 0; j < all_scores.size(); ++j)
        out.d_all_scores[j] = std::exp(all_scores[j] - lse_all);
    return out;
}

LossOutput eval_loss(const LossSpec& spec, const ScoreBatch& b) {
    switch (spec.family) {
        case LossFamily::sampled_softmax: return loss_sampled_softmax(spec, b);
        case LossFamily::infonce: return loss_infonce(spec, b);
        case LossFamily::debiased_infonce: return loss_debiased_infonce(spec, b);
        case LossFamily::mine: return loss_mine(spec, b);
        case LossFamily::mine_plus: return loss_mine_plus(spec, b);
        case LossFamily::bpr: return loss_bpr(spec, b);
        case LossFamily::mse:
        case LossFamily::ccl: return loss_pointwise(spec, b, spec.ccl_weight);
        case LossFamily::debiased_mse:
        case LossFamily::debiased_ccl: return loss_debiased_pointwise(spec, b);
        case LossFamily::softmax_full:
            throw std::invalid_argument(
                "softmax_full needs the full-catalog entry point loss_softmax_full()");
    }
    throw std::invalid_argument("eval_loss: unknown family");
}

std::uint64_t activation_signature(const LossSpec& spec, const ScoreBatch& b) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix_bit = [&h](bool bit) {
        h ^= bit ? 0x9e3779b97f4a7c15ULL : 0x2545f4914f6cdd1dULL;
        h *= 0x100000001b3ULL;
    };
    switch (spec.family) {
        case LossFamily::ccl:
            for (double x : b.negs) mix_bit(x > spec.margin);
            break;
        case LossFamily::debiased_ccl: {
            double mean_negs = 0.0, mean_extras = 0.0;
            for (double x : b.negs) {
                mix_bit(x > spec.margin);
                mean_negs += std::max(0.0, x - spec.margin);
            }
            for (double x : b.extra_pos) {
                mix_bit(x > spec.margin);
                mean_extras += std::max(0.0, x - spec.margin);
            }
            mean_negs /= std::max<size_t>(1, b.negs.size());
            mean_extras /= std::max<size_t>(1, b.extra_pos.size());
            mix_bit(spec.clamp_bracket && mean_negs - b.tau_plus * mean_extras <= 0.0);
            break;
        }
        case LossFamily::debiased_mse: {
            double mean_negs = 0.0, mean_extras = 0.0;
            for (double x : b.negs) mean_negs += x * x;
            for (double x : b.extra_pos) mean_extras += x * x;
            mean_negs /= std::max<size_t>(1, b.negs.size());
            mean_extras /= std::max<size_t>(1, b.extra_pos.size());
            mix_bit(spec.clamp_bracket && mean_negs - b.tau_plus * mean_extras <= 0.0);
            break;
        }
        case LossFamily::debiased_infonce:
            mix_bit(debiased_infonce_bracket(spec, b).clamped);
            break;
        default:
            break;
    }
    return h;
}

double grad_check(const LossSpec& spec, const ScoreBatch& b, double h) {
    if (!(h >= 1e-7 && h <= 1e-3))
        throw std::invalid_argument("grad_check: h must be in [1e-7, 1e-3]");
    const LossOutput base = eval_loss(spec, b);
    if (!std::isfinite(base.value)) throw std::runtime_error("grad_check: non-finite loss value");

    double worst = 0.0;
    auto check_input = [&](auto setter, double analytic) {
        ScoreBatch lo = b, hi = b, lo_far = b, hi_far = b;
        setter(lo, -h);
        setter(hi, +h);
        setter(lo_far, -10.0 * h);
        setter(hi_far, +10.0 * h);
        // Skip inputs within 10h of a kink: the smooth region must not change
        // across the widened stencil.
        if (activation_signature(spec, lo_far) != activation_signature(spec, hi_far)) return;
        const double fd = (eval_loss(spec, hi).value - eval_loss(spec, lo).value) / (2.0 * h);
        const double err = std::abs(analytic - fd) / (std::abs(analytic) + std::abs(fd) + 1.0);
        worst = std::max(worst, err);
    };

    check_input([](ScoreBatch& s, double d) { s.pos += d; }, base.d_pos);
    for (size_t j = 0; j < b.negs.size(); ++j)
        check_input([j](ScoreBatch& s, double d) { s.negs[j] += d; }, base.d_negs[j]);
    for (size_t k = 0; k < b.extra_pos.size(); ++k)
        check_input([k](ScoreBatch& s, double d) { s.extra_pos[k] += d; }, base.d_extra_pos[k]);
    return worst;
}

}  // namespace recloss
