#include "recloss/linear.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "recloss/rng.hpp"

namespace recloss {

namespace {

constexpr double kInitSigma = 0.1;
constexpr int kMaxEaseItems = 8000;

Eigen::MatrixXd seeded_normal(int rows, int cols, double sigma, std::uint64_t seed,
                              const char* stream) {
    auto rng = make_rng(seed, stream);
    std::normal_distribution<double> dist(0.0, sigma);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
    return m;
}

// Gram matrix X'X of the binary interaction matrix.
Eigen::MatrixXd interaction_gram(const InteractionDataset& ds) {
    Eigen::SparseMatrix<double> x(ds.n_users, ds.n_items);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(ds.n_interactions));
    for (int u = 0; u < ds.n_users; ++u)
        for (int i : ds.pos_by_user[u]) trips.emplace_back(u, i, 1.0);
    x.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseMatrix<double> g = Eigen::SparseMatrix<double>(x.transpose()) * x;
    return Eigen::MatrixXd(g);
}

}  // namespace

void IalsConfig::validate() const {
    if (d < 1) throw std::invalid_argument("ials: d must be >= 1");
    if (!(alpha0 > 0.0)) throw std::invalid_argument("ials: alpha0 must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("ials: lambda must be > 0");
    if (nu < 0.0) throw std::invalid_argument("ials: nu must be >= 0");
    if (!(c > 0.0)) throw std::invalid_argument("ials: c must be > 0");
    if (iters < 1) throw std::invalid_argument("ials: iters must be >= 1");
    if (debiased && !((1.0 - alpha0) * c > 0.0))
        throw std::invalid_argument("ials: debiased objective needs (1 - alpha0) * c > 0");
}

void EaseConfig::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("ease: lambda must be > 0");
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("ease: alpha must be in [0,1)");
}

namespace {

// Shared half-step kernel: solves the ridge system of every row entity on
// one side. `pos_of` gives the entity's observed counterpart list.
void ials_half_step(const std::vector<std::vector<int>>& pos_of, const IalsConfig& cfg,
                    int n_other_total, const Eigen::MatrixXd& fixed, Eigen::MatrixXd& solved,
                    const char* side) {
    const int d = cfg.d;
    const Eigen::MatrixXd gram = fixed.transpose() * fixed;  // d x d
    const double coef_obs = cfg.debiased ? cfg.c * (1.0 - cfg.alpha0) : 1.0;
    const double rhs_mult = cfg.debiased ? cfg.c : 1.0;
    const int n = static_cast<int>(pos_of.size());
    int first_singular = -1;  // exceptions cannot leave the parallel region

#pragma omp parallel for schedule(dynamic, 16)
    for (int e = 0; e < n; ++e) {
        const auto& observed = pos_of[e];
        const double lambda_e =
            cfg.lambda * std::pow(static_cast<double>(observed.size()) +
                                      cfg.alpha0 * static_cast<double>(n_other_total),
                                  cfg.nu);
        Eigen::MatrixXd a = cfg.alpha0 * gram;
        a.diagonal().array() += lambda_e;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
        for (int o : observed) {
            a.selfadjointView<Eigen::Lower>().rankUpdate(fixed.row(o).transpose(), coef_obs);
            b += fixed.row(o).transpose();
        }
        b *= rhs_mult;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(a.selfadjointView<Eigen::Lower>());
        if (ldlt.info() != Eigen::Success) {
#pragma omp critical
            if (first_singular < 0 || e < first_singular) first_singular = e;
            continue;
        }
        solved.row(e) = ldlt.solve(b).transpose();
    }
    if (first_singular >= 0)
        throw std::runtime_error(std::string("ials: singular normal matrix for ") + side + " " +
                                 std::to_string(first_singular));
}

}  // namespace

void ials_half_step_users(const InteractionDataset& train, const IalsConfig& cfg,
                          const Eigen::MatrixXd& item_factors, Eigen::MatrixXd& user_factors) {
    ials_half_step(train.pos_by_user, cfg, train.n_items, item_factors, user_factors, "user");
}

void ials_half_step_items(const InteractionDataset& train, const IalsConfig& cfg,
                          const Eigen::MatrixXd& user_factors, Eigen::MatrixXd& item_factors) {
    ials_half_step(train.pos_by_item, cfg, train.n_users, user_factors, item_factors, "item");
}

LinearModel ials_fit(const InteractionDataset& train, const IalsConfig& cfg) {
    cfg.validate();
    LinearModel m;
    m.kind = LinearModel::Kind::ials;
    m.user_factors = seeded_normal(train.n_users, cfg.d, kInitSigma, cfg.seed, "ials-user");
    m.item_factors = seeded_normal(train.n_items, cfg.d, kInitSigma, cfg.seed, "ials-item");
    for (int it = 0; it < cfg.iters; ++it) {
        ials_half_step_users(train, cfg, m.item_factors, m.user_factors);
        ials_half_step_items(train, cfg, m.user_factors, m.item_factors);
    }
    return m;
}

double ials_objective(const InteractionDataset& train, const IalsConfig& cfg,
                      const Eigen::MatrixXd& user_factors, const Eigen::MatrixXd& item_factors) {
    // ||W H'||_F^2 through the d x d Grams.
    const Eigen::MatrixXd gw = user_factors.transpose() * user_factors;
    const Eigen::MatrixXd gh = item_factors.transpose() * item_factors;
    const double all_sq = gw.cwiseProduct(gh).sum();

    double observed = 0.0;
    for (int u = 0; u < train.n_users; ++u) {
        for (int i : train.pos_by_user[u]) {
            const double y = user_factors.row(u).dot(item_factors.row(i));
            if (cfg.debiased)
                observed += cfg.c * (y - 1.0) * (y - 1.0) - cfg.c * cfg.alpha0 * y * y;
            else
                observed += (y - 1.0) * (y - 1.0);
        }
    }

    double reg = 0.0;
    for (int u = 0; u < train.n_users; ++u)
        reg += std::pow(static_cast<double>(train.pos_by_user[u].size()) +
                            cfg.alpha0 * train.n_items,
                        cfg.nu) *
               user_factors.row(u).squaredNorm();
    for (int i = 0; i < train.n_items; ++i)
        reg += std::pow(static_cast<double>(train.pos_by_item[i].size()) +
                            cfg.alpha0 * train.n_users,
                        cfg.nu) *
               item_factors.row(i).squaredNorm();

    return observed + cfg.alpha0 * all_sq + cfg.lambda * reg;
}

std::pair<double, double> remap_ials_params(double alpha0, double lambda, double c) {
    if (alpha0 >= 1.0) throw std::invalid_argument("remap_ials_params: alpha0 must be < 1");
    const double denom = (1.0 - alpha0) * c;
    if (!(denom > 0.0)) throw std::invalid_argument("remap_ials_params: (1 - alpha0) c must be > 0");
    return {alpha0 / denom, lambda / denom};
}

namespace {

struct SideComparison {
    double max_cosine_deviation = 0.0;
    double k = 0.0;
    double max_k_rel_deviation = 0.0;
};

SideComparison compare_rows(const Eigen::MatrixXd& deb, const Eigen::MatrixXd& orig) {
    SideComparison cmp;
    // Global scalar fitted on the largest row, then checked everywhere.
    int anchor = -1;
    double best_norm = 0.0;
    for (int r = 0; r < orig.rows(); ++r) {
        const double n = orig.row(r).norm();
        if (n > best_norm) {
            best_norm = n;
            anchor = r;
        }
    }
    if (anchor < 0) return cmp;
    cmp.k = deb.row(anchor).dot(orig.row(anchor)) / orig.row(anchor).squaredNorm();
    for (int r = 0; r < orig.rows(); ++r) {
        const double nd = deb.row(r).norm(), no = orig.row(r).norm();
        if (nd < 1e-14 && no < 1e-14) continue;
        if (nd < 1e-14 || no < 1e-14) {
            cmp.max_cosine_deviation = 1.0;
            continue;
        }
        const double cosine = deb.row(r).dot(orig.row(r)) / (nd * no);
        cmp.max_cosine_deviation = std::max(cmp.max_cosine_deviation, 1.0 - std::abs(cosine));
        const double rel = (deb.row(r) - cmp.k * orig.row(r)).norm() / nd;
        cmp.max_k_rel_deviation = std::max(cmp.max_k_rel_deviation, rel);
    }
    return cmp;
}

std::vector<int> top_k_indices(const Eigen::VectorXd& scores, int k) {
    std::vector<int> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    const int kk = std::min<int>(k, static_cast<int>(idx.size()));
    std::partial_sort(idx.begin(), idx.begin() + kk, idx.end(), [&](int a, int b) {
        if (scores(a) != scores(b)) return scores(a) > scores(b);
        return a < b;
    });
    idx.resize(kk);
    return idx;
}

// Top-k lists of two proportional score vectors, compared up to genuine
// floating-point ties: the theorems make the scores equal only in exact
// arithmetic, so items whose scores coincide to rounding may legitimately
// swap places between the two solves.
bool topk_matches(const Eigen::VectorXd& sd, const Eigen::VectorXd& so, int k) {
    const auto a = top_k_indices(sd, k);
    const auto b = top_k_indices(so, k);
    if (a == b) return true;
    const double tol_d = 1e-9 * (1.0 + sd.cwiseAbs().maxCoeff());
    const double tol_o = 1e-9 * (1.0 + so.cwiseAbs().maxCoeff());
    for (size_t r = 0; r < a.size(); ++r) {
        if (a[r] == b[r]) continue;
        if (std::abs(sd(a[r]) - sd(b[r])) > tol_d) return false;
        if (std::abs(so(a[r]) - so(b[r])) > tol_o) return false;
    }
    return true;
}

}  // namespace

Theorem1Report verify_theorem1(const InteractionDataset& train, int d, double alpha0,
                               double lambda, double c, std::uint64_t seed, int sweeps,
                               int topk) {
    IalsConfig deb;
    deb.d = d;
    deb.alpha0 = alpha0;
    deb.lambda = lambda;
    deb.nu = 0.0;
    deb.c = c;
    deb.seed = seed;
    deb.debiased = true;
    deb.validate();

    const auto [alpha0p, lambdap] = remap_ials_params(alpha0, lambda, c);
    IalsConfig orig = deb;
    orig.alpha0 = alpha0p;
    orig.lambda = lambdap;
    orig.c = 1.0;
    orig.debiased = false;

    const Eigen::MatrixXd w0 = seeded_normal(train.n_users, d, kInitSigma, seed, "th1-user");
    const Eigen::MatrixXd h0 = seeded_normal(train.n_items, d, kInitSigma, seed, "th1-item");

    Theorem1Report report;

    // Single half-steps from identical inputs.
    Eigen::MatrixXd w_deb = w0, w_orig = w0;
    ials_half_step_users(train, deb, h0, w_deb);
    ials_half_step_users(train, orig, h0, w_orig);
    const auto users = compare_rows(w_deb, w_orig);
    report.max_cosine_deviation_users = users.max_cosine_deviation;
    report.k_users = users.k;
    report.max_k_rel_deviation_users = users.max_k_rel_deviation;

    Eigen::MatrixXd h_deb = h0, h_orig = h0;
    ials_half_step_items(train, deb, w0, h_deb);
    ials_half_step_items(train, orig, w0, h_orig);
    const auto items = compare_rows(h_deb, h_orig);
    report.max_cosine_deviation_items = items.max_cosine_deviation;
    report.k_items = items.k;
    report.max_k_rel_deviation_items = items.max_k_rel_deviation;

    // Tracked trajectories. The per-half-step scalar is a gauge freedom;
    // normalizing both runs keeps them on the same representative without
    // touching rankings.
    Eigen::MatrixXd wd = w0, hd = h0, wo = w0, ho = h0;
    for (int s = 0; s < sweeps; ++s) {
        ials_half_step_users(train, deb, hd, wd);
        ials_half_step_users(train, orig, ho, wo);
        report.max_sweep_cosine_deviation = std::max(
            report.max_sweep_cosine_deviation, compare_rows(wd, wo).max_cosine_deviation);
        wd /= wd.norm();
        wo /= wo.norm();
        ials_half_step_items(train, deb, wd, hd);
        ials_half_step_items(train, orig, wo, ho);
        report.max_sweep_cosine_deviation = std::max(
            report.max_sweep_cosine_deviation, compare_rows(hd, ho).max_cosine_deviation);
        hd /= hd.norm();
        ho /= ho.norm();
    }

    for (int u = 0; u < train.n_users; ++u) {
        if (train.pos_by_user[u].empty()) continue;
        Eigen::VectorXd sd = hd * wd.row(u).transpose();
        Eigen::VectorXd so = ho * wo.row(u).transpose();
        for (int i : train.pos_by_user[u]) {
            sd(i) = -std::numeric_limits<double>::infinity();
            so(i) = -std::numeric_limits<double>::infinity();
        }
        ++report.topk_total_users;
        if (topk_matches(sd, so, topk)) ++report.topk_matching_users;
    }
    report.topk_identical = report.topk_matching_users == report.topk_total_users;
    return report;
}

LinearModel ease_fit(const InteractionDataset& train, const EaseConfig& cfg) {
    cfg.validate();
    if (train.n_items > kMaxEaseItems)
        throw std::invalid_argument("ease: dense solve limited to " +
                                    std::to_string(kMaxEaseItems) + " items");
    const int n = train.n_items;
    Eigen::MatrixXd a = interaction_gram(train);
    const double lambda_eff = cfg.debiased ? cfg.lambda / (1.0 - cfg.alpha) : cfg.lambda;
    a.diagonal().array() += lambda_eff;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("ease: factorization failed");
    const Eigen::MatrixXd p = ldlt.solve(Eigen::MatrixXd::Identity(n, n));

    LinearModel m;
    m.kind = LinearModel::Kind::ease;
    // W = I - P dMat(1/diag P): off-diagonal -P_ij / P_jj, diagonal exactly 0.
    m.weights = -p * p.diagonal().cwiseInverse().asDiagonal();
    m.weights.diagonal().setZero();
    if (cfg.debiased) m.weights /= (1.0 - cfg.alpha);
    if (!m.weights.allFinite()) throw std::runtime_error("ease: non-finite solution");
    return m;
}

double ease_lambda_remap(double lambda, double alpha, double c_u) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("ease_lambda_remap: alpha must be in [0,1)");
    if (!(c_u > 0.0)) throw std::invalid_argument("ease_lambda_remap: c_u must be > 0");
    return lambda / ((1.0 - alpha) * c_u);
}

Theorem2Report verify_theorem2(const InteractionDataset& train, double lambda, double alpha,
                               int topk) {
    EaseConfig deb;
    deb.lambda = lambda;
    deb.alpha = alpha;
    deb.debiased = true;
    EaseConfig orig;
    orig.lambda = ease_lambda_remap(lambda, alpha);
    orig.debiased = false;

    const LinearModel m_deb = ease_fit(train, deb);
    const LinearModel m_orig = ease_fit(train, orig);

    Theorem2Report report;
    const Eigen::MatrixXd scaled = (1.0 - alpha) * m_deb.weights;
    for (int i = 0; i < scaled.rows(); ++i)
        for (int j = 0; j < scaled.cols(); ++j) {
            const double a = scaled(i, j), b = m_orig.weights(i, j);
            const double denom = std::max(std::abs(a), std::abs(b));
            if (denom == 0.0) continue;
            report.max_rel_deviation = std::max(report.max_rel_deviation, std::abs(a - b) / denom);
        }

    for (int u = 0; u < train.n_users; ++u) {
        if (train.pos_by_user[u].empty()) continue;
        Eigen::VectorXd sd = linear_scores(m_deb, train, u);
        Eigen::VectorXd so = linear_scores(m_orig, train, u);
        ++report.topk_total_users;
        if (topk_matches(sd, so, topk)) ++report.topk_matching_users;
    }
    report.topk_identical = report.topk_matching_users == report.topk_total_users;
    return report;
}

Eigen::VectorXd linear_scores(const LinearModel& m, const InteractionDataset& train, int u) {
    if (u < 0 || u >= train.n_users) throw std::out_of_range("linear_scores: bad user index");
    if (m.kind == LinearModel::Kind::ials) {
        if (m.user_factors.rows() != train.n_users || m.item_factors.rows() != train.n_items)
            throw std::invalid_argument("linear_scores: model/dataset dimension mismatch");
        return m.item_factors * m.user_factors.row(u).transpose();
    }
    if (m.weights.rows() != train.n_items)
        throw std::invalid_argument("linear_scores: model/dataset dimension mismatch");
    Eigen::VectorXd s = Eigen::VectorXd::Zero(train.n_items);
    for (int j : train.pos_by_user[u]) s += m.weights.row(j).transpose();
    return s;
}

namespace {

void write_matrix_bin(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("linear: cannot write " + path);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

Eigen::MatrixXd read_matrix_bin(const std::string& path, int rows, int cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("linear: cannot open " + path);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double v;
            if (!in.read(reinterpret_cast<char*>(&v), sizeof(double)))
                throw std::runtime_error("linear: " + path + " truncated");
            m(r, c) = v;
        }
    return m;
}

}  // namespace

void save_linear(const LinearModel& m, const std::string& prefix) {
    std::ofstream meta(prefix + ".meta");
    if (!meta) throw std::runtime_error("linear: cannot write " + prefix + ".meta");
    if (m.kind == LinearModel::Kind::ials) {
        meta << "kind ials\n"
             << "n_users " << m.user_factors.rows() << "\n"
             << "n_items " << m.item_factors.rows() << "\n"
             << "d " << m.user_factors.cols() << "\n";
        write_matrix_bin(m.user_factors, prefix + ".user.bin");
        write_matrix_bin(m.item_factors, prefix + ".item.bin");
    } else {
        meta << "kind ease\n"
             << "n_items " << m.weights.rows() << "\n";
        write_matrix_bin(m.weights, prefix + ".weights.bin");
    }
}

LinearModel load_linear(const std::string& prefix) {
    std::ifstream meta(prefix + ".meta");
    if (!meta) throw std::runtime_error("linear: cannot open " + prefix + ".meta");
    std::string key, kind;
    int n_users = 0, n_items = 0, d = 0;
    while (meta >> key) {
        if (key == "kind")
            meta >> kind;
        else if (key == "n_users")
            meta >> n_users;
        else if (key == "n_items")
            meta >> n_items;
        else if (key == "d")
            meta >> d;
        else {
            std::string skip;
            meta >> skip;
        }
    }
    LinearModel m;
    if (kind == "ials") {
        m.kind = LinearModel::Kind::ials;
        m.user_factors = read_matrix_bin(prefix + ".user.bin", n_users, d);
        m.item_factors = read_matrix_bin(prefix + ".item.bin", n_items, d);
    } else if (kind == "ease") {
        m.kind = LinearModel::Kind::ease;
        m.weights = read_matrix_bin(prefix + ".weights.bin", n_items, n_items);
    } else {
        throw std::runtime_error("linear: unknown checkpoint kind '" + kind + "'");
    }
    return m;
}

}  // namespace recloss
