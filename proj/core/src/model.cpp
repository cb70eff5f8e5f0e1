#include "recloss/model.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "recloss/rng.hpp"

namespace recloss {

ScoreMode score_mode_from_string(const std::string& s) {
    if (s == "dot") return ScoreMode::dot;
    if (s == "cosine") return ScoreMode::cosine;
    throw std::invalid_argument("unknown score mode '" + s + "' (expected dot|cosine)");
}

const char* to_string(ScoreMode m) { return m == ScoreMode::dot ? "dot" : "cosine"; }

InitScheme init_scheme_from_string(const std::string& s) {
    if (s == "normal") return InitScheme::normal;
    if (s == "xavier") return InitScheme::xavier;
    throw std::invalid_argument("unknown init scheme '" + s + "' (expected normal|xavier)");
}

const char* to_string(InitScheme s) { return s == InitScheme::normal ? "normal" : "xavier"; }

namespace {

void fill_normal(Eigen::MatrixXd& m, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = sigma * dist(rng);
}

}  // namespace

MfModel init_model(int n_users, int n_items, int d, InitScheme scheme, double sigma,
                   std::uint64_t seed, ScoreMode mode) {
    if (d < 1) throw std::invalid_argument("init_model: d must be >= 1");
    if (n_users < 1 || n_items < 1)
        throw std::invalid_argument("init_model: need at least one user and item");
    if (scheme == InitScheme::normal && sigma < 0.0)
        throw std::invalid_argument("init_model: sigma must be >= 0");
    MfModel m;
    m.score_mode = mode;
    m.user_emb.resize(n_users, d);
    m.item_emb.resize(n_items, d);
    const double s = scheme == InitScheme::xavier ? std::sqrt(2.0 / (d + d)) : sigma;
    auto rng_u = make_rng(seed, "init-user");
    auto rng_i = make_rng(seed, "init-item");
    fill_normal(m.user_emb, s, rng_u);
    fill_normal(m.item_emb, s, rng_i);
    return m;
}

double score(const MfModel& m, int u, int i) {
    const auto w = m.user_emb.row(u);
    const auto h = m.item_emb.row(i);
    const double dot = w.dot(h);
    if (m.score_mode == ScoreMode::dot) return dot;
    const double nw = w.norm(), nh = h.norm();
    if (nw < 1e-12 || nh < 1e-12) return 0.0;
    return dot / (nw * nh);
}

Eigen::VectorXd score_all_items(const MfModel& m, int u) {
    if (u < 0 || u >= m.n_users()) throw std::out_of_range("score_all_items: bad user index");
    Eigen::VectorXd s = m.item_emb * m.user_emb.row(u).transpose();
    if (m.score_mode == ScoreMode::cosine) {
        const double nw = m.user_emb.row(u).norm();
        if (nw < 1e-12) {
            s.setZero();
            return s;
        }
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const double nh = m.item_emb.row(i).norm();
            s(i) = nh < 1e-12 ? 0.0 : s(i) / (nw * nh);
        }
    }
    return s;
}

namespace {

void write_matrix(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

Eigen::MatrixXd read_matrix(const std::string& path, int rows, int cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double v;
            if (!in.read(reinterpret_cast<char*>(&v), sizeof(double)))
                throw std::runtime_error("checkpoint: " + path + " truncated");
            m(r, c) = v;
        }
    return m;
}

}  // namespace

void save_checkpoint(const MfModel& m, const std::string& prefix) {
    std::ofstream meta(prefix + ".meta");
    if (!meta) throw std::runtime_error("checkpoint: cannot write " + prefix + ".meta");
    meta << "kind mf\n"
         << "n_users " << m.n_users() << "\n"
         << "n_items " << m.n_items() << "\n"
         << "d " << m.dim() << "\n"
         << "score_mode " << to_string(m.score_mode) << "\n";
    write_matrix(m.user_emb, prefix + ".user.bin");
    write_matrix(m.item_emb, prefix + ".item.bin");
}

MfModel load_checkpoint(const std::string& prefix) {
    std::ifstream meta(prefix + ".meta");
    if (!meta) throw std::runtime_error("checkpoint: cannot open " + prefix + ".meta");
    std::string key, kind, mode;
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
        else if (key == "score_mode")
            meta >> mode;
        else {
            std::string skip;
            meta >> skip;
        }
    }
    if (kind != "mf") throw std::runtime_error("checkpoint: " + prefix + " is not an mf model");
    if (n_users < 1 || n_items < 1 || d < 1)
        throw std::runtime_error("checkpoint: bad header in " + prefix + ".meta");
    MfModel m;
    m.score_mode = score_mode_from_string(mode);
    m.user_emb = read_matrix(prefix + ".user.bin", n_users, d);
    m.item_emb = read_matrix(prefix + ".item.bin", n_items, d);
    return m;
}

}  // namespace recloss
