#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace recloss {

enum class ScoreMode { dot, cosine };

ScoreMode score_mode_from_string(const std::string& s);
const char* to_string(ScoreMode m);

enum class InitScheme { normal, xavier };

InitScheme init_scheme_from_string(const std::string& s);
const char* to_string(InitScheme s);

// Matrix-factorization model: one embedding row per user and per item.
// Scoring is read-only; embedding updates need exclusive access (the trainer
// is the single writer).
struct MfModel {
    Eigen::MatrixXd user_emb;  // n_users x d
    Eigen::MatrixXd item_emb;  // n_items x d
    ScoreMode score_mode = ScoreMode::dot;

    int n_users() const { return static_cast<int>(user_emb.rows()); }
    int n_items() const { return static_cast<int>(item_emb.rows()); }
    int dim() const { return static_cast<int>(user_emb.cols()); }
};

// normal: entries i.i.d. N(0, sigma^2). xavier: N(0, 2/(d+d)), sigma ignored.
// Bit-identical for equal seeds.
MfModel init_model(int n_users, int n_items, int d, InitScheme scheme, double sigma,
                   std::uint64_t seed, ScoreMode mode);

// Dot or cosine score for one (u, i) pair. Cosine returns 0 when either
// vector norm is below 1e-12.
double score(const MfModel& m, int u, int i);

// Score vector over all items for user u (one matrix-vector product).
Eigen::VectorXd score_all_items(const MfModel& m, int u);

// Checkpoint layout (documented in the README): "<prefix>.meta" text header
// plus "<prefix>.user.bin" / "<prefix>.item.bin" row-major little-endian
// doubles.
void save_checkpoint(const MfModel& m, const std::string& prefix);
MfModel load_checkpoint(const std::string& prefix);

}  // namespace recloss
