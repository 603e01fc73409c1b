#ifndef CUMFOLIO_FACTORIZATION_HPP
#define CUMFOLIO_FACTORIZATION_HPP

#include <string>
#include <vector>

#include "cumfolio/cumulants.hpp"
#include "cumfolio/tensor_algebra.hpp"

namespace cumfolio {

/// Portfolio construction methods. The first three produce orthonormal
/// factor matrices; ZeroV is the benchmark-reproduction control (all factor
/// loadings zero) used only by the backtest layer.
enum class Method { Evd, Phi4, Phi6, ZeroV };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

/// Orthonormal M x M factor matrix; rear columns carry the low-variability
/// portfolios. Sign convention: in each column the entry of largest absolute
/// value is positive (first such entry on ties), making output deterministic.
struct FactorMatrix {
    Matrix columns;
    Method method = Method::Evd;
    Vector column_scores;  // eigenvalues (EVD) / singular values (ALS), descending

    int dim() const { return static_cast<int>(columns.rows()); }
};

struct AlsConfig {
    int n_max = 4;  // 4 or 6
    int max_iters = 100;
    double rel_tol = 1e-6;
};

struct AlsResult {
    FactorMatrix factors;
    std::vector<double> phi_trace;  // one entry per evaluated iterate, init first
    bool converged = false;         // false means the max_iters cap was hit
    int iterations = 0;             // steps taken after the initial guess
};

/// {1/2!, 1/3!, ..., 1/n_max!} — the scaling applied to concatenated
/// unfoldings and to the squared core norms.
std::vector<double> factorial_weights(int n_max);

/// Left singular vectors of a (typically wide) matrix, singular values
/// descending, computed as eigenvectors of A*A^T.
Matrix left_singular_vectors(const Matrix& a, Vector* singular_values = nullptr);

/// Flip column signs so the largest-magnitude entry of each column is
/// positive (first such entry on ties).
void apply_sign_convention(Matrix& v);

bool is_orthonormal(const Matrix& v, double tol = 1e-10);

/// Eigendecomposition of the covariance tensor, eigenvalues descending; the
/// last column is the minimum-variance combination.
FactorMatrix evd_factor(const SymmetricTensor& c2);

/// Sum over orders 2..n_max of (1/i!) * squared Frobenius norm of the core
/// tensor of C_i under v. Constant across orthogonal v by norm invariance,
/// so it serves as a consistency monitor for the iteration rather than a
/// discriminating objective.
double phi(const CumulantFamily& family, const Matrix& v);

/// Initial guess: left singular vectors of [C2(1)/2! ... Cn(1)/n!].
FactorMatrix als_init(const CumulantFamily& family);

/// One update: S_i = partial contraction of C_i by the previous iterate in
/// modes 2..i, then left singular vectors of [S2(1)/2! ... Sn(1)/n!].
FactorMatrix als_step(const CumulantFamily& family, const FactorMatrix& v_prev);

/// Iterate als_step from als_init until the relative change of phi is within
/// cfg.rel_tol or max_iters is hit (not an error; reported via `converged`).
AlsResult als_factor(const CumulantFamily& family, const AlsConfig& cfg);

/// Dump: header row `method,score1,...,scoreM`, then the M x M matrix.
void write_factor_csv(const std::string& path, const FactorMatrix& fm);
FactorMatrix read_factor_csv(const std::string& path);

}  // namespace cumfolio

#endif  // CUMFOLIO_FACTORIZATION_HPP
