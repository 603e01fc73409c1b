#include "cumfolio/factorization.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "cumfolio/csv.hpp"
#include "cumfolio/errors.hpp"

namespace cumfolio {

std::string method_name(Method method) {
    switch (method) {
        case Method::Evd: return "EVD";
        case Method::Phi4: return "PHI4";
        case Method::Phi6: return "PHI6";
        case Method::ZeroV: return "ZEROV";
    }
    throw Error("unknown method tag");
}

Method method_from_name(const std::string& name) {
    if (name == "EVD") return Method::Evd;
    if (name == "PHI4") return Method::Phi4;
    if (name == "PHI6") return Method::Phi6;
    if (name == "ZEROV") return Method::ZeroV;
    throw Error("unknown method '" + name + "'; expected EVD, PHI4, PHI6 or ZEROV");
}

std::vector<double> factorial_weights(int n_max) {
    std::vector<double> w;
    double fact = 1.0;
    for (int i = 2; i <= n_max; ++i) {
        fact *= i;
        w.push_back(1.0 / fact);
    }
    return w;
}

Matrix left_singular_vectors(const Matrix& a, Vector* singular_values) {
    const Eigen::Index m = a.rows();
    const Matrix gram = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw NotFiniteError("eigendecomposition failed; input likely not finite");
    }
    // The solver orders eigenvalues ascending; reverse for descending
    // singular values.
    Matrix v(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        v.col(j) = solver.eigenvectors().col(m - 1 - j);
    }
    if (singular_values != nullptr) {
        singular_values->resize(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            (*singular_values)[j] = std::sqrt(std::max(solver.eigenvalues()[m - 1 - j], 0.0));
        }
    }
    return v;
}

void apply_sign_convention(Matrix& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        Eigen::Index lead = 0;
        double best = std::abs(v(0, j));
        for (Eigen::Index i = 1; i < v.rows(); ++i) {
            if (std::abs(v(i, j)) > best) {
                best = std::abs(v(i, j));
                lead = i;
            }
        }
        if (v(lead, j) < 0.0) v.col(j) = -v.col(j);
    }
}

bool is_orthonormal(const Matrix& v, double tol) {
    const Matrix gram = v.transpose() * v;
    return (gram - Matrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() < tol;
}

FactorMatrix evd_factor(const SymmetricTensor& c2) {
    if (c2.order() != 2) {
        throw UnsupportedOrderError("evd_factor expects an order-2 tensor, got order " +
                                    std::to_string(c2.order()));
    }
    const Matrix cov = unfold_mode1(c2);
    if (!cov.allFinite()) {
        throw NotFiniteError("covariance contains non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw NotFiniteError("covariance eigendecomposition failed");
    }
    const Eigen::Index m = cov.rows();
    FactorMatrix fm;
    fm.method = Method::Evd;
    fm.columns.resize(m, m);
    fm.column_scores.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        fm.columns.col(j) = solver.eigenvectors().col(m - 1 - j);
        fm.column_scores[j] = solver.eigenvalues()[m - 1 - j];
    }
    apply_sign_convention(fm.columns);
    return fm;
}

double phi(const CumulantFamily& family, const Matrix& v) {
    if (v.rows() != family.dim || v.cols() != family.dim) {
        throw DimMismatchError("factor matrix shape does not match family dimension " +
                               std::to_string(family.dim));
    }
    const std::vector<double> weights = factorial_weights(family.n_max);
    double sum = 0.0;
    for (int n = 2; n <= family.n_max; ++n) {
        sum += weights[static_cast<std::size_t>(n) - 2] *
               frobenius_norm_sq(core_tensor(family.order(n), v));
    }
    return sum;
}

namespace {

FactorMatrix factor_from_blocks(const std::vector<Matrix>& blocks, int n_max) {
    const Matrix concat = scaled_concat(blocks, factorial_weights(n_max));
    FactorMatrix fm;
    fm.method = n_max == 4 ? Method::Phi4 : Method::Phi6;
    fm.columns = left_singular_vectors(concat, &fm.column_scores);
    apply_sign_convention(fm.columns);
    return fm;
}

}  // namespace

FactorMatrix als_init(const CumulantFamily& family) {
    std::vector<Matrix> blocks;
    for (int n = 2; n <= family.n_max; ++n) {
        blocks.push_back(unfold_mode1(family.order(n)));
    }
    return factor_from_blocks(blocks, family.n_max);
}

FactorMatrix als_step(const CumulantFamily& family, const FactorMatrix& v_prev) {
    if (v_prev.dim() != family.dim) {
        throw DimMismatchError("previous iterate dimension " + std::to_string(v_prev.dim()) +
                               " does not match family dimension " + std::to_string(family.dim));
    }
    std::vector<Matrix> blocks;
    for (int n = 2; n <= family.n_max; ++n) {
        blocks.push_back(unfold_mode1(partial_contraction(family.order(n), v_prev.columns)));
    }
    return factor_from_blocks(blocks, family.n_max);
}

AlsResult als_factor(const CumulantFamily& family, const AlsConfig& cfg) {
    if (cfg.n_max != family.n_max) {
        throw DimMismatchError("config n_max " + std::to_string(cfg.n_max) +
                               " does not match family n_max " + std::to_string(family.n_max));
    }
    if (cfg.max_iters < 1 || !(cfg.rel_tol > 0.0)) {
        throw OutOfRangeError("als config needs max_iters >= 1 and rel_tol > 0");
    }
    AlsResult result;
    result.factors = als_init(family);
    result.phi_trace.push_back(phi(family, result.factors.columns));
    for (int k = 1; k <= cfg.max_iters; ++k) {
        const double prev_phi = result.phi_trace.back();
        const double threshold = cfg.rel_tol * std::max(std::abs(prev_phi), 1.0);
        if (std::isinf(threshold)) {
            // An infinite tolerance is satisfied vacuously; keep the initial
            // guess rather than stepping once.
            result.converged = true;
            break;
        }
        result.factors = als_step(family, result.factors);
        result.phi_trace.push_back(phi(family, result.factors.columns));
        result.iterations = k;
        if (std::abs(result.phi_trace.back() - prev_phi) <= threshold) {
            result.converged = true;
            break;
        }
    }
    return result;
}

void write_factor_csv(const std::string& path, const FactorMatrix& fm) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << method_name(fm.method);
    for (Eigen::Index j = 0; j < fm.columns.cols(); ++j) {
        out << ','
            << csv::format_double(j < fm.column_scores.size() ? fm.column_scores[j] : 0.0);
    }
    out << '\n';
    for (Eigen::Index i = 0; i < fm.columns.rows(); ++i) {
        for (Eigen::Index j = 0; j < fm.columns.cols(); ++j) {
            if (j > 0) out << ',';
            out << csv::format_double(fm.columns(i, j));
        }
        out << '\n';
    }
    if (!out) {
        throw Error("failed while writing " + path);
    }
}

FactorMatrix read_factor_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw MalformedRowError("factor file " + path + " is empty");
    }
    const auto head = csv::split(line, ',');
    if (head.size() < 2) {
        throw MalformedRowError("factor header in " + path + " needs a method and scores");
    }
    FactorMatrix fm;
    fm.method = method_from_name(head[0]);
    const auto m = static_cast<Eigen::Index>(head.size()) - 1;
    fm.column_scores.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        fm.column_scores[j] = csv::parse_double(head[static_cast<std::size_t>(j) + 1], path);
    }
    fm.columns.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!std::getline(in, line)) {
            throw MalformedRowError("factor file " + path + " ends before row " +
                                    std::to_string(i + 1));
        }
        const auto fields = csv::split(line, ',');
        if (static_cast<Eigen::Index>(fields.size()) != m) {
            throw MalformedRowError("factor row " + std::to_string(i + 1) + " in " + path +
                                    " has " + std::to_string(fields.size()) + " fields, want " +
                                    std::to_string(m));
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            fm.columns(i, j) = csv::parse_double(fields[static_cast<std::size_t>(j)], path);
        }
    }
    return fm;
}

}  // namespace cumfolio
