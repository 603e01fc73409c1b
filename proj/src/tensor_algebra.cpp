#include "cumfolio/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cumfolio/errors.hpp"

namespace cumfolio {

namespace {

std::size_t pow_size(int base, int exp) {
    std::size_t p = 1;
    for (int k = 0; k < exp; ++k) p *= static_cast<std::size_t>(base);
    return p;
}

void check_square_match(const SymmetricTensor& tensor, const Matrix& v) {
    if (v.rows() != tensor.dim() || v.cols() != tensor.dim()) {
        throw DimMismatchError("factor matrix is " + std::to_string(v.rows()) + "x" +
                               std::to_string(v.cols()) + " but tensor dimension is " +
                               std::to_string(tensor.dim()));
    }
}

/// Multiply mode `mode` (1-based) of a dense tensor by v. Views the flat
/// data as P x (M*Q) with P = M^(mode-1) leading and Q = M^(n-mode) trailing
/// positions, then replaces each P x M slab by slab * v.
void mode_multiply(const std::vector<double>& in, std::vector<double>& out, int order, int dim,
                   int mode, const Matrix& v) {
    const auto p = static_cast<Eigen::Index>(pow_size(dim, mode - 1));
    const auto q = static_cast<Eigen::Index>(pow_size(dim, order - mode));
    Eigen::Map<const Matrix> in_map(in.data(), p, static_cast<Eigen::Index>(dim) * q);
    Eigen::Map<Matrix> out_map(out.data(), p, static_cast<Eigen::Index>(dim) * q);
    for (Eigen::Index slab = 0; slab < q; ++slab) {
        out_map.middleCols(slab * dim, dim).noalias() = in_map.middleCols(slab * dim, dim) * v;
    }
}

}  // namespace

DenseTensor::DenseTensor(int order, int dim) : order_(order), dim_(dim) {
    if (order < 1 || order > kMaxOrder) {
        throw UnsupportedOrderError("tensor order " + std::to_string(order) +
                                    " outside supported range [1, 6]");
    }
    if (dim < 1) {
        throw DimMismatchError("tensor dimension must be positive");
    }
    data_.assign(pow_size(dim, order), 0.0);
}

std::size_t DenseTensor::offset(std::span<const int> indices) const {
    std::size_t off = 0;
    std::size_t stride = 1;
    for (int k = 0; k < order_; ++k) {
        off += static_cast<std::size_t>(indices[k]) * stride;
        stride *= static_cast<std::size_t>(dim_);
    }
    return off;
}

DenseTensor to_dense(const SymmetricTensor& tensor) {
    DenseTensor out(tensor.order(), tensor.dim());
    const int n = tensor.order();
    const auto& tuples = tensor.distinct_indices();
    const auto& values = tensor.values();
    MultiIndex perm{};
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        perm = tuples[r];
        const double value = values[r];
        // The sorted tuple is the first permutation, so this visits every
        // distinct rearrangement exactly once.
        do {
            out.data()[out.offset({perm.data(), static_cast<std::size_t>(n)})] = value;
        } while (std::next_permutation(perm.begin(), perm.begin() + n));
    }
    return out;
}

Matrix unfold_mode1(const SymmetricTensor& tensor) {
    if (tensor.order() < 2) {
        throw UnsupportedOrderError("mode-1 unfolding requires order >= 2");
    }
    return unfold_mode1(to_dense(tensor));
}

Matrix unfold_mode1(const DenseTensor& tensor) {
    if (tensor.order() < 2) {
        throw UnsupportedOrderError("mode-1 unfolding requires order >= 2");
    }
    const auto rows = static_cast<Eigen::Index>(tensor.dim());
    const auto cols = static_cast<Eigen::Index>(tensor.size()) / rows;
    return Eigen::Map<const Matrix>(tensor.data().data(), rows, cols);
}

double frobenius_norm_sq(const SymmetricTensor& tensor) {
    const int n = tensor.order();
    const auto& tuples = tensor.distinct_indices();
    const auto& values = tensor.values();
    double sum = 0.0;
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        const double m = SymmetricTensor::multiplicity(
            {tuples[r].data(), static_cast<std::size_t>(n)});
        sum += m * values[r] * values[r];
    }
    return sum;
}

double frobenius_norm_sq(const DenseTensor& tensor) {
    return Eigen::Map<const Vector>(tensor.data().data(),
                                    static_cast<Eigen::Index>(tensor.size()))
        .squaredNorm();
}

DenseTensor partial_contraction(const SymmetricTensor& tensor, const Matrix& v) {
    check_square_match(tensor, v);
    const int n = tensor.order();
    const int m = tensor.dim();
    DenseTensor cur = to_dense(tensor);
    if (n < 2) return cur;
    // Contract one mode at a time; each pass costs M^(n+1) flops instead of
    // the M^(2n-1) of per-entry summation.
    DenseTensor next(n, m);
    for (int mode = 2; mode <= n; ++mode) {
        mode_multiply(cur.data(), next.data(), n, m, mode, v);
        std::swap(cur, next);
    }
    return cur;
}

SymmetricTensor core_tensor(const SymmetricTensor& tensor, const Matrix& v) {
    check_square_match(tensor, v);
    const int n = tensor.order();
    const int m = tensor.dim();
    const DenseTensor partial = partial_contraction(tensor, v);
    SymmetricTensor out(n, m);
    const auto& tuples = out.distinct_indices();
    // Finish with mode 1, evaluating only the distinct sorted outputs:
    // T[l1, rest] = sum_j v(j, l1) * S[j, rest], and the S slice over j is
    // contiguous in the dense layout.
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        const MultiIndex& t = tuples[r];
        std::size_t rest = 0;
        std::size_t stride = 1;
        for (int k = 1; k < n; ++k) {
            stride *= static_cast<std::size_t>(m);
            rest += static_cast<std::size_t>(t[k]) * stride;
        }
        Eigen::Map<const Vector> slice(partial.data().data() + rest, m);
        out.values()[r] = slice.dot(v.col(t[0]));
    }
    return out;
}

Matrix scaled_concat(const std::vector<Matrix>& matrices, const std::vector<double>& weights) {
    if (matrices.empty()) {
        throw RowMismatchError("scaled_concat needs at least one block");
    }
    if (matrices.size() != weights.size()) {
        throw RowMismatchError("scaled_concat got " + std::to_string(matrices.size()) +
                               " blocks but " + std::to_string(weights.size()) + " weights");
    }
    const Eigen::Index rows = matrices.front().rows();
    Eigen::Index cols = 0;
    for (const Matrix& block : matrices) {
        if (block.rows() != rows) {
            throw RowMismatchError("scaled_concat blocks disagree on row count: " +
                                   std::to_string(rows) + " vs " + std::to_string(block.rows()));
        }
        cols += block.cols();
    }
    Matrix out(rows, cols);
    Eigen::Index at = 0;
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        out.middleCols(at, matrices[k].cols()) = weights[k] * matrices[k];
        at += matrices[k].cols();
    }
    return out;
}

double contract_all_modes(const SymmetricTensor& tensor, const Vector& v) {
    if (v.size() != tensor.dim()) {
        throw DimMismatchError("direction vector length " + std::to_string(v.size()) +
                               " does not match tensor dimension " +
                               std::to_string(tensor.dim()));
    }
    const int n = tensor.order();
    const auto& tuples = tensor.distinct_indices();
    const auto& values = tensor.values();
    double sum = 0.0;
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        const MultiIndex& t = tuples[r];
        double prod = values[r] * SymmetricTensor::multiplicity(
                                      {t.data(), static_cast<std::size_t>(n)});
        for (int k = 0; k < n; ++k) prod *= v[t[k]];
        sum += prod;
    }
    return sum;
}

}  // namespace cumfolio
