#ifndef CUMFOLIO_TENSOR_ALGEBRA_HPP
#define CUMFOLIO_TENSOR_ALGEBRA_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "cumfolio/symmetric_tensor.hpp"

namespace cumfolio {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense n-way array over `dim` variables with the first index fastest
/// (column-major generalization). With this layout the mode-1 unfolding is a
/// plain reshape: entry (j1,...,jn) sits at flat offset
/// j1 + j2*M + ... + jn*M^(n-1), i.e. row j1, column sum_{k>=2} jk*M^(k-2)
/// of an M x M^(n-1) column-major matrix.
class DenseTensor {
public:
    DenseTensor(int order, int dim);

    int order() const { return order_; }
    int dim() const { return dim_; }
    std::size_t size() const { return data_.size(); }

    std::size_t offset(std::span<const int> indices) const;
    double get(std::span<const int> indices) const { return data_[offset(indices)]; }
    void set(std::span<const int> indices, double value) { data_[offset(indices)] = value; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    int order_;
    int dim_;
    std::vector<double> data_;
};

/// Materialize every entry of a symmetric tensor into the dense layout.
DenseTensor to_dense(const SymmetricTensor& tensor);

/// M x M^(n-1) mode-1 unfolding; column index is sum_{k>=2} jk*M^(k-2)
/// (first trailing index fastest). Requires order >= 2.
Matrix unfold_mode1(const SymmetricTensor& tensor);
Matrix unfold_mode1(const DenseTensor& tensor);

/// Sum of squares over all M^n materialized positions; symmetric entries are
/// counted with their permutation multiplicity.
double frobenius_norm_sq(const SymmetricTensor& tensor);
double frobenius_norm_sq(const DenseTensor& tensor);

/// Contract modes 2..n with the square matrix v, leaving mode 1 untouched:
/// out[j1, l2, ..., ln] = sum C[j1, j2, ..., jn] v(j2,l2) ... v(jn,ln).
/// The result is generally not symmetric, hence the dense return type.
DenseTensor partial_contraction(const SymmetricTensor& tensor, const Matrix& v);

/// Full multilinear transform by v in every mode:
/// out[l1, ..., ln] = sum C[j1, ..., jn] v(j1,l1) ... v(jn,ln).
/// The output is symmetric, so only its distinct entries are computed.
SymmetricTensor core_tensor(const SymmetricTensor& tensor, const Matrix& v);

/// Horizontal concatenation [w1*A1  w2*A2  ...]; all blocks must share the
/// row count.
Matrix scaled_concat(const std::vector<Matrix>& matrices, const std::vector<double>& weights);

/// Apply the same vector to every mode: sum C[j1..jn] v[j1] ... v[jn].
/// This is the order-n cumulant of the portfolio direction v.
double contract_all_modes(const SymmetricTensor& tensor, const Vector& v);

}  // namespace cumfolio

#endif  // CUMFOLIO_TENSOR_ALGEBRA_HPP
