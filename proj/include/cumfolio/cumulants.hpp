#ifndef CUMFOLIO_CUMULANTS_HPP
#define CUMFOLIO_CUMULANTS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "cumfolio/panel.hpp"
#include "cumfolio/symmetric_tensor.hpp"
#include "cumfolio/tensor_algebra.hpp"

namespace cumfolio {

/// Consecutive cumulant tensors C2..C_n_max estimated from one panel with a
/// single shared centering pass.
struct CumulantFamily {
    std::vector<SymmetricTensor> tensors;  // orders 2, 3, ..., n_max in sequence
    int n_max = 0;                         // 4 or 6
    int dim = 0;
    std::size_t sample_size = 0;

    const SymmetricTensor& order(int n) const;
};

/// Entry (i1..in) = (1/T) sum_t prod_k (x[t,ik] - mean of column ik).
SymmetricTensor central_moment_tensor(const ReturnPanel& panel, int order, int threads = 1);

/// Joint cumulant tensor of the empirical distribution, orders 2..6, via the
/// moment-to-cumulant set-partition formula on centered data (partitions with
/// singleton blocks vanish after centering). Normalization is 1/T at every
/// order, including order 2, so each tensor is exactly the corresponding
/// derivative of the empirical log moment generating function at zero.
SymmetricTensor cumulant_tensor(const ReturnPanel& panel, int order, int threads = 1);

/// Tensors C2..C_n_max (n_max 4 or 6) sharing one centering pass.
CumulantFamily cumulant_family(const ReturnPanel& panel, int n_max, int threads = 1);

/// Order-n cumulant of the projected series y_t = sum_i a[i] * x[t,i],
/// computed from univariate central-moment formulas (independent of the
/// tensor route; used to check multilinearity).
double directional_cumulant(const ReturnPanel& panel, const Vector& a, int order);

/// Per-portfolio cumulant table for the columns of v: row r holds order r+2.
/// Order 2 is reported raw; orders >= 3 are standardized as
/// kappa_n / kappa_2^(n/2) so the values are scale-free.
Matrix normalized_cumulant_profile(const CumulantFamily& family, const Matrix& v);

/// Dump format: header `order,i1,i2,i3,i4,i5,i6,value`, one row per distinct
/// sorted multi-index (1-based, unused slots blank), full precision.
void write_tensor_csv(const std::string& path, const SymmetricTensor& tensor);
SymmetricTensor read_tensor_csv(const std::string& path);

}  // namespace cumfolio

#endif  // CUMFOLIO_CUMULANTS_HPP
