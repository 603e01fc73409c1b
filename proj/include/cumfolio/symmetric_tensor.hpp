#ifndef CUMFOLIO_SYMMETRIC_TENSOR_HPP
#define CUMFOLIO_SYMMETRIC_TENSOR_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace cumfolio {

/// Maximum tensor order handled anywhere in the library.
inline constexpr int kMaxOrder = 6;

/// Multi-index buffer; only the first `order` slots of a tensor's
/// indices are meaningful.
using MultiIndex = std::array<int, kMaxOrder>;

/// Order-n symmetric tensor over `dim` variables, storing only the
/// C(dim+n-1, n) distinct entries keyed by the sorted multi-index
/// i1 <= i2 <= ... <= in (0-based). Ranks are colexicographic, so the
/// flat layout is a bijection onto [0, distinct_size()).
class SymmetricTensor {
public:
    SymmetricTensor(int order, int dim);

    int order() const { return order_; }
    int dim() const { return dim_; }
    std::size_t distinct_size() const { return values_.size(); }

    /// Entry for an arbitrary (not necessarily sorted) multi-index.
    double get(std::span<const int> indices) const;
    void set(std::span<const int> indices, double value);

    /// Fast path when the caller guarantees indices are sorted ascending.
    double get_sorted(std::span<const int> sorted) const {
        return values_[rank_sorted(sorted)];
    }
    double& at_sorted(std::span<const int> sorted) {
        return values_[rank_sorted(sorted)];
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// All distinct sorted multi-indices, listed in rank order (the k-th
    /// tuple owns values()[k]). Backed by a process-wide cache keyed on
    /// (order, dim), so concurrent readers are safe.
    const std::vector<MultiIndex>& distinct_indices() const {
        return sorted_multi_indices(order_, dim_);
    }

    /// Sorted multi-index list for an (order, dim) pair, cached for reuse.
    static const std::vector<MultiIndex>& sorted_multi_indices(int order, int dim);

    /// Number of distinct permutations of a sorted multi-index, i.e. the
    /// multiplicity of the stored entry in the full n-way array.
    static double multiplicity(std::span<const int> sorted);

    std::size_t rank_sorted(std::span<const int> sorted) const;

private:
    int order_;
    int dim_;
    std::vector<double> values_;
    std::vector<std::size_t> binom_;  // C(a, b), b <= order, row-major

    std::size_t binom(int a, int b) const {
        return binom_[static_cast<std::size_t>(a) * (order_ + 1) + b];
    }
};

}  // namespace cumfolio

#endif  // CUMFOLIO_SYMMETRIC_TENSOR_HPP
