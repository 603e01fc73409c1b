#include "cumfolio/symmetric_tensor.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "cumfolio/errors.hpp"

namespace cumfolio {

SymmetricTensor::SymmetricTensor(int order, int dim) : order_(order), dim_(dim) {
    if (order < 1 || order > kMaxOrder) {
        throw UnsupportedOrderError("tensor order " + std::to_string(order) +
                                    " outside supported range [1, 6]");
    }
    if (dim < 1) {
        throw DimMismatchError("tensor dimension must be positive");
    }
    // Pascal triangle up to C(dim + order - 1, order).
    const int a_max = dim + order - 1;
    binom_.assign(static_cast<std::size_t>(a_max + 1) * (order + 1), 0);
    for (int a = 0; a <= a_max; ++a) {
        binom_[static_cast<std::size_t>(a) * (order + 1)] = 1;
        for (int b = 1; b <= std::min(a, order); ++b) {
            binom_[static_cast<std::size_t>(a) * (order + 1) + b] =
                binom_[static_cast<std::size_t>(a - 1) * (order + 1) + b - 1] +
                (b <= a - 1 ? binom_[static_cast<std::size_t>(a - 1) * (order + 1) + b] : 0);
        }
    }
    values_.assign(binom(dim + order - 1, order), 0.0);
}

std::size_t SymmetricTensor::rank_sorted(std::span<const int> sorted) const {
    // Colex rank of the strictly increasing sequence c_k = i_k + k.
    std::size_t r = 0;
    for (int k = 0; k < order_; ++k) {
        r += binom(sorted[k] + k, k + 1);
    }
    return r;
}

double SymmetricTensor::get(std::span<const int> indices) const {
    MultiIndex s{};
    std::copy(indices.begin(), indices.end(), s.begin());
    std::sort(s.begin(), s.begin() + order_);
    return values_[rank_sorted({s.data(), static_cast<std::size_t>(order_)})];
}

void SymmetricTensor::set(std::span<const int> indices, double value) {
    MultiIndex s{};
    std::copy(indices.begin(), indices.end(), s.begin());
    std::sort(s.begin(), s.begin() + order_);
    values_[rank_sorted({s.data(), static_cast<std::size_t>(order_)})] = value;
}

const std::vector<MultiIndex>& SymmetricTensor::sorted_multi_indices(int order, int dim) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;

    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.try_emplace({order, dim});
    if (inserted) {
        MultiIndex idx{};
        // Colex enumeration: advance the lowest position that can move,
        // resetting all positions below it. Produces tuples in rank order.
        while (true) {
            it->second.push_back(idx);
            int k = 0;
            while (k < order && idx[k] == (k + 1 < order ? idx[k + 1] : dim - 1)) {
                ++k;
            }
            if (k == order) break;
            ++idx[k];
            for (int j = 0; j < k; ++j) idx[j] = 0;
        }
    }
    return it->second;
}

double SymmetricTensor::multiplicity(std::span<const int> sorted) {
    static constexpr double factorial[] = {1, 1, 2, 6, 24, 120, 720};
    const int n = static_cast<int>(sorted.size());
    double denom = 1.0;
    int run = 1;
    for (int k = 1; k < n; ++k) {
        if (sorted[k] == sorted[k - 1]) {
            ++run;
        } else {
            denom *= factorial[run];
            run = 1;
        }
    }
    denom *= factorial[run];
    return factorial[n] / denom;
}

}  // namespace cumfolio
