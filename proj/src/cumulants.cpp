#include "cumfolio/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "cumfolio/csv.hpp"
#include "cumfolio/errors.hpp"
#include "cumfolio/parallel.hpp"

namespace cumfolio {

namespace {

constexpr double kFactorial[] = {1, 1, 2, 6, 24, 120, 720};

/// One set partition of {0..n-1} with every block of size >= 2, together with
/// its moment-to-cumulant coefficient (-1)^(|pi|-1) (|pi|-1)!.
struct Partition {
    std::vector<std::vector<int>> blocks;
    double coeff = 0.0;
};

void enumerate_growth_strings(int pos, int n, int max_label, std::vector<int>& label,
                              std::vector<Partition>& out) {
    if (pos == n) {
        const int n_blocks = max_label + 1;
        Partition p;
        p.blocks.assign(n_blocks, {});
        for (int i = 0; i < n; ++i) p.blocks[label[i]].push_back(i);
        for (const auto& block : p.blocks) {
            if (block.size() < 2) return;  // vanishes on centered data
        }
        p.coeff = (n_blocks % 2 == 1 ? 1.0 : -1.0) * kFactorial[n_blocks - 1];
        out.push_back(std::move(p));
        return;
    }
    for (int v = 0; v <= max_label + 1; ++v) {
        label[pos] = v;
        enumerate_growth_strings(pos + 1, n, std::max(max_label, v), label, out);
    }
}

/// Partitions of {0..n-1} without singleton blocks; cached per order.
/// Counts: n=2 -> 1, n=3 -> 1, n=4 -> 4, n=5 -> 11, n=6 -> 41.
const std::vector<Partition>& no_singleton_partitions(int n) {
    static std::mutex mutex;
    static std::map<int, std::vector<Partition>> cache;

    std::lock_guard<std::mutex> lock(mutex);
    auto [it, inserted] = cache.try_emplace(n);
    if (inserted) {
        std::vector<int> label(n, 0);
        enumerate_growth_strings(1, n, 0, label, it->second);
    }
    return it->second;
}

Matrix centered_returns(const ReturnPanel& panel) {
    if (panel.rows() < 2) {
        throw TooShortError("cumulant estimation needs at least 2 return rows, got " +
                            std::to_string(panel.rows()));
    }
    Matrix xc = panel.returns();
    xc.rowwise() -= xc.colwise().mean();
    return xc;
}

/// Central moments of one order from a pre-centered matrix.
SymmetricTensor central_moments_of(const Matrix& xc, int order, int threads) {
    SymmetricTensor out(order, static_cast<int>(xc.cols()));
    const auto& tuples = out.distinct_indices();
    std::vector<double>& values = out.values();
    const auto rows = xc.rows();
    parallel_for(tuples.size(), threads, [&](std::size_t begin, std::size_t end) {
        Vector prod(rows);
        for (std::size_t r = begin; r < end; ++r) {
            const MultiIndex& t = tuples[r];
            prod = xc.col(t[0]);
            for (int k = 1; k < order; ++k) prod.array() *= xc.col(t[k]).array();
            values[r] = prod.mean();
        }
    });
    return out;
}

/// Combine central-moment tensors (orders 2..order) into the cumulant tensor
/// via the no-singleton partition sum. moments[k] holds order k.
SymmetricTensor cumulant_from_moments(const std::vector<SymmetricTensor>& moments, int order,
                                      int dim, int threads) {
    SymmetricTensor out(order, dim);
    if (order == 2) {
        out.values() = moments[2].values();
        return out;
    }
    const auto& tuples = out.distinct_indices();
    const auto& partitions = no_singleton_partitions(order);
    std::vector<double>& values = out.values();
    parallel_for(tuples.size(), threads, [&](std::size_t begin, std::size_t end) {
        int sub[kMaxOrder];
        for (std::size_t r = begin; r < end; ++r) {
            const MultiIndex& t = tuples[r];
            double acc = 0.0;
            for (const Partition& p : partitions) {
                double term = p.coeff;
                for (const auto& block : p.blocks) {
                    // Block positions ascend, so the gathered indices stay
                    // sorted and the fast lookup applies.
                    for (std::size_t j = 0; j < block.size(); ++j) sub[j] = t[block[j]];
                    term *= moments[block.size()].get_sorted({sub, block.size()});
                }
                acc += term;
            }
            values[r] = acc;
        }
    });
    return out;
}

void check_cumulant_order(int order) {
    if (order < 2 || order > kMaxOrder) {
        throw UnsupportedOrderError("cumulant order " + std::to_string(order) +
                                    " outside supported range [2, 6]");
    }
}

}  // namespace

const SymmetricTensor& CumulantFamily::order(int n) const {
    if (n < 2 || n > n_max) {
        throw UnsupportedOrderError("family holds orders 2.." + std::to_string(n_max) +
                                    ", requested " + std::to_string(n));
    }
    return tensors[static_cast<std::size_t>(n) - 2];
}

SymmetricTensor central_moment_tensor(const ReturnPanel& panel, int order, int threads) {
    if (order < 1 || order > kMaxOrder) {
        throw UnsupportedOrderError("central moment order " + std::to_string(order) +
                                    " outside supported range [1, 6]");
    }
    return central_moments_of(centered_returns(panel), order, threads);
}

SymmetricTensor cumulant_tensor(const ReturnPanel& panel, int order, int threads) {
    check_cumulant_order(order);
    const Matrix xc = centered_returns(panel);
    std::vector<SymmetricTensor> moments;
    moments.reserve(static_cast<std::size_t>(order) + 1);
    for (int k = 0; k <= order; ++k) {
        moments.emplace_back(std::max(k, 1), static_cast<int>(xc.cols()));
        if (k >= 2) moments.back() = central_moments_of(xc, k, threads);
    }
    return cumulant_from_moments(moments, order, static_cast<int>(xc.cols()), threads);
}

CumulantFamily cumulant_family(const ReturnPanel& panel, int n_max, int threads) {
    if (n_max != 4 && n_max != 6) {
        throw UnsupportedOrderError("cumulant family takes n_max 4 or 6, got " +
                                    std::to_string(n_max));
    }
    const Matrix xc = centered_returns(panel);
    const int dim = static_cast<int>(xc.cols());

    std::vector<SymmetricTensor> moments;
    moments.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int k = 0; k <= n_max; ++k) {
        moments.emplace_back(std::max(k, 1), dim);
        if (k >= 2) moments.back() = central_moments_of(xc, k, threads);
    }

    CumulantFamily family;
    family.n_max = n_max;
    family.dim = dim;
    family.sample_size = panel.rows();
    for (int n = 2; n <= n_max; ++n) {
        family.tensors.push_back(cumulant_from_moments(moments, n, dim, threads));
    }
    return family;
}

double directional_cumulant(const ReturnPanel& panel, const Vector& a, int order) {
    check_cumulant_order(order);
    if (a.size() != static_cast<Eigen::Index>(panel.cols())) {
        throw DimMismatchError("weight vector length " + std::to_string(a.size()) +
                               " does not match panel width " + std::to_string(panel.cols()));
    }
    if (panel.rows() < 2) {
        throw TooShortError("cumulant estimation needs at least 2 return rows, got " +
                            std::to_string(panel.rows()));
    }
    Vector y = panel.returns() * a;
    y.array() -= y.mean();
    double m[kMaxOrder + 1] = {};
    for (int k = 2; k <= order; ++k) m[k] = y.array().pow(k).mean();
    switch (order) {
        case 2: return m[2];
        case 3: return m[3];
        case 4: return m[4] - 3.0 * m[2] * m[2];
        case 5: return m[5] - 10.0 * m[3] * m[2];
        default:
            return m[6] - 15.0 * m[4] * m[2] - 10.0 * m[3] * m[3] +
                   30.0 * m[2] * m[2] * m[2];
    }
}

Matrix normalized_cumulant_profile(const CumulantFamily& family, const Matrix& v) {
    if (v.rows() != family.dim) {
        throw DimMismatchError("portfolio matrix has " + std::to_string(v.rows()) +
                               " rows but family dimension is " + std::to_string(family.dim));
    }
    Matrix table(family.n_max - 1, v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const Vector col = v.col(j);
        const double k2 = contract_all_modes(family.order(2), col);
        if (k2 <= 0.0) {
            throw ZeroVarianceError("portfolio " + std::to_string(j + 1) +
                                    " has zero variance; cannot standardize higher orders");
        }
        table(0, j) = k2;
        for (int n = 3; n <= family.n_max; ++n) {
            const double kn = contract_all_modes(family.order(n), col);
            table(n - 2, j) = kn / std::pow(k2, 0.5 * n);
        }
    }
    return table;
}

void write_tensor_csv(const std::string& path, const SymmetricTensor& tensor) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << "order,i1,i2,i3,i4,i5,i6,value\n";
    const int n = tensor.order();
    const auto& tuples = tensor.distinct_indices();
    for (std::size_t r = 0; r < tuples.size(); ++r) {
        out << n;
        for (int k = 0; k < kMaxOrder; ++k) {
            out << ',';
            if (k < n) out << (tuples[r][k] + 1);
        }
        out << ',' << csv::format_double(tensor.values()[r]) << '\n';
    }
    if (!out) {
        throw Error("failed while writing " + path);
    }
}

SymmetricTensor read_tensor_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || csv::trim(line) != "order,i1,i2,i3,i4,i5,i6,value") {
        throw MalformedRowError("bad tensor header in " + path);
    }
    int order = 0;
    int dim = 0;
    std::vector<std::pair<MultiIndex, double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto fields = csv::split(line, ',');
        if (fields.size() != 8) {
            throw MalformedRowError(where + ": expected 8 fields, got " +
                                    std::to_string(fields.size()));
        }
        const int row_order = static_cast<int>(csv::parse_double(fields[0], where));
        if (order == 0) order = row_order;
        if (row_order != order) {
            throw MalformedRowError(where + ": mixed tensor orders in one file");
        }
        MultiIndex idx{};
        for (int k = 0; k < row_order; ++k) {
            const int i = static_cast<int>(csv::parse_double(fields[1 + k], where)) - 1;
            if (i < 0) {
                throw MalformedRowError(where + ": tensor indices are 1-based");
            }
            idx[k] = i;
            dim = std::max(dim, i + 1);
        }
        rows.emplace_back(idx, csv::parse_double(fields[7], where));
    }
    if (order == 0) {
        throw MalformedRowError("tensor file " + path + " has no data rows");
    }
    SymmetricTensor tensor(order, dim);
    for (const auto& [idx, value] : rows) {
        tensor.set({idx.data(), static_cast<std::size_t>(order)}, value);
    }
    return tensor;
}

}  // namespace cumfolio
