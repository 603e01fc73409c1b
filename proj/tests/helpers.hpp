#ifndef CUMFOLIO_TESTS_HELPERS_HPP
#define CUMFOLIO_TESTS_HELPERS_HPP

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cumfolio/panel.hpp"
#include "cumfolio/rng.hpp"

namespace testhelp {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    char buf[64];
    std::snprintf(buf, sizeof(buf), "cumfolio_test_%d_%d", static_cast<int>(::getpid()),
                  counter.fetch_add(1));
    path_ = std::filesystem::temp_directory_path() / buf;
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// `count` strictly increasing ISO-shaped labels (calendar validity is not
/// required anywhere; dates are opaque ordered strings).
inline std::vector<std::string> iso_dates(Eigen::Index count) {
  std::vector<std::string> dates;
  dates.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    const int day = static_cast<int>(i % 28) + 1;
    const int month = static_cast<int>((i / 28) % 12) + 1;
    const int year = 2000 + static_cast<int>(i / (28 * 12));
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    dates.emplace_back(buf);
  }
  return dates;
}

inline std::vector<std::string> index_dates(Eigen::Index count, const std::string& prefix = "d") {
  std::vector<std::string> dates;
  dates.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    std::string num = std::to_string(i);
    dates.push_back(prefix + std::string(6 - num.size(), '0') + num);
  }
  return dates;
}

inline std::vector<std::string> index_tickers(Eigen::Index count) {
  std::vector<std::string> tickers;
  tickers.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) tickers.push_back("T" + std::to_string(i));
  return tickers;
}

inline cumfolio::ReturnPanel return_panel(const Eigen::MatrixXd& returns) {
  return cumfolio::ReturnPanel(index_dates(returns.rows()), index_tickers(returns.cols()),
                               returns);
}

inline cumfolio::PricePanel price_panel(const Eigen::MatrixXd& prices) {
  return cumfolio::PricePanel(index_dates(prices.rows()), index_tickers(prices.cols()), prices);
}

inline Eigen::MatrixXd normal_matrix(cumfolio::Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

/// Random orthogonal matrix from the QR factorization of a Gaussian draw.
inline Eigen::MatrixXd random_orthogonal(cumfolio::Rng& rng, Eigen::Index m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal_matrix(rng, m, m));
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace testhelp

#endif  // CUMFOLIO_TESTS_HELPERS_HPP
