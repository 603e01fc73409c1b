#ifndef CUMFOLIO_ERRORS_HPP
#define CUMFOLIO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cumfolio {

/// Base class for all cumfolio errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// data ingestion
class MissingTickerError : public Error { public: using Error::Error; };
class NonPositivePriceError : public Error { public: using Error::Error; };
class MalformedRowError : public Error { public: using Error::Error; };
class TooShortError : public Error { public: using Error::Error; };
class OutOfRangeError : public Error { public: using Error::Error; };

// tensors and factorization
class UnsupportedOrderError : public Error { public: using Error::Error; };
class DimMismatchError : public Error { public: using Error::Error; };
class RowMismatchError : public Error { public: using Error::Error; };
class NotFiniteError : public Error { public: using Error::Error; };
class ZeroVarianceError : public Error { public: using Error::Error; };

// hurst / dfa
class BoxTooLargeError : public Error { public: using Error::Error; };

// backtesting
class DegenerateDenominatorError : public Error { public: using Error::Error; };
class WindowTooShortError : public Error { public: using Error::Error; };
class InsufficientHistoryError : public Error { public: using Error::Error; };

}  // namespace cumfolio

#endif  // CUMFOLIO_ERRORS_HPP
