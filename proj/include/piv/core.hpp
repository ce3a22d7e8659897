#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace piv {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Coefficients smaller than this are dropped after every polynomial operation.
inline constexpr double kPruneThreshold = 1e-14;

struct SingularGaugeError : std::runtime_error {
    explicit SingularGaugeError(const std::string& what) : std::runtime_error(what) {}
};

struct PoleError : std::runtime_error {
    explicit PoleError(const std::string& what) : std::runtime_error(what) {}
};

struct ChartError : std::runtime_error {
    explicit ChartError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace piv
