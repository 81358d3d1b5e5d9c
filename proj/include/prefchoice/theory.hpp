#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prefchoice/params.hpp"

namespace prefchoice {

enum class Regime { kSubcritical, kCritical, kSupercritical };

const char* RegimeName(Regime regime);

// Asymptotic predictions for the maximum degree of each type.
struct TheorySummary {
  double rho = 0.0;  // (m + d k) / (2m + 2k + beta)
  Regime regime = Regime::kSubcritical;
  std::optional<double> x_star;                                    // supercritical
  std::optional<std::vector<double>> condensate_fraction_by_type;  // p_i x*
  std::optional<std::vector<double>> critical_constant_by_type;    // critical
  std::optional<double> subcritical_exponent;                      // = rho
};

// Tolerance on beta - ((d-2)k - m) below which the regime is critical. Exact
// for integer-valued and dyadic beta.
inline constexpr double kCriticalTolerance = 1e-12;

// f(x) = m x / W + k (1 - (1 - x / W)^d) with W = 2m + 2k + beta.
// kDomainError outside [0, W].
double FEval(double x, const ModelParams& params);

TheorySummary ClassifyRegime(const ModelParams& params);

// Unique positive root of f(x) = x by bisection, polished with Newton steps
// that are kept only if they stay inside the bracket. kNotSupercritical
// unless rho > 1.
double SolveFixedPoint(const ModelParams& params);
// Pure Newton iteration from the right end of the domain. f is concave and
// f(W) < W, so the iterates decrease monotonically to x*.
double SolveFixedPointNewton(const ModelParams& params);

// 2 p_i W^2 / (k d (d-1)). kNotCritical unless the regime is critical.
double CriticalConstant(const ModelParams& params, std::size_t type_index);

// g_i(x) = p_i f(x / p_i): the drift of the type-i maximum degree.
// kDomainError outside [0, p_i W].
double MeanFieldDrift(double x, std::size_t type_index,
                      const ModelParams& params);

struct MeanFieldPoint {
  std::int64_t n;
  double y;
};

// Iterates y_{n+1} = y_n + g_i(min(y_n / n, p_i W)) from (n0, y0) to n_max.
// Every `stride`-th point is kept; (n0, y0) and (n_max, y_{n_max}) always are.
std::vector<MeanFieldPoint> MeanFieldTrajectory(const ModelParams& params,
                                                std::size_t type_index,
                                                std::int64_t n0, double y0,
                                                std::int64_t n_max,
                                                std::int64_t stride = 1);

}  // namespace prefchoice
