#include "prefchoice/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace prefchoice {

const char* RegimeName(Regime regime) {
  switch (regime) {
    case Regime::kSubcritical: return "subcritical";
    case Regime::kCritical: return "critical";
    case Regime::kSupercritical: return "supercritical";
  }
  return "unknown";
}

namespace {

double Slope(double x, const ModelParams& p) {
  double w = p.total_weight_rate();
  auto m = static_cast<double>(p.m);
  auto k = static_cast<double>(p.k);
  auto d = static_cast<double>(p.d);
  return m / w + k * d / w * std::pow(1.0 - x / w, d - 1.0);
}

double FUnchecked(double x, const ModelParams& p) {
  double w = p.total_weight_rate();
  return static_cast<double>(p.m) / w * x +
         static_cast<double>(p.k) *
             (1.0 - std::pow(1.0 - x / w, static_cast<double>(p.d)));
}

// rho = 1  <=>  beta = (d-2)k - m, an integer; compare beta against it
// rather than rho against 1.
Regime RegimeOf(const ModelParams& p) {
  double boundary = static_cast<double>((p.d - 2) * p.k - p.m);
  double delta = p.beta - boundary;
  if (std::abs(delta) <= kCriticalTolerance) return Regime::kCritical;
  return delta < 0.0 ? Regime::kSupercritical : Regime::kSubcritical;
}

void RequireSupercritical(const ModelParams& p) {
  if (RegimeOf(p) != Regime::kSupercritical) {
    throw Error(ErrorCode::kNotSupercritical,
                "f(x) = x has no positive root unless (m+dk)/(2m+2k+beta) > 1");
  }
}

}  // namespace

double FEval(double x, const ModelParams& params) {
  double w = params.total_weight_rate();
  if (!(x >= 0.0 && x <= w)) {
    throw Error(ErrorCode::kDomainError,
                "f is defined on [0, 2m+2k+beta] = [0, " + std::to_string(w) +
                    "]");
  }
  return FUnchecked(x, params);
}

TheorySummary ClassifyRegime(const ModelParams& params) {
  TheorySummary s;
  double w = params.total_weight_rate();
  s.rho = static_cast<double>(params.m + params.d * params.k) / w;
  s.regime = RegimeOf(params);

  auto nt = static_cast<std::size_t>(params.num_types);
  switch (s.regime) {
    case Regime::kSubcritical:
      s.subcritical_exponent = s.rho;
      break;
    case Regime::kCritical: {
      std::vector<double> c(nt);
      for (std::size_t i = 0; i < nt; ++i) c[i] = CriticalConstant(params, i);
      s.critical_constant_by_type = std::move(c);
      break;
    }
    case Regime::kSupercritical: {
      double x = SolveFixedPoint(params);
      s.x_star = x;
      std::vector<double> frac(nt);
      for (std::size_t i = 0; i < nt; ++i) frac[i] = params.type_probs[i] * x;
      s.condensate_fraction_by_type = std::move(frac);
      break;
    }
  }
  return s;
}

double SolveFixedPoint(const ModelParams& params) {
  RequireSupercritical(params);
  double w = params.total_weight_rate();
  auto h = [&](double x) { return FUnchecked(x, params) - x; };

  double hi = w;
  if (!(h(hi) < 0.0)) {
    throw Error(ErrorCode::kDomainError, "expected f(W) < W");
  }
  double lo = w / 2.0;
  while (!(h(lo) > 0.0)) {
    hi = lo;
    lo /= 2.0;
    if (lo < 1e-300) {
      throw Error(ErrorCode::kDomainError, "no sign change found near zero");
    }
  }
  for (int it = 0; it < 2000; ++it) {
    double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    if (h(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
  for (int it = 0; it < 4; ++it) {
    double step = h(x) / (Slope(x, params) - 1.0);
    double polished = x - step;
    if (!(polished >= lo && polished <= hi)) break;
    if (std::abs(h(polished)) >= std::abs(h(x))) break;
    x = polished;
  }
  return x;
}

double SolveFixedPointNewton(const ModelParams& params) {
  RequireSupercritical(params);
  double x = params.total_weight_rate();
  for (int it = 0; it < 500; ++it) {
    double next = x - (FUnchecked(x, params) - x) / (Slope(x, params) - 1.0);
    if (!(next < x)) break;
    x = next;
  }
  return x;
}

double CriticalConstant(const ModelParams& params, std::size_t type_index) {
  if (RegimeOf(params) != Regime::kCritical) {
    throw Error(ErrorCode::kNotCritical,
                "the n / ln n constant exists only when (m+dk) = 2m+2k+beta");
  }
  if (type_index >= params.type_probs.size()) {
    throw Error(ErrorCode::kDomainError, "type index out of range");
  }
  double w = params.total_weight_rate();
  auto k = static_cast<double>(params.k);
  auto d = static_cast<double>(params.d);
  return 2.0 * params.type_probs[type_index] * w * w / (k * d * (d - 1.0));
}

double MeanFieldDrift(double x, std::size_t type_index,
                      const ModelParams& params) {
  if (type_index >= params.type_probs.size()) {
    throw Error(ErrorCode::kDomainError, "type index out of range");
  }
  double p = params.type_probs[type_index];
  double w = params.total_weight_rate();
  if (!(x >= 0.0 && x <= p * w)) {
    throw Error(ErrorCode::kDomainError,
                "mean-field drift is defined on [0, p_i (2m+2k+beta)]");
  }
  return static_cast<double>(params.m) / w * x +
         p * static_cast<double>(params.k) *
             (1.0 - std::pow(1.0 - x / (p * w), static_cast<double>(params.d)));
}

std::vector<MeanFieldPoint> MeanFieldTrajectory(const ModelParams& params,
                                                std::size_t type_index,
                                                std::int64_t n0, double y0,
                                                std::int64_t n_max,
                                                std::int64_t stride) {
  if (n0 < 1 || !(y0 >= 0.0) || n_max < n0 || stride < 1) {
    throw Error(ErrorCode::kDomainError,
                "mean-field trajectory needs n0 >= 1, y0 >= 0, n_max >= n0");
  }
  if (type_index >= params.type_probs.size()) {
    throw Error(ErrorCode::kDomainError, "type index out of range");
  }
  double cap = params.type_probs[type_index] * params.total_weight_rate();
  std::vector<MeanFieldPoint> out;
  out.push_back({n0, y0});
  double y = y0;
  for (std::int64_t n = n0; n < n_max; ++n) {
    double x = std::min(y / static_cast<double>(n), cap);
    y += MeanFieldDrift(x, type_index, params);
    if ((n + 1 - n0) % stride == 0 || n + 1 == n_max) out.push_back({n + 1, y});
  }
  return out;
}

}  // namespace prefchoice
