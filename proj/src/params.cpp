#include "prefchoice/params.hpp"

#include <cmath>
#include <string>

namespace prefchoice {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::kBadSampleSize: return "BadSampleSize";
    case ErrorCode::kBadProbs: return "BadProbs";
    case ErrorCode::kBadCounts: return "BadCounts";
    case ErrorCode::kBadSelfLoops: return "BadSelfLoops";
    case ErrorCode::kDuplicateVertex: return "DuplicateVertex";
    case ErrorCode::kNonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::kUnknownVertex: return "UnknownVertex";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kNoCandidate: return "NoCandidate";
    case ErrorCode::kTooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNotSupercritical: return "NotSupercritical";
    case ErrorCode::kNotCritical: return "NotCritical";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

const char* EdgeStepWeightingName(EdgeStepWeighting weighting) {
  return weighting == EdgeStepWeighting::kPreVertex ? "pre" : "post";
}

void Validate(const ModelParams& p) {
  if (!(p.beta > -1.0) || !std::isfinite(p.beta)) {
    throw Error(ErrorCode::kBetaOutOfRange,
                "beta must satisfy beta > -1 (got " + std::to_string(p.beta) +
                    ")");
  }
  if (p.d < 2) {
    throw Error(ErrorCode::kBadSampleSize,
                "sample size d must be at least 2 (got " +
                    std::to_string(p.d) + ")");
  }
  if (p.m < 1 || p.k < 1 || p.num_types < 1) {
    throw Error(ErrorCode::kBadCounts, "m, k and T must all be at least 1");
  }
  if (static_cast<std::int64_t>(p.type_probs.size()) != p.num_types) {
    throw Error(ErrorCode::kBadProbs,
                "expected " + std::to_string(p.num_types) +
                    " type probabilities, got " +
                    std::to_string(p.type_probs.size()));
  }
  double sum = 0.0;
  for (double q : p.type_probs) {
    bool ok = p.num_types == 1 ? q == 1.0 : (q > 0.0 && q < 1.0);
    if (!ok) {
      throw Error(ErrorCode::kBadProbs,
                  "type probabilities must lie in (0,1) (exactly 1 when T=1)");
    }
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::kBadProbs, "type probabilities must sum to 1");
  }
  if (p.initial_self_loops < 0) {
    throw Error(ErrorCode::kBadSelfLoops,
                "initial self-loop count must be nonnegative");
  }
  // Every vertex weight must stay positive; v1 starts at 2*loops + beta.
  if (static_cast<double>(2 * p.initial_self_loops) + p.beta <= 0.0) {
    throw Error(ErrorCode::kBadSelfLoops,
                "initial self-loops = 0 requires beta > 0 (v1 weight must be "
                "positive)");
  }
}

ModelParams NewParams(std::int64_t m, std::int64_t k, std::int64_t d,
                      std::int64_t num_types, double beta,
                      std::vector<double> type_probs,
                      const ParamOptions& options) {
  ModelParams p;
  p.m = m;
  p.k = k;
  p.d = d;
  p.num_types = num_types;
  p.beta = beta;
  p.type_probs = std::move(type_probs);
  p.initial_self_loops = options.initial_self_loops.value_or(m);
  p.edge_step_weighting = options.edge_step_weighting;
  Validate(p);
  return p;
}

}  // namespace prefchoice
