#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metallab/expr.hpp"

namespace metallab::testing {

struct CorpusCase {
  std::string source;
  Expr expr;
  Point point;
};

inline const std::vector<std::string> kCorpusVars = {"u", "v", "w"};

/// Random well-defined expressions over u, v, w with points in [-1.5, 1.5]^3.
/// Every case evaluates without a domain error and stays moderately sized.
std::vector<CorpusCase> expression_corpus(std::size_t count, std::uint64_t seed);

struct FdComparison {
  double grad_error = 0.0;  // max |fd - jet| / max(1, |jet|)
  double hess_error = 0.0;
};

/// Central differences with step h: the gradient from values, the Hessian
/// from differences of the exact gradient.
FdComparison compare_with_fd(const CorpusCase& c, double h = 1e-5);

}  // namespace metallab::testing
