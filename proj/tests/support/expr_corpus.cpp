#include "expr_corpus.hpp"

#include <algorithm>
#include <cmath>

#include "metallab/errors.hpp"
#include "metallab/rng.hpp"

namespace metallab::testing {

namespace {

class Generator {
public:
  explicit Generator(std::uint64_t seed) : rng_(SampleRng::stream(seed, 0xC0C0)) {}

  std::string build(int depth) {
    if (depth == 0 || pick(5) == 0) return leaf();
    const std::string a = build(depth - 1);
    switch (pick(14)) {
      case 0: return "(" + a + " + " + build(depth - 1) + ")";
      case 1: return "(" + a + " - " + build(depth - 1) + ")";
      case 2: return "(" + a + ")*(" + build(depth - 1) + ")";
      case 3: return "(" + a + ")/(1.5 + cos(" + build(depth - 1) + "))";
      case 4: return "-(" + a + ")";
      case 5: return "sin(" + a + ")";
      case 6: return "cos(" + a + ")";
      case 7: return "tan(0.6*sin(" + a + "))";
      case 8: return "exp(sin(" + a + "))";
      case 9: return "log(1 + (" + a + ")^2)";
      case 10: return "sqrt(2 + sin(" + a + "))";
      case 11: return "abs(2.5 + cos(" + a + "))";
      case 12: return "(" + a + ")^" + std::to_string(2 + pick(2));
      default: return "(1.5 + sin(" + a + "))^" + (pick(2) ? "1.5" : "-0.5");
    }
  }

  Vec point() { return rng_.uniform_vector(kCorpusVars.size(), -1.5, 1.5); }

private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_.uniform() * static_cast<double>(n)); }

  std::string leaf() {
    switch (pick(4)) {
      case 0: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", rng_.uniform(0.1, 2.0));
        return buf;
      }
      case 1: return "pi";
      default: return kCorpusVars[pick(kCorpusVars.size())];
    }
  }

  SampleRng rng_;
};

double value_at(const Expr& e, const Point& p, std::size_t i, double shift) {
  Point q = p;
  q.values[i] += shift;
  return eval_jet2(e, q).value();
}

}  // namespace

std::vector<CorpusCase> expression_corpus(std::size_t count, std::uint64_t seed) {
  Generator gen(seed);
  std::vector<CorpusCase> out;
  while (out.size() < count) {
    const std::string src = gen.build(4);
    CorpusCase c{src, parse(src, kCorpusVars), Point{kCorpusVars, gen.point()}};
    try {
      const Jet2 j = eval_jet2(c.expr, c.point);
      const auto big = [](double x) { return !std::isfinite(x) || std::fabs(x) > 1e4; };
      if (big(j.value()) || std::any_of(j.gradient().begin(), j.gradient().end(), big) ||
          std::any_of(j.hessian().begin(), j.hessian().end(), big))
        continue;
    } catch (const DomainError&) {
      continue;
    }
    out.push_back(std::move(c));
  }
  return out;
}

FdComparison compare_with_fd(const CorpusCase& c, double h) {
  const Jet2 jet = eval_jet2(c.expr, c.point);
  const std::size_t n = jet.size();
  FdComparison cmp;
  for (std::size_t i = 0; i < n; ++i) {
    const double fd = (value_at(c.expr, c.point, i, h) - value_at(c.expr, c.point, i, -h)) / (2 * h);
    cmp.grad_error = std::max(cmp.grad_error, std::fabs(fd - jet.grad(i)) / std::max(1.0, std::fabs(jet.grad(i))));
    Point lo = c.point, hi = c.point;
    lo.values[i] -= h;
    hi.values[i] += h;
    const Jet2 jlo = eval_jet2(c.expr, lo), jhi = eval_jet2(c.expr, hi);
    for (std::size_t j = 0; j < n; ++j) {
      const double fdh = (jhi.grad(j) - jlo.grad(j)) / (2 * h);
      cmp.hess_error =
          std::max(cmp.hess_error, std::fabs(fdh - jet.hess(i, j)) / std::max(1.0, std::fabs(jet.hess(i, j))));
    }
  }
  return cmp;
}

}  // namespace metallab::testing
