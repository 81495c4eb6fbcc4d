// Small tour of the library: one operator value, one probe series, one table row.
#include <cstdio>

#include "invgauss/analyzer.hpp"

using namespace invgauss;

int main() {
  const Atom a = hemisphere_atom(1);

  const KernelSpec riesz = RieszComponent{1, 1.0};
  const cplx v = apply_operator(riesz, a, Point{2.0});
  std::printf("Riesz (lambda=1) applied to the hemisphere atom at x=2: %.6g\n", v.real());

  const ProbeSeries s = impow_series(a, 1.0, 0.0, log_grid(5.0, 200.0, 10));
  const Verdict verdict = classify(s);
  std::printf("impow probe, lambda=0: %s (exponent %.3f, r2 %.4f)\n", to_string(verdict.cls), verdict.model.exponent,
              verdict.fit_r2);

  for (const TableCell& c : boundedness_table({0.0, 1.0}, {1.0})) {
    std::printf("%-16s %-3s lambda=%-4g %-13s reference %s\n", to_string(c.op), to_string(c.space), c.lambda,
                to_string(c.computed), to_string(c.reference));
  }
  return 0;
}
