#pragma once

// Umbrella header for the analysis layer: probes, classification, diagnostics,
// lemma suites and the boundedness table.

#include <cmath>
#include <string>
#include <vector>

#include "invgauss/classify.hpp"
#include "invgauss/diagnostics.hpp"
#include "invgauss/probes.hpp"
#include "invgauss/suites.hpp"
#include "invgauss/table.hpp"

namespace invgauss {

enum class ProbeKind { Impow, Riesz };
enum class Compensation { Leading, Second };

struct AsymptoticRow {
  double rho = 0.0;
  double probe = 0.0;
  double compensated = 0.0;
  bool failed = false;  // quadrature did not converge; the row is kept
  std::string error;
};

// Factor that makes the probe tend to a constant:
//   impow          rho^{1+lambda} log rho^2
//   riesz leading  rho^lambda (log rho)^{1/2}
//   riesz second   rho^lambda (log rho)^{3/2}
inline double compensation_factor(ProbeKind k, Compensation c, double rho, double lambda) {
  if (k == ProbeKind::Impow) return std::pow(rho, 1.0 + lambda) * std::log(rho * rho);
  return std::pow(rho, lambda) * std::pow(std::log(rho), c == Compensation::Leading ? 0.5 : 1.5);
}

struct AsymptoticsOptions {
  double u = 1.0;
  int component = 1;
  ProbeOptions probe;
  unsigned threads = 0;
};

inline std::vector<AsymptoticRow> asymptotics(ProbeKind k, Compensation c, const Atom& a, double lambda, const std::vector<double>& rhos,
                                              const AsymptoticsOptions& opt = {}) {
  if (rhos.empty()) throw DomainError("asymptotics: empty rho range");
  return parallel_map<AsymptoticRow>(rhos.size(), [&](std::size_t i) {
    AsymptoticRow r;
    r.rho = rhos[i];
    try {
      r.probe = k == ProbeKind::Impow ? impow_probe(r.rho, a, opt.u, lambda, opt.probe) : riesz_probe(r.rho, lambda, opt.component, a, opt.probe);
      r.compensated = r.probe * compensation_factor(k, c, r.rho, lambda);
    } catch (const NonConvergence& e) {
      r.failed = true;
      r.error = e.what();
      r.probe = r.compensated = std::nan("");
    }
    return r;
  }, opt.threads);
}

// max |v_i / v_ref - 1| over rows with rho in [lo, hi]; v_ref is the value at the largest rho.
inline double relative_drift(const std::vector<AsymptoticRow>& rows, double lo, double hi) {
  double ref = std::nan(""), top = -1.0;
  for (const auto& r : rows)
    if (r.rho >= lo && r.rho <= hi && r.rho > top) {
      top = r.rho;
      ref = r.compensated;
    }
  double d = 0.0;
  for (const auto& r : rows)
    if (r.rho >= lo && r.rho <= hi) d = std::max(d, std::abs(r.compensated / ref - 1.0));
  return d;
}

}  // namespace invgauss
