#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invgauss/atoms.hpp"
#include "invgauss/classify.hpp"
#include "invgauss/diagnostics.hpp"
#include "invgauss/errors.hpp"
#include "invgauss/parallel.hpp"
#include "invgauss/probes.hpp"

namespace invgauss {

enum class TableOperator { ImaginaryPower, Riesz };
enum class TableSpace { H1, X1 };
enum class Entry { Bounded, Unbounded, Inconclusive };

inline const char* to_string(TableOperator o) { return o == TableOperator::ImaginaryPower ? "imaginary_power" : "riesz"; }
inline const char* to_string(TableSpace s) { return s == TableSpace::H1 ? "H1" : "X1"; }
inline const char* to_string(Entry e) {
  switch (e) {
    case Entry::Bounded: return "Bounded";
    case Entry::Unbounded: return "Unbounded";
    default: return "Inconclusive";
  }
}

struct TableCell {
  TableOperator op = TableOperator::ImaginaryPower;
  TableSpace space = TableSpace::H1;
  double lambda = 0.0;
  std::optional<double> mu;  // X1 cells only
  Entry computed = Entry::Inconclusive;
  Entry reference = Entry::Inconclusive;
  std::string witness;
  Verdict verdict;
  std::string diagnostic;  // "none" when the probe alone decided
  double diagnostic_value = 0.0;
  std::string note;

  bool mismatch() const { return computed != Entry::Inconclusive && computed != reference; }
};

struct TableOptions {
  std::size_t n = 1;
  double rho_lo = 5.0, rho_hi = 200.0;
  int rho_count = 12;
  double u = 1.0;
  int component = 1;
  double threshold_band = 0.05;
  ClassifyOptions classify;
  ProbeOptions probe;
  unsigned threads = 0;
};

// Known boundedness pattern from H1 and X1_mu into L1(gamma_{-1}).
inline Entry reference_entry(TableOperator op, TableSpace sp, double lambda, std::optional<double> mu, std::size_t n) {
  const bool b = [&] {
    if (op == TableOperator::ImaginaryPower) {
      if (sp == TableSpace::H1) return lambda > 0.0;
      return lambda > 0.0 || *mu == 0.0;
    }
    if (sp == TableSpace::H1) return n == 1 && lambda > 1.0;
    if (lambda < 1.0) return false;
    if (lambda == 1.0) return *mu == 1.0;
    return true;
  }();
  return b ? Entry::Bounded : Entry::Unbounded;
}

// Parameters near, but not at, a threshold are not resolved by the grid.
inline bool near_threshold(TableOperator op, TableSpace sp, double lambda, std::optional<double> mu, double band) {
  auto near = [band](double v, double t) { return v != t && std::abs(v - t) < band; };
  if (op == TableOperator::ImaginaryPower) return near(lambda, 0.0) || (sp == TableSpace::X1 && lambda == 0.0 && near(*mu, 0.0));
  return near(lambda, 1.0) || (sp == TableSpace::X1 && lambda == 1.0 && near(*mu, 1.0));
}

namespace detail {
struct DiagnosticKey {
  std::string kind;  // hormander_impow, hormander_riesz, lemma4b, takeda, cube
  double lambda;
  bool operator<(const DiagnosticKey& o) const { return kind != o.kind ? kind < o.kind : lambda < o.lambda; }
};
struct DiagnosticValue {
  double value = 0.0;
  bool ok = false;
  std::string note;
};

// Divergence of the cube-atom norms over A_Q: ok means Divergent.
inline DiagnosticValue cube_divergence(double lambda, std::size_t n, int component) {
  const auto xi = log_grid(20.0, 200.0, 8);
  ProbeSeries s;
  s.scale = xi;
  s.kind = SeriesKind::Cumulative;
  for (double x : xi) s.value.push_back(truncated_l1(RieszComponent{component, lambda}, cube_atom(x, n), AQRegion{x}));
  const Verdict v = classify(s);
  const LogFit f = fit_log(xi, s.value);
  return {f.slope, v.cls == VerdictClass::Divergent && !v.inconclusive, "cube series " + std::string(to_string(v.cls))};
}

inline DiagnosticValue run_diagnostic(const DiagnosticKey& k, const TableOptions& opt) {
  if (k.kind == "hormander_impow" || k.kind == "hormander_riesz") {
    const KernelSpec spec = k.kind == "hormander_impow" ? KernelSpec{ImaginaryPower{opt.u, k.lambda}} : KernelSpec{RieszComponent{1, k.lambda}};
    const FamilyStability s = hormander_stability(spec, opt.n);
    return {s.base, s.stable, "extended " + std::to_string(s.extended) + ", halved " + std::to_string(s.halved)};
  }
  if (k.kind == "lemma4b") {
    const FamilyStability s = lemma4b_stability(k.lambda);
    return {s.base, s.stable, "extended " + std::to_string(s.extended) + ", halved " + std::to_string(s.halved)};
  }
  if (k.kind == "takeda") {
    double worst = 0.0;
    bool ok = true;
    for (double c : {0.0, 2.0}) {
      const auto r = takeda_check(Ball{{c}, std::min(1.0, c > 0.0 ? 1.0 / c : 1.0)});
      worst = std::max(worst, r.max_ratio);
      ok = ok && r.success && r.monotone;
    }
    return {worst, ok, "balls at 0 and 2"};
  }
  return cube_divergence(k.lambda, opt.n, opt.component);
}
}  // namespace detail

// Empirical boundedness table.  Unbounded entries come from divergent probe series of
// the witness atoms; Bounded entries are surrogates: a convergent probe series plus a
// stable local diagnostic.  Anything else is reported as Inconclusive.
inline std::vector<TableCell> boundedness_table(const std::vector<double>& lambdas, const std::vector<double>& mus, const TableOptions& opt = {}) {
  for (double v : lambdas)
    if (!(v >= 0.0 && v <= 2.5)) throw DomainError("boundedness_table: lambda grid must lie in [0, 2.5]");
  for (double v : mus)
    if (!(v >= 0.0 && v <= 2.5)) throw DomainError("boundedness_table: mu grid must lie in [0, 2.5]");
  const std::size_t n = opt.n;
  if (n < 1) throw DomainError("boundedness_table: n must be at least 1");

  // Witness atoms: the hemisphere atom and generated atoms a_mu on the unit ball.
  Point sigma0(n, 0.0);
  sigma0[n - 1] = 1.0;
  const BumpFunction bump = default_bump(Ball{Point(n, 0.0), 1.0}, sigma0);
  const Atom hemi = hemisphere_atom(n);
  std::map<double, Atom> generated;
  auto gen = [&](double m) -> const Atom& {
    auto it = generated.find(m);
    if (it == generated.end()) it = generated.emplace(m, generated_atom(bump, m)).first;
    return it->second;
  };

  std::vector<TableCell> cells;
  for (auto op : {TableOperator::ImaginaryPower, TableOperator::Riesz}) {
    for (double l : lambdas) {
      TableCell c;
      c.op = op;
      c.space = TableSpace::H1;
      c.lambda = l;
      c.witness = "hemisphere";
      cells.push_back(c);
    }
    for (double l : lambdas)
      for (double m : mus) {
        TableCell c;
        c.op = op;
        c.space = TableSpace::X1;
        c.lambda = l;
        c.mu = m;
        char buf[48];
        std::snprintf(buf, sizeof buf, "generated a_%g", m);
        c.witness = buf;
        cells.push_back(c);
      }
  }
  std::vector<const Atom*> atoms;
  for (const auto& c : cells) atoms.push_back(c.space == TableSpace::H1 ? &hemi : &gen(*c.mu));

  const auto rhos = log_grid(opt.rho_lo, opt.rho_hi, opt.rho_count);
  const auto verdicts = parallel_map<Verdict>(cells.size(), [&](std::size_t i) {
    const auto& c = cells[i];
    const ProbeSeries s = c.op == TableOperator::ImaginaryPower ? impow_series(*atoms[i], opt.u, c.lambda, rhos, opt.probe)
                                                                : riesz_series(*atoms[i], c.lambda, opt.component, rhos, opt.probe);
    return classify(s, opt.classify);
  }, opt.threads);

  // Diagnostics needed by the cells whose probe series converged (or, for Riesz on H1
  // with n >= 2, by every cell: the cube-atom series decides there).
  std::vector<std::optional<detail::DiagnosticKey>> need(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const Verdict& v = verdicts[i];
    if (c.op == TableOperator::Riesz && c.space == TableSpace::H1 && n >= 2) {
      need[i] = detail::DiagnosticKey{"cube", c.lambda};
      continue;
    }
    if (v.cls == VerdictClass::Divergent) continue;
    if (c.op == TableOperator::ImaginaryPower) {
      if (c.lambda > 0.0) need[i] = detail::DiagnosticKey{"hormander_impow", c.lambda};
      else if (c.space == TableSpace::X1 && n == 1) need[i] = detail::DiagnosticKey{"takeda", 0.0};
    } else if (n == 1) {
      if (c.lambda > 1.0) need[i] = detail::DiagnosticKey{"hormander_riesz", c.lambda};
      else if (c.space == TableSpace::X1 && c.lambda == 1.0) need[i] = detail::DiagnosticKey{"lemma4b", c.lambda};
    }
  }
  std::vector<detail::DiagnosticKey> keys;
  for (const auto& k : need)
    if (k && std::find_if(keys.begin(), keys.end(), [&](const auto& o) { return !(o < *k) && !(*k < o); }) == keys.end()) keys.push_back(*k);
  std::sort(keys.begin(), keys.end());
  const auto values = parallel_map<detail::DiagnosticValue>(keys.size(), [&](std::size_t i) { return detail::run_diagnostic(keys[i], opt); }, opt.threads);
  auto lookup = [&](const detail::DiagnosticKey& k) -> const detail::DiagnosticValue& {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (!(keys[i] < k) && !(k < keys[i])) return values[i];
    throw DomainError("boundedness_table: missing diagnostic");
  };

  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& c = cells[i];
    c.verdict = verdicts[i];
    c.reference = reference_entry(c.op, c.space, c.lambda, c.mu, n);
    c.diagnostic = "none";
    if (c.verdict.inconclusive) {
      c.computed = Entry::Inconclusive;
      c.note = "probe fit below r2 threshold";
    } else if (need[i] && need[i]->kind == "cube") {
      const auto& d = lookup(*need[i]);
      c.diagnostic = "cube";
      c.diagnostic_value = d.value;
      if (c.verdict.cls == VerdictClass::Divergent || d.ok) {
        c.computed = Entry::Unbounded;
        c.note = c.verdict.cls == VerdictClass::Divergent ? "divergent probe series" : d.note;
      } else {
        c.computed = Entry::Inconclusive;
        c.note = "no boundedness diagnostic for n >= 2";
      }
    } else if (c.verdict.cls == VerdictClass::Divergent) {
      c.computed = Entry::Unbounded;
      c.note = "divergent probe series";
    } else if (!need[i]) {
      c.computed = Entry::Inconclusive;
      c.note = "convergent probe series, no diagnostic available";
    } else {
      const auto& d = lookup(*need[i]);
      c.diagnostic = need[i]->kind;
      c.diagnostic_value = d.value;
      c.computed = d.ok ? Entry::Bounded : Entry::Inconclusive;
      c.note = d.ok ? "empirical surrogate: convergent probe series, stable diagnostic" : "diagnostic not stable";
    }
    if (near_threshold(c.op, c.space, c.lambda, c.mu, opt.threshold_band)) {
      c.computed = Entry::Inconclusive;
      c.note = "within the threshold band";
    }
  }
  return cells;
}

}  // namespace invgauss
