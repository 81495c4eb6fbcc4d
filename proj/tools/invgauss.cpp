#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "invgauss/analyzer.hpp"

using namespace invgauss;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kFailure = 1, kMismatch = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<std::size_t> dim;
  std::uint64_t seed = 42;
  std::optional<double> rel_tol;
  unsigned threads = 0;
  std::string out = "invgauss-out";
  std::string format = "csv";
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ordered_json jnum(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_row(const std::vector<std::string>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + csv_field(f[i]);
  return s + "\n";
}

void write_file(const RunConfig& c, const std::string& name, const std::string& body) {
  fs::create_directories(c.out);
  std::ofstream o(fs::path(c.out) / name, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + (fs::path(c.out) / name).string());
  o << body;
}

void write_json(const RunConfig& c, const std::string& stem, const ordered_json& j) { write_file(c, stem + ".json", j.dump(2) + "\n"); }

ordered_json header(const std::string& command, const RunConfig& c, std::size_t n) {
  ordered_json j;
  j["schema_version"] = "1";
  j["command"] = command;
  j["seed"] = c.seed;
  j["dim"] = n;
  return j;
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> g;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + tok + "'");
    }
    if (pos != tok.size()) throw UsageError("not a number: '" + tok + "'");
    g.push_back(v);
  }
  if (g.empty()) throw UsageError("empty grid: '" + s + "'");
  return g;
}

// ---- verify ----

struct VerifyArgs {
  std::string suite;
  std::size_t samples = 1000;
  bool flip_eta = false;
};

int cmd_verify(const RunConfig& c, const VerifyArgs& a) {
  VerifyOptions o;
  o.seed = c.seed;
  o.n = c.dim.value_or(2);
  o.samples = a.samples;
  o.threads = c.threads;
  o.flip_eta_sign = a.flip_eta;
  const auto& all = verify_suites();
  std::vector<const SuiteEntry*> run;
  for (const auto& e : all)
    if (a.suite.empty() || e.name == a.suite) run.push_back(&e);
  if (run.empty()) {
    std::string names;
    for (const auto& e : all) names += " " + e.name;
    throw UsageError("unknown suite '" + a.suite + "'; available:" + names);
  }
  std::vector<SuiteResult> results;
  for (const auto* e : run) {
    results.push_back(e->run(o));
    const auto& r = results.back();
    std::cout << (r.pass() ? "PASS " : "FAIL ") << r.name << " (" << r.records.size() << " checks)\n";
  }
  if (c.format == "json") {
    ordered_json j = header("verify", c, o.n);
    j["samples"] = o.samples;
    ordered_json recs = ordered_json::array();
    for (const auto& r : results)
      for (const auto& x : r.records)
        recs.push_back({{"suite", x.suite}, {"case", x.case_name}, {"expected_ref", x.expected_ref}, {"observed", jnum(x.observed)},
                        {"tolerance", jnum(x.tolerance)}, {"pass", x.pass}});
    j["records"] = recs;
    write_json(c, "verify", j);
  } else {
    std::string s = csv_row({"suite", "case", "expected_ref", "observed", "tolerance", "pass"});
    for (const auto& r : results)
      for (const auto& x : r.records) s += csv_row({x.suite, x.case_name, x.expected_ref, num(x.observed), num(x.tolerance), x.pass ? "true" : "false"});
    write_file(c, "verify.csv", s);
  }
  for (const auto& r : results)
    if (!r.pass()) {
      std::cout << "first failing suite: " << r.name << "\n";
      for (const auto& x : r.records)
        if (!x.pass) std::cout << "  " << x.case_name << ": observed " << num(x.observed) << ", tolerance " << num(x.tolerance) << "\n";
      return kMismatch;
    }
  return kOk;
}

// ---- table ----

struct TableArgs {
  std::string lambdas = "0,0.5,1,1.5,2";
  std::string mus = "0,0.5,1,1.5,2";
  std::string op = "all";
  std::string space = "all";
};

int cmd_table(const RunConfig& c, const TableArgs& a) {
  TableOptions o;
  o.n = c.dim.value_or(1);
  o.threads = c.threads;
  const auto cells_all = boundedness_table(parse_grid(a.lambdas), parse_grid(a.mus), o);
  std::vector<TableCell> cells;
  for (const auto& cell : cells_all) {
    if (a.op != "all" && a.op != (cell.op == TableOperator::ImaginaryPower ? "impow" : "riesz")) continue;
    if (a.space != "all" && a.space != to_string(cell.space)) continue;
    cells.push_back(cell);
  }
  std::string csv = csv_row({"operator", "space", "lambda", "mu", "witness", "computed", "reference", "match", "exponent", "logpower", "fit_r2",
                             "diagnostic", "diagnostic_value", "note"});
  ordered_json j = header("table", c, o.n);
  j["rho_range"] = {o.rho_lo, o.rho_hi};
  j["rho_count"] = o.rho_count;
  j["bounded_semantics"] = "empirical surrogate: convergent probe series and a stable local diagnostic";
  ordered_json arr = ordered_json::array();
  int mismatches = 0, inconclusive = 0;
  for (const auto& x : cells) {
    const std::string mu = x.mu ? num(*x.mu) : "";
    const std::string match = x.computed == Entry::Inconclusive ? "n/a" : (x.mismatch() ? "false" : "true");
    csv += csv_row({to_string(x.op), to_string(x.space), num(x.lambda), mu, x.witness, to_string(x.computed), to_string(x.reference), match,
                    num(x.verdict.model.exponent), num(x.verdict.model.logpower), num(x.verdict.fit_r2), x.diagnostic, num(x.diagnostic_value), x.note});
    ordered_json e;
    e["operator"] = to_string(x.op);
    e["space"] = to_string(x.space);
    e["lambda"] = x.lambda;
    e["mu"] = x.mu ? ordered_json(*x.mu) : ordered_json(nullptr);
    e["witness"] = x.witness;
    e["computed"] = to_string(x.computed);
    e["reference"] = to_string(x.reference);
    e["match"] = x.computed == Entry::Inconclusive ? ordered_json(nullptr) : ordered_json(!x.mismatch());
    e["verdict"] = {{"class", to_string(x.verdict.cls)}, {"model", to_string(x.verdict.model.kind)}, {"exponent", jnum(x.verdict.model.exponent)},
                    {"logpower", jnum(x.verdict.model.logpower)}, {"fit_r2", jnum(x.verdict.fit_r2)}, {"inconclusive", x.verdict.inconclusive}};
    e["diagnostic"] = x.diagnostic;
    e["diagnostic_value"] = jnum(x.diagnostic_value);
    e["note"] = x.note;
    arr.push_back(e);
    mismatches += x.mismatch();
    inconclusive += x.computed == Entry::Inconclusive;
  }
  j["cells"] = arr;
  j["mismatches"] = mismatches;
  j["inconclusive"] = inconclusive;
  write_file(c, "table.csv", csv);
  write_json(c, "table", j);

  for (const auto& x : cells) {
    std::printf("%-15s %-2s lambda=%-4s mu=%-4s %-12s%s\n", to_string(x.op), to_string(x.space), num(x.lambda).c_str(),
                x.mu ? num(*x.mu).c_str() : "-", to_string(x.computed), x.mismatch() ? ("  expected " + std::string(to_string(x.reference))).c_str() : "");
  }
  std::printf("%zu cells, %d mismatches, %d inconclusive\n", cells.size(), mismatches, inconclusive);
  return mismatches ? kMismatch : kOk;
}

// ---- asymptotics ----

struct AsymptoticsArgs {
  std::string probe = "impow";
  std::string atom = "hemisphere";
  double lambda = 0.0;
  std::optional<double> atom_lambda;
  std::string compensation = "auto";
  double rho_lo = 50.0, rho_hi = 200.0;
  int rho_count = 7;
};

std::string svg_plot(const std::vector<AsymptoticRow>& rows, const std::string& title, const std::string& ylabel) {
  const double W = 640, H = 400, L = 80, R = 20, T = 40, B = 50;
  double xlo = std::log(rows.front().rho), xhi = std::log(rows.back().rho);
  double ylo = INFINITY, yhi = -INFINITY;
  for (const auto& r : rows)
    if (std::isfinite(r.compensated)) {
      ylo = std::min(ylo, r.compensated);
      yhi = std::max(yhi, r.compensated);
    }
  if (!std::isfinite(ylo)) ylo = 0.0, yhi = 1.0;
  const double pad = std::max(0.1 * (yhi - ylo), 0.05 * std::max(std::abs(yhi), 1e-300));
  ylo -= pad;
  yhi += pad;
  if (xhi <= xlo) xhi = xlo + 1.0;
  auto px = [&](double rho) { return L + (std::log(rho) - xlo) / (xhi - xlo) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ylo) / (yhi - ylo) * (H - T - B); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = ylo + (yhi - ylo) * k / 4.0;
    s << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v).substr(0, 8)
      << "</text>\n";
  }
  for (const auto& r : rows)
    s << "<text x=\"" << px(r.rho) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << num(std::round(r.rho * 10.0) / 10.0) << "</text>\n";
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">rho (log scale)</text>\n";
  s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  bool first = true;
  for (const auto& r : rows)
    if (std::isfinite(r.compensated)) {
      s << (first ? "" : " ") << px(r.rho) << "," << py(r.compensated);
      first = false;
    }
  s << "\"/>\n";
  for (const auto& r : rows)
    if (std::isfinite(r.compensated)) s << "<circle cx=\"" << px(r.rho) << "\" cy=\"" << py(r.compensated) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  s << "</svg>\n";
  return s.str();
}

int cmd_asymptotics(const RunConfig& c, const AsymptoticsArgs& a) {
  if (!(a.rho_lo >= 5.0) || !(a.rho_hi > a.rho_lo) || a.rho_count < 2) throw UsageError("empty rho range: need 5 <= rho-lo < rho-hi and rho-count >= 2");
  const std::size_t n = c.dim.value_or(2);
  const ProbeKind kind = a.probe == "impow" ? ProbeKind::Impow : ProbeKind::Riesz;
  Atom atom = hemisphere_atom(n);
  std::string atom_name = "hemisphere";
  if (a.atom == "generated") {
    Point sigma0(n, 0.0);
    sigma0[n - 1] = 1.0;
    const double m = a.atom_lambda.value_or(a.lambda);
    atom = generated_atom(default_bump(Ball{Point(n, 0.0), 1.0}, sigma0), m);
    atom_name = "generated a_" + num(m);
  }
  Compensation comp = Compensation::Leading;
  if (a.compensation == "second" || (a.compensation == "auto" && kind == ProbeKind::Riesz && a.atom == "generated")) comp = Compensation::Second;

  AsymptoticsOptions o;
  o.threads = c.threads;
  const auto rows = asymptotics(kind, comp, atom, a.lambda, log_grid(a.rho_lo, a.rho_hi, a.rho_count), o);
  const std::string factor = kind == ProbeKind::Impow ? "rho^(1+lambda) log(rho^2)"
                                                      : (comp == Compensation::Leading ? "rho^lambda log(rho)^(1/2)" : "rho^lambda log(rho)^(3/2)");
  int failed = 0;
  for (const auto& r : rows) failed += r.failed;
  const double drift = relative_drift(rows, a.rho_lo, a.rho_hi);

  if (c.format == "json") {
    ordered_json j = header("asymptotics", c, n);
    j["probe"] = a.probe;
    j["atom"] = atom_name;
    j["lambda"] = a.lambda;
    j["compensation"] = factor;
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows)
      arr.push_back({{"rho", r.rho}, {"probe", jnum(r.probe)}, {"compensated", jnum(r.compensated)}, {"status", r.failed ? "nonconvergence" : "ok"}});
    j["rows"] = arr;
    j["relative_drift"] = jnum(drift);
    write_json(c, "asymptotics", j);
  } else {
    std::string s = csv_row({"rho", "probe", "compensated", "status"});
    for (const auto& r : rows) s += csv_row({num(r.rho), num(r.probe), num(r.compensated), r.failed ? "nonconvergence" : "ok"});
    write_file(c, "asymptotics.csv", s);
  }
  write_file(c, "asymptotics.svg", svg_plot(rows, a.probe + " probe, " + atom_name + ", lambda=" + num(a.lambda), "probe * " + factor));

  for (const auto& r : rows) std::printf("rho=%-10s probe=%-16s compensated=%s%s\n", num(r.rho).c_str(), num(r.probe).c_str(), num(r.compensated).c_str(), r.failed ? "  NONCONVERGENCE" : "");
  std::printf("relative drift of the compensated column: %s\n", num(drift).c_str());
  return failed ? kFailure : kOk;
}

// ---- scan ----

struct ScanArgs {
  std::string which = "all";
  std::size_t samples = 10000;
  double calib_box = 5.0, valid_box = 10.0;
};

int cmd_scan(const RunConfig& c, const ScanArgs& a) {
  const std::size_t n = c.dim.value_or(2);
  struct Job {
    std::string name;
    KernelSpec num;
  };
  const std::vector<Job> jobs{{"maximal", HeatMaximal{}}, {"klambda1", MajorantKlambda{1.0}}, {"kprime0", MajorantKprime{0.0}}};
  std::string csv = csv_row({"numerator", "denominator", "C", "max_validation_ratio", "success", "samples", "skipped_calibration", "skipped_validation"});
  ordered_json j = header("scan", c, n);
  j["calib_box"] = a.calib_box;
  j["valid_box"] = a.valid_box;
  ordered_json arr = ordered_json::array();
  bool ok = true, any = false;
  for (const auto& job : jobs) {
    if (a.which != "all" && a.which != job.name) continue;
    any = true;
    const ScanResult r = domination_scan(job.num, MajorantKbar{}, a.calib_box, a.valid_box, a.samples, c.seed, n, c.threads);
    ok = ok && r.success;
    csv += csv_row({job.name, "kbar", num(r.C), num(r.max_validation_ratio), r.success ? "true" : "false", std::to_string(r.samples),
                    std::to_string(r.skipped_calibration), std::to_string(r.skipped_validation)});
    arr.push_back({{"numerator", job.name}, {"denominator", "kbar"}, {"C", jnum(r.C)}, {"max_validation_ratio", jnum(r.max_validation_ratio)},
                   {"success", r.success}, {"samples", r.samples}, {"skipped_calibration", r.skipped_calibration},
                   {"skipped_validation", r.skipped_validation}});
    std::printf("%s %-9s C=%-14s validation max=%-14s (skipped %zu/%zu)\n", r.success ? "PASS" : "FAIL", job.name.c_str(), num(r.C).c_str(),
                num(r.max_validation_ratio).c_str(), r.skipped_calibration, r.skipped_validation);
  }
  if (!any) throw UsageError("unknown scan '" + a.which + "'");
  j["scans"] = arr;
  if (c.format == "json")
    write_json(c, "scan", j);
  else
    write_file(c, "scan.csv", csv);
  return ok ? kOk : kMismatch;
}

// ---- weaktype ----

struct WeakTypeArgs {
  std::string which = "all";
  std::string cutoffs = "10,20";
  int grid = 10000;
};

int cmd_weaktype(const RunConfig& c, const WeakTypeArgs& a) {
  if (c.dim.value_or(1) != 1) throw UsageError("weaktype is one-dimensional; use --dim 1");
  const auto cut = parse_grid(a.cutoffs);
  struct Job {
    std::string name;
    KernelSpec spec;
  };
  const std::vector<Job> jobs{{"riesz1", RieszComponent{1, 1.0}}, {"riesz2", RieszComponent{1, 2.0}}, {"impow0", ImaginaryPower{1.0, 0.0}},
                              {"impow1", ImaginaryPower{1.0, 1.0}}};
  WeakTypeOptions o;
  o.grid_points = a.grid;
  o.threads = c.threads;
  if (c.rel_tol) o.quad.rel_tol = *c.rel_tol;
  const StepFunction f = step_function(hemisphere_atom(1));
  std::string csv = csv_row({"operator", "cutoff", "quotient", "alpha", "variation"});
  ordered_json j = header("weaktype", c, 1);
  ordered_json arr = ordered_json::array();
  bool ok = true, any = false;
  for (const auto& job : jobs) {
    if (a.which != "all" && a.which != job.name) continue;
    any = true;
    std::vector<WeakTypeResult> rs;
    for (double R : cut) rs.push_back(weak_type_quotient(job.spec, f, {}, R, o));
    double lo = rs[0].quotient, hi = lo;
    for (const auto& r : rs) {
      lo = std::min(lo, r.quotient);
      hi = std::max(hi, r.quotient);
    }
    const double var = hi / lo - 1.0;
    ok = ok && var <= 0.1;
    ordered_json qs = ordered_json::array();
    for (std::size_t k = 0; k < rs.size(); ++k) {
      csv += csv_row({job.name, num(cut[k]), num(rs[k].quotient), num(rs[k].alpha), num(var)});
      qs.push_back({{"cutoff", cut[k]}, {"quotient", jnum(rs[k].quotient)}, {"alpha", jnum(rs[k].alpha)}});
    }
    arr.push_back({{"operator", job.name}, {"quotients", qs}, {"variation", jnum(var)}, {"pass", var <= 0.1}});
    std::printf("%s %-7s", var <= 0.1 ? "PASS" : "FAIL", job.name.c_str());
    for (std::size_t k = 0; k < rs.size(); ++k) std::printf(" cutoff %s: %s", num(cut[k]).c_str(), num(rs[k].quotient).c_str());
    std::printf("  variation %s\n", num(var).c_str());
  }
  if (!any) throw UsageError("unknown operator '" + a.which + "'");
  j["operators"] = arr;
  if (c.format == "json")
    write_json(c, "weaktype", j);
  else
    write_file(c, "weaktype.csv", csv);
  return ok ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for singular integrals of the inverse Gauss measure"};
  app.require_subcommand(1);
  RunConfig c;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--dim", c.dim, "Dimension n")->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    s->add_option("--rel-tol", c.rel_tol, "Relative tolerance of adaptive quadrature")->check(CLI::PositiveNumber);
    s->add_option("--threads", c.threads, "Worker threads (INVGAUSS_THREADS overrides)");
    s->add_option("--out", c.out, "Output directory")->capture_default_str();
    s->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  };

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the pointwise lemma suites");
  add_common(verify);
  verify->add_option("--suite", va.suite, "Run only this suite");
  verify->add_option("--samples", va.samples, "Samples per suite")->capture_default_str();
  verify->add_flag("--inject-eta-sign-error", va.flip_eta, "Mutation check: flip the sign of eta");

  TableArgs ta;
  auto* table = app.add_subcommand("table", "Empirical boundedness table");
  add_common(table);
  table->add_option("--lambda", ta.lambdas, "Comma-separated lambda grid")->capture_default_str();
  table->add_option("--mu", ta.mus, "Comma-separated mu grid")->capture_default_str();
  table->add_option("--operator", ta.op, "Restrict the report")->check(CLI::IsMember({"all", "impow", "riesz"}))->capture_default_str();
  table->add_option("--space", ta.space, "Restrict the report")->check(CLI::IsMember({"all", "H1", "X1"}))->capture_default_str();

  AsymptoticsArgs aa;
  auto* asym = app.add_subcommand("asymptotics", "Compensated probe series with an SVG plot");
  add_common(asym);
  asym->add_option("--probe", aa.probe, "Probe")->check(CLI::IsMember({"impow", "riesz"}))->capture_default_str();
  asym->add_option("--atom", aa.atom, "Atom")->check(CLI::IsMember({"hemisphere", "generated"}))->capture_default_str();
  asym->add_option("--lambda", aa.lambda, "Operator shift lambda")->check(CLI::NonNegativeNumber)->capture_default_str();
  asym->add_option("--atom-lambda", aa.atom_lambda, "lambda of the generated atom (default: --lambda)")->check(CLI::NonNegativeNumber);
  asym->add_option("--compensation", aa.compensation, "Compensation order")->check(CLI::IsMember({"auto", "leading", "second"}))->capture_default_str();
  asym->add_option("--rho-lo", aa.rho_lo, "Smallest rho")->capture_default_str();
  asym->add_option("--rho-hi", aa.rho_hi, "Largest rho")->capture_default_str();
  asym->add_option("--rho-count", aa.rho_count, "Number of log-spaced rho")->capture_default_str();

  ScanArgs sa;
  auto* scan = app.add_subcommand("scan", "Domination scans against the global majorant");
  add_common(scan);
  scan->add_option("--kernel", sa.which, "maximal, klambda1, kprime0 or all")->capture_default_str();
  scan->add_option("--samples", sa.samples, "Pairs per box")->check(CLI::PositiveNumber)->capture_default_str();
  scan->add_option("--calib-box", sa.calib_box, "Calibration box")->capture_default_str();
  scan->add_option("--valid-box", sa.valid_box, "Validation box")->capture_default_str();

  WeakTypeArgs wa;
  auto* weak = app.add_subcommand("weaktype", "Weak type (1,1) quotients in one dimension");
  add_common(weak);
  weak->add_option("--operator", wa.which, "riesz1, riesz2, impow0, impow1 or all")->capture_default_str();
  weak->add_option("--cutoffs", wa.cutoffs, "Comma-separated cutoffs")->capture_default_str();
  weak->add_option("--grid", wa.grid, "Grid points")->check(CLI::Range(2, 10000000))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (*verify) return cmd_verify(c, va);
    if (*table) return cmd_table(c, ta);
    if (*asym) return cmd_asymptotics(c, aa);
    if (*scan) return cmd_scan(c, sa);
    return cmd_weaktype(c, wa);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
