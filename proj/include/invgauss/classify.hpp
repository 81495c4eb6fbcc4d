#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "invgauss/errors.hpp"

namespace invgauss {

// Value kind: a tail density in the scale variable, or a cumulative (truncated) norm.
enum class SeriesKind { Density, Cumulative };

struct ProbeSeries {
  std::vector<double> scale;
  std::vector<double> value;
  SeriesKind kind = SeriesKind::Density;
  std::string meta;

  void validate() const {
    if (scale.size() != value.size()) throw DomainError("ProbeSeries: scale and value lengths differ");
    for (std::size_t i = 0; i < scale.size(); ++i) {
      if (!(value[i] >= 0.0)) throw DomainError("ProbeSeries: values must be non-negative");
      if (i > 0 && !(scale[i] > scale[i - 1])) throw DomainError("ProbeSeries: scales must increase strictly");
    }
  }
};

enum class VerdictClass { Convergent, Divergent };
enum class ModelKind { Log, PowerLog, Constant };

struct Model {
  ModelKind kind = ModelKind::Constant;
  double exponent = 0.0;  // tail density ~ s^{-exponent} (log s)^{-logpower}
  double logpower = 0.0;
};

struct Verdict {
  VerdictClass cls = VerdictClass::Convergent;
  Model model;
  double fit_r2 = 1.0;
  bool inconclusive = false;
};

inline const char* to_string(VerdictClass c) { return c == VerdictClass::Convergent ? "Convergent" : "Divergent"; }
inline const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Log: return "Log";
    case ModelKind::PowerLog: return "PowerLog";
    default: return "Constant";
  }
}

struct ClassifyOptions {
  double exponent_band = 0.15;   // |e - 1| within the band: decide on the log power
  double critical_logpower = 1.25;
  double min_r2 = 0.9;
  double log_noise_floor = 0.1;
};

namespace detail {
struct LineFit {
  double slope = 0.0, intercept = 0.0;
};
inline LineFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}
}  // namespace detail

namespace detail {
// y ~ b0 + b1 u + b2 v by the normal equations.
struct PlaneFit {
  double c0 = 0.0, cu = 0.0, cv = 0.0;
};
inline PlaneFit ols2(const std::vector<double>& u, const std::vector<double>& v, const std::vector<double>& y) {
  const double n = double(u.size());
  double mu = 0.0, mv = 0.0, my = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu += u[i];
    mv += v[i];
    my += y[i];
  }
  mu /= n;
  mv /= n;
  my /= n;
  double suu = 0.0, svv = 0.0, suv = 0.0, suy = 0.0, svy = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i] - mu, b = v[i] - mv, c = y[i] - my;
    suu += a * a;
    svv += b * b;
    suv += a * b;
    suy += a * c;
    svy += b * c;
  }
  const double det = suu * svv - suv * suv;
  PlaneFit f;
  if (det > 1e-12 * suu * svv) {
    f.cu = (suy * svv - svy * suv) / det;
    f.cv = (svy * suu - suy * suv) / det;
  } else if (suu > 0.0) {
    f.cu = suy / suu;
  }
  f.c0 = my - f.cu * mu - f.cv * mv;
  return f;
}
}  // namespace detail

// Decides whether the tail of a probe series is integrable in its scale variable.
// The density d(s) is fitted jointly by log d = a - e log s - q log log s.  When e
// is within the band around 1, q is refitted with e fixed at 1 and the tail is
// divergent iff q < critical_logpower; otherwise it is divergent iff e < 1.
// Multiplying the series by c s^a (log s)^b with c >= 1 and a, b >= 0 lowers both
// e and q, so it never turns a divergent verdict into a convergent one.
inline Verdict classify(const ProbeSeries& series, const ClassifyOptions& opt = {}) {
  series.validate();
  const std::size_t m = series.scale.size();
  if (m < 6) throw DomainError("classify: need at least 6 samples");
  if (!(series.scale.front() > 1.0)) throw DomainError("classify: scales must exceed 1");
  if (series.scale.back() < 8.0 * series.scale.front()) throw DomainError("classify: scales must span a factor of 8");

  std::vector<double> s, d;
  if (series.kind == SeriesKind::Density) {
    s = series.scale;
    d = series.value;
  } else {
    for (std::size_t i = 0; i + 1 < m; ++i) {
      s.push_back(std::sqrt(series.scale[i] * series.scale[i + 1]));
      d.push_back((series.value[i + 1] - series.value[i]) / (series.scale[i + 1] - series.scale[i]));
    }
  }
  std::vector<double> ls, ld, lls;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(d[i] > 0.0)) continue;
    ls.push_back(std::log(s[i]));
    ld.push_back(std::log(d[i]));
    lls.push_back(std::log(std::log(s[i])));
  }
  Verdict v;
  if (ls.size() < 4) {
    // Increments vanish: the cumulative norm has stopped growing.
    v.cls = VerdictClass::Convergent;
    v.model = {ModelKind::Constant, 0.0, 0.0};
    return v;
  }
  const auto jf = detail::ols2(ls, lls, ld);
  const double e = -jf.cu, qj = -jf.cv;
  double my = 0.0;
  for (double y : ld) my += y;
  my /= double(ld.size());
  double sst = 0.0, ssr = 0.0;
  for (double y : ld) sst += (y - my) * (y - my);
  for (std::size_t i = 0; i < ld.size(); ++i) {
    const double r = ld[i] - (jf.c0 + jf.cu * ls[i] + jf.cv * lls[i]);
    ssr += r * r;
  }
  if (std::abs(e - 1.0) <= opt.exponent_band) {
    std::vector<double> y(ld.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = ld[i] + ls[i];
    const double q = -detail::ols(lls, y).slope;
    v.model = {std::abs(q) < 0.25 ? ModelKind::Log : ModelKind::PowerLog, 1.0, q};
    v.cls = q < opt.critical_logpower ? VerdictClass::Divergent : VerdictClass::Convergent;
  } else if (e < 1.0) {
    v.model = {ModelKind::PowerLog, e, qj};
    v.cls = VerdictClass::Divergent;
  } else {
    v.model = {ModelKind::Constant, e, qj};
    v.cls = VerdictClass::Convergent;
  }
  // Variation in log d below the noise floor counts as flat.
  const double floor2 = double(ld.size()) * opt.log_noise_floor * opt.log_noise_floor;
  v.fit_r2 = std::max(0.0, 1.0 - ssr / std::max(sst, floor2));
  v.inconclusive = v.fit_r2 < opt.min_r2;
  return v;
}

// Least-squares fit value ~ c log(scale) + b, with r^2.
struct LogFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LogFit fit_log(const std::vector<double>& scale, const std::vector<double>& value) {
  if (scale.size() != value.size() || scale.size() < 3) throw DomainError("fit_log: need matching series of length >= 3");
  std::vector<double> x(scale.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::log(scale[i]);
  const auto f = detail::ols(x, value);
  double my = 0.0;
  for (double y : value) my += y;
  my /= double(value.size());
  double sst = 0.0, ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sst += (value[i] - my) * (value[i] - my);
    const double r = value[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  return {f.slope, f.intercept, sst > 0.0 ? 1.0 - ssr / sst : 1.0};
}

}  // namespace invgauss
