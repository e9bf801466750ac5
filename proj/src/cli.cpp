#include "beltrami/cli.hpp"

#include "beltrami/deformation.hpp"
#include "beltrami/diffeo_check.hpp"
#include "beltrami/geodesic.hpp"
#include "beltrami/metric_core.hpp"
#include "beltrami/parallel.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/surface_geometry.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace beltrami {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InputError("bad number '" + s + "' in " + what);
  return v;
}

int to_dim(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != std::floor(v) || v < 1 || v > kMaxJetDim) {
    throw InputError("bad dimension '" + s + "' in " + what);
  }
  return static_cast<int>(v);
}


ParamMap read_params(const json& j, ParamMap base) {
  if (!j.contains("params")) return base;
  const json& p = j.at("params");
  if (!p.is_object()) throw InputError("'params' must be an object");
  for (const auto& [k, v] : p.items()) {
    if (!v.is_number()) throw InputError("parameter '" + k + "' must be a number");
    base[k] = v.get<double>();
  }
  return base;
}

Domain read_domain(const json& j, int dim) {
  if (!j.contains("domain")) return Domain::box(dim, 1.0);
  const json& d = j.at("domain");
  Domain dom;
  if (d.contains("half_width")) {
    dom = Domain::box(dim, d.at("half_width").get<double>());
  } else if (d.contains("lower") && d.contains("upper")) {
    const auto lo = d.at("lower").get<std::vector<double>>();
    const auto hi = d.at("upper").get<std::vector<double>>();
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim) {
      throw InputError("domain bounds must have dim entries");
    }
    Vec l(dim), u(dim);
    for (int i = 0; i < dim; ++i) {
      l(i) = lo[i];
      u(i) = hi[i];
      if (!(l(i) < u(i))) throw InputError("domain lower bound must be below upper");
    }
    dom = Domain::box(l, u);
  } else {
    throw InputError("domain needs 'half_width' or 'lower'/'upper'");
  }
  if (d.contains("ball_radius")) dom = dom.with_ball(d.at("ball_radius").get<double>());
  return dom;
}

std::vector<std::vector<Expression>> read_matrix(const json& j, int dim, const ParamMap& params,
                                                 bool allow_t, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw InputError(what + " must be a " + std::to_string(dim) + "x" + std::to_string(dim) +
                     " array of expressions");
  }
  std::vector<std::vector<Expression>> m(dim);
  for (int i = 0; i < dim; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw InputError(what + " row " + std::to_string(i) + " has the wrong length");
    }
    for (int k = 0; k < dim; ++k) {
      const json& cell = row.at(k);
      const std::string src = cell.is_number() ? json(cell).dump() : cell.get<std::string>();
      try {
        m[i].push_back(parse_expression(src, params));
      } catch (const ParseError& e) {
        throw InputError(what + "[" + std::to_string(i) + "][" + std::to_string(k) +
                         "]: " + e.what());
      }
      if (m[i].back().coordinates() > dim) {
        throw InputError(what + " uses a coordinate beyond dim " + std::to_string(dim));
      }
      if (!allow_t && m[i].back().uses_t()) throw InputError(what + " may not use t");
    }
  }
  return m;
}

MetricSpec read_metric(const json& j, const ParamMap& outer) {
  if (j.is_string()) return catalog_metric_spec(j.get<std::string>());
  if (!j.is_object()) throw InputError("metric must be a catalog id or an object");
  if (j.contains("catalog")) return catalog_metric_spec(j.at("catalog").get<std::string>());
  MetricSpec s;
  s.params = read_params(j, outer);
  s.name = j.value("name", std::string("custom"));
  if (!j.contains("dim")) throw InputError("metric needs 'dim'");
  s.dim = j.at("dim").get<int>();
  if (s.dim < 1 || s.dim > kMaxJetDim) throw InputError("metric dim out of range");
  s.domain = read_domain(j, s.dim);
  if (!j.contains("entries")) throw InputError("metric needs 'entries'");
  s.entries = read_matrix(j.at("entries"), s.dim, s.params, false, "metric entries");
  return s;
}


template <typename S>
MatX<S> eval_matrix(const std::vector<std::vector<Expression>>& m, const VecX<S>& x,
                    double t = 0.0) {
  const int n = static_cast<int>(m.size());
  MatX<S> g(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) g(i, k) = m[i][k](x, t);
  return g;
}

ChartMetric metric_from_entries(const std::string& name, const Domain& domain,
                                std::vector<std::vector<Expression>> entries, double t) {
  const int n = static_cast<int>(entries.size());
  return ChartMetric(name, domain,
                     TensorField::from_generic(n, [entries = std::move(entries), t](const auto& x) {
                       return eval_matrix(entries, x, t);
                     }));
}

void validate_metric(const ChartMetric& g) {
  SplitMix64 rng(0x5eedULL);
  const std::vector<Vec> probes = sample_domain(g.domain(), rng, 16);
  for (const Vec& x : probes) {
    Mat m;
    try {
      m = g.value(x);
    } catch (const Error& e) {
      throw InputError("metric '" + g.name() + "' cannot be evaluated: " + e.what());
    }
    if (!m.allFinite()) throw InputError("metric '" + g.name() + "' is not finite at a probe");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InputError("metric '" + g.name() + "' is not symmetric");
    }
    if (!is_positive_definite(m)) {
      std::ostringstream os;
      os << "metric '" << g.name() << "' is not positive-definite at (" << x.transpose() << ")";
      throw InputError(os.str());
    }
  }
}

ChartMetric rescaled(const ChartMetric& g, double a) {
  const int n = g.dim();
  std::ostringstream name;
  name << "conformal-rescale:" << a << "(" << g.name() << ")";
  return ChartMetric(
      name.str(), g.domain(),
      TensorField(
          n, [g, a](const Vec& x) -> Mat { return std::exp(2.0 * a * x(0)) * g.value(x); },
          [g, a, n](const Vec& x) -> MatX<Jet> {
            const Jet f = exp(Jet::variable(x(0), 0, n) * (2.0 * a));
            MatX<Jet> m = g.jet(x);
            for (int i = 0; i < n; ++i)
              for (int k = 0; k < n; ++k) m(i, k) = m(i, k) * f;
            return m;
          }));
}

// A box about the domain centre small enough for trial paths to stay inside.
Domain probe_region(const Domain& d) {
  const Vec c = 0.5 * (d.lower + d.upper);
  double hw = 0.25 * (d.upper - d.lower).minCoeff();
  if (d.ball_radius > 0.0) hw = std::min(hw, 0.25 * d.ball_radius);
  hw = std::min(hw, 0.5);
  return Domain::box(c - Vec::Constant(c.size(), hw), c + Vec::Constant(c.size(), hw));
}

Vec unit_in(const ChartMetric& g, const Vec& x, const Vec& v) {
  return v / std::sqrt(v.dot(g.value(x) * v));
}


struct Recorder {
  RunReport& r;
  double tol;
  void check(const std::string& fixture, const std::string& name, double value, double t) {
    r.checks.push_back({fixture, name, value, t, std::isfinite(value) && value <= t});
  }
  void check(const std::string& fixture, const std::string& name, double value) {
    check(fixture, name, value, tol);
  }
  void quantity(const std::string& fixture, const std::string& name, double value) {
    r.quantities.push_back({fixture, name, value});
  }
};

const ChartMetric& need_metric(const LabInputs& in, const std::string& cmd) {
  if (!in.metric) throw InputError(cmd + " needs --metric or --catalog");
  return *in.metric;
}


void run_cogeodesic(const LabInputs& in, const RunOptions& o, Recorder& rec) {
  const ChartMetric& g = need_metric(in, "check-cogeodesic");
  const ChartMetric target = in.target ? *in.target : g;
  const ChartDiffeo psi = in.map ? *in.map : ChartDiffeo::identity(g.dim());
  const Domain region = probe_region(g.domain());
  const ChartMetric g2 = pullback_metric(psi, target, g.domain());
  SplitMix64 rng(o.seed);
  std::vector<GeodesicTrial> trials;
  for (const Vec& p : sample_domain(region, rng, o.samples, 1.0)) {
    trials.push_back({p, unit_in(g2, p, rng.normal_vec(g.dim())), 0.5});
  }
  const TrialReport r = cogeodesic_test(g, g2, trials, o.step);
  const std::string fx = psi.name() + ":" + g.name() + "->" + target.name();
  rec.r.fixtures.push_back(fx);
  rec.check(fx, "k1_max", r.residual);
  rec.quantity(fx, "speed_drift", r.secondary);
  rec.quantity(fx, "rejected_trials", r.rejected);
}

void run_concircular(const LabInputs& in, const RunOptions& o, Recorder& rec) {
  const ChartMetric& g = need_metric(in, "check-concircular");
  const ChartMetric target = in.target ? *in.target : g;
  const ChartDiffeo psi = in.map ? *in.map : ChartDiffeo::identity(g.dim());
  const Domain region = probe_region(g.domain());
  SplitMix64 rng(o.seed);
  const auto circles =
      random_circle_trials(g, rng, o.samples, region.lower, region.upper, 1.0, 2.0, 1.0);
  const TrialReport r = concircular_test(g, psi, target, circles, o.step);
  const std::string fx = psi.name() + ":" + g.name() + "->" + target.name();
  rec.r.fixtures.push_back(fx);
  rec.check(fx, "k1_stdev_max", r.residual);
  rec.check(fx, "k2_max_abs", r.secondary);
  rec.quantity(fx, "rejected_trials", r.rejected);
}

void run_cospherical(const LabInputs& in, const RunOptions& o, Recorder& rec) {
  const ChartMetric& g = need_metric(in, "check-cospherical");
  SpaceFormModel target;
  if (in.target_form) {
    target = *in.target_form;
  } else if (in.target) {
    throw InputError("check-cospherical: --target must be a euclidean or riemannian catalog id");
  } else if (in.metric_form) {
    target = *in.metric_form;
  } else {
    target = riemannian_form(0.0, g.dim());
  }
  const ChartDiffeo psi = in.map ? *in.map : ChartDiffeo::identity(g.dim());
  const Domain region = probe_region(g.domain());
  SplitMix64 rng(o.seed);
  std::vector<SphereTrial> trials;
  for (const Vec& p : sample_domain(region, rng, o.samples, 1.0)) trials.push_back({p, 0.3});
  const TrialReport r = cospherical_test(g, psi, target, trials, 32, o.step);
  const std::string fx = psi.name() + ":" + g.name() + "->" + target.chart.name();
  rec.r.fixtures.push_back(fx);
  rec.check(fx, "sphere_fit_rms_max", r.residual);
  rec.quantity(fx, "rejected_trials", r.rejected);
}

void run_cominimal(const LabInputs& in, const RunOptions& o, Recorder& rec) {
  const ChartMetric& gb = need_metric(in, "check-cominimal-identity");
  if (gb.dim() != 3) throw InputError("check-cominimal-identity needs a 3-D metric");
  const ChartMetric gt = in.target ? *in.target : rescaled(gb, 0.2);
  if (gt.dim() != 3) throw InputError("check-cominimal-identity needs a 3-D target");
  const Domain region = probe_region(gb.domain());
  SplitMix64 rng(o.seed);
  std::vector<Vec> coef(o.samples);
  std::vector<Vec> points = sample_domain(region, rng, o.samples, 0.8);
  for (auto& c : coef) c = rng.uniform_vec(4, -0.5, 0.5);
  std::vector<HHtildeReport> out(o.samples);
  parallel_for(o.samples, [&](int i) {
    const Vec p = points[i], c = coef[i];
    const SurfacePatch s = SurfacePatch::from_generic(
        "graph", Domain::box(2, 0.05), [p, c](const auto& uv) {
          using S = typename std::decay_t<decltype(uv)>::Scalar;
          const S a = uv(0), b = uv(1);
          VecX<S> x(3);
          x(0) = a + p(0);
          x(1) = b + p(1);
          x(2) = c(0) * a * a + c(1) * a * b + c(2) * b * b + c(3) * a * a * a + p(2);
          return x;
        });
    out[i] = hhtilde_residual(s, gb, gt, Vec::Zero(2));
  });
  const std::string fx = gb.name() + "->" + gt.name();
  rec.r.fixtures.push_back(fx);
  double worst = 0.0, h = 0.0, ht = 0.0;
  for (const auto& r : out) {
    worst = std::max(worst, r.residual);
    h = std::max(h, std::abs(r.H));
    ht = std::max(ht, std::abs(r.H_tilde));
  }
  rec.check(fx, "hhtilde_residual_max", worst);
  rec.quantity(fx, "H_max_abs", h);
  rec.quantity(fx, "H_tilde_max_abs", ht);
}

void run_beltrami(const LabInputs& in, const RunOptions& o, Recorder& rec) {
  if (!in.deformation) {
    throw InputError("verify-infinitesimal-beltrami needs --deformation or --catalog");
  }
  const DeformationFamily& f = *in.deformation;
  SplitMix64 rng(o.seed);
  const std::vector<Vec> pts = sample_domain(f.base.domain(), rng, o.samples);
  const std::vector<TangentPlane> planes = random_planes(f.base.domain(), rng, o.samples);
  const CriterionReport x = infinitesimal_cogeodesic_test(f, pts);
  const CriterionReport a = alpha_criterion_test(f, pts);
  const DeltaCurvature dk = delta_curvature(f, planes);
  rec.r.fixtures.push_back(f.name);
  rec.check(f.name, "x_criterion_relative", x.relative, kCriterionTol);
  rec.check(f.name, "alpha_criterion_relative", a.relative, kCriterionTol);
  rec.check(f.name, "delta_k_spread", dk.spread);
  rec.quantity(f.name, "x_criterion_residual", x.residual);
  rec.quantity(f.name, "alpha_criterion_residual", a.residual);
  rec.quantity(f.name, "delta_k_mean", dk.mean);
  rec.quantity(f.name, "delta_k_min", dk.min);
  rec.quantity(f.name, "delta_k_max", dk.max);
  rec.quantity(f.name, "delta_k_noise_floor", dk.noise_floor);
}

void run_calibrate(const LabInputs&, const RunOptions& o, Recorder& rec) {
  SplitMix64 rng(o.seed);
  {
    const ChartMetric g = sphere_uv();
    double worst = 0.0;
    for (int i = 0; i < o.samples; ++i) {
      Vec x(2);
      x << rng.uniform(-1.2, 1.2), rng.uniform(-3.0, 3.0);
      const Christoffel c = christoffel(g, x);
      const double u = x(0);
      Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
      e0(1, 1) = std::sin(u) * std::cos(u);
      e1(0, 1) = e1(1, 0) = -std::tan(u);
      worst = std::max({worst, (c.gamma[0] - e0).cwiseAbs().maxCoeff(),
                        (c.gamma[1] - e1).cwiseAbs().maxCoeff()});
    }
    rec.r.fixtures.push_back(g.name());
    rec.check(g.name(), "christoffel_table", worst, 1e-8);
  }
  for (double c : {-1.0, 0.0, 1.0}) {
    for (int n : {2, 3}) {
      const ChartMetric g = riemannian_form(c, n).chart;
      std::vector<double> k;
      while (static_cast<int>(k.size()) < o.samples) {
        const Vec x = rng.uniform_vec(n, -0.8, 0.8);
        if (x.norm() >= 0.8) continue;
        k.push_back(sectional_curvature(g, x, rng.normal_vec(n), rng.normal_vec(n)));
      }
      double mean = 0.0, var = 0.0;
      for (double v : k) mean += v;
      mean /= k.size();
      for (double v : k) var += (v - mean) * (v - mean);
      rec.r.fixtures.push_back(g.name());
      rec.check(g.name(), "curvature_stdev", std::sqrt(var / k.size()), 1e-6);
      rec.check(g.name(), "curvature_mean_error", std::abs(mean - c), 1e-6);
    }
  }
  {
    const ChartMetric g = gnomonic_metric(0.3, 2);
    double worst = 0.0;
    for (int i = 0; i < o.samples; ++i) {
      const Vec p = rng.uniform_vec(2, -0.5, 0.5);
      const Vec v = unit_in(g, p, rng.normal_vec(2));
      const Vec dir = v.normalized();
      const GeodesicPath path = integrate_geodesic(g, p, v, 1.0, o.step);
      for (const auto& s : path.samples) {
        const Vec d = s.x - p;
        worst = std::max(worst, (d - d.dot(dir) * dir).norm());
      }
    }
    rec.r.fixtures.push_back(g.name());
    rec.check(g.name(), "geodesic_chord_distance", worst, 1e-6);
  }
}

double default_tol(const std::string& cmd) {
  if (cmd == "verify-infinitesimal-beltrami") return 2e-4;
  return 1e-6;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  return json(v).dump();
}

bool is_file(const std::string& s) {
  std::error_code ec;
  return std::filesystem::is_regular_file(s, ec);
}

}  // namespace

ChartMetric build_metric(const MetricSpec& spec) {
  ChartMetric g;
  if (spec.name != "custom" && spec.entries.empty()) {
    g = catalog_metric(spec.name);
  } else {
    if (static_cast<int>(spec.entries.size()) != spec.dim) {
      throw InputError("metric entries do not match dim");
    }
    g = metric_from_entries(spec.name, spec.domain, spec.entries, 0.0);
  }
  validate_metric(g);
  return g;
}

ChartDiffeo build_map(const MapSpec& spec) {
  if (spec.name != "custom" && spec.components.empty()) return catalog_map(spec.name, spec.dim);
  if (static_cast<int>(spec.components.size()) != spec.dim) {
    throw InputError("map needs one component per dimension");
  }
  const auto comps = spec.components;
  return ChartDiffeo::from_generic(spec.name, spec.dim, [comps](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    VecX<S> y(static_cast<int>(comps.size()));
    for (size_t i = 0; i < comps.size(); ++i) y(static_cast<int>(i)) = comps[i](VecX<S>(x));
    return y;
  });
}

DeformationFamily build_deformation(const DeformationSpec& spec) {
  if (spec.name != "custom" && spec.delta.empty()) return catalog_family(spec.name);
  DeformationFamily f;
  f.name = spec.name;
  f.base = build_metric(spec.base);
  const int n = f.base.dim();
  if (static_cast<int>(spec.delta.size()) != n) throw InputError("delta does not match dim");
  const auto delta = spec.delta;
  f.delta_g = TensorField::from_generic(n, [delta](const auto& x) { return eval_matrix(delta, x); });
  f.t_max = spec.t_max;
  if (!spec.curve.empty()) {
    const auto curve = spec.curve;
    const Domain dom = f.base.domain();
    const std::string name = f.name;
    f.full_curve = [curve, dom, name](double t) {
      return metric_from_entries(name + "@t", dom, curve, t);
    };
  }
  return f;
}

LabSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("spec must be an object");
  if (j.value("schema", std::string()) != kSpecSchema) {
    throw InputError(std::string("spec schema must be \"") + kSpecSchema + "\"");
  }
  try {
    LabSpec s;
    s.params = read_params(j, {});
    if (j.contains("metric")) s.metric = read_metric(j.at("metric"), s.params);
    if (j.contains("target")) s.target = read_metric(j.at("target"), s.params);
    if (j.contains("map")) {
      const json& m = j.at("map");
      MapSpec ms;
      if (m.is_string()) {
        ms.name = m.get<std::string>();
      } else if (m.contains("catalog")) {
        ms.name = m.at("catalog").get<std::string>();
        ms.dim = m.value("dim", 0);
      } else {
        ms.params = read_params(m, s.params);
        ms.name = m.value("name", std::string("custom"));
        ms.dim = m.at("dim").get<int>();
        if (ms.dim < 1 || ms.dim > kMaxJetDim) throw InputError("map dim out of range");
        const json& c = m.at("components");
        if (!c.is_array() || static_cast<int>(c.size()) != ms.dim) {
          throw InputError("map needs 'components' with dim entries");
        }
        for (const auto& e : c) {
          ms.components.push_back(parse_expression(e.get<std::string>(), ms.params));
          if (ms.components.back().coordinates() > ms.dim || ms.components.back().uses_t()) {
            throw InputError("map component uses an unavailable variable");
          }
        }
      }
      s.map = ms;
    }
    if (j.contains("deformation")) {
      const json& d = j.at("deformation");
      DeformationSpec ds;
      if (d.is_string()) {
        ds.name = d.get<std::string>();
      } else if (d.contains("catalog")) {
        ds.name = d.at("catalog").get<std::string>();
      } else {
        const ParamMap p = read_params(d, s.params);
        ds.name = d.value("name", std::string("custom"));
        if (!d.contains("base") || !d.contains("delta")) {
          throw InputError("deformation needs 'base' and 'delta'");
        }
        ds.base = read_metric(d.at("base"), p);
        const int n = ds.base.dim > 0 ? ds.base.dim : catalog_metric(ds.base.name).dim();
        ds.base.dim = n;
        ds.delta = read_matrix(d.at("delta"), n, p, false, "deformation delta");
        if (d.contains("curve")) ds.curve = read_matrix(d.at("curve"), n, p, true, "deformation curve");
        ds.t_max = d.value("t_max", 1.0);
      }
      s.deformation = ds;
    }
    if (j.contains("run")) {
      const json& r = j.at("run");
      if (r.contains("samples")) s.samples = r.at("samples").get<int>();
      if (r.contains("seed")) s.seed = r.at("seed").get<std::uint64_t>();
      if (r.contains("tol")) s.tol = r.at("tol").get<double>();
      if (r.contains("step")) s.step = r.at("step").get<double>();
    }
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed spec: ") + e.what());
  }
}

LabSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

MetricSpec catalog_metric_spec(const std::string& id) {
  catalog_metric(id);  // validates the id
  MetricSpec s;
  s.name = id;
  const ChartMetric g = catalog_metric(id);
  s.dim = g.dim();
  s.domain = g.domain();
  return s;
}

ChartMetric catalog_metric(const std::string& id) {
  const auto p = split(id, ':');
  if (p[0] == "euclidean" && p.size() == 2) return euclidean(to_dim(p[1], id));
  if (p[0] == "riemannian" && p.size() == 3) {
    return riemannian_form(to_double(p[1], id), to_dim(p[2], id)).chart;
  }
  if (p[0] == "gnomonic" && p.size() == 3) {
    return gnomonic_metric(to_double(p[1], id), to_dim(p[2], id));
  }
  if (p[0] == "sphere-uv" && p.size() == 1) return sphere_uv();
  if (p[0] == "conformal" && p.size() == 3) {
    return rescaled(euclidean(to_dim(p[2], id), 10.0), to_double(p[1], id)).renamed(id);
  }
  throw InputError("unknown metric catalog id '" + id + "'");
}

std::optional<SpaceFormModel> catalog_space_form(const std::string& id) {
  const auto p = split(id, ':');
  if (p[0] == "euclidean" && p.size() == 2) return riemannian_form(0.0, to_dim(p[1], id));
  if (p[0] == "riemannian" && p.size() == 3) {
    return riemannian_form(to_double(p[1], id), to_dim(p[2], id));
  }
  return std::nullopt;
}

DeformationFamily catalog_family(const std::string& id) {
  const auto p = split(id, ':');
  if (p[0] == "gnomonic" && p.size() == 3) {
    return gnomonic_family(to_dim(p[2], id), to_double(p[1], id));
  }
  for (const auto& f : deformation_fixtures()) {
    if (f.family.name == id) return f.family;
  }
  throw InputError("unknown deformation catalog id '" + id + "'");
}

ChartDiffeo catalog_map(const std::string& id, int dim) {
  if (dim < 1) throw InputError("map '" + id + "' needs a dimension");
  const auto p = split(id, ':');
  if (p[0] == "identity" && p.size() == 1) return ChartDiffeo::identity(dim);
  if (p[0] == "mobius-inversion" && p.size() == 1) {
    Vec c = Vec::Zero(dim);
    c(0) = 3.0;
    return MobiusMap::inversion(c, 2.0).to_diffeo("mobius-inversion");
  }
  if (p[0] == "homothety" && p.size() == 2) {
    const double s = to_double(p[1], id);
    if (!(s > 0.0)) throw InputError("homothety factor must be positive");
    return MobiusMap::similarity(s, Mat::Identity(dim, dim), Vec::Zero(dim)).to_diffeo(id);
  }
  if (p[0] == "shear" && p.size() == 1) {
    if (dim < 2) throw InputError("shear needs dim >= 2");
    return ChartDiffeo::from_generic("shear", dim, [](const auto& x) {
      using S = typename std::decay_t<decltype(x)>::Scalar;
      VecX<S> y = x;
      y(1) = x(1) + 0.3 * x(0) * x(0);
      return y;
    });
  }
  throw InputError("unknown map catalog id '" + id + "'");
}

bool RunReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {
      "check-cogeodesic",         "check-concircular",
      "check-cospherical",        "check-cominimal-identity",
      "verify-infinitesimal-beltrami", "calibrate"};
  return s;
}

RunReport run_subcommand(const std::string& command, const LabInputs& inputs,
                         const RunOptions& options) {
  if (options.samples < 1) throw InputError("--samples must be positive");
  if (!(options.step > 0.0)) throw InputError("--step must be positive");
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  r.command = command;
  r.seed = options.seed;
  r.samples = options.samples;
  r.step = options.step;
  Recorder rec{r, options.tol.value_or(default_tol(command))};
  if (command == "check-cogeodesic") {
    run_cogeodesic(inputs, options, rec);
  } else if (command == "check-concircular") {
    run_concircular(inputs, options, rec);
  } else if (command == "check-cospherical") {
    run_cospherical(inputs, options, rec);
  } else if (command == "check-cominimal-identity") {
    run_cominimal(inputs, options, rec);
  } else if (command == "verify-infinitesimal-beltrami") {
    run_beltrami(inputs, options, rec);
  } else if (command == "calibrate") {
    run_calibrate(inputs, options, rec);
  } else {
    throw InputError("unknown subcommand '" + command + "'");
  }
  r.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string format_report(const RunReport& r, const std::string& format,
                          bool include_timing) {
  if (format == "json") {
    json j;
    j["schema"] = kReportSchema;
    j["command"] = r.command;
    j["seed"] = r.seed;
    j["samples"] = r.samples;
    j["step"] = r.step;
    j["fixtures"] = r.fixtures;
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
      j["checks"].push_back({{"fixture", c.fixture},
                             {"check", c.name},
                             {"value", c.value},
                             {"tol", c.tol},
                             {"pass", c.pass}});
    }
    j["quantities"] = json::array();
    for (const auto& q : r.quantities) {
      j["quantities"].push_back({{"fixture", q.fixture}, {"name", q.name}, {"value", q.value}});
    }
    j["verdict"] = r.passed() ? "pass" : "fail";
    if (include_timing) j["wall_clock_s"] = r.wall_clock_s;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  if (format == "csv") {
    os << "fixture,kind,name,value,tol,pass\n";
    for (const auto& c : r.checks) {
      os << csv_escape(c.fixture) << ",check," << c.name << "," << num(c.value) << ","
         << num(c.tol) << "," << (c.pass ? "true" : "false") << "\n";
    }
    for (const auto& q : r.quantities) {
      os << csv_escape(q.fixture) << ",quantity," << q.name << "," << num(q.value) << ",,\n";
    }
    return os.str();
  }
  if (format == "text") {
    os << r.command << "  seed=" << r.seed << " samples=" << r.samples << " step=" << r.step
       << "\n";
    for (const auto& c : r.checks) {
      os << (c.pass ? "PASS " : "FAIL ") << c.fixture << "  " << c.name << " = " << num(c.value)
         << " (tol " << num(c.tol) << ")\n";
    }
    for (const auto& q : r.quantities) {
      os << "     " << q.fixture << "  " << q.name << " = " << num(q.value) << "\n";
    }
    os << "verdict: " << (r.passed() ? "pass" : "fail") << "\n";
    if (include_timing) os << "wall clock: " << r.wall_clock_s << " s\n";
    return os.str();
  }
  throw InputError("unknown format '" + format + "'");
}

void write_atomically(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InputError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move report into '" + path + "'");
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for geodesic, circle, sphere and minimal-surface "
               "preserving maps",
               "beltrami_lab"};
  std::string command, metric, catalog, map, deformation, target, format = "json", out_path;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol, step;
  app.add_option("command", command, "Subcommand")->required()->check(CLI::IsMember(subcommands()));
  app.add_option("--metric", metric, "Spec file with a metric section");
  app.add_option("--catalog", catalog, "Catalog metric or deformation id");
  app.add_option("--map", map, "Spec file with a map section, or a catalog map id");
  app.add_option("--deformation", deformation, "Spec file with a deformation section");
  app.add_option("--target", target, "Target metric: spec file or catalog id");
  app.add_option("--samples", samples, "Number of random samples");
  app.add_option("--seed", seed, "Seed of the SplitMix64 generator");
  app.add_option("--tol", tol, "Tolerance of the headline checks");
  app.add_option("--step", step, "Integration step");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--out", out_path, "Report file (written atomically)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "beltrami_lab: " << e.what() << "\n";
    return kExitSpecError;
  }

  try {
    LabInputs in;
    RunOptions opt;
    LabSpec merged;
    const auto absorb_run = [&](const LabSpec& s) {
      if (s.samples) merged.samples = s.samples;
      if (s.seed) merged.seed = s.seed;
      if (s.tol) merged.tol = s.tol;
      if (s.step) merged.step = s.step;
    };
    if (!metric.empty() && !catalog.empty()) {
      throw InputError("--metric and --catalog are exclusive");
    }
    if (!metric.empty()) {
      const LabSpec s = load_spec(metric);
      if (!s.metric) throw InputError(metric + ": no metric section");
      in.metric = build_metric(*s.metric);
      in.metric_form = catalog_space_form(s.metric->name);
      if (s.target && target.empty()) {
        in.target = build_metric(*s.target);
        in.target_form = catalog_space_form(s.target->name);
      }
      if (s.map && map.empty()) {
        MapSpec ms = *s.map;
        if (ms.dim == 0) ms.dim = in.metric->dim();
        in.map = build_map(ms);
      }
      absorb_run(s);
    }
    if (!catalog.empty()) {
      if (command == "verify-infinitesimal-beltrami") {
        in.deformation = catalog_family(catalog);
      } else {
        in.metric = catalog_metric(catalog);
        in.metric_form = catalog_space_form(catalog);
      }
    }
    const int dim = in.metric ? in.metric->dim() : 0;
    if (!target.empty()) {
      if (is_file(target)) {
        const LabSpec s = load_spec(target);
        const auto& t = s.target ? s.target : s.metric;
        if (!t) throw InputError(target + ": no target or metric section");
        in.target = build_metric(*t);
        in.target_form = catalog_space_form(t->name);
      } else {
        in.target = catalog_metric(target);
        in.target_form = catalog_space_form(target);
      }
    }
    if (!map.empty()) {
      if (is_file(map)) {
        const LabSpec s = load_spec(map);
        if (!s.map) throw InputError(map + ": no map section");
        MapSpec ms = *s.map;
        if (ms.dim == 0) ms.dim = dim;
        in.map = build_map(ms);
      } else {
        in.map = catalog_map(map, dim);
      }
    }
    if (!deformation.empty()) {
      const LabSpec s = load_spec(deformation);
      if (!s.deformation) throw InputError(deformation + ": no deformation section");
      in.deformation = build_deformation(*s.deformation);
      absorb_run(s);
    }
    if (in.map && in.metric && in.map->dim() != in.metric->dim()) {
      throw InputError("map and metric dimensions differ");
    }
    opt.samples = samples.value_or(merged.samples.value_or(opt.samples));
    opt.seed = seed.value_or(merged.seed.value_or(opt.seed));
    opt.tol = tol ? tol : merged.tol;
    opt.step = step.value_or(merged.step.value_or(opt.step));

    const RunReport report = run_subcommand(command, in, opt);
    const std::string text = format_report(report, format);
    if (out_path.empty()) {
      out << text;
    } else {
      write_atomically(out_path, text);
    }
    return report.passed() ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    err << "beltrami_lab: " << e.what() << "\n";
    return kExitSpecError;
  }
}

}  // namespace beltrami
