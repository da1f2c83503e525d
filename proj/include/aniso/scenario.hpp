#pragma once

#include "aniso/anisotropy.hpp"
#include "aniso/charts.hpp"
#include "aniso/flow.hpp"
#include "aniso/integrals.hpp"
#include "aniso/version.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace aniso {

using Json = nlohmann::json;

/// Invalid or inconsistent configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Scenario {
  int dimension = 2;  // n; the ambient space is R^(n+1)
  Json anisotropy;
  Json surface;
  std::vector<int> grid_resolution;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  double flow_dt = 0.01;
  double flow_t_max = 0.9;
  int convexity_resolution = 0;  // 0 = dimension default
  std::filesystem::path output_dir = "out";
  Json echo;  // the raw config document
};

inline const std::set<std::string>& known_checks() {
  static const std::set<std::string> names{"convexity", "wulff", "minkowski",
                                           "hk",        "identities", "garding",
                                           "flow",      "umbilic"};
  return names;
}

inline std::map<std::string, double> default_tolerances() {
  return {{"minkowski", 1e-8}, {"hk", 1e-8},      {"identities", 1e-5},
          {"garding", 1e-10},  {"umbilic", 1e-6}, {"wulff", 1e-8},
          {"flow", 1e-8},      {"convexity", 0.0}};
}

inline Scenario parse_scenario(const Json& doc) {
  Scenario sc;
  sc.echo = doc;
  try {
    sc.dimension = doc.at("dimension").get<int>();
    if (sc.dimension != 1 && sc.dimension != 2)
      throw ConfigError("dimension must be 1 (curves) or 2 (surfaces)");
    sc.anisotropy = doc.at("anisotropy");
    sc.surface = doc.at("surface");

    if (doc.contains("grid"))
      sc.grid_resolution = doc.at("grid").get<std::vector<int>>();
    else
      sc.grid_resolution =
          sc.dimension == 1 ? std::vector<int>{512} : std::vector<int>{64, 128};
    if ((int)sc.grid_resolution.size() != sc.dimension)
      throw ConfigError("grid must list one resolution per chart direction");

    sc.checks = doc.value("checks", std::vector<std::string>{});
    if (sc.checks.empty()) throw ConfigError("check list must be non-empty");
    for (const auto& c : sc.checks)
      if (!known_checks().count(c)) throw ConfigError("unknown check: " + c);

    sc.tolerances = default_tolerances();
    if (doc.contains("tolerances"))
      for (auto& [k, v] : doc.at("tolerances").items()) {
        if (!known_checks().count(k)) throw ConfigError("tolerance for unknown check: " + k);
        double tol = v.get<double>();
        if (!(tol > 0.0)) throw ConfigError("tolerances must be positive");
        sc.tolerances[k] = tol;
      }

    if (doc.contains("flow")) {
      sc.flow_dt = doc.at("flow").value("dt", 0.01);
      sc.flow_t_max = doc.at("flow").value("t_max", 0.9);
      if (!(sc.flow_dt > 0.0)) throw ConfigError("flow.dt must be positive");
    }
    sc.convexity_resolution = doc.value("convexity_resolution", 0);
    sc.output_dir = doc.value("output_dir", std::string("out"));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  Json doc;
  try {
    in >> doc;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

template <int N>
SphereFunction<N> build_anisotropy(const Json& spec) {
  try {
    std::string family = spec.at("family").get<std::string>();
    if (family == "constant") {
      return SphereFunction<N>::constant(spec.value("c", 1.0));
    }
    if (family == "quadratic") {
      Mat<N> q;
      if (spec.contains("diag")) {
        auto d = spec.at("diag").get<std::vector<double>>();
        if ((int)d.size() != N) throw ConfigError("quadratic.diag needs n+1 entries");
        q.setZero();
        for (int i = 0; i < N; ++i) q(i, i) = d[i];
      } else {
        auto rows = spec.at("q").get<std::vector<std::vector<double>>>();
        if ((int)rows.size() != N) throw ConfigError("quadratic.q must be (n+1)x(n+1)");
        for (int i = 0; i < N; ++i) {
          if ((int)rows[i].size() != N) throw ConfigError("quadratic.q must be square");
          for (int j = 0; j < N; ++j) q(i, j) = rows[i][j];
        }
      }
      return SphereFunction<N>::quadratic(q);
    }
    if (family == "harmonic") {
      double base = spec.value("base", 1.0);
      if constexpr (N == 2) {
        std::vector<std::tuple<int, bool, double>> modes;
        for (const auto& t : spec.value("terms", Json::array())) {
          std::string kind = t.value("kind", "cos");
          if (kind != "cos" && kind != "sin")
            throw ConfigError("harmonic term kind must be cos or sin");
          modes.emplace_back(t.at("k").get<int>(), kind == "sin",
                             t.at("coeff").get<double>());
        }
        return SphereFunction<2>::harmonic_circle(base, modes);
      } else {
        std::vector<std::tuple<int, int, double>> modes;
        for (const auto& t : spec.value("terms", Json::array()))
          modes.emplace_back(t.at("l").get<int>(), t.at("m").get<int>(),
                             t.at("coeff").get<double>());
        return SphereFunction<3>::harmonic_sphere(base, modes);
      }
    }
    throw ConfigError("unknown anisotropy family: " + family);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("anisotropy spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("anisotropy spec: ") + e.what());
  }
}

template <int N>
ParametricSurface<N> build_surface(const Json& spec) {
  try {
    std::string chart = spec.at("chart").get<std::string>();
    Orientation orient = Orientation::inner;
    if (spec.value("orientation", "inner") == std::string("outer"))
      orient = Orientation::outer;

    ParametricSurface<N> surf;
    if (chart == "sphere") {
      surf = make_unit_sphere<N>(orient);
    } else if (chart == "ellipsoid") {
      auto radii = spec.at("radii").get<std::vector<double>>();
      if ((int)radii.size() != N) throw ConfigError("ellipsoid.radii needs n+1 entries");
      Vec<N> r;
      for (int i = 0; i < N; ++i) r(i) = radii[i];
      surf = make_ellipsoid<N>(r, orient);
    } else if (chart == "radial_graph") {
      surf = make_radial_graph<N>(build_anisotropy<N>(spec.at("profile")), orient);
    } else if (chart == "torus") {
      if constexpr (N == 3) {
        surf = make_torus(spec.at("major").get<double>(),
                          spec.at("minor").get<double>(), orient);
      } else {
        throw ConfigError("torus chart requires dimension 2");
      }
    } else if (chart == "wulff") {
      Vec<N> center = Vec<N>::Zero();
      if (spec.contains("center")) {
        auto c = spec.at("center").get<std::vector<double>>();
        if ((int)c.size() != N) throw ConfigError("wulff.center needs n+1 entries");
        for (int i = 0; i < N; ++i) center(i) = c[i];
      }
      surf = make_wulff_shape<N>(build_anisotropy<N>(spec.at("anisotropy")),
                                 center, spec.value("scale", 1.0), orient);
    } else {
      throw ConfigError("unknown chart: " + chart);
    }
    if (spec.contains("shift")) {
      auto s = spec.at("shift").get<std::vector<double>>();
      if ((int)s.size() != N) throw ConfigError("shift needs n+1 entries");
      Vec<N> shift;
      for (int i = 0; i < N; ++i) shift(i) = s[i];
      surf = surf.translated(shift);
    }
    return surf;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("surface spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("surface spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Report and artifact writers
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  double tolerance = 0.0;
  Json values;
};

struct CheckReport {
  std::vector<CheckResult> checks;
  bool overall_pass = true;
  Json config_echo;

  Json to_json() const {
    Json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["config"] = config_echo;
    doc["checks"] = Json::array();
    for (const auto& c : checks)
      doc["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"tolerance", c.tolerance},
                               {"values", c.values}});
    doc["overall_pass"] = overall_pass;
    return doc;
  }
};

namespace detail {

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

namespace detail {

template <int N>
std::array<int, N - 1> grid_resolution_of(const Scenario& sc) {
  std::array<int, N - 1> res{};
  for (int i = 0; i < N - 1; ++i) res[i] = sc.grid_resolution[i];
  return res;
}

template <int N>
int convexity_resolution_of(const Scenario& sc) {
  if (sc.convexity_resolution > 0) return sc.convexity_resolution;
  return N == 2 ? 256 : 48;
}

template <int N>
Json certificate_json(const ConvexityCertificate<N>& cert) {
  Json j;
  j["grid_resolution"] = cert.grid_resolution;
  j["min_eigenvalue"] = cert.min_eigenvalue;
  j["passed"] = cert.passed;
  std::vector<double> p(cert.argmin_point.data(), cert.argmin_point.data() + N);
  j["argmin_point"] = p;
  return j;
}

/// CSV sample of the Wulff shape: one row per node, "x,y[,z],nx,ny[,nz]".
template <int N>
std::string wulff_csv(const SphereFunction<N>& f,
                      const QuadratureGrid<N>& grid) {
  std::string csv = N == 2 ? "x,y,nx,ny\n" : "x,y,z,nx,ny,nz\n";
  for (const auto& node : grid.nodes) {
    Vec<N> omega = sphere_param_deriv<N>(node.u, 0, 0);
    Vec<N> point = f.gradient(omega);
    for (int i = 0; i < N; ++i) csv += fmt_double(point(i)) + ",";
    for (int i = 0; i < N; ++i)
      csv += fmt_double(omega(i)) + (i + 1 < N ? "," : "");
    csv += "\n";
  }
  return csv;
}

template <int N>
std::string trace_csv(const FlowTrace<N>& trace) {
  std::string csv = "t,Q,Q_prime_analytic,Q_prime_fd,min_HF,min_detg\n";
  for (const auto& s : trace.samples) {
    csv += fmt_double(s.t) + "," + fmt_double(s.q) + "," +
           fmt_double(s.q_prime_analytic) + "," + fmt_double(s.q_prime_fd) +
           "," + fmt_double(s.min_hf) + "," + fmt_double(s.min_detg) + "\n";
  }
  csv += "termination," + to_string(trace.termination) + "\n";
  return csv;
}

/// Per-node integrand export for plotting.
template <int N>
std::string integrands_csv(const ParametricSurface<N>& surface,
                           const SphereFunction<N>& f,
                           const QuadratureGrid<N>& grid) {
  std::string csv;
  if constexpr (N == 2)
    csv = "t,weight,area_weight,f_nu,support,H0,H1,HF,mink0,scalar_id,"
          "vector_id_x,vector_id_y,support_id\n";
  else
    csv = "theta,phi,weight,area_weight,f_nu,support,H0,H1,H2,HF,mink0,mink1,"
          "scalar_id,vector_id_x,vector_id_y,vector_id_z,support_id\n";
  JetOptions<N> opts;
  opts.with_grad_hf = true;
  for (int i = 0; i < N - 1; ++i) opts.fd_step[i] = 1e-2 * grid.spacing[i];
  for (const auto& node : grid.nodes) {
    GeometryJet<N> jet = geometry_jet(surface, f, node.u, opts);
    double tr_af_s2 = jet.trace_af_s2();
    std::vector<double> cols;
    for (int i = 0; i < N - 1; ++i) cols.push_back(node.u(i));
    cols.push_back(node.weight);
    cols.push_back(jet.area_weight);
    cols.push_back(jet.f_value);
    cols.push_back(jet.support);
    for (int r = 0; r < N; ++r) cols.push_back(jet.hr[r]);
    cols.push_back(jet.hf);
    for (int r = 0; r + 1 < N; ++r)
      cols.push_back(jet.hr[r] * jet.f_value + jet.hr[r + 1] * jet.support);
    cols.push_back(jet.trace_sf2() - tr_af_s2 * jet.f_value -
                   jet.grad_hf_ambient.dot(jet.df_ambient));
    Vec<N> v_int = tr_af_s2 * jet.normal + jet.grad_hf_ambient;
    for (int c = 0; c < N; ++c) cols.push_back(v_int(c));
    cols.push_back(tr_af_s2 * jet.support + jet.hf +
                   jet.position.dot(jet.grad_hf_ambient));
    for (size_t i = 0; i < cols.size(); ++i)
      csv += fmt_double(cols[i]) + (i + 1 < cols.size() ? "," : "");
    csv += "\n";
  }
  return csv;
}

template <int N>
CheckReport run_scenario_impl(const Scenario& sc,
                              const std::vector<std::string>& checks) {
  constexpr int n = N - 1;
  SphereFunction<N> f = build_anisotropy<N>(sc.anisotropy);
  ParametricSurface<N> surface = build_surface<N>(sc.surface);
  QuadratureGrid<N> grid = make_grid<N>(surface, grid_resolution_of<N>(sc));
  ConvexityCertificate<N> cert =
      check_convexity(f, convexity_resolution_of<N>(sc));

  std::filesystem::create_directories(sc.output_dir);
  CheckReport report;
  report.config_echo = sc.echo;

  auto require_convex = [&](const std::string& who) {
    if (!cert.passed)
      throw PreconditionError(
          who + ": anisotropy failed convexity certification (min eigenvalue " +
          fmt_double(cert.min_eigenvalue) + ")");
  };

  for (const std::string& name : checks) {
    CheckResult res;
    res.name = name;
    res.tolerance = sc.tolerances.at(name);

    if (name == "convexity") {
      res.values = certificate_json(cert);
      res.pass = cert.passed;
    } else if (name == "wulff") {
      require_convex("wulff");
      ParametricSurface<N> wulff =
          make_wulff_shape<N>(f, Vec<N>::Zero(), 1.0, Orientation::outer);
      QuadratureGrid<N> wgrid = make_grid<N>(wulff, grid_resolution_of<N>(sc));
      double euler = 0.0, gauss = 0.0;
      for (const auto& node : wgrid.nodes) {
        Vec<N> omega = sphere_param_deriv<N>(node.u, 0, 0);
        euler = std::max(euler,
                         std::abs(f.gradient(omega).dot(omega) - f.value(omega)));
        GeometryJet<N> jet = geometry_jet(wulff, f, node.u);
        gauss = std::max(gauss, (jet.normal - omega).norm());
      }
      res.values["euler_residual"] = euler;
      res.values["gauss_map_residual"] = gauss;
      res.pass = euler <= 1e-10 && gauss <= res.tolerance;
      if constexpr (N == 2) {
        // winding number of the normal field along the curve
        double total = 0.0;
        const auto& nodes = wgrid.nodes;
        std::vector<double> angles;
        for (const auto& node : nodes) {
          GeometryJet<2> jet = geometry_jet(wulff, f, node.u);
          angles.push_back(std::atan2(jet.normal(1), jet.normal(0)));
        }
        for (size_t k = 0; k < angles.size(); ++k) {
          double d = angles[(k + 1) % angles.size()] - angles[k];
          while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
          while (d < -std::numbers::pi) d += 2 * std::numbers::pi;
          total += d;
        }
        double winding = total / (2 * std::numbers::pi);
        res.values["normal_winding"] = winding;
        res.pass = res.pass && std::abs(winding - 1.0) < 0.5;
      }
      write_text_file(sc.output_dir / "wulff.csv", wulff_csv(f, wgrid));
    } else if (name == "minkowski") {
      require_convex("minkowski");
      bool ok = true;
      for (int r = 0; r < n; ++r) {
        auto m = minkowski_residual(surface, f, grid, r);
        res.values["raw_r" + std::to_string(r)] = m.raw;
        res.values["normalized_r" + std::to_string(r)] = m.normalized;
        ok = ok && std::abs(m.normalized) < res.tolerance;
      }
      res.pass = ok;
      write_text_file(sc.output_dir / "integrands.csv",
                      integrands_csv(surface, f, grid));
    } else if (name == "hk") {
      require_convex("hk");
      auto hk = hk_gap(surface, f, grid);  // throws PreconditionError if H_F <= 0
      res.values["gap"] = hk.gap;
      res.values["q_integral"] = hk.q_integral;
      res.values["volume"] = hk.volume;
      res.values["min_hf"] = hk.min_hf;
      res.pass = hk.gap >= -res.tolerance * hk.q_integral;
    } else if (name == "identities") {
      auto ids = identity_residuals(surface, f, grid);
      res.values["scalar_raw"] = ids.scalar.raw;
      res.values["scalar_normalized"] = ids.scalar.normalized;
      res.values["vector_normalized"] = ids.vector_normalized;
      res.values["support_raw"] = ids.support.raw;
      res.values["support_normalized"] = ids.support.normalized;
      res.pass = std::abs(ids.scalar.normalized) < res.tolerance &&
                 ids.vector_normalized < res.tolerance &&
                 std::abs(ids.support.normalized) < res.tolerance;
      write_text_file(sc.output_dir / "integrands.csv",
                      integrands_csv(surface, f, grid));
    } else if (name == "garding") {
      auto g = garding_check(surface, f, grid, sc.tolerances.at("garding"));
      res.values["worst_margin"] = g.worst_margin;
      res.values["nodes_checked"] = g.nodes_checked;
      res.pass = g.all_hold;
    } else if (name == "umbilic") {
      require_convex("umbilic");
      double defect = umbilicity_defect(surface, f, grid);
      auto fit = wulff_fit(surface, f, grid);
      res.values["defect"] = defect;
      std::vector<double> c(fit.center.data(), fit.center.data() + N);
      res.values["fit_center"] = c;
      res.values["fit_scale"] = fit.scale;
      res.values["fit_residual"] = fit.rms_residual;
      // Umbilical exactly when the surface is a Wulff homothety: the defect
      // and the fit residual must agree on which side of tolerance they fall.
      res.pass = (defect < res.tolerance) == (fit.rms_residual < res.tolerance);
    } else if (name == "flow") {
      require_convex("flow");
      auto trace = run_flow(surface, f, sc.flow_dt, sc.flow_t_max, grid);
      bool monotone = true, bound = true;
      for (size_t k = 0; k + 1 < trace.samples.size(); ++k)
        monotone = monotone && trace.samples[k + 1].q < trace.samples[k].q;
      // sharp derivative bound Q' <= -(n+1) * energy (equality on Wulff)
      for (const auto& s : trace.samples)
        bound = bound &&
                s.q_prime_analytic <= -double(n + 1) * s.energy +
                                          res.tolerance * std::abs(s.q_prime_analytic);
      res.values["samples"] = trace.samples.size();
      res.values["termination"] = to_string(trace.termination);
      if (!trace.samples.empty()) {
        res.values["q_first"] = trace.samples.front().q;
        res.values["q_last"] = trace.samples.back().q;
      }
      if (auto est = breakdown_estimate(trace))
        res.values["breakdown_estimate"] = *est;
      res.values["monotone"] = monotone;
      res.values["derivative_bound"] = bound;
      res.pass = monotone && bound;
      write_text_file(sc.output_dir / "trace.csv", trace_csv(trace));
    }

    report.overall_pass = report.overall_pass && res.pass;
    report.checks.push_back(std::move(res));
  }

  write_text_file(sc.output_dir / "report.json", report.to_json().dump(2) + "\n");
  return report;
}

}  // namespace detail

/// Executes the scenario's checks (or an explicit subset) and writes
/// report.json plus per-check artifacts into the output directory.
inline CheckReport run_scenario(const Scenario& sc,
                                std::vector<std::string> checks = {}) {
  if (checks.empty()) checks = sc.checks;
  return sc.dimension == 1 ? detail::run_scenario_impl<2>(sc, checks)
                           : detail::run_scenario_impl<3>(sc, checks);
}

}  // namespace aniso
