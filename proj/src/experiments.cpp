#include "hypoflow/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include "hypoflow/collision.hpp"
#include "hypoflow/confined.hpp"
#include "hypoflow/errors.hpp"
#include "hypoflow/general_potential.hpp"
#include "hypoflow/inequalities.hpp"
#include "hypoflow/linalg.hpp"
#include "hypoflow/mode_analysis.hpp"
#include "hypoflow/random.hpp"

namespace hypoflow {

using json = nlohmann::ordered_json;

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Pass: return "pass";
    case RunStatus::Fail: return "fail";
    case RunStatus::ConfigError: return "config-error";
    case RunStatus::NumericError: return "numeric-error";
  }
  return "unknown";
}

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::Pass: return 0;
    case RunStatus::Fail: return 1;
    case RunStatus::ConfigError: return 2;
    case RunStatus::NumericError: return 3;
  }
  return 3;
}

json RunManifest::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["status"] = status_name(status);
  j["seed"] = seed;
  j["config"] = config;
  j["config_text"] = config_text;
  j["versions"] = {{"hypoflow", kVersion},
                   {"compiler", __VERSION__},
                   {"cxx_standard", static_cast<long long>(__cplusplus)},
                   {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  j["wall_seconds"] = wall_seconds;
  json checks_j = json::array();
  for (const auto& c : checks)
    checks_j.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"value", c.value},
                        {"relation", c.relation},
                        {"threshold", c.threshold},
                        {"detail", c.detail}});
  j["checks"] = checks_j;
  json files_j = json::array();
  for (const auto& f : files) files_j.push_back({{"name", f.name}, {"kind", f.kind}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  j["files"] = files_j;
  j["partial"] = partial;
  if (!error.empty()) j["error"] = error;
  return j;
}

namespace {

// ---------------------------------------------------------------------------------------------
// Shared plumbing

struct Context {
  const Params& p;
  OutputSink& out;
  std::uint64_t seed;
  std::vector<CheckResult>& checks;

  void check(const std::string& name, bool pass, double value, const std::string& relation, double threshold,
             const std::string& detail = {}) {
    checks.push_back({name, pass, value, threshold, relation, detail});
  }
  void check_le(const std::string& name, double value, double threshold, const std::string& detail = {}) {
    check(name, value <= threshold, value, "<=", threshold, detail);
  }
  void check_gt(const std::string& name, double value, double threshold, const std::string& detail = {}) {
    check(name, value > threshold, value, ">", threshold, detail);
  }
};

std::vector<double> uniform_grid(double t_end, double step) {
  if (!(step > 0.0) || !(t_end > 0.0)) throw DomainError("time grid needs positive horizon and step");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / step - 1e-9)));
  std::vector<double> t;
  t.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t.push_back(t_end * static_cast<double>(i) / static_cast<double>(n));
  return t;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string multi_index_text(const MultiIndex& a) {
  std::string s;
  for (std::size_t i = 0; i < a.dim(); ++i) s += (i ? ";" : "") + std::to_string(a[i]);
  return s;
}

json fit_json(const DecayFit& f) {
  return {{"kind", f.kind == DecayKind::Exponential ? "exponential" : "algebraic"},
          {"rate", f.rate},
          {"t0", f.t0},
          {"t1", f.t1},
          {"residual", f.residual},
          {"target", f.target},
          {"tolerance", f.tolerance},
          {"note", f.note}};
}

json kappa_json(const KappaSet& k) {
  return {{"kappa", k.kappa}, {"kappa1", k.kappa1}, {"kappa2", k.kappa2}, {"kappa3", k.kappa3}, {"kappa4", k.kappa4}};
}

ParamSpec p_int(std::string key, int def, int lo, int hi, std::string help) {
  return {std::move(key), ParamType::Int, std::to_string(def), static_cast<double>(lo), static_cast<double>(hi), {}, std::move(help)};
}
ParamSpec p_real(std::string key, std::string def, double lo, double hi, std::string help) {
  return {std::move(key), ParamType::Real, std::move(def), lo, hi, {}, std::move(help)};
}
ParamSpec p_opt(std::string key, double lo, double hi, std::string help) {
  return {std::move(key), ParamType::OptReal, "auto", lo, hi, {}, std::move(help)};
}
ParamSpec p_bool(std::string key, bool def, std::string help) {
  return {std::move(key), ParamType::Bool, def ? "true" : "false", 0, 1, {}, std::move(help)};
}
ParamSpec p_choice(std::string key, std::string def, std::vector<std::string> choices, std::string help) {
  return {std::move(key), ParamType::Choice, std::move(def), 0, 0, std::move(choices), std::move(help)};
}
ParamSpec p_ilist(std::string key, std::string def, int lo, int hi, std::string help) {
  return {std::move(key), ParamType::IntList, std::move(def), static_cast<double>(lo), static_cast<double>(hi), {}, std::move(help)};
}
ParamSpec p_rlist(std::string key, std::string def, double lo, double hi, std::string help) {
  return {std::move(key), ParamType::RealList, std::move(def), lo, hi, {}, std::move(help)};
}

const std::vector<std::string> kModels{"relaxation", "fokker-planck", "boltzmann-surrogate"};

ParamSpec p_model(const std::string& def = "relaxation") { return p_choice("model", def, kModels, "kinetic model"); }

std::vector<ParamSpec> kappa_params() {
  return {p_opt("kappa.kappa", 0.0, 10.0, "cross-term weight, Model 1"),
          p_opt("kappa.kappa1", 0.0, 10.0, "first weight"),
          p_opt("kappa.kappa2", 0.0, 10.0, "second weight"),
          p_opt("kappa.kappa3", 0.0, 10.0, "third weight"),
          p_opt("kappa.kappa4", 0.0, 10.0, "fourth weight (Model 3 confined)")};
}

KappaSet apply_kappa_overrides(KappaSet k, const Params& p) {
  if (auto v = p.get_opt_real("kappa.kappa")) k.kappa = *v;
  if (auto v = p.get_opt_real("kappa.kappa1")) k.kappa1 = *v;
  if (auto v = p.get_opt_real("kappa.kappa2")) k.kappa2 = *v;
  if (auto v = p.get_opt_real("kappa.kappa3")) k.kappa3 = *v;
  if (auto v = p.get_opt_real("kappa.kappa4")) k.kappa4 = *v;
  return k;
}

bool any_kappa_override(const Params& p) {
  for (const char* k : {"kappa.kappa", "kappa.kappa1", "kappa.kappa2", "kappa.kappa3", "kappa.kappa4"})
    if (p.get_opt_real(k)) return true;
  return false;
}

template <typename V>
std::vector<V> concat(std::vector<V> a, const std::vector<V>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<double> normalized(std::vector<double> v) {
  const double n = norm2(std::span<const double>(v));
  if (!(n > 0.0)) throw DomainError("initial data is zero after projection");
  for (auto& x : v) x /= n;
  return v;
}

double spectral_norm(const RealMatrix& m) {
  const auto e = jacobi_eigen(matmul(m.transpose(), m));
  return std::sqrt(std::max(0.0, e.values.back()));
}

// ---------------------------------------------------------------------------------------------
// decay-torus

std::vector<ParamSpec> torus_params() {
  return concat(std::vector<ParamSpec>{
                    p_model(), p_int("d", 1, 1, 3, "spatial dimension"), p_int("K", 8, 1, 64, "lattice cutoff |k_i| <= K"),
                    p_int("N", 16, 3, 40, "Hermite truncation"), p_real("t_max", "40", 1e-6, 1e6, "horizon"),
                    p_real("sample_dt", "0.1", 1e-6, 1e3, "output spacing"), p_real("dt", "0.05", 1e-8, 10, "max step"),
                    p_choice("data", "admissible", {"admissible", "kernel-mass"}, "initial data family"),
                    p_real("tolerance.monotone", "1e-8", 0, 1, "relative per-sample increase allowed for the energy"),
                    p_real("tolerance.min_rate", "1e-3", 0, 1e3, "smallest accepted fitted rate")},
                kappa_params());
}

void run_decay_torus(Context& c) {
  const ModelKind model = parse_model(c.p.get_string("model"));
  const int d = c.p.get_int("d");
  const int K = c.p.get_int("K");
  const auto L = assemble_L(model, enumerate_basis(d, c.p.get_int("N")));
  const std::size_t n = L.basis->size();
  const KappaSet kap = apply_kappa_overrides(default_mode_kappas(model), c.p);

  Xoshiro256 rng(c.seed, 1);
  LatticeData u0;
  std::vector<int> k(static_cast<std::size_t>(d), -K);
  while (true) {
    double k2 = 0.0;
    for (int x : k) k2 += double(x) * x;
    std::vector<Complex> v(n);
    for (auto& x : v) x = Complex(rng.normal(), rng.normal()) / (1.0 + k2);
    const bool zero = k2 == 0.0;
    if (zero) {
      for (const auto& kv : L.kernel) {
        Complex pr = 0.0;
        for (std::size_t i = 0; i < n; ++i) pr += kv[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= pr * kv[i];
      }
      if (c.p.get_string("data") == "kernel-mass") v[0] += 1.0;
    }
    u0[k] = v;
    std::size_t ax = 0;
    while (ax < k.size() && k[ax] == K) k[ax++] = -K;
    if (ax == k.size()) break;
    ++k[ax];
  }

  const auto t = uniform_grid(c.p.get_real("t_max"), c.p.get_real("sample_dt"));
  const auto res = torus_evolve(L, u0, t, kap, c.p.get_real("dt"));

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({t[i], res.norm[i], res.energy[i]});
  c.out.write_csv("curve.csv", {"t", "norm", "energy"}, rows);
  const double t0 = res.fit.t0;
  std::size_t i0 = 0;
  while (i0 + 1 < t.size() && t[i0] < t0) ++i0;
  c.out.write_json("fit.json", {{"model", model_name(model)},
                                {"fit", fit_json(res.fit)},
                                {"kappas", kappa_json(kap)},
                                {"max_energy_increase", res.max_energy_increase},
                                {"max_norm_increase", res.max_norm_increase},
                                {"modes", u0.size()}});
  c.out.write_plot("curve.gp", {"torus decay, " + model_name(model), "curve.csv", 1, {2, 3}, {"norm", "energy"}, false, true,
                                {{format_double(res.norm[i0]) + "*exp(-" + format_double(res.fit.rate) + "*(x-" +
                                      format_double(t[i0]) + "))",
                                  "fitted exponential rate"}}});
  c.check_gt("fit_rate", res.fit.rate, c.p.get_real("tolerance.min_rate"), "exponential fit of the norm");
  c.check_le("energy_monotonicity", res.max_energy_increase, c.p.get_real("tolerance.monotone"),
             "max relative per-sample increase of the summed mode energy");
}

// ---------------------------------------------------------------------------------------------
// decay-wholespace

std::vector<ParamSpec> wholespace_params() {
  return {p_model(),
          p_int("N", 16, 3, 40, "Hermite truncation"),
          p_ilist("m", "0,1", 0, 3, "derivative orders"),
          p_int("profile_mode", 0, 0, 40, "Hermite index of the velocity profile"),
          p_real("k_max", "8", 0.1, 100, "wavenumber cutoff"),
          p_real("k_step", "0.02", 1e-5, 1, "wavenumber spacing"),
          p_real("dt", "0.05", 1e-6, 10, "max step"),
          p_real("t_max", "500", 1, 1e5, "horizon"),
          p_real("sample_dt", "1", 1e-3, 100, "output spacing"),
          p_real("fit_t0", "150", 0, 1e5, "fit window start"),
          p_real("fit_t1", "500", 0, 1e5, "fit window end"),
          p_real("tolerance.slope", "0.15", 0, 1, "relative slope tolerance")};
}

void sigma_checks(Context& c) {
  struct Row {
    long long qn, qd;
    int m, d;
    Rational expect;
  };
  const std::vector<Row> rows{{1, 1, 0, 3, {3, 4}}, {2, 1, 0, 1, {0, 1}}, {2, 1, 0, 2, {0, 1}},
                              {2, 1, 0, 3, {0, 1}}, {1, 1, 1, 1, {3, 4}}};
  for (const auto& r : rows) {
    const Rational s = sigma_index_exact(r.qn, r.qd, r.m, r.d);
    const std::string name = "sigma_q" + std::to_string(r.qn) + "_m" + std::to_string(r.m) + "_d" + std::to_string(r.d);
    c.check(name, s == r.expect, s.value(), "==", r.expect.value(),
            std::to_string(s.num) + "/" + std::to_string(s.den) + " expected " + std::to_string(r.expect.num) + "/" +
                std::to_string(r.expect.den));
  }
}

void run_decay_wholespace(Context& c) {
  sigma_checks(c);
  const ModelKind model = parse_model(c.p.get_string("model"));
  const int N = c.p.get_int("N");
  const auto L = assemble_L(model, enumerate_basis(1, N));
  const int mode = c.p.get_int("profile_mode");
  if (mode > N) throw DomainError("profile_mode exceeds the truncation");
  WholeSpaceSpec spec;
  spec.profile_vector.assign(L.basis->size(), 0.0);
  spec.profile_vector[static_cast<std::size_t>(mode)] = 1.0;
  spec.k_max = c.p.get_real("k_max");
  spec.k_step = c.p.get_real("k_step");
  spec.dt = c.p.get_real("dt");
  const double t0 = c.p.get_real("fit_t0"), t1 = c.p.get_real("fit_t1");
  const auto t = uniform_grid(c.p.get_real("t_max"), c.p.get_real("sample_dt"));
  if (!(t0 < t1) || t1 > t.back() + 1e-9) throw DomainError("fit window must lie inside [0, t_max]");
  const auto ms = c.p.get_int_list("m");

  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols;
  json fits = json::array();
  std::vector<PlotOverlay> overlays;
  const double tol = c.p.get_real("tolerance.slope");
  for (int m : ms) {
    spec.alpha = m;
    const auto r = wholespace_norm_curve(L, spec, t, t0, t1);
    const double sigma = sigma_index(1.0, m, 1);
    header.push_back("norm_m" + std::to_string(m));
    cols.push_back(r.norm);
    fits.push_back({{"m", m}, {"sigma", sigma}, {"predicted_slope", -sigma}, {"fit", fit_json(r.fit)},
                    {"resolution_change", r.resolution_change}});
    const double rel = std::abs(r.fit.rate + sigma) / sigma;
    c.check("slope_m" + std::to_string(m), rel <= tol, r.fit.rate, "within", -sigma,
            "relative deviation " + fmt(rel) + " allowed " + fmt(tol) + " on [" + fmt(t0) + ", " + fmt(t1) + "]");
    c.check_le("resolution_m" + std::to_string(m), r.resolution_change, 0.01, "curve change when halving the k-step");
    std::size_t i0 = 0;
    while (i0 + 1 < t.size() && t[i0] < t0) ++i0;
    overlays.push_back({format_double(r.norm[i0]) + "*((1+x)/(1+" + format_double(t[i0]) + "))**(-" + format_double(sigma) + ")",
                        "predicted slope m=" + std::to_string(m)});
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::vector<double> row{t[i]};
    for (const auto& col : cols) row.push_back(col[i]);
    rows.push_back(std::move(row));
  }
  c.out.write_csv("curve.csv", header, rows);
  c.out.write_json("fit.json", {{"model", model_name(model)}, {"q", 1}, {"d", 1}, {"fits", fits}});
  std::vector<int> ycols;
  for (std::size_t k = 0; k < ms.size(); ++k) ycols.push_back(static_cast<int>(k) + 2);
  c.out.write_plot("curve.gp", {"whole-space decay, " + model_name(model), "curve.csv", 1, ycols,
                                std::vector<std::string>(header.begin() + 1, header.end()), true, true, overlays});
}

// ---------------------------------------------------------------------------------------------
// duhamel

std::vector<ParamSpec> duhamel_params() {
  return {p_model(),
          p_int("N", 6, 3, 40, "Hermite truncation"),
          p_int("source_mode", 2, 0, 40, "Hermite index of the source profile"),
          p_int("alpha", 0, 0, 3, "derivative order of the solution"),
          p_int("alpha_prime", 0, 0, 3, "derivative order on the source"),
          p_int("q_num", 2, 1, 100, "q numerator"),
          p_int("q_den", 1, 1, 100, "q denominator"),
          p_real("k_max", "8", 0.1, 100, "wavenumber cutoff"),
          p_real("k_step", "0.05", 1e-5, 1, "wavenumber spacing"),
          p_real("dt", "0.02", 1e-6, 10, "max step"),
          p_real("t_max", "12", 0.1, 1e4, "horizon"),
          p_real("sample_dt", "0.5", 1e-3, 100, "output spacing")};
}

void run_duhamel(Context& c) {
  const ModelKind model = parse_model(c.p.get_string("model"));
  const int N = c.p.get_int("N");
  const auto L = assemble_L(model, enumerate_basis(1, N));
  DuhamelSpec spec;
  spec.source_vector.assign(L.basis->size(), 0.0);
  const int mode = c.p.get_int("source_mode");
  if (mode > N) throw DomainError("source_mode exceeds the truncation");
  spec.source_vector[static_cast<std::size_t>(mode)] = 1.0;
  spec.alpha = c.p.get_int("alpha");
  spec.alpha_prime = c.p.get_int("alpha_prime");
  spec.q_num = c.p.get_int("q_num");
  spec.q_den = c.p.get_int("q_den");
  spec.k_max = c.p.get_real("k_max");
  spec.k_step = c.p.get_real("k_step");
  spec.dt = c.p.get_real("dt");
  const auto t = uniform_grid(c.p.get_real("t_max"), c.p.get_real("sample_dt"));
  const auto r = duhamel_bound_check(L, spec, t);
  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    rows.push_back({t[i], r.lhs[i], r.rhs[i], r.c_fit * r.rhs[i]});
    if (r.rhs[i] > 0.0) worst = std::max(worst, r.lhs[i] / (r.c_fit * r.rhs[i]));
  }
  c.out.write_csv("curve.csv", {"t", "lhs", "rhs", "c_times_rhs"}, rows);
  c.out.write_json("fit.json", {{"model", model_name(model)}, {"sigma", r.sigma}, {"c_fit", r.c_fit},
                                {"c_fit_refined", r.c_fit_refined}, {"stable", r.stable}});
  c.out.write_plot("curve.gp", {"Duhamel bound, " + model_name(model), "curve.csv", 1, {2, 4}, {"lhs", "C * rhs"}, false, true, {}});
  c.check("constant_finite", std::isfinite(r.c_fit) && r.c_fit >= 0.0, r.c_fit, "finite", 0.0);
  c.check("constant_stable", r.stable, r.c_fit_refined > 0 ? r.c_fit / r.c_fit_refined : 0.0, "in", 2.0,
          "ratio of C between the base and refined resolutions must lie in [1/2, 2]");
  c.check_le("bound_holds", worst, 1.0 + 1e-12, "max over t of lhs / (C rhs)");
}

// ---------------------------------------------------------------------------------------------
// decay-confined

std::vector<ParamSpec> confined_params() {
  return concat(
      std::vector<ParamSpec>{
          p_model(), p_int("d", 1, 1, 3, "spatial dimension"), p_int("N", 16, 2, 40, "total degree |beta|+|alpha| <= N"),
          p_choice("potential", "harmonic", {"harmonic", "quartic", "logarithmic"}, "confining potential"),
          p_real("t_max", "30", 1e-3, 1e5, "horizon"), p_real("dt", "0.05", 1e-6, 10, "step and sample spacing"),
          p_opt("fit_t0", 0, 1e5, "fit window start (auto: t_max/3)"), p_opt("fit_t1", 0, 1e5, "fit window end (auto: t_max)"),
          p_int("data_degree", -1, -1, 100, "random data up to this joint degree (-1: all)"),
          p_bool("residuals", true, "evaluate fluid and moment residuals along the run"),
          p_real("tolerance.lyapunov", "1e-8", 0, 1, "slack in the discrete Lyapunov inequality"),
          p_real("tolerance.residual", "1e-7", 0, 1, "fluid residual bound (10x the integrator defect tolerance)"),
          p_real("tolerance.moment", "1e-10", 0, 1, "bound on conserved moments"),
          p_opt("grid.R", 0.5, 100, "half-width of the grid (auto: 5 for quartic, 8 otherwise)"),
          p_int("grid.points", 161, 5, 4001, "grid nodes"), p_int("grid.velocity_modes", 8, 2, 40, "Hermite modes in velocity")},
      kappa_params());
}

void write_confined_curves(Context& c, const ConfinedDecayReport& rep, const std::string& title) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rep.t.size(); ++i) rows.push_back({rep.t[i], rep.calE[i], rep.h1[i]});
  c.out.write_csv("curve.csv", {"t", "calE", "h1_norm"}, rows);
  c.out.write_plot("curve.gp", {title, "curve.csv", 1, {2, 3}, {"calE", "H1 norm"}, false, true,
                                {{format_double(rep.calE.front()) + "*exp(-" + format_double(rep.certificate.lambda) + "*x)",
                                  "certified rate"}}});
}

void confined_checks(Context& c, const ConfinedDecayReport& rep) {
  c.check_gt("lyapunov_certificate", rep.certificate.lambda, 0.0,
             "largest lambda with dE/dt + lambda E <= tol E along the run");
  c.check("guard", rep.guard_ok, rep.guard_low, "in [0.5, 2]", 0.5,
          "calE / weighted H1 in [" + fmt(rep.guard_low) + ", " + fmt(rep.guard_high) + "], band [0.5, 2]");
  c.check_gt("energy_fit_rate", rep.energy_fit.rate, 0.0, "exponential fit of calE");
  c.check_gt("h1_fit_rate", rep.h1_fit.rate, 0.0, "exponential fit of the H1 norm");
}

json decay_json(const ConfinedDecayReport& rep, const KappaSet& kap) {
  return {{"kappas", kappa_json(kap)},
          {"certificate", {{"lambda", rep.certificate.lambda}, {"worst_violation", rep.certificate.worst_violation},
                           {"steps", rep.certificate.steps}}},
          {"energy_fit", fit_json(rep.energy_fit)},
          {"h1_fit", fit_json(rep.h1_fit)},
          {"guard_low", rep.guard_low},
          {"guard_high", rep.guard_high},
          {"guard_ok", rep.guard_ok}};
}

void run_decay_confined_general(Context& c, ModelKind model) {
  if (c.p.get_int("d") != 1) throw DomainError("non-harmonic potentials are implemented for d = 1 only");
  if (model != ModelKind::FokkerPlanck) throw DomainError("non-harmonic potentials are implemented for the Fokker-Planck model only");
  const std::string pot = c.p.get_string("potential");
  std::function<double(double)> V;
  if (pot == "quartic") V = [](double x) { return 0.25 * x * x * x * x; };
  else V = [](double x) { return std::log(1.0 + x * x); };
  GridSpec grid;
  grid.R = c.p.get_opt_real("grid.R").value_or(pot == "quartic" ? 5.0 : 8.0);
  grid.points = static_cast<std::size_t>(c.p.get_int("grid.points"));
  const auto op = assemble_generalV_1d(sample_potential(V, grid), model, c.p.get_int("grid.velocity_modes"));
  const double t_max = c.p.get_real("t_max");
  const auto t = uniform_grid(t_max, c.p.get_real("dt"));
  const double t0 = c.p.get_opt_real("fit_t0").value_or(t_max / 3.0);
  const double t1 = c.p.get_opt_real("fit_t1").value_or(t_max);
  const auto u0 = generalV_smooth_state(op, c.seed);
  const auto tr = evolve_generalV(op, u0, t, c.p.get_real("dt"));
  const double tol = c.p.get_real("tolerance.lyapunov");
  ConfinedDecayReport rep;
  KappaSet kap;
  json search = json::array();
  if (any_kappa_override(c.p)) {
    kap = apply_kappa_overrides(default_confined_kappas(model), c.p);
    rep = generalV_decay_fit(op, tr, kap, t0, t1, tol);
  } else {
    const auto s = search_generalV_kappas(op, tr, t0, t1, tol);
    kap = s.kappas;
    rep = s.report;
    for (std::size_t k = 0; k < s.tried.size(); ++k)
      search.push_back({{"kappas", kappa_json(s.tried[k])}, {"lambda", s.tried_lambda[k]}});
  }
  write_confined_curves(c, rep, "confined decay, " + pot + " potential");
  json j = decay_json(rep, kap);
  j["potential"] = pot;
  j["conditions"] = {{"integrable", op.conditions.integrable}, {"confining", op.conditions.confining},
                     {"growth", op.conditions.growth}, {"c_delta", op.conditions.c_delta},
                     {"c3_finite", op.conditions.c3_finite}, {"pass", op.conditions.pass},
                     {"warning", op.conditions.warning}};
  j["boundary"] = {{"max_fraction", tr.max_boundary_fraction}, {"flagged", tr.flagged}};
  j["kappa_search"] = search;
  c.out.write_json("fit.json", j);
  confined_checks(c, rep);
  c.check_le("boundary_mass", tr.max_boundary_fraction, 1e-8, "fraction of the squared norm on the outer 5 nodes per side");
  if (!op.conditions.pass) std::cerr << "warning: " << op.conditions.warning << "\n";
}

void run_decay_confined(Context& c) {
  const ModelKind model = parse_model(c.p.get_string("model"));
  if (c.p.get_string("potential") != "harmonic") {
    run_decay_confined_general(c, model);
    return;
  }
  const int d = c.p.get_int("d");
  const PhaseSpaceBasis basis(d, c.p.get_int("N"));
  const auto op = assemble_generator(model, basis);
  Xoshiro256 rng(c.seed, 2);
  auto u0 = rng.normal_vector(basis.size());
  const int deg = c.p.get_int("data_degree");
  if (deg >= 0)
    for (std::size_t j = 0; j < basis.size(); ++j)
      if (basis.joint().at(j).degree() > deg) u0[j] = 0.0;
  u0 = normalized(project_admissible(op, u0));
  const double t_max = c.p.get_real("t_max");
  const double dt = c.p.get_real("dt");
  const auto t = uniform_grid(t_max, dt);
  const auto tr = evolve_confined(op, u0, t, dt);
  const KappaSet kap = apply_kappa_overrides(default_confined_kappas(model), c.p);
  const double t0 = c.p.get_opt_real("fit_t0").value_or(t_max / 3.0);
  const double t1 = c.p.get_opt_real("fit_t1").value_or(t_max);
  const auto rep = h1_decay_fit(basis, model, tr, kap, t0, t1, c.p.get_real("tolerance.lyapunov"));
  write_confined_curves(c, rep, "confined H1 decay, " + model_name(model) + ", d=" + std::to_string(d));
  json j = decay_json(rep, kap);
  j["model"] = model_name(model);
  j["basis_size"] = basis.size();
  j["integrator"] = {{"steps", tr.stats.steps}, {"max_defect", tr.stats.max_defect}, {"halvings", tr.stats.halvings},
                     {"max_norm_growth", tr.stats.max_norm_growth}};
  confined_checks(c, rep);
  if (c.p.get_bool("residuals")) {
    const auto fr = fluid_residuals(op, tr);
    json res;
    for (std::size_t e = 0; e < fr.table.names.size(); ++e) res[fr.table.names[e]] = fr.table.max_residual[e];
    json diag;
    for (std::size_t e = 0; e < fr.diagnostic_names.size(); ++e) diag[fr.diagnostic_names[e]] = fr.diagnostic_max[e];
    j["fluid_residuals"] = res;
    j["printed_form_diagnostics"] = diag;
    c.check_le("fluid_residual_max", fr.table.overall_max(), c.p.get_real("tolerance.residual"),
               "max over the fluid equations and steps");
    double mx = 0.0;
    for (const auto& u : tr.u)
      for (const auto& f : admissibility_functionals(basis, model))
        mx = std::max(mx, std::abs(dot(std::span<const double>(f.coefficients), std::span<const double>(u))));
    j["max_constrained_moment"] = mx;
    c.check_le("moments_conserved", mx, c.p.get_real("tolerance.moment"), "admissibility moments along the run");
  }
  c.out.write_json("fit.json", j);
}

// ---------------------------------------------------------------------------------------------
// conservation

std::vector<ParamSpec> conservation_params() {
  return {p_int("d", 2, 1, 3, "spatial dimension"),
          p_int("N", 4, 3, 12, "total degree"),
          p_real("dt", "2.5e-4", 1e-7, 1, "step for the oscillator runs"),
          p_real("t_max", "6.283185307179586", 1e-3, 1e3, "oscillator horizon"),
          p_int("sample_stride", 40, 1, 1000000, "steps between CSV rows of the oscillator run"),
          p_real("admissible_t_max", "10", 1e-3, 1e4, "horizon of the admissible run"),
          p_real("admissible_dt", "0.05", 1e-6, 10, "step of the admissible run"),
          p_real("tolerance.moment", "1e-10", 0, 1, "bound on moments for admissible data"),
          p_real("tolerance.ode", "1e-6", 0, 1, "oscillator match"),
          p_real("tolerance.ode_residual", "1e-7", 0, 1, "moment ODE residual")};
}

void run_conservation(Context& c) {
  const int d = c.p.get_int("d");
  const PhaseSpaceBasis basis(d, c.p.get_int("N"));
  const auto op = assemble_generator(ModelKind::BoltzmannSurrogate, basis);
  const auto funcs = conserved_moment_functionals(basis);
  std::vector<std::string> header{"t"};
  for (const auto& f : funcs) header.push_back(f.name);

  Xoshiro256 rng(c.seed, 3);
  const auto a0 = normalized(project_admissible(op, rng.normal_vector(basis.size())));
  const auto ta = evolve_confined(op, a0, uniform_grid(c.p.get_real("admissible_t_max"), c.p.get_real("admissible_dt")),
                                  c.p.get_real("admissible_dt"));
  std::vector<std::vector<double>> rows;
  double mx = 0.0;
  for (std::size_t n = 0; n < ta.t.size(); ++n) {
    auto m = conserved_moments(basis, ta.u[n]);
    for (double v : m) mx = std::max(mx, std::abs(v));
    m.insert(m.begin(), ta.t[n]);
    rows.push_back(std::move(m));
  }
  c.out.write_csv("moments.csv", header, rows);
  c.check_le("admissible_moments", mx, c.p.get_real("tolerance.moment"),
             std::to_string(funcs.size()) + " moments over the admissible run");

  auto index_of = [&](const std::string& name) {
    for (std::size_t k = 0; k < funcs.size(); ++k)
      if (funcs[k].name == name) return k;
    throw NumericError("moment " + name + " not found");
  };
  const std::size_t ix = index_of("x_0"), ixi = index_of("xi_0"), idot = index_of("x_dot_xi");
  const double dt = c.p.get_real("dt");
  const auto grid = uniform_grid(c.p.get_real("t_max"), dt);
  std::vector<int> e0(static_cast<std::size_t>(d), 0), e1 = e0;
  e1[0] = 1;
  std::vector<double> u0(basis.size(), 0.0);
  u0[basis.find(e0, e1)] = 1.0;
  const auto tr = evolve_confined(op, u0, grid, dt, false);
  std::vector<double> z0(basis.size(), 0.0);
  z0[basis.find(e1, e1)] = 1.0;
  const auto tz = evolve_confined(op, z0, grid, dt, false);

  double err_xi = 0.0, err_x = 0.0, err_z = 0.0;
  std::vector<std::vector<double>> osc;
  const auto stride = static_cast<std::size_t>(c.p.get_int("sample_stride"));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto m = conserved_moments(basis, tr.u[n]);
    const auto mz = conserved_moments(basis, tz.u[n]);
    const double t = grid[n];
    err_xi = std::max(err_xi, std::abs(m[ixi] - std::cos(t)));
    err_x = std::max(err_x, std::abs(m[ix] - std::sin(t)));
    err_z = std::max(err_z, std::abs(mz[idot] - std::cos(2.0 * t)));
    if (n % stride == 0 || n + 1 == grid.size())
      osc.push_back({t, m[ixi], std::cos(t), m[ix], std::sin(t), mz[idot], std::cos(2.0 * t)});
  }
  c.out.write_csv("oscillator.csv", {"t", "xi_0", "cos_t", "x_0", "sin_t", "x_dot_xi", "cos_2t"}, osc);
  PlotSpec ps{"conservation ODEs", "oscillator.csv", 1, {2, 4, 6}, {"xi_0", "x_0", "x.xi"}, false, false,
              {{"cos(x)", "cos t"}, {"sin(x)", "sin t"}, {"cos(2*x)", "cos 2t"}}};
  c.out.write_plot("oscillator.gp", ps);
  const double tol = c.p.get_real("tolerance.ode");
  c.check_le("xi_moment_cos", err_xi, tol, "max |((xi_1,u)) - cos t|");
  c.check_le("x_moment_sin", err_x, tol, "max |((x_1,u)) - sin t|");
  c.check_le("x_dot_xi_cos2t", err_z, tol, "max |((x.xi,u)) - cos 2t|");
  const double ode = std::max(moment_ode_residuals(basis, tr).overall_max(), moment_ode_residuals(basis, tz).overall_max());
  c.check_le("moment_ode_residual", ode, c.p.get_real("tolerance.ode_residual"), "residual of the moment ODE system");
  c.out.write_json("summary.json", {{"moment_count", funcs.size()}, {"max_admissible_moment", mx}, {"err_xi_cos", err_xi},
                                    {"err_x_sin", err_x}, {"err_xdotxi_cos2t", err_z}, {"ode_residual", ode}});
}

// ---------------------------------------------------------------------------------------------
// fluid-residuals

std::vector<ParamSpec> fluid_params() {
  return {p_model("boltzmann-surrogate"), p_int("d", 2, 1, 3, "spatial dimension"), p_int("N", 5, 3, 20, "total degree"),
          p_real("t_max", "2", 1e-3, 1e4, "horizon"), p_real("dt", "0.02", 1e-6, 10, "step and sample spacing"),
          p_real("tolerance.residual", "1e-7", 0, 1, "residual bound")};
}

void run_fluid_residuals(Context& c) {
  const ModelKind model = parse_model(c.p.get_string("model"));
  const PhaseSpaceBasis basis(c.p.get_int("d"), c.p.get_int("N"));
  const auto op = assemble_generator(model, basis);
  Xoshiro256 rng(c.seed, 4);
  const auto u0 = normalized(project_admissible(op, rng.normal_vector(basis.size())));
  const double dt = c.p.get_real("dt");
  const auto tr = evolve_confined(op, u0, uniform_grid(c.p.get_real("t_max"), dt), dt);
  const auto fr = fluid_residuals(op, tr);
  std::vector<std::string> header{"t_mid"};
  for (const auto& n : fr.table.names) header.push_back(n);
  std::vector<std::vector<double>> rows;
  for (std::size_t n = 0; n < fr.table.per_step.size(); ++n) {
    std::vector<double> row{0.5 * (tr.t[n] + tr.t[n + 1])};
    row.insert(row.end(), fr.table.per_step[n].begin(), fr.table.per_step[n].end());
    rows.push_back(std::move(row));
  }
  c.out.write_csv("residuals.csv", header, rows);
  json res, diag;
  for (std::size_t e = 0; e < fr.table.names.size(); ++e) res[fr.table.names[e]] = fr.table.max_residual[e];
  for (std::size_t e = 0; e < fr.diagnostic_names.size(); ++e) diag[fr.diagnostic_names[e]] = fr.diagnostic_max[e];
  c.out.write_json("summary.json", {{"model", model_name(model)}, {"max_residual", res}, {"printed_form_diagnostics", diag},
                                    {"integrator_max_defect", tr.stats.max_defect}});
  c.check_le("fluid_residual_max", fr.table.overall_max(), c.p.get_real("tolerance.residual"),
             "max over " + std::to_string(fr.table.names.size()) + " equations and all steps");
}

// ---------------------------------------------------------------------------------------------
// mode-certify

std::vector<ParamSpec> mode_params() {
  return concat(std::vector<ParamSpec>{
                    p_choice("model", "all", concat(kModels, {"all"}), "kinetic model or all"),
                    p_int("d", 1, 1, 3, "velocity dimension"), p_int("N", 6, 3, 30, "Hermite truncation"),
                    p_rlist("k_values", "0.25,0.5,1,2,4", 0, 100, "wavenumbers along the first axis"),
                    p_real("t_max", "10", 1e-3, 1e4, "horizon"), p_real("sample_dt", "0.01", 1e-5, 10, "output spacing"),
                    p_real("dt", "0.002", 1e-7, 10, "max step"),
                    p_choice("kappa_choice", "optimize", {"optimize", "default"}, "kappa selection"),
                    p_real("tolerance.slack", "1e-8", 0, 1, "slack in the discrete inequality")},
                kappa_params());
}

void run_mode_certify(Context& c) {
  std::vector<ModelKind> models;
  if (c.p.get_string("model") == "all") models = {ModelKind::Relaxation, ModelKind::FokkerPlanck, ModelKind::BoltzmannSurrogate};
  else models = {parse_model(c.p.get_string("model"))};
  const int d = c.p.get_int("d");
  const auto ks = c.p.get_real_list("k_values");
  const auto t = uniform_grid(c.p.get_real("t_max"), c.p.get_real("sample_dt"));
  std::vector<std::vector<std::string>> rows;
  json summary = json::array();
  for (ModelKind m : models) {
    const auto L = assemble_L(m, enumerate_basis(d, c.p.get_int("N")));
    std::vector<std::vector<double>> kvecs;
    for (double k : ks) {
      std::vector<double> kv(static_cast<std::size_t>(d), 0.0);
      kv[0] = k;
      kvecs.push_back(kv);
    }
    KappaSet kap = default_mode_kappas(m);
    std::string warning;
    if (c.p.get_string("kappa_choice") == "optimize") {
      const auto ch = choose_kappas(L, kvecs);
      kap = ch.kappas;
      warning = ch.warning;
    }
    kap = apply_kappa_overrides(kap, c.p);
    std::vector<Complex> u0(L.basis->size(), 0.0);
    u0[0] = 1.0;
    u0[L.basis->double_unit(0)] = 0.5;
    json per_k = json::array();
    for (const auto& kv : kvecs) {
      const auto traj = evolve_mode(L, assemble_symbol(L, kv), u0, t, c.p.get_real("dt"));
      const auto rep = verify_mode_inequality(L, kv, traj, kap, c.p.get_real("tolerance.slack"));
      const double mc = matrix_certificate(L, kv, kap);
      rows.push_back({model_name(m), format_double(kv[0]), format_double(rep.lambda), format_double(rep.lambda_closed),
                      format_double(mc), format_double(rep.rate), format_double(rep.worst_violation)});
      per_k.push_back({{"k", kv[0]}, {"lambda", rep.lambda}, {"matrix_certificate", mc}});
      c.check_gt("lambda_" + model_name(m) + "_k" + fmt(kv[0]), rep.lambda, 0.0,
                 "bisection-certified lambda in dE/dt + lambda |k|^2/(1+|k|^2) E <= 0");
    }
    summary.push_back({{"model", model_name(m)}, {"kappas", kappa_json(kap)}, {"warning", warning}, {"certificates", per_k}});
  }
  c.out.write_table("certificates.csv",
                    {"model", "k", "lambda", "lambda_closed", "matrix_certificate", "rate", "worst_violation"}, rows);
  c.out.write_json("summary.json", {{"d", d}, {"models", summary}});
}

// ---------------------------------------------------------------------------------------------
// coercivity

double abs_gauss_3d(double r) {
  if (r == 0.0) return 2.0 * std::sqrt(2.0 / std::numbers::pi);
  return (r + 1.0 / r) * std::erf(r / std::numbers::sqrt2) + std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * r * r);
}

std::vector<ParamSpec> coercivity_params() {
  return {p_int("d", 1, 1, 3, "velocity dimension"),
          p_ilist("N_values", "8,12,16", 3, 40, "truncation ladder"),
          p_real("tolerance.drift", "0.05", 0, 1, "relative change between the two largest truncations"),
          p_real("tolerance.nu0", "1e-6", 0, 1, "collision frequency at the origin against the closed form"),
          p_real("tolerance.nu_growth", "1e-3", 0, 1, "large-speed ratio nu / (2 pi |xi|) - 1"),
          p_real("nu_far", "50", 1, 1000, "speed for the growth check")};
}

void run_coercivity(Context& c) {
  const int d = c.p.get_int("d");
  auto ns = c.p.get_int_list("N_values");
  std::sort(ns.begin(), ns.end());
  std::vector<std::vector<double>> rows;
  const std::vector<ModelKind> models{ModelKind::Relaxation, ModelKind::FokkerPlanck, ModelKind::BoltzmannSurrogate};
  std::vector<std::vector<double>> per_model(3);
  std::vector<double> refined;
  for (int n : ns) {
    std::vector<double> row{static_cast<double>(n)};
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto L = assemble_L(models[m], enumerate_basis(d, n));
      const double v = coercivity_constant(L);
      per_model[m].push_back(v);
      row.push_back(v);
      if (models[m] == ModelKind::FokkerPlanck) {
        refined.push_back(fp_refined_coercivity(L));
        row.push_back(refined.back());
      }
    }
    rows.push_back(std::move(row));
  }
  c.out.write_csv("coercivity.csv", {"N", "relaxation", "fokker_planck", "fokker_planck_refined", "boltzmann_surrogate"}, rows);
  for (std::size_t m = 0; m < models.size(); ++m) {
    const double lo = *std::min_element(per_model[m].begin(), per_model[m].end());
    c.check_gt("lambda_" + model_name(models[m]), lo, 0.0, "smallest coercivity constant over the ladder");
    if (per_model[m].size() >= 2) {
      const double a = per_model[m][per_model[m].size() - 2], b = per_model[m].back();
      c.check_le("drift_" + model_name(models[m]), std::abs(a - b) / std::abs(b), c.p.get_real("tolerance.drift"),
                 "relative change between N = " + std::to_string(ns[ns.size() - 2]) + " and " + std::to_string(ns.back()));
    }
  }
  c.check_gt("lambda_fokker-planck_refined", *std::min_element(refined.begin(), refined.end()), 0.0,
             "coercivity with the momentum direction removed");

  const std::vector<double> zero{0.0, 0.0, 0.0};
  const auto nu0 = collision_frequency(zero, 3);
  const double oracle = 2.0 * std::numbers::pi * abs_gauss_3d(0.0);
  c.check_le("nu0_d3", std::abs(nu0.value - oracle), c.p.get_real("tolerance.nu0"),
             "nu(0) = " + format_double(nu0.value) + " vs closed form 4 sqrt(2 pi) = " + format_double(oracle));
  const double far = c.p.get_real("nu_far");
  const std::vector<double> xf{far, 0.0, 0.0};
  const double ratio = collision_frequency_nu(xf, 3) / (2.0 * std::numbers::pi * far);
  c.check_le("nu_growth_d3", std::abs(ratio - 1.0), c.p.get_real("tolerance.nu_growth"),
             "nu(|xi| = " + fmt(far) + ") / (2 pi |xi|)");
  std::vector<std::vector<double>> nu_rows;
  for (int i = 0; i <= 100; ++i) {
    const double r = 0.5 * i;
    const std::vector<double> x{r, 0.0, 0.0};
    nu_rows.push_back({r, collision_frequency_nu(x, 3), 2.0 * std::numbers::pi * abs_gauss_3d(r)});
  }
  c.out.write_csv("nu.csv", {"speed", "nu", "closed_form"}, nu_rows);
  c.out.write_json("summary.json", {{"d", d}, {"nu0", nu0.value}, {"nu0_closed_form", oracle}, {"nu_far_ratio", ratio}});
}

// ---------------------------------------------------------------------------------------------
// Functional inequalities

json constant_json(const ConstantReport& r) {
  return {{"name", r.name},        {"d", r.d},
          {"n_coarse", r.n_coarse}, {"n_fine", r.n_fine},
          {"lambda_coarse", r.lambda_coarse}, {"lambda_fine", r.lambda_fine},
          {"drift", r.drift},      {"ladder_n", r.ladder_n},
          {"ladder_lambda", r.ladder_lambda}, {"monotone", r.monotone},
          {"witness_degree", r.witness_degree}, {"constraint_residual", r.constraint_residual},
          {"min_form_eigenvalue", r.min_form_eigenvalue}, {"pass", r.pass},
          {"verdict", r.verdict}};
}

void write_witness(Context& c, const std::string& name, const FieldSpace& space, const std::vector<double>& w) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] == 0.0) continue;
    rows.push_back({std::to_string(k), std::to_string(space.component_of(k)),
                    multi_index_text(space.basis().at(space.basis_index_of(k))), std::to_string(space.degree_of(k)),
                    format_double(w[k])});
  }
  c.out.write_table(name, {"dof", "component", "alpha", "degree", "coefficient"}, rows);
}

std::vector<ParamSpec> poincare_params() {
  return {p_ilist("d_values", "1,2,3", 1, 4, "dimensions"), p_int("N", 20, 2, 40, "polynomial degree"),
          p_real("tolerance.lambda", "1e-10", 0, 1, "|lambda - 1|")};
}

void run_poincare(Context& c) {
  json reps = json::array();
  for (int d : c.p.get_int_list("d_values")) {
    int n = c.p.get_int("N");
    if (d >= 3) n = std::min(n, 14);
    const auto r = poincare_constant(d, n);
    reps.push_back(constant_json(r));
    c.check_le("lambda_d" + std::to_string(d), std::abs(r.lambda_fine - 1.0), c.p.get_real("tolerance.lambda"),
               "lambda = " + format_double(r.lambda_fine) + " at N = " + std::to_string(n));
    c.check("witness_degree_d" + std::to_string(d), r.witness_degree == 1, r.witness_degree, "==", 1);
    c.check("psd_d" + std::to_string(d), r.min_form_eigenvalue >= -1e-10, r.min_form_eigenvalue, ">=", -1e-10);
    write_witness(c, "witness_d" + std::to_string(d) + ".csv", FieldSpace(d, n, 1), r.witness);
  }
  c.out.write_json("constants.json", {{"reports", reps}});
}

double trial_field_quotient(int d) {
  const FieldSpace s(d, 2, d);
  const auto pair = korn_form(s);
  std::vector<double> u(s.size(), 0.0);
  std::vector<int> e0(static_cast<std::size_t>(d), 0), e1 = e0;
  e0[0] = 1;
  e1[1] = 1;
  u[s.dof(0, s.basis().find(e0))] = 1.0;
  u[s.dof(1, s.basis().find(e1))] = -1.0;
  for (const auto& con : pair.constraints)
    if (std::abs(dot(std::span<const double>(con), std::span<const double>(u))) > 1e-14)
      throw NumericError("trial field violates a constraint");
  return quadratic_value(pair.form, u) / quadratic_value(pair.mass, u);
}

std::vector<ParamSpec> korn_params() {
  return {p_ilist("d_values", "2,3", 2, 4, "dimensions"), p_int("N", 10, 2, 30, "coarse truncation"),
          p_int("N_fine", 14, 2, 30, "fine truncation"), p_real("tolerance.drift", "0.05", 0, 1, "relative drift"),
          p_int("identity_trials", 20, 1, 1000, "random fields for the identity checks"),
          p_real("tolerance.identity", "1e-10", 0, 1, "relative gap for the identity checks")};
}

void run_korn(Context& c) {
  json reps = json::array();
  const int n0 = c.p.get_int("N"), n1 = c.p.get_int("N_fine");
  for (int d : c.p.get_int_list("d_values")) {
    const std::string sd = "_d" + std::to_string(d);
    const auto r = korn_constant(d, n0, n1);
    reps.push_back(constant_json(r));
    const double trial = trial_field_quotient(d);
    c.check_gt("lambda" + sd, r.lambda_fine, 0.0, r.verdict);
    c.check_le("drift" + sd, r.drift, c.p.get_real("tolerance.drift"),
               "between N = " + std::to_string(n0) + " and " + std::to_string(n1));
    c.check_le("trial_bound" + sd, r.lambda_fine, trial + 1e-12, "Rayleigh quotient of (x1, -x2) is " + format_double(trial));
    c.check("monotone" + sd, r.monotone, r.lambda_fine, "non-increasing", r.lambda_coarse);
    c.check_le("constraint_residual" + sd, r.constraint_residual, 1e-12, "constraints on the witness");
    c.check("psd" + sd, r.min_form_eigenvalue >= -1e-10, r.min_form_eigenvalue, ">=", -1e-10);
    const auto k = kernel_witness_suite(d, n0);
    int worst = k.expected_dim;
    for (int v : k.nullspace_dim)
      if (v != k.expected_dim) worst = v;
    c.check("nullspace_dim" + sd, k.pass, worst, "==", k.expected_dim, "unconstrained nullspace at every N in [2, " + std::to_string(n0) + "]");
    const int trials = c.p.get_int("identity_trials");
    const double tol = c.p.get_real("tolerance.identity");
    c.check_le("substitution_identity" + sd, substitution_identity_gap(d, std::min(n0, d == 2 ? 8 : 5), c.seed, trials), tol,
               "ladder X-form against the Gaussian-measure form by quadrature");
    c.check_le("split_identity" + sd, korn_split_identity_gap(d, std::min(n0, 6), c.seed + 1, trials), tol,
               "2|grad b|^2 + 2|X* . b|^2 - 2(b, D2V b) against the form");
    write_witness(c, "witness" + sd + ".csv", FieldSpace(d, n1, d), r.witness);
  }
  c.out.write_json("constants.json", {{"reports", reps}});
}

std::vector<ParamSpec> korn_gradient_params() {
  return {p_ilist("d_values", "2", 2, 4, "dimensions"), p_int("N", 10, 2, 30, "coarse truncation"),
          p_int("N_fine", 14, 2, 30, "fine truncation"), p_real("tolerance.drift", "0.05", 0, 1, "relative drift"),
          p_real("upper_bound", "2", 0, 100, "upper bound on the constant")};
}

void run_korn_gradient(Context& c) {
  json reps = json::array();
  const int n0 = c.p.get_int("N"), n1 = c.p.get_int("N_fine");
  for (int d : c.p.get_int_list("d_values")) {
    const std::string sd = "_d" + std::to_string(d);
    const auto r = korn_gradient_constant(d, n0, n1);
    reps.push_back(constant_json(r));
    c.check_gt("lambda_positive" + sd, r.lambda_fine, 0.0, r.verdict);
    c.check_le("lambda_upper" + sd, r.lambda_fine, c.p.get_real("upper_bound"));
    c.check_le("drift" + sd, r.drift, c.p.get_real("tolerance.drift"),
               "between N = " + std::to_string(n0) + " and " + std::to_string(n1));
    c.check("monotone" + sd, r.monotone, r.lambda_fine, "non-increasing", r.lambda_coarse);
    const FieldSpace s(d, 2, d);
    const auto pair = korn_gradient_form(s);
    std::vector<double> u(s.size(), 0.0);
    for (int i = 0; i < d; ++i) u[s.dof(i, s.basis().unit(static_cast<std::size_t>(i)))] = 1.0;
    const double ratio = quadratic_value(pair.form, u) / quadratic_value(pair.mass, u);
    c.check("identity_field_ratio" + sd, ratio >= r.lambda_fine, ratio, ">=", r.lambda_fine, "b = x");
    write_witness(c, "witness" + sd + ".csv", FieldSpace(d, n1, d), r.witness);
  }
  c.out.write_json("constants.json", {{"reports", reps}});
}

std::vector<ParamSpec> kernel_params() {
  return {p_ilist("d_values", "2,3", 2, 4, "dimensions"), p_int("N_max", 8, 2, 20, "largest truncation")};
}

void run_kernel_witness(Context& c) {
  json reps = json::array();
  for (int d : c.p.get_int_list("d_values")) {
    const std::string sd = "_d" + std::to_string(d);
    const auto k = kernel_witness_suite(d, c.p.get_int("N_max"));
    for (std::size_t i = 0; i < k.ladder_n.size(); ++i)
      c.check("nullspace" + sd + "_N" + std::to_string(k.ladder_n[i]), k.nullspace_dim[i] == k.expected_dim,
              k.nullspace_dim[i], "==", k.expected_dim);
    c.check_le("witness_degree" + sd, k.max_witness_degree, 1, "largest degree in a null vector");
    c.check_le("witness_rayleigh" + sd, k.max_witness_rayleigh, 1e-10);
    const FieldSpace s(d, c.p.get_int("N_max"), d);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t w = 0; w < k.witnesses.size(); ++w)
      for (std::size_t j = 0; j < k.witnesses[w].size(); ++j)
        if (std::abs(k.witnesses[w][j]) > 1e-12)
          rows.push_back({std::to_string(w), std::to_string(s.component_of(j)),
                          multi_index_text(s.basis().at(s.basis_index_of(j))), format_double(k.witnesses[w][j])});
    c.out.write_table("kernel" + sd + ".csv", {"vector", "component", "alpha", "coefficient"}, rows);
    reps.push_back({{"d", d}, {"expected_dim", k.expected_dim}, {"ladder_n", k.ladder_n}, {"nullspace_dim", k.nullspace_dim},
                    {"max_witness_degree", k.max_witness_degree}, {"max_witness_rayleigh", k.max_witness_rayleigh}});
  }
  c.out.write_json("kernel.json", {{"reports", reps}});
}

// ---------------------------------------------------------------------------------------------
// commutators

std::vector<ParamSpec> commutator_params() {
  return {p_int("d", 2, 1, 3, "dimension for the transport identities"), p_int("N", 6, 2, 12, "total degree"),
          p_ilist("fp_d", "1,2", 1, 3, "dimensions for [L, Y] = Y"), p_int("fp_N", 8, 2, 20, "truncation for [L, Y] = Y"),
          p_ilist("surrogate_N", "6,8,10,12", 3, 24, "truncations for the surrogate commutator norm (d = 1)"),
          p_real("tolerance.identity", "1e-12", 0, 1, "entrywise identity tolerance"),
          p_real("tolerance.norm_change", "0.01", 0, 1, "relative change of the norm between the two largest N")};
}

double max_diff_on(const RealMatrix& a, const RealMatrix& b, const std::vector<std::size_t>& rows,
                   const std::vector<std::size_t>& cols) {
  double m = 0.0;
  for (std::size_t r : rows)
    for (std::size_t col : cols) m = std::max(m, std::abs(a(r, col) - b(r, col)));
  return m;
}

void run_commutators(Context& c) {
  const PhaseSpaceBasis b(c.p.get_int("d"), c.p.get_int("N"));
  const RealMatrix t = assemble_T_harmonic(b).to_dense();
  std::vector<std::size_t> interior;
  for (std::size_t j = 0; j < b.size(); ++j)
    if (b.joint().at(j).degree() <= b.max_degree() - 1) interior.push_back(j);
  const double tol = c.p.get_real("tolerance.identity");
  double tx = 0.0, ty = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(b.dim()); ++i) {
    const RealMatrix x = phase_X(b, i).to_dense();
    const RealMatrix y = phase_Y(b, i).to_dense();
    tx = std::max(tx, max_diff_on(matmul(t, x) - matmul(x, t), y, interior, interior));
    ty = std::max(ty, max_diff_on(matmul(t, y) - matmul(y, t), x * -1.0, interior, interior));
  }
  c.check_le("T_X_equals_Y", tx, tol, "max |([T, X_i] - Y_i)| on interior degrees");
  c.check_le("T_Y_equals_minus_X", ty, tol, "max |([T, Y_i] + X_i)| on interior degrees");

  double ly = 0.0;
  for (int d : c.p.get_int_list("fp_d")) {
    const auto vel = enumerate_basis(d, c.p.get_int("fp_N"));
    const auto l = assemble_L(ModelKind::FokkerPlanck, vel);
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
      const RealMatrix y = annihilation_matrix(*vel, i);
      ly = std::max(ly, (matmul(l.matrix, y) - matmul(y, l.matrix) - y).max_abs());
    }
  }
  c.check_le("fp_L_Y_equals_Y", ly, tol, "max |[L, Y_i] - Y_i| for Fokker-Planck");

  std::vector<std::vector<double>> rows;
  auto ns = c.p.get_int_list("surrogate_N");
  std::sort(ns.begin(), ns.end());
  for (int n : ns) {
    const auto vel = enumerate_basis(1, n);
    const auto l = assemble_L(ModelKind::BoltzmannSurrogate, vel);
    const RealMatrix ip = RealMatrix::identity(vel->size()) - projector_P(*vel, ModelKind::BoltzmannSurrogate);
    const RealMatrix y = annihilation_matrix(*vel, 0);
    const RealMatrix full = matmul(matmul(l.matrix, y) - matmul(y, l.matrix), ip);
    const std::size_t keep = vel->prefix_size(n - 1);
    RealMatrix r(keep, vel->size());
    for (std::size_t i = 0; i < keep; ++i)
      for (std::size_t j = 0; j < vel->size(); ++j) r(i, j) = full(i, j);
    rows.push_back({static_cast<double>(n), spectral_norm(r), spectral_norm(full)});
  }
  c.out.write_csv("surrogate_commutator.csv", {"N", "norm_interior_rows", "norm_all_rows"}, rows);
  if (rows.size() >= 2) {
    const double a = rows[rows.size() - 2][1], bb = rows.back()[1];
    c.check_le("surrogate_commutator_stable", std::abs(a - bb) / bb, c.p.get_real("tolerance.norm_change"),
               "||[L, Y](I-P)|| = " + format_double(bb) + " at N = " + std::to_string(ns.back()));
  }
  c.out.write_json("summary.json", {{"T_X", tx}, {"T_Y", ty}, {"fp_L_Y", ly}});
}

// ---------------------------------------------------------------------------------------------
// ladder-selftest

std::vector<ParamSpec> ladder_params() {
  return {p_ilist("d_values", "1,2,3", 1, 3, "dimensions"), p_int("N", 7, 2, 14, "total degree for the spatial identity"),
          p_int("trials", 100, 1, 100000, "random g per dimension"),
          p_ilist("fp_d", "1,2", 1, 3, "dimensions for the Fokker-Planck diagonal"),
          p_int("fp_N", 10, 2, 20, "truncation for the Fokker-Planck diagonal"),
          p_real("tolerance.identity", "1e-10", 0, 1, "relative tolerance for the spatial ladder identity"),
          p_real("tolerance.diagonal", "1e-12", 0, 1, "entrywise tolerance for the Fokker-Planck diagonal")};
}

void run_ladder_selftest(Context& c) {
  Xoshiro256 rng(c.seed, 5);
  std::vector<std::vector<double>> rows;
  double worst_id = 0.0, worst_adj = 0.0, worst_comm = 0.0;
  for (int d : c.p.get_int_list("d_values")) {
    const PhaseSpaceBasis pb(d, c.p.get_int("N"));
    double worst_d = 0.0;
    for (int trial = 0; trial < c.p.get_int("trials"); ++trial) {
      std::vector<double> g(pb.size(), 0.0);
      for (std::size_t j = 0; j < pb.size(); ++j)
        if (pb.velocity_of(j) == 0 && pb.spatial().at(pb.spatial_of(j)).degree() < pb.max_degree()) g[j] = rng.normal();
      double xs = 0.0, x = 0.0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
        const auto a = apply_Xstar(pb, i, g);
        if (a.dropped_mass != 0.0) throw NumericError("spatial creation left the truncation");
        const auto b = apply_X(pb, i, g);
        xs += std::pow(norm2(std::span<const double>(a.values)), 2);
        x += std::pow(norm2(std::span<const double>(b)), 2);
        const auto v = rng.normal_vector(pb.size());
        worst_adj = std::max(worst_adj, std::abs(dot(std::span<const double>(a.values), std::span<const double>(v)) -
                                                 dot(std::span<const double>(g), std::span<const double>(apply_X(pb, i, v)))));
      }
      const double gg = std::pow(norm2(std::span<const double>(g)), 2);
      worst_d = std::max(worst_d, std::abs(xs - x - d * gg) / std::max(1.0, xs));
    }
    worst_id = std::max(worst_id, worst_d);
    rows.push_back({static_cast<double>(d), worst_d});
    const auto vb = enumerate_basis(d, c.p.get_int("N"));
    std::vector<std::size_t> inner;
    for (std::size_t j = 0; j < vb->size(); ++j)
      if (vb->at(j).degree() < vb->max_degree()) inner.push_back(j);
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i)
      for (std::size_t k = 0; k < static_cast<std::size_t>(d); ++k) {
        const RealMatrix yi = annihilation_matrix(*vb, i), yk = creation_matrix(*vb, k);
        RealMatrix comm = matmul(yi, yk) - matmul(yk, yi);
        if (i == k)
          for (std::size_t j = 0; j < vb->size(); ++j) comm(j, j) -= 1.0;
        for (std::size_t r : inner)
          for (std::size_t col : inner) worst_comm = std::max(worst_comm, std::abs(comm(r, col)));
      }
  }
  c.out.write_csv("spatial_identity.csv", {"d", "max_relative_gap"}, rows);
  c.check_le("spatial_ladder_identity", worst_id, c.p.get_real("tolerance.identity"),
             "||X* g||^2 = ||X g||^2 + d ||g||^2 over " + std::to_string(c.p.get_int("trials")) + " random g per d");
  c.check_le("spatial_adjointness", worst_adj, 1e-10, "<X* g, v> = <g, X v>");
  c.check_le("velocity_ladder_commutator", worst_comm, 1e-12, "[Y_i, Y_k*] = delta_ik on interior degrees");

  double diag = 0.0;
  for (int d : c.p.get_int_list("fp_d")) {
    const auto vb = enumerate_basis(d, c.p.get_int("fp_N"));
    const auto l = assemble_L(ModelKind::FokkerPlanck, vb);
    for (std::size_t i = 0; i < vb->size(); ++i)
      for (std::size_t j = 0; j < vb->size(); ++j) {
        const double want = i == j ? -static_cast<double>(vb->at(i).degree()) : 0.0;
        diag = std::max(diag, std::abs(l.matrix(i, j) - want));
      }
  }
  c.check_le("fp_diagonal", diag, c.p.get_real("tolerance.diagonal"), "L phi_alpha = -|alpha| phi_alpha entrywise");
  c.out.write_json("summary.json", {{"spatial_identity", worst_id}, {"adjointness", worst_adj},
                                    {"velocity_commutator", worst_comm}, {"fp_diagonal", diag}});
}

// ---------------------------------------------------------------------------------------------
// Registry

struct Entry {
  ExperimentInfo info;
  std::function<void(Context&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e{
      {{"decay-torus", "exponential decay on the torus from admissible lattice data", torus_params()}, run_decay_torus},
      {{"decay-wholespace", "algebraic decay on R with sigma-index slopes", wholespace_params()}, run_decay_wholespace},
      {{"duhamel", "Duhamel source bound and its constant", duhamel_params()}, run_duhamel},
      {{"decay-confined", "H1 decay and Lyapunov certificate in a confining potential", confined_params()}, run_decay_confined},
      {{"conservation", "conserved moments and oscillator ODEs for the surrogate model", conservation_params()}, run_conservation},
      {{"fluid-residuals", "residuals of the fluid moment system", fluid_params()}, run_fluid_residuals},
      {{"mode-certify", "per-wavenumber hypocoercivity certificates", mode_params()}, run_mode_certify},
      {{"coercivity", "coercivity constants and the collision frequency", coercivity_params()}, run_coercivity},
      {{"poincare", "Poincare constant of the Gaussian measure", poincare_params()}, run_poincare},
      {{"korn", "Korn constant with mean and rotation constraints", korn_params()}, run_korn},
      {{"korn-gradient", "symmetrized against full gradient form", korn_gradient_params()}, run_korn_gradient},
      {{"kernel-witness", "rigid-motion nullspace of the symmetrized gradient", kernel_params()}, run_kernel_witness},
      {{"commutators", "ladder commutator identities", commutator_params()}, run_commutators},
      {{"ladder-selftest", "ladder operator identities and the Fokker-Planck diagonal", ladder_params()}, run_ladder_selftest},
  };
  return e;
}

const Entry& find_entry(const std::string& id) {
  for (const auto& e : entries())
    if (e.info.id == id) return e;
  std::string known;
  for (const auto& e : entries()) known += (known.empty() ? "" : ", ") + e.info.id;
  throw ConfigError("unknown experiment '" + id + "' (known: " + known + ")");
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& id) { return find_entry(id).info; }

RunManifest run_experiment(const std::string& id, const Config& cfg, const std::filesystem::path& out_dir,
                           std::optional<std::uint64_t> seed) {
  const Entry& entry = find_entry(id);
  if (const std::string* e = cfg.find("experiment"); e && *e != id)
    throw ConfigError("config is for experiment '" + *e + "' but '" + id + "' was requested");
  const Params params = validate(cfg, entry.info.params, {"experiment", "seed"});
  RunManifest m;
  m.experiment = id;
  m.seed = seed ? *seed : (cfg.find("seed") ? parse_seed(*cfg.find("seed")) : 1);
  m.config = params.to_json();
  m.config_text = cfg.text();
  m.dir = out_dir;

  OutputSink sink(out_dir);
  const auto start = std::chrono::steady_clock::now();
  Context ctx{params, sink, m.seed, m.checks};
  try {
    entry.run(ctx);
    m.status = std::all_of(m.checks.begin(), m.checks.end(), [](const CheckResult& c) { return c.pass; }) ? RunStatus::Pass
                                                                                                            : RunStatus::Fail;
  } catch (const ConfigError& e) {
    m.status = RunStatus::ConfigError;
    m.error = std::string("config: ") + e.what();
  } catch (const DomainError& e) {
    m.status = RunStatus::ConfigError;
    m.error = std::string("invalid input: ") + e.what();
  } catch (const GuardViolation& e) {
    m.status = RunStatus::NumericError;
    m.error = std::string("guard violation: ") + e.what();
  } catch (const NumericError& e) {
    m.status = RunStatus::NumericError;
    m.error = std::string("numeric: ") + e.what();
  } catch (const std::exception& e) {
    m.status = RunStatus::NumericError;
    m.error = std::string("error: ") + e.what();
  }
  if (m.status == RunStatus::ConfigError || m.status == RunStatus::NumericError) m.partial = true;
  if (m.checks.empty() && m.status == RunStatus::Pass) m.status = RunStatus::Fail;
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.files = sink.files();
  sink.write_json("manifest.json", m.to_json());
  return m;
}

bool SuiteReport::pass() const {
  return std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.second.pass(); });
}

RunStatus SuiteReport::status() const {
  RunStatus worst = RunStatus::Pass;
  for (const auto& [label, m] : runs) {
    (void)label;
    if (m.status == RunStatus::NumericError) return RunStatus::NumericError;
    if (m.status == RunStatus::ConfigError) worst = RunStatus::ConfigError;
    else if (m.status == RunStatus::Fail && worst == RunStatus::Pass) worst = RunStatus::Fail;
  }
  return worst;
}

std::vector<SuiteMember> suite_members(const std::string& profile) {
  if (profile == "smoke") {
    return {
        {"decay-torus", "decay-torus", "model = fokker-planck\nK = 4\nN = 8\nt_max = 10\n"},
        {"decay-wholespace", "decay-wholespace", "N = 8\nm = 0\nt_max = 100\nfit_t0 = 30\nfit_t1 = 100\n[tolerance]\nslope = 0.3\n"},
        {"duhamel", "duhamel", "N = 6\nt_max = 6\n"},
        {"decay-confined", "decay-confined", "model = relaxation\nd = 1\nN = 8\nt_max = 15\nfit_t0 = 5\n"},
        {"conservation", "conservation", "d = 1\nN = 4\nt_max = 3.14159265358979\nadmissible_t_max = 2\n"},
        {"fluid-residuals", "fluid-residuals", "d = 1\nN = 6\nt_max = 1\n"},
        {"mode-certify", "mode-certify", "N = 4\nt_max = 5\n"},
        {"coercivity", "coercivity", "N_values = 6,8\n[tolerance]\ndrift = 0.5\n"},
        {"poincare", "poincare", "N = 8\n"},
        {"korn", "korn", "d_values = 2\nN = 5\nN_fine = 6\nidentity_trials = 3\n"},
        {"korn-gradient", "korn-gradient", "N = 5\nN_fine = 6\n"},
        {"kernel-witness", "kernel-witness", "N_max = 4\n"},
        {"commutators", "commutators", "N = 4\nsurrogate_N = 6,8\n[tolerance]\nnorm_change = 0.05\n"},
        {"ladder-selftest", "ladder-selftest", "N = 5\ntrials = 10\n"},
    };
  }
  if (profile == "acceptance") {
    return {
        {"wholespace-relaxation", "decay-wholespace",
         "model = relaxation\nN = 16\nm = 0,1\nt_max = 500\nfit_t0 = 150\nfit_t1 = 500\n[tolerance]\nslope = 0.15\n"},
        {"torus-relaxation", "decay-torus",
         "model = relaxation\nd = 1\nK = 8\nN = 16\n[tolerance]\nmin_rate = 1e-3\nmonotone = 1e-8\n"},
        {"torus-fokker-planck", "decay-torus",
         "model = fokker-planck\nd = 1\nK = 8\nN = 16\n[tolerance]\nmin_rate = 1e-3\nmonotone = 1e-8\n"},
        {"torus-boltzmann", "decay-torus",
         "model = boltzmann-surrogate\nd = 1\nK = 8\nN = 16\n[tolerance]\nmin_rate = 1e-3\nmonotone = 1e-8\n"},
        {"mode-certify", "mode-certify", "model = all\nd = 1\nN = 6\nk_values = 0.25,0.5,1,2,4\n"},
        {"ladder-selftest", "ladder-selftest",
         "d_values = 1,2,3\nN = 7\ntrials = 100\nfp_d = 1,2\nfp_N = 10\n[tolerance]\nidentity = 1e-10\ndiagonal = 1e-12\n"},
        {"coercivity", "coercivity", "d = 1\nN_values = 8,12,16\n[tolerance]\nnu0 = 1e-6\nnu_growth = 1e-3\n"},
        {"confined-relaxation", "decay-confined",
         "model = relaxation\nd = 1\nN = 16\nt_max = 30\ndt = 0.05\n[tolerance]\nlyapunov = 1e-8\nresidual = 1e-7\n"},
        {"confined-fokker-planck", "decay-confined",
         "model = fokker-planck\nd = 1\nN = 16\nt_max = 30\ndt = 0.05\n[tolerance]\nlyapunov = 1e-8\nresidual = 1e-7\n"},
        {"confined-boltzmann-d3", "decay-confined",
         "model = boltzmann-surrogate\nd = 3\nN = 8\nt_max = 30\ndt = 0.05\n[tolerance]\nlyapunov = 1e-8\nresidual = 1e-7\n"},
        {"conservation", "conservation", "d = 3\nN = 4\n[tolerance]\nmoment = 1e-10\node = 1e-6\n"},
        {"commutators", "commutators", "d = 2\nN = 6\nfp_d = 1,2\nfp_N = 8\n[tolerance]\nidentity = 1e-12\n"},
        {"poincare", "poincare", "d_values = 1,2,3\nN = 20\n[tolerance]\nlambda = 1e-10\n"},
        {"korn", "korn", "d_values = 2,3\nN = 10\nN_fine = 14\n[tolerance]\ndrift = 0.05\n"},
        {"kernel-witness", "kernel-witness", "d_values = 2,3\nN_max = 8\n"},
        {"korn-gradient", "korn-gradient", "d_values = 2\nN = 10\nN_fine = 14\nupper_bound = 2\n[tolerance]\ndrift = 0.05\n"},
    };
  }
  if (profile == "extended") {
    return {
        {"confined-boltzmann-d3-long", "decay-confined", "model = boltzmann-surrogate\nd = 3\nN = 8\nt_max = 60\ndt = 0.05\n"},
        {"confined-boltzmann-d2-N10", "decay-confined", "model = boltzmann-surrogate\nd = 2\nN = 10\nt_max = 40\ndt = 0.05\n"},
        {"confined-relaxation-N20", "decay-confined", "model = relaxation\nd = 1\nN = 20\nt_max = 30\n"},
        {"confined-quartic", "decay-confined", "model = fokker-planck\npotential = quartic\nt_max = 20\n"},
        {"wholespace-boltzmann", "decay-wholespace",
         "model = boltzmann-surrogate\nN = 12\nk_max = 6\nk_step = 0.004\nm = 0,1\n"},
        {"duhamel", "duhamel", "N = 8\nt_max = 20\n"},
        {"coercivity-ladder", "coercivity", "d = 1\nN_values = 8,12,16,20,24\n"},
        {"mode-certify-d2", "mode-certify", "d = 2\nN = 5\n"},
        {"korn-ladder", "korn", "d_values = 2,3\nN = 14\nN_fine = 18\n"},
        {"korn-gradient-ladder", "korn-gradient", "d_values = 2,3\nN = 14\nN_fine = 18\n"},
        {"kernel-witness", "kernel-witness", "d_values = 2,3,4\nN_max = 8\n"},
        {"commutators-ladder", "commutators", "surrogate_N = 8,12,16,20\n"},
    };
  }
  throw ConfigError("unknown suite profile '" + profile + "' (known: smoke, acceptance, extended)");
}

SuiteReport run_suite(const std::string& profile, const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed,
                      bool verbose) {
  const auto members = suite_members(profile);
  SuiteReport rep;
  rep.profile = profile;
  const auto start = std::chrono::steady_clock::now();
  json runs = json::array();
  for (const auto& mem : members) {
    const Config cfg = Config::parse(mem.config_text, profile + "/" + mem.label);
    auto m = run_experiment(mem.experiment, cfg, out_dir / mem.label, seed);
    if (verbose)
      std::cerr << "[" << status_name(m.status) << "] " << mem.label << " (" << fmt(m.wall_seconds) << " s)"
                << (m.error.empty() ? "" : ": " + m.error) << "\n";
    runs.push_back({{"label", mem.label}, {"experiment", mem.experiment}, {"status", status_name(m.status)},
                    {"wall_seconds", m.wall_seconds}, {"manifest", mem.label + "/manifest.json"}});
    rep.runs.emplace_back(mem.label, std::move(m));
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  OutputSink sink(out_dir);
  sink.write_json("suite.json", {{"profile", profile}, {"status", status_name(rep.status())},
                                 {"wall_seconds", rep.wall_seconds}, {"runs", runs}});
  return rep;
}

}  // namespace hypoflow
