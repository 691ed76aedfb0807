#include "cli_app.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "seplab/map_file.hpp"
#include "seplab/pipeline.hpp"

namespace seplab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string map = "henon13";
  std::string command;
  std::string eps_text;
  std::vector<std::string> eps;
  long digits = 0;
  bool digits_from_env = false;
  int order = 0;
  std::string out = "seplab_out";
  int jobs = 1;
  double lambda_cap = 4.0;
  int fit_order = 3;
  std::string input;
  std::string nu;

  // Everything that affects numeric output (not jobs, not the output path).
  json echo() const {
    return json{{"map", map},     {"command", command},       {"eps", eps},
                {"digits", digits}, {"order", order},         {"lambda_cap", lambda_cap},
                {"fit_order", fit_order}, {"input", input},   {"nu", nu}};
  }
  std::string hash() const { return hex64(fnv1a64(echo().dump())); }
};

PolyMapFamily load_family(const std::string& source) {
  if (fs::exists(source) && fs::is_regular_file(source)) return load_map_file(source);
  try {
    return builtin_family(source);
  } catch (const MapError& e) {
    throw UsageError(e.what());
  }
}

class Output {
 public:
  Output(const RunConfig& cfg) : cfg_(cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    std::ofstream probe(fs::path(cfg.out) / ".write_test");
    if (!probe) throw UsageError("output directory is not writable: " + cfg.out);
    probe.close();
    fs::remove(fs::path(cfg.out) / ".write_test", ec);
  }
  void write(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(cfg_.out) / name;
    std::ofstream o(p, std::ios::binary);
    o << content;
    if (!o) throw std::runtime_error("cannot write " + p.string());
    files_.push_back(name);
    if (p.extension() == ".csv") {
      json side{{"file", name}, {"config_hash", cfg_.hash()}, {"command", cfg_.command}};
      std::ofstream s(fs::path(cfg_.out) / (name + ".manifest.json"), std::ios::binary);
      s << side.dump(2) << '\n';
    }
  }
  void manifest(const json& extra, double seconds) {
    json m{{"config", cfg_.echo()},
           {"config_hash", cfg_.hash()},
           {"jobs", cfg_.jobs},
           {"versions", {{"seplab", kVersion}, {"mpfr", mpfr_get_version()}, {"gmp", gmp_version}}},
           {"files", files_},
           {"wall_seconds", seconds}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream o(fs::path(cfg_.out) / "manifest.json", std::ios::binary);
    o << m.dump(2) << '\n';
  }

 private:
  const RunConfig& cfg_;
  std::vector<std::string> files_;
};

long digits_or(const RunConfig& cfg, long fallback) { return cfg.digits > 0 ? cfg.digits : fallback; }

// ------------------------------------------------------------- commands

int cmd_normal_form(const RunConfig& cfg, std::ostream& out, json& extra) {
  PolyMapFamily f = load_family(cfg.map);
  const int N = cfg.order > 0 ? cfg.order : 8;
  PrecisionContext ctx = PrecisionContext::make(digits_or(cfg, 60));
  ContextScope scope(ctx);
  NormalFormData nf = normalize(f, N, ctx);
  Output o(cfg);
  o.write("normal_form.csv", coefficient_csv(nf));
  out << "a01 = " << nf.a01.str(30) << "\nb00 = " << nf.b00.str(30) << '\n';
  extra["normal_form"] = {{"order", N}, {"max_inconsistency", nf.max_inconsistency.str(6)}};
  o.manifest(extra, 0);
  return kOk;
}

int cmd_formal_series(const RunConfig& cfg, std::ostream& out, json& extra) {
  PolyMapFamily f = load_family(cfg.map);
  const int n_max = cfg.order > 0 ? cfg.order : 6;
  PrecisionContext ctx = PrecisionContext::make(digits_or(cfg, 60));
  ContextScope scope(ctx);
  const int N = n_max + 1;
  NormalFormData nf = normalize(f, N, ctx);
  FormalSeparatrix sep = solve_formal_separatrix(nf, n_max, 1);
  auto F = normal_third_iterate(nf, N);
  const Real tol = ctx.residual_tol();
  std::ostringstream res;
  res << "n,mu_n,hamilton_valuation,map_valuation,expected\n";
  bool good = true;
  for (int n = 1; n <= n_max; ++n) {
    int hv = residual_valuation(hamilton_residual(sep, n, n + 2), tol);
    int mv = residual_valuation(map_residual(F, sep, n, std::min(n + 2, N)), tol);
    res << n << ',' << sep.mu[n].str(ctx.digits) << ',' << hv << ',' << mv << ',' << n + 2 << '\n';
    good = good && hv == n + 2 && mv == n + 2;
  }
  Output o(cfg);
  o.write("formal_series.csv", formal_series_csv(sep));
  o.write("formal_residuals.csv", res.str());
  out << "mu_1 = " << sep.mu[1].str(30) << '\n'
      << (good ? "residual valuations are n+2 for every order\n" : "residual valuation mismatch\n");
  for (const auto& v : sep.degree_violations) out << "degree bound violated: " << v << '\n';
  extra["formal_series"] = {{"order", n_max}, {"valuations_ok", good}};
  o.manifest(extra, 0);
  return good ? kOk : kComputationFailure;
}

int cmd_manifold_sample(const RunConfig& cfg, std::ostream& out, json& extra) {
  if (cfg.eps.empty()) throw UsageError("manifold-sample needs --eps");
  PolyMapFamily f = load_family(cfg.map);
  const std::string e = cfg.eps.front();
  PrecisionContext ctx = PrecisionContext::make(digits_or(cfg, PrecisionContext::digits_for_epsilon(std::stod(e))));
  ContextScope scope(ctx);
  ManifoldPair mp = build_manifold_pair(f, Real(e), ctx);
  std::vector<Complex> taus;
  for (int k = -24; k <= 24; ++k) taus.emplace_back(Real::ratio(k, 8));
  Output o(cfg);
  o.write("manifold_minus.csv", manifold_samples_csv(mp.W_minus, taus));
  o.write("manifold_plus.csv", manifold_samples_csv(mp.W_plus, taus));
  ContinuationPath path = continue_to_singularity(mp.W_minus, Real(0), Real(cfg.lambda_cap), 33, Real(cfg.lambda_cap));
  std::ostringstream ps;
  ps << "tau_re,tau_im,x_re,x_im,y_re,y_im,step_residual\n";
  for (const auto& s : path.samples)
    ps << s.tau.re.str(ctx.digits) << ',' << s.tau.im.str(ctx.digits) << ',' << s.value[0].re.str(ctx.digits) << ','
       << s.value[0].im.str(ctx.digits) << ',' << s.value[1].re.str(ctx.digits) << ','
       << s.value[1].im.str(ctx.digits) << ',' << s.step_residual.str(6) << '\n';
  o.write("continuation_minus.csv", ps.str());
  out << "mu = " << mp.mu.str(30) << "\nlambda = " << mp.lambda.str(30) << '\n';
  extra["manifold"] = {{"epsilon", e}, {"digits", ctx.digits}};
  o.manifest(extra, 0);
  return kOk;
}

StokesResult run_stokes(const RunConfig& cfg, long* digits_used) {
  PolyMapFamily f = load_family(cfg.map);
  PrecisionContext ctx = PrecisionContext::make(digits_or(cfg, 80));
  *digits_used = ctx.digits;
  return stokes_constant_resonant(f, default_stokes_depths(), ctx);
}

int cmd_stokes(const RunConfig& cfg, std::ostream& out, json& extra) {
  long d = 0;
  StokesResult st = run_stokes(cfg, &d);
  Output o(cfg);
  o.write("stokes.csv", stokes_csv(st, d));
  ContextScope scope(PrecisionContext::make(d));
  out << "4 pi |theta0| = " << (abs(st.theta) * const_pi() * 4).str(30) << '\n';
  extra["stokes"] = {{"digits", d}, {"error_estimate", st.error_estimate.str(6)}};
  o.manifest(extra, 0);
  return kOk;
}

void write_fit_outputs(Output& o, const std::vector<SplittingReport>& reports, const StokesResult& st,
                       long stokes_digits, int M, json& extra, std::ostream& out) {
  long digits = stokes_digits;
  for (const auto& r : reports) digits = std::max(digits, r.digits);
  ContextScope scope(PrecisionContext::make(digits));
  const Real four_pi = abs(st.theta) * const_pi() * 4;
  const int m = std::min<int>(M, static_cast<int>(reports.size()) - 3);
  SweepFit fit = fit_sweep(reports, std::max(m, 0), four_pi, digits);
  o.write("fit.csv", fit_csv(fit, digits));
  if (fit.ok) {
    out << "vartheta_0 = " << fit.asymptotic.vartheta[0].str(20) << "  (4 pi |theta0| = " << four_pi.str(20)
        << ", relative difference " << fit.relative_difference.str(4) << ")\n";
  } else {
    out << "fit skipped: " << fit.error << '\n';
  }
  extra["fit"] = {{"ok", fit.ok}, {"M", m}};
  // Plots.
  PlotSpec p1{"log|Omega| against 1/eps", "1/eps", "log|Omega|", {}, false, 0, ""};
  PlotSeries pts{"computed", {}, {}, false}, line{"fit", {}, {}, true};
  PlotSpec p2{"|Omega| exp(2 pi^2/eps) against eps", "eps", "scaled", {}, true, four_pi.to_double(),
              "4 pi |theta0|"};
  PlotSeries sc{"scaled", {}, {}, false}, poly{"fit", {}, {}, true};
  for (const auto& r : reports) {
    pts.x.push_back(1.0 / r.epsilon.to_double());
    pts.y.push_back(log(abs(r.omega[0])).to_double());
    sc.x.push_back(r.epsilon.to_double());
    sc.y.push_back(r.scaled.to_double());
  }
  if (fit.ok && !reports.empty()) {
    double lo = 1e300, hi = -1e300;
    for (double x : pts.x) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const auto& c = fit.exponent.coeffs;
    for (int k = 0; k <= 40; ++k) {
      double ie = lo + (hi - lo) * k / 40.0;
      double e = 1.0 / ie;
      line.x.push_back(ie);
      line.y.push_back(c[0].to_double() + c[1].to_double() * ie + c[2].to_double() * e);
      const double ev = (1.0 / lo) * k / 40.0;  // 0 .. largest eps
      double acc = 0, p = 1;
      for (const auto& v : fit.asymptotic.vartheta) {
        acc += v.to_double() * p;
        p *= ev;
      }
      poly.x.push_back(ev);
      poly.y.push_back(acc);
    }
  }
  p1.series = {pts, line};
  p2.series = {sc, poly};
  o.write("omega_exponent.svg", svg_plot(p1));
  o.write("scaled_limit.svg", svg_plot(p2));
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err, json& extra) {
  if (cfg.eps.empty()) throw UsageError("sweep needs a non-empty --eps grid");
  PolyMapFamily f = load_family(cfg.map);
  SweepOptions so;
  so.digits = cfg.digits;
  so.jobs = cfg.jobs;
  so.lambda_cap = cfg.lambda_cap;
  if (!cfg.nu.empty()) so.splitting.nu = Real(cfg.nu);
  Output o(cfg);
  auto entries = run_sweep(f, cfg.eps, so);
  o.write("reports.csv", reports_csv(entries));
  std::vector<SplittingReport> reports;
  json failures = json::array();
  for (const auto& e : entries) {
    if (e.ok) {
      reports.push_back(e.report);
    } else {
      err << "eps = " << e.eps_text << ": " << e.error << '\n';
      failures.push_back({{"epsilon", e.eps_text}, {"error", e.error}});
    }
  }
  long sd = 0;
  StokesResult st = run_stokes(cfg, &sd);
  o.write("stokes.csv", stokes_csv(st, sd));
  write_fit_outputs(o, reports, st, sd, cfg.fit_order, extra, out);
  json times = json::object();
  for (const auto& e : entries)
    if (e.ok) times[e.eps_text] = e.report.seconds;
  extra["report_seconds"] = times;
  extra["failures"] = failures;
  out << reports.size() << " of " << entries.size() << " epsilon values computed\n";
  o.manifest(extra, 0);
  return failures.empty() ? kOk : kComputationFailure;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, json& extra) {
  const std::string path = cfg.input.empty() ? (fs::path(cfg.out) / "reports.csv").string() : cfg.input;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read reports file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<SplittingReport> reports;
  try {
    reports = parse_reports_csv(buf.str());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  long sd = 0;
  StokesResult st = run_stokes(cfg, &sd);
  Output o(cfg);
  o.write("stokes.csv", stokes_csv(st, sd));
  write_fit_outputs(o, reports, st, sd, cfg.fit_order, extra, out);
  o.manifest(extra, 0);
  return kOk;
}

void validate(RunConfig& cfg) {
  static const std::vector<std::string> commands = {"normal-form", "formal-series", "manifold-sample",
                                                    "stokes",      "sweep",         "fit"};
  if (cfg.command.empty()) throw UsageError("missing --command (one of normal-form, formal-series, manifold-sample, stokes, sweep, fit)");
  if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
    throw UsageError("unknown command '" + cfg.command + "'");
  try {
    cfg.eps = parse_eps_list(cfg.eps_text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--eps: ") + e.what());
  }
  for (size_t i = 1; i < cfg.eps.size(); ++i)
    if (!(std::stod(cfg.eps[i]) < std::stod(cfg.eps[i - 1])))
      throw UsageError("--eps grid must be strictly decreasing");
  if (cfg.digits != 0 && !cfg.eps.empty() && (cfg.command == "sweep" || cfg.command == "manifold-sample")) {
    const long need = PrecisionContext::digits_for_epsilon(std::stod(cfg.eps.back()));
    if (cfg.digits < need)
      throw UsageError("--digits " + std::to_string(cfg.digits) + " is below the " + std::to_string(need) +
                       " digits required at eps = " + cfg.eps.back());
  }
  if (cfg.digits != 0 && cfg.digits < 30) throw UsageError("--digits must be at least 30");
  if (cfg.jobs < 1) throw UsageError("--jobs must be positive");
  if (!(cfg.lambda_cap > 2)) throw UsageError("--lambda-cap must exceed 2");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Exponentially small separatrix splitting near a 1:3 resonance"};
  app.add_option("--map", cfg.map, "builtin family name or map file")->capture_default_str();
  app.add_option("--command,command", cfg.command,
                 "normal-form | formal-series | manifold-sample | stokes | sweep | fit");
  app.add_option("--eps", cfg.eps_text, "comma-separated epsilon grid, strictly decreasing");
  app.add_option("--digits", cfg.digits, "decimal digits (default: per-epsilon policy, or SEPLAB_DIGITS)");
  app.add_option("--order", cfg.order, "series order (normal form or formal separatrix)");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "worker threads for the sweep")->capture_default_str();
  app.add_option("--lambda-cap", cfg.lambda_cap, "minimum distance of complex samples from the singularity")
      ->capture_default_str();
  app.add_option("--fit-order", cfg.fit_order, "number M of correction terms in the epsilon fit")
      ->capture_default_str();
  app.add_option("--input", cfg.input, "reports.csv for the fit command");
  app.add_option("--nu", cfg.nu, "Fourier line depth (overrides the default)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (cfg.digits == 0) {
    if (const char* env = std::getenv("SEPLAB_DIGITS")) {
      try {
        cfg.digits = std::stol(env);
        cfg.digits_from_env = true;
      } catch (const std::exception&) {
        err << "SEPLAB_DIGITS is not an integer: " << env << '\n';
        return kUsage;
      }
    }
  }
  auto t0 = std::chrono::steady_clock::now();
  try {
    validate(cfg);
    json extra = json::object();
    int code = kOk;
    if (cfg.command == "normal-form")
      code = cmd_normal_form(cfg, out, extra);
    else if (cfg.command == "formal-series")
      code = cmd_formal_series(cfg, out, extra);
    else if (cfg.command == "manifold-sample")
      code = cmd_manifold_sample(cfg, out, extra);
    else if (cfg.command == "stokes")
      code = cmd_stokes(cfg, out, extra);
    else if (cfg.command == "sweep")
      code = cmd_sweep(cfg, out, err, extra);
    else
      code = cmd_fit(cfg, out, extra);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Rewrite the manifest with the total wall time.
    std::ifstream mi(fs::path(cfg.out) / "manifest.json");
    if (mi) {
      json m = json::parse(mi, nullptr, false);
      mi.close();
      if (!m.is_discarded()) {
        m["wall_seconds"] = secs;
        std::ofstream mo(fs::path(cfg.out) / "manifest.json", std::ios::binary);
        mo << m.dump(2) << '\n';
      }
    }
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputationFailure;
  }
}

}  // namespace seplab::cli
