// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.  Detail lines are indented under their criterion.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "cli_app.hpp"
#include "seplab/map_file.hpp"
#include "seplab/pipeline.hpp"

using namespace seplab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const Real& x, int d = 6) { return x.str(d); }
std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Real rel_diff(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

const std::vector<std::string> kExponentGrid{"0.5", "0.4", "0.3", "0.25", "0.2"};
// Small-epsilon grid for the extrapolation to eps = 0.
const std::vector<std::string> kDenseGrid{"0.1",   "0.09", "0.08",  "0.075", "0.07", "0.065",
                                          "0.06", "0.055", "0.05", "0.045", "0.04"};

// Shared computations.
std::vector<SweepEntry> g_exponent_sweep, g_dense_sweep;
StokesResult g_stokes;
const long kStokesDigits = 80;

std::vector<SweepEntry>& exponent_sweep() {
  if (g_exponent_sweep.empty()) {
    SweepOptions o;
    o.splitting.quasi_periodicity = true;
    g_exponent_sweep = run_sweep(builtin_family("henon13"), kExponentGrid, o);
  }
  return g_exponent_sweep;
}

std::vector<SweepEntry>& dense_sweep() {
  if (g_dense_sweep.empty()) {
    SweepOptions o;
    o.splitting.lobe = false;
    o.splitting.fourier = false;
    g_dense_sweep = run_sweep(builtin_family("henon13"), kDenseGrid, o);
  }
  return g_dense_sweep;
}

const StokesResult& stokes() {
  if (g_stokes.estimates.empty())
    g_stokes = stokes_constant_resonant(builtin_family("henon13"), default_stokes_depths(),
                                        PrecisionContext::make(kStokesDigits));
  return g_stokes;
}

bool all_ok(const std::vector<SweepEntry>& v, Outcome& o) {
  bool ok = true;
  for (const auto& e : v)
    if (!e.ok) {
      o.details.push_back("eps = " + e.eps_text + " failed: " + e.error);
      ok = false;
    }
  return ok;
}

// ------------------------------------------------------------------ 1
Outcome criterion1() {
  Outcome o;
  auto t0 = Clock::now();
  const int N = 12;
  auto ctx = PrecisionContext::make(120);
  ContextScope s(ctx);
  NormalFormData nf = normalize(builtin_family("henon13"), N, ctx);
  FormalSeparatrix fsx = solve_formal_separatrix(nf, N - 1, 1);
  auto F = normal_third_iterate(nf, N);
  const Real tol = ctx.residual_tol();
  bool ok = fsx.degree_violations.empty();
  std::string bad;
  for (int n = 1; n <= N - 1; ++n) {
    const int hv = residual_valuation(hamilton_residual(fsx, n, n + 2), tol);
    const int top = std::min(n + 2, N);
    const int mv = residual_valuation(map_residual(F, fsx, n, top), tol);
    // first nonzero power exactly n + 2; for the map residual only powers up
    // to N are computed, so n + 2 > N requires all of them to vanish
    const bool good = hv == n + 2 && mv == n + 2;
    if (!good) bad += " n=" + std::to_string(n) + "(H " + std::to_string(hv) + ", F " + std::to_string(mv) + ")";
    ok = ok && good;
  }
  const double secs = since(t0);
  ok = ok && secs <= 60;
  o.pass = ok;
  o.summary = "formal-series residuals vanish below eps^(n+2) for n = 1..11 at N = 12, 120 digits, tol 1e-110";
  o.details.push_back("runtime " + fmt(secs) + " s (limit 60 s)" + (bad.empty() ? "" : "; mismatches:" + bad));
  return o;
}

// ------------------------------------------------------------------ 2
Outcome criterion2() {
  Outcome o;
  auto t0 = Clock::now();
  auto ctx = PrecisionContext::make(250);
  ContextScope s(ctx);
  ManifoldPair mp = build_manifold_pair(builtin_family("henon13"), Real("0.3"), ctx);
  const Real tol = pow10(-(ctx.digits - 10));
  const Real top = const_pi() / mp.epsilon - Real(4);
  Real worst(0);
  int count = 0;
  for (int i = 0; i < 100; ++i) {
    // 40 real samples on [-3, 3], 60 complex ones up to Im tau = pi/eps - 4
    Complex tau;
    if (i < 40) {
      tau = Complex(Real::ratio(6 * i, 39) - Real(3));
    } else {
      const int j = i - 40;
      tau = Complex(Real::ratio(j % 10, 10) - Real::ratio(1, 2), top * Real::ratio(j / 10 + 1, 6));
    }
    // the two sides use series points separated by 1 + extra units so that
    // the identity is not satisfied by construction
    const int extra = 1 + i % 3;
    for (const Manifold* m : {&mp.W_minus, &mp.W_plus}) {
      CVec2 lhs = m->evaluate(tau + Complex(1), nullptr, extra);
      CVec2 rhs = m->map_forward(m->evaluate(tau));
      worst = max(worst, max(abs(lhs[0] - rhs[0]), abs(lhs[1] - rhs[1])));
    }
    ++count;
  }
  const double secs = since(t0);
  o.pass = worst < tol && secs <= 120;
  o.summary = "manifold residual |W(tau+1) - F(W(tau))| on 100 tau at eps = 0.3, 250 digits: max " + fmt(worst, 3) +
              " < 1e-240";
  o.details.push_back(std::to_string(count) + " samples per separatrix, runtime " + fmt(secs) + " s (limit 120 s)");
  return o;
}

// ------------------------------------------------------------------ 3
Outcome criterion3() {
  Outcome o;
  auto t0 = Clock::now();
  auto& sw = exponent_sweep();
  if (!all_ok(sw, o)) {
    o.summary = "exponent law: sweep failed";
    return o;
  }
  ContextScope s(PrecisionContext::make(sw.back().digits));
  std::vector<Real> e, om;
  for (const auto& x : sw) {
    e.push_back(x.report.epsilon);
    om.push_back(abs(x.report.omega[0]));
  }
  ExponentFit fit = fit_exponent(e, om, "e");
  const Real target = -(const_pi() * const_pi() * 2);
  const Real ratio = fit.slope / target;
  const double secs = since(t0);
  o.pass = abs(ratio - Real(1)) < Real("0.02") && secs <= 1200;
  o.summary = "exponent law: slope of log|Omega| vs 1/eps = " + fmt(fit.slope, 8) + ", ratio to -2 pi^2 = " +
              fmt(ratio, 6) + " (within 2%)";
  o.details.push_back("fit log|Omega| = c0 + c1/eps + c2 eps over eps in {0.5,0.4,0.3,0.25,0.2}, runtime " +
                      fmt(secs) + " s");
  return o;
}

// ------------------------------------------------------------------ 4
Outcome criterion4() {
  Outcome o;
  auto t0 = Clock::now();
  auto& sw = dense_sweep();
  if (!all_ok(sw, o)) {
    o.summary = "leading constant: dense sweep failed";
    return o;
  }
  const StokesResult& st = stokes();
  ContextScope s(PrecisionContext::make(sw.back().digits));
  const Real four_pi = abs(st.theta) * const_pi() * 4;
  std::vector<Real> e, sc;
  for (const auto& x : sw) {
    e.push_back(x.report.epsilon);
    sc.push_back(x.report.scaled);
  }
  AsymptoticFit f4 = fit_asymptotics(e, sc, 4);
  AsymptoticFit f5 = fit_asymptotics(e, sc, 5);
  const Real r4 = rel_diff(f4.vartheta[0], four_pi);
  const Real r5 = rel_diff(f5.vartheta[0], four_pi);
  o.pass = r4 < Real("1e-3");
  o.summary = "leading constant: extrapolated |Omega| e^(2 pi^2/eps) = " + fmt(f4.vartheta[0], 10) +
              " vs 4 pi |theta0| = " + fmt(four_pi, 10) + ", rel " + fmt(r4, 3) + " < 1e-3";
  o.details.push_back("polynomial fit of degree M = 4 in eps over 11 points eps = 0.1 .. 0.04; M = 5 gives rel " +
                      fmt(r5, 3));
  o.details.push_back("theta0 from the resonant map at " + std::to_string(kStokesDigits) + " digits, error estimate " +
                      fmt(st.error_estimate, 3) + "; runtime " + fmt(since(t0)) + " s");
  return o;
}

// ------------------------------------------------------------------ 5
Outcome criterion5() {
  Outcome o;
  const Real eps("0.2");
  auto ctx = PrecisionContext::for_epsilon(0.2);
  ContextScope s(ctx);
  ManifoldPair mp = build_manifold_pair(builtin_family("henon13"), eps, ctx);
  SplittingOptions so;
  so.lobe = false;
  so.fourier = false;
  SplittingReport r = compute_report(mp, ctx, so);
  const Real pi = const_pi();
  const int nodes = default_fourier_nodes(ctx.digits);
  const Real nu = default_nu(eps) + Real(3);
  const Real fourier = abs(fourier_theta(mp, nu, nodes)) * pi * 4;
  const Real rel = rel_diff(fourier, r.scaled);
  const Real at_default = abs(fourier_theta(mp, default_nu(eps), nodes)) * pi * 4;
  o.pass = rel < Real("1e-4");
  o.summary = "route agreement at eps = 0.2: 4 pi |theta(eps)| = " + fmt(fourier, 12) + " vs |Omega| e^(2 pi^2/eps) = " +
              fmt(r.scaled, 12) + ", rel " + fmt(rel, 3) + " < 1e-4";
  o.details.push_back("Fourier line at nu = " + fmt(nu, 4) + " with " + std::to_string(nodes) +
                      " nodes; at the default nu = " + fmt(default_nu(eps), 4) + " the value is " +
                      fmt(at_default, 8) + " (rel " + fmt(rel_diff(at_default, r.scaled), 3) + ")");
  return o;
}

// ------------------------------------------------------------------ 6
Outcome criterion6() {
  Outcome o;
  bool ok = all_ok(exponent_sweep(), o) && all_ok(dense_sweep(), o);
  Real worst(0);
  int n = 0;
  for (const auto* sw : {&exponent_sweep(), &dense_sweep()})
    for (const auto& e : *sw) {
      if (!e.ok) continue;
      ContextScope s(PrecisionContext::make(e.digits));
      const auto& r = e.report;
      const bool opposite = r.omega[0] * r.omega[1] < Real(0);
      const Real mag = abs(abs(r.omega[0]) - abs(r.omega[1])) / abs(r.omega[0]);
      worst = max(worst, Real(mag));
      if (r.zero_count != 2 || !opposite || !(mag < Real("1e-6"))) {
        ok = false;
        o.details.push_back("eps = " + e.eps_text + ": zeros " + std::to_string(r.zero_count) +
                            (opposite ? "" : ", same sign") + ", rel " + fmt(mag, 3));
      }
      ++n;
    }
  o.pass = ok;
  o.summary = "splitting function: two zeros per period and opposite Omega at all " + std::to_string(n) +
              " swept eps, max magnitude mismatch " + fmt(worst, 3) + " < 1e-6";
  return o;
}

// ------------------------------------------------------------------ 7
Outcome criterion7() {
  Outcome o;
  auto& sw = exponent_sweep();
  if (!all_ok(sw, o)) {
    o.summary = "quasi-periodicity: sweep failed";
    return o;
  }
  ContextScope s(PrecisionContext::make(sw.back().digits));
  std::vector<Real> e, d;
  for (const auto& x : sw) {
    e.push_back(x.report.epsilon);
    d.push_back(x.report.qp_defect);
  }
  ExponentFit fit = fit_exponent(e, d, "l");
  ExponentFit plain = fit_exponent(e, d, "e");
  const Real target = -(const_pi() * const_pi() * 4);
  const Real ratio = fit.slope / target;
  o.pass = abs(ratio - Real(1)) < Real("0.05");
  o.summary = "quasi-periodicity: decay exponent of sup|Theta(tau+1) - Theta(tau)| = " + fmt(fit.slope, 8) +
              ", ratio to -4 pi^2 = " + fmt(ratio, 6) + " (within 5%)";
  o.details.push_back("fit log d = c0 + c1/eps + c2 log eps; with an eps term instead the ratio is " +
                      fmt(plain.slope / target, 6));
  return o;
}

// ------------------------------------------------------------------ 8
Outcome criterion8() {
  Outcome o;
  bool ok = true;
  PolyMapFamily f = builtin_family("henon13");
  // (a) invariant along the orbit
  {
    auto ctx = PrecisionContext::for_epsilon(0.3);
    ContextScope s(ctx);
    ManifoldPair mp = build_manifold_pair(f, Real("0.3"), ctx);
    auto br = zero_brackets(mp, 32, Real::ratio(-1, 4));
    HomoclinicPoint h = find_homoclinic(mp, br[0].first, br[0].second);
    Real w0 = homoclinic_invariant(mp, h).tangent;
    h.t_h += Real(1);
    h.t_minus += Real(1);
    h.t_plus += Real(1);
    Real w1 = homoclinic_invariant(mp, h).tangent;
    const Real r = rel_diff(w1, w0);
    ok = ok && r < Real("1e-20");
    o.details.push_back("Omega at t_h and t_h + 1 (eps = 0.3): rel " + fmt(r, 3) + " < 1e-20");
  }
  // (b) Stokes constant under a random symplectic polynomial conjugation
  {
    const StokesResult& st = stokes();
    auto ctx = PrecisionContext::make(kStokesDigits);
    ContextScope s(ctx);
    std::mt19937 rng(20261014);
    const unsigned seed = rng();
    StokesResult sg = stokes_constant_resonant(conjugate_family(f, random_symplectic_change(seed)),
                                               default_stokes_depths(), ctx);
    const Real r = rel_diff(abs(sg.theta), abs(st.theta));
    ok = ok && r < Real("1e-6");
    o.details.push_back("|theta0| under conjugation (seed " + std::to_string(seed) + "): rel " + fmt(r, 3) +
                        " < 1e-6");
  }
  // (c) normal-form coefficients under pre-conjugation
  {
    auto ctx = PrecisionContext::make(80);
    ContextScope s(ctx);
    NormalFormData a = normalize(f, 10, ctx);
    Real worst(0);
    for (unsigned seed : {5u, 17u, 99u}) {
      NormalFormData b = normalize(conjugate_family(f, random_symplectic_change(seed)), 10, ctx);
      for (const auto& [k, v] : a.a) worst = max(worst, abs(b.a.at(k) - v));
      for (const auto& [k, v] : a.b) worst = max(worst, abs(b.b.at(k) - v));
    }
    ok = ok && worst < ctx.zero_tol();
    o.details.push_back("normal-form coefficients through order 10 under 3 conjugations: max diff " + fmt(worst, 3) +
                        " < 1e-60");
  }
  o.pass = ok;
  o.summary = "invariance suite: orbit shift, Stokes constant under conjugation, normal-form uniqueness";
  return o;
}

// ------------------------------------------------------------------ 9
Outcome criterion9() {
  Outcome o;
  auto ctx = PrecisionContext::make(60);
  ContextScope s(ctx);
  const Real tol = ctx.residual_tol();
  std::vector<PolyMapFamily> fams;
  for (const auto& n : builtin_family_names()) fams.push_back(builtin_family(n));
  fams.push_back(conjugate_family(builtin_family("henon13"), random_symplectic_change(7)));
  fams.push_back(parse_map_text("name file-cubic\ncomponent 1\n0 1 0 1\ncomponent 2\n1 0 0 -1\n0 1 0 -1\n"
                                "0 1 1 -1\n0 2 0 -1\n0 3 0 1/3\n"));
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-1, 1);
  Real worst(0);
  std::string names;
  for (const auto& f : fams) {
    names += (names.empty() ? "" : ", ") + f.name;
    for (int i = 0; i < 1000; ++i) {
      MapEvaluator ev(f, Real(u(rng) * 0.1));
      CVec2 p{Complex(Real(u(rng))), Complex(Real(u(rng)))};
      CMat2 J;
      ev.f(p, &J);
      worst = max(worst, abs(det(J) - Complex(1)));
    }
  }
  o.pass = worst < tol;
  o.summary = "symplecticity: max |det Df - 1| = " + fmt(worst, 3) + " < 1e-50 at 1000 random points per family";
  o.details.push_back("families: " + names);
  return o;
}

// ------------------------------------------------------------------ 10
Outcome criterion10() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / ("seplab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  auto run = [&](const std::string& jobs) {
    const std::string out = (base / ("jobs" + jobs)).string();
    std::vector<std::string> args{"seplab", "sweep", "--eps", "0.5,0.4,0.3", "--jobs", jobs, "--out", out};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream so, se;
    return cli::run_cli(static_cast<int>(argv.size()), argv.data(), so, se);
  };
  const int c1 = run("1"), c2 = run("2");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
  };
  bool same = c1 == 0 && c2 == 0;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(base / "jobs1")) {
    const std::string name = entry.path().filename().string();
    if (name.size() < 4 || (name.substr(name.size() - 4) != ".csv" && name.find(".csv.") == std::string::npos))
      continue;
    ++files;
    if (slurp(entry.path()) != slurp(base / "jobs2" / name)) {
      same = false;
      o.details.push_back(name + " differs");
    }
  }
  fs::remove_all(base);
  o.pass = same && files >= 6;
  o.summary = "determinism: sweep with --jobs 1 and --jobs 2 gives byte-identical CSV files (" +
              std::to_string(files) + " files compared)";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> list{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int failed = 0;
  for (const auto& [id, fn] : list) {
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << o.summary << "  [" << fmt(since(t0))
              << " s]\n";
    for (const auto& d : o.details) std::cout << "        " << d << '\n';
    std::cout.flush();
    if (!o.pass) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all 10 criteria passed\n");
  return failed ? 1 : 0;
}
