#include "seplab/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace seplab {

namespace {

SweepEntry run_one(const PolyMapFamily& f, const std::string& eps_text, const SweepOptions& opt) {
  SweepEntry e;
  e.eps_text = eps_text;
  try {
    const double ed = std::stod(eps_text);
    e.digits = opt.digits > 0 ? opt.digits : PrecisionContext::digits_for_epsilon(ed);
    PrecisionContext ctx = PrecisionContext::make(e.digits);
    ContextScope scope(ctx);
    Real eps(eps_text);
    SplittingOptions so = opt.splitting;
    if (!so.nu) so.nu = max(default_nu(eps), Real(opt.lambda_cap));
    e.report = compute_report(f, eps, ctx, so, opt.manifold);
    e.ok = true;
  } catch (const std::exception& ex) {
    e.ok = false;
    e.error = ex.what();
  }
  return e;
}

}  // namespace

std::vector<SweepEntry> run_sweep(const PolyMapFamily& f, const std::vector<std::string>& eps,
                                  const SweepOptions& opt) {
  const int n = static_cast<int>(eps.size());
  std::vector<SweepEntry> out(n);
  const int jobs = std::max(1, opt.jobs);
  // The smallest epsilon is the slowest; start it first.
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int k = 0; k < n; ++k) {
    const int idx = n - 1 - k;
    out[idx] = run_one(f, eps[idx], opt);
  }
  return out;
}

std::vector<SweepEntry> run_sweep_serial(const PolyMapFamily& f, const std::vector<std::string>& eps,
                                         const SweepOptions& opt) {
  std::vector<SweepEntry> out;
  for (const auto& e : eps) out.push_back(run_one(f, e, opt));
  return out;
}

std::string reports_csv(const std::vector<SweepEntry>& entries) {
  std::string s = report_csv_header() + "\n";
  for (const auto& e : entries)
    if (e.ok) s += report_csv_row(e.report) + "\n";
  return s;
}

std::vector<SplittingReport> parse_reports_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("reports file is empty");
  std::vector<std::string> cols;
  {
    std::stringstream hs(line);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  auto col = [&](const std::string& name) {
    auto it = std::find(cols.begin(), cols.end(), name);
    return it == cols.end() ? -1 : static_cast<int>(it - cols.begin());
  };
  const int ie = col("epsilon"), is_ = col("scaled");
  if (ie < 0 || is_ < 0) throw std::invalid_argument("reports file needs epsilon and scaled columns");
  std::vector<SplittingReport> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) f.push_back(c);
    if (f.size() != cols.size()) throw std::invalid_argument("malformed reports row: " + line);
    // Precision from the longest mantissa, plus the guard digits that the
    // writer dropped.
    long mant = 0;
    for (const auto& x : f) {
      const size_t e = x.find_first_of("eE");
      const std::string m = x.substr(0, e);
      mant = std::max<long>(mant, std::count_if(m.begin(), m.end(), [](char c) { return std::isdigit(c); }));
    }
    SplittingReport r;
    r.digits = std::max<long>(30, mant + PrecisionContext{}.guard_digits);
    ContextScope scope(PrecisionContext::make(r.digits));
    auto get = [&](const std::string& name, Real& dst) {
      int i = col(name);
      if (i >= 0) dst = Real(f[i]);
    };
    get("epsilon", r.epsilon);
    get("mu", r.mu);
    get("lambda", r.lambda);
    get("t_h1", r.t_h[0]);
    get("t_h2", r.t_h[1]);
    get("omega1", r.omega[0]);
    get("omega2", r.omega[1]);
    get("lobe_area", r.lobe_area);
    get("theta_re", r.theta_eps.re);
    get("theta_im", r.theta_eps.im);
    get("scaled", r.scaled);
    out.push_back(r);
  }
  return out;
}

SweepFit fit_sweep(const std::vector<SplittingReport>& reports, int M, const Real& four_pi_theta0,
                   long digits) {
  ContextScope scope(PrecisionContext::make(digits));
  SweepFit fit;
  try {
    std::vector<Real> e, s, om;
    for (const auto& r : reports) {
      e.push_back(Real(r.epsilon));
      s.push_back(Real(r.scaled));
      om.push_back(Real(r.omega[0]));
    }
    fit.asymptotic = fit_asymptotics(e, s, M);
    fit.exponent = fit_exponent(e, om, "e");
    fit.four_pi_theta0 = Real(four_pi_theta0);
    if (!fit.four_pi_theta0.is_zero())
      fit.relative_difference = abs(fit.asymptotic.vartheta[0] - fit.four_pi_theta0) / fit.four_pi_theta0;
    fit.ok = true;
  } catch (const std::exception& ex) {
    fit.error = ex.what();
  }
  return fit;
}

std::string fit_csv(const SweepFit& fit, long digits) {
  ContextScope scope(PrecisionContext::make(digits));
  std::ostringstream os;
  os << "quantity,value\n";
  if (!fit.ok) {
    os << "error,\"" << fit.error << "\"\n";
    return os.str();
  }
  os << "M," << fit.asymptotic.M << '\n';
  for (size_t n = 0; n < fit.asymptotic.vartheta.size(); ++n)
    os << "vartheta_" << n << ',' << fit.asymptotic.vartheta[n].str(digits) << '\n';
  os << "fit_residual," << fit.asymptotic.fit_residual.str(digits) << '\n';
  os << "log_fit_vartheta_0," << fit.asymptotic.log_vartheta0.str(digits) << '\n';
  os << "exponent_slope," << fit.exponent.slope.str(digits) << '\n';
  const Real pi = const_pi();
  os << "exponent_slope_over_minus_2pi2," << (fit.exponent.slope / (-(pi * pi * 2))).str(digits) << '\n';
  if (!fit.four_pi_theta0.is_zero()) {
    os << "four_pi_theta0," << fit.four_pi_theta0.str(digits) << '\n';
    os << "relative_difference," << fit.relative_difference.str(digits) << '\n';
  }
  return os.str();
}

std::string stokes_csv(const StokesResult& st, long digits) {
  ContextScope scope(PrecisionContext::make(digits));
  const Real pi4 = const_pi() * 4;
  std::ostringstream os;
  os << "depth,theta_re,theta_im,four_pi_abs_theta\n";
  for (const auto& e : st.estimates)
    os << e.depth.str(digits) << ',' << e.theta.re.str(digits) << ',' << e.theta.im.str(digits) << ','
       << (abs(e.theta) * pi4).str(digits) << '\n';
  os << "limit," << st.theta.re.str(digits) << ',' << st.theta.im.str(digits) << ','
     << (abs(st.theta) * pi4).str(digits) << '\n';
  return os.str();
}

std::string svg_plot(const PlotSpec& spec) {
  const double W = 640, H = 420, L = 80, R = 20, T = 40, B = 60;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : spec.series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (spec.has_hline) {
    ymin = std::min(ymin, spec.hline);
    ymax = std::max(ymax, spec.hline);
  }
  if (!(xmax > xmin)) {
    xmin -= 1;
    xmax += 1;
  }
  if (!(ymax > ymin)) {
    ymin -= 1;
    ymax += 1;
  }
  const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << spec.title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double xv = xmin + (xmax - xmin) * k / 4, yv = ymin + (ymax - ymin) * k / 4;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">" << xv
       << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << yv
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << spec.xlabel << "</text>\n";
  os << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << (T + H - B) / 2 << ")\">" << spec.ylabel << "</text>\n";
  for (size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const char* c = colors[si % 4];
    if (s.line) {
      os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      os << "\"/>\n";
    } else {
      for (size_t i = 0; i < s.x.size(); ++i)
        os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"4\" fill=\"" << c << "\"/>\n";
    }
    os << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 * (si + 1) << "\" text-anchor=\"end\" font-size=\"12\" fill=\""
       << c << "\">" << s.label << "</text>\n";
  }
  if (spec.has_hline) {
    os << "<line x1=\"" << L << "\" y1=\"" << py(spec.hline) << "\" x2=\"" << W - R << "\" y2=\"" << py(spec.hline)
       << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << L + 8 << "\" y=\"" << py(spec.hline) - 6 << "\" font-size=\"12\" fill=\"gray\">"
       << spec.hline_label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::string> parse_eps_list(const std::string& text) {
  static const std::regex number("[0-9]*\\.?[0-9]+([eE][+-]?[0-9]+)?");
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (!std::regex_match(item, number) || !(std::stod(item) > 0))
      throw std::invalid_argument("not a positive decimal: '" + item + "'");
    out.push_back(item);
  }
  return out;
}

}  // namespace seplab
