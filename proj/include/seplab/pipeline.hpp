// Epsilon sweeps over a worker pool, fits across the sweep, and the file
// formats written by the command-line tool.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seplab/splitting.hpp"

namespace seplab {

struct SweepOptions {
  long digits = 0;  // 0 = PrecisionContext::digits_for_epsilon per point
  int jobs = 1;
  // Distance kept between the Fourier line and the singularity; the line
  // sits at nu = max(default_nu(eps), lambda_cap).
  double lambda_cap = 4.0;
  SplittingOptions splitting;
  ManifoldOptions manifold;
};

struct SweepEntry {
  std::string eps_text;
  long digits = 0;
  bool ok = false;
  std::string error;
  SplittingReport report;
};

// One report per epsilon, in input order whatever the number of jobs.
std::vector<SweepEntry> run_sweep(const PolyMapFamily& f, const std::vector<std::string>& eps,
                                  const SweepOptions& opt);
// Same computation without OpenMP (reference for the parallel driver).
std::vector<SweepEntry> run_sweep_serial(const PolyMapFamily& f, const std::vector<std::string>& eps,
                                         const SweepOptions& opt);

std::string reports_csv(const std::vector<SweepEntry>& entries);
// Parses the columns written by reports_csv (epsilon and scaled are enough
// for the fit; other columns are kept when present).
std::vector<SplittingReport> parse_reports_csv(const std::string& text);

struct SweepFit {
  bool ok = false;
  std::string error;
  AsymptoticFit asymptotic;
  ExponentFit exponent;
  Real four_pi_theta0;       // from the resonant map, 0 when not computed
  Real relative_difference;  // |vartheta0 - 4 pi |theta0|| / (4 pi |theta0|)
};
SweepFit fit_sweep(const std::vector<SplittingReport>& reports, int M, const Real& four_pi_theta0,
                   long digits);
std::string fit_csv(const SweepFit& fit, long digits);
std::string stokes_csv(const StokesResult& st, long digits);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool line = false;  // polyline instead of markers
};
struct PlotSpec {
  std::string title, xlabel, ylabel;
  std::vector<PlotSeries> series;
  // Horizontal reference line (drawn when set).
  bool has_hline = false;
  double hline = 0;
  std::string hline_label;
};
std::string svg_plot(const PlotSpec& spec);

// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Comma-separated decimal list; throws std::invalid_argument on bad items.
std::vector<std::string> parse_eps_list(const std::string& text);

}  // namespace seplab
