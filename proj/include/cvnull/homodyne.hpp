// Copyright 2026 The cvnull Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Homodyne data: sampling X(θ) from a state, and estimating nullifier
// polynomials with error bars from phase-tagged quadrature samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cvnull/error.hpp"
#include "cvnull/fock.hpp"
#include "cvnull/nullifier.hpp"

namespace cvnull {

inline constexpr double kDefaultGridSpacing = 0.01;
inline constexpr double kPdfNormTolerance = 1e-6;
inline constexpr double kPdfNegativityTolerance = 1e-9;
inline constexpr int kDefaultHistogramBins = 1000;

// ---------------------------------------------------------------------------
// Datasets

struct QuadratureGroup {
  double theta;
  std::vector<double> samples;
};

struct QuadratureDataset {
  std::vector<QuadratureGroup> groups;
  std::string source_id;
  double vacuum_variance = kVacuumVariance;

  void validate() const {
    if (groups.empty()) throw Error(ErrorCode::kInsufficientData, "dataset has no phase groups");
    for (const auto& g : groups) {
      if (!std::isfinite(g.theta)) throw Error(ErrorCode::kParseError, "non-finite phase");
      if (g.samples.empty()) {
        throw Error(ErrorCode::kInsufficientData, "empty phase group at theta=" + format_number(g.theta));
      }
      for (double v : g.samples)
        if (!std::isfinite(v)) throw Error(ErrorCode::kParseError, "non-finite sample");
    }
  }
};

/// |a − b| modulo 2π.
inline double phase_distance(double a, double b) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double d = std::fmod(std::abs(a - b), two_pi);
  return std::min(d, two_pi - d);
}

/// The group measured at θ (mod 2π, within 1e−6 rad), or missing-angle.
inline const QuadratureGroup& find_group(const QuadratureDataset& data, double theta) {
  for (const auto& g : data.groups)
    if (phase_distance(g.theta, theta) < kPhaseMatchTolerance) return g;
  throw Error(ErrorCode::kMissingAngle, "no phase group at theta=" + format_number(theta));
}

// ---------------------------------------------------------------------------
// Quadrature distributions

/// ψ_0 … ψ_{D−1} at x for the convention x = (a + a†)/√2.
inline Eigen::VectorXd hermite_functions(double x, int dim) {
  Eigen::VectorXd psi(dim);
  psi(0) = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (dim > 1) psi(1) = std::sqrt(2.0) * x * psi(0);
  for (int n = 1; n + 1 < dim; ++n) {
    psi(n + 1) = std::sqrt(2.0 / (n + 1)) * x * psi(n) - std::sqrt(static_cast<double>(n) / (n + 1)) * psi(n - 1);
  }
  return psi;
}

struct GridSpec {
  double half_width = -1.0;  // ≤ 0: max(8σ, 5) around the mean
  double spacing = kDefaultGridSpacing;
};

/// P(x|θ) on x_min + i·dx.
struct PdfGrid {
  double x_min;
  double dx;
  std::vector<double> density;

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
};

/// P(x|θ) = Σ ρ_mn e^{i(n−m)θ} ψ_m(x) ψ_n(x). Throws grid-too-small when the
/// trapezoid integral misses 1 by more than 1e−6.
inline PdfGrid quadrature_pdf(const DensityOperator& rho, double theta, GridSpec grid = {}) {
  const int d = rho.dim();
  if (!(grid.spacing > 0.0 && grid.spacing <= kDefaultGridSpacing)) {
    throw Error(ErrorCode::kInvalidParameter, "grid spacing must lie in (0, 0.01]");
  }
  const auto xq = quadrature_operator(theta, d);
  const double mean = expectation(rho, xq);
  const double var = expectation(rho, FockOperator(xq.matrix() * xq.matrix())) - mean * mean;
  const double half = grid.half_width > 0.0 ? grid.half_width : std::max(8.0 * std::sqrt(std::max(var, 0.0)), 5.0);
  const double center = grid.half_width > 0.0 ? 0.0 : mean;
  const auto n_pts = static_cast<std::size_t>(std::ceil(2.0 * half / grid.spacing)) + 1;

  PdfGrid out{center - half, grid.spacing, std::vector<double>(n_pts)};
  CVector phase(d);
  for (int n = 0; n < d; ++n) phase(n) = std::polar(1.0, n * theta);
  for (std::size_t i = 0; i < n_pts; ++i) {
    const CVector w = phase.cwiseProduct(hermite_functions(out.x(i), d).cast<Complex>());
    double p = w.dot(rho.matrix() * w).real();
    if (p < -kPdfNegativityTolerance) {
      throw Error(ErrorCode::kInvalidState, "negative quadrature density " + format_number(p));
    }
    out.density[i] = std::max(p, 0.0);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n_pts; ++i) total += 0.5 * (out.density[i] + out.density[i + 1]) * out.dx;
  if (std::abs(total - 1.0) > kPdfNormTolerance) {
    throw Error(ErrorCode::kGridTooSmall, "quadrature density integrates to " + format_number(total));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

/// splitmix64 finalizer, used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix_seed(mix_seed(mix_seed(mix_seed(seed) ^ a) ^ b) ^ c);
}

/// Uniform [0,1) from the top 53 bits; independent of the standard
/// library's distribution implementations.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse-CDF sampler over a piecewise-linear CDF built from the gridded
/// density (trapezoid rule), normalized to end at exactly 1.
class QuadratureSampler {
 public:
  explicit QuadratureSampler(PdfGrid pdf) : pdf_(std::move(pdf)), cdf_(pdf_.density.size(), 0.0) {
    for (std::size_t i = 1; i < cdf_.size(); ++i) {
      cdf_[i] = cdf_[i - 1] + 0.5 * (pdf_.density[i - 1] + pdf_.density[i]) * pdf_.dx;
    }
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
  }

  QuadratureSampler(const DensityOperator& rho, double theta, GridSpec grid = {})
      : QuadratureSampler(quadrature_pdf(rho, theta, grid)) {}

  double inverse_cdf(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return pdf_.x(0);
    if (it == cdf_.end()) return pdf_.x(cdf_.size() - 1);
    const auto i = static_cast<std::size_t>(it - cdf_.begin());
    const double lo = cdf_[i - 1];
    const double f = (u - lo) / (cdf_[i] - lo);
    return pdf_.x(i - 1) + f * pdf_.dx;
  }

  double cdf_at(double x) const {
    if (x <= pdf_.x(0)) return 0.0;
    const double pos = (x - pdf_.x_min) / pdf_.dx;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= cdf_.size()) return 1.0;
    const double f = pos - static_cast<double>(i);
    return cdf_[i] + f * (cdf_[i + 1] - cdf_[i]);
  }

  std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = inverse_cdf(uniform01(rng));
    return out;
  }

  const PdfGrid& pdf() const { return pdf_; }

 private:
  PdfGrid pdf_;
  std::vector<double> cdf_;
};

inline std::vector<double> sample_quadrature(const DensityOperator& rho, double theta, std::size_t n,
                                             std::uint64_t seed, GridSpec grid = {}) {
  return QuadratureSampler(rho, theta, grid).sample(n, seed);
}

/// One group per phase; group k draws from sub-seed derive_seed(seed, k).
inline QuadratureDataset simulate_dataset(const DensityOperator& rho, const std::vector<double>& phases,
                                          std::size_t n_per_phase, std::uint64_t seed, std::string source_id = {}) {
  QuadratureDataset data;
  data.source_id = std::move(source_id);
  for (std::size_t k = 0; k < phases.size(); ++k) {
    data.groups.push_back({phases[k], sample_quadrature(rho, phases[k], n_per_phase, derive_seed(seed, k))});
  }
  return data;
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
  double lo;
  double hi;
  std::vector<double> bin_means;  // mean of the samples inside; bin centre when empty
  std::vector<std::size_t> counts;
  std::vector<double> frequencies;
};

/// Equi-width bins over [min, max]; the maximum falls in the last bin.
inline Histogram bin_histogram(const std::vector<double>& samples, int bins = kDefaultHistogramBins) {
  if (samples.empty()) throw Error(ErrorCode::kInsufficientData, "no samples to bin");
  if (bins < 1) throw Error(ErrorCode::kInvalidParameter, "need at least one bin");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  Histogram h{*mn, *mx, std::vector<double>(bins, 0.0), std::vector<std::size_t>(bins, 0),
              std::vector<double>(bins, 0.0)};
  const double width = (h.hi - h.lo) / bins;
  for (double v : samples) {
    int b = width > 0.0 ? static_cast<int>((v - h.lo) / width) : 0;
    b = std::clamp(b, 0, bins - 1);
    h.bin_means[b] += v;
    ++h.counts[b];
  }
  const double n = static_cast<double>(samples.size());
  for (int b = 0; b < bins; ++b) {
    h.bin_means[b] = h.counts[b] ? h.bin_means[b] / h.counts[b] : h.lo + (b + 0.5) * width;
    h.frequencies[b] = h.counts[b] / n;
  }
  return h;
}

/// Σ_b f_b · (bin mean)^n.
inline double binned_moment(const Histogram& h, int power) {
  double m = 0.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    if (h.counts[b]) m += h.frequencies[b] * std::pow(h.bin_means[b], power);
  return m;
}

// ---------------------------------------------------------------------------
// Estimators

struct MomentEstimate {
  double theta = 0.0;
  int power = 0;
  double mean = 0.0;
  double variance_of_mean = 0.0;
  std::size_t count = 0;
};

/// Mean of X^n and its variance (1/N)·[Σ X^{2n}/N − (Σ X^n/N)²]·N/(N−1).
inline MomentEstimate estimate_moment(const std::vector<double>& samples, int power, double theta = 0.0) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorCode::kInsufficientData, "need at least two samples");
  if (power < 1) throw Error(ErrorCode::kInvalidParameter, "power must be >= 1");
  double mean = 0.0;
  for (double v : samples) mean += std::pow(v, power);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) {
    const double d = std::pow(v, power) - mean;
    ss += d * d;
  }
  const double sample_var = ss / static_cast<double>(n - 1);
  return {theta, power, mean, sample_var / static_cast<double>(n), n};
}

/// Covariance of the sample means of X^a and X^b from one group.
inline double moment_covariance(const std::vector<double>& samples, int a, int b) {
  const std::size_t n = samples.size();
  if (n < 2) throw Error(ErrorCode::kInsufficientData, "need at least two samples");
  double ma = 0.0;
  double mb = 0.0;
  for (double v : samples) {
    ma += std::pow(v, a);
    mb += std::pow(v, b);
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double s = 0.0;
  for (double v : samples) s += (std::pow(v, a) - ma) * (std::pow(v, b) - mb);
  return s / static_cast<double>(n - 1) / static_cast<double>(n);
}

struct TermEstimate {
  double coefficient;
  MomentEstimate moment;
};

struct CovarianceTerm {
  std::size_t first;
  std::size_t second;
  double covariance;  // of the two sample means
};

struct NullifierEstimate {
  double mean = 0.0;
  double sigma = 0.0;
  double sigma_without_covariance = 0.0;
  std::vector<TermEstimate> terms;
  std::vector<CovarianceTerm> covariances;  // same-phase pairs, first < second
};

struct EstimateOptions {
  bool binned = false;
  int bins = kDefaultHistogramBins;
};

/// mean = Σ c_k⟨X(θ_k)^{n_k}⟩ + const;
/// σ² = Σ c_k²σ_k² + Σ_{k≠j, same phase} c_k c_j Cov_kj. Different phase
/// groups are independent acquisitions and do not covary.
inline NullifierEstimate estimate_nullifier(const QuadratureDataset& data, const NullifierPolynomial& poly,
                                            const EstimateOptions& opts = {}) {
  data.validate();
  NullifierEstimate out;
  out.mean = poly.constant();
  std::vector<const QuadratureGroup*> groups;
  for (const auto& t : poly.terms()) {
    const QuadratureGroup& g = find_group(data, t.theta);
    groups.push_back(&g);
    MomentEstimate m = estimate_moment(g.samples, t.power, t.theta);
    if (opts.binned) m.mean = binned_moment(bin_histogram(g.samples, opts.bins), t.power);
    out.mean += t.coefficient * m.mean;
    out.terms.push_back({t.coefficient, m});
  }
  double var = 0.0;
  for (const auto& t : out.terms) var += t.coefficient * t.coefficient * t.moment.variance_of_mean;
  out.sigma_without_covariance = std::sqrt(var);
  for (std::size_t k = 0; k < out.terms.size(); ++k) {
    for (std::size_t j = k + 1; j < out.terms.size(); ++j) {
      if (groups[k] != groups[j]) continue;
      const double cov = moment_covariance(groups[k]->samples, out.terms[k].moment.power, out.terms[j].moment.power);
      out.covariances.push_back({k, j, cov});
      var += 2.0 * out.terms[k].coefficient * out.terms[j].coefficient * cov;
    }
  }
  out.sigma = std::sqrt(std::max(var, 0.0));
  return out;
}

// ---------------------------------------------------------------------------
// Convergence with the number of samples

struct ConvergenceRow {
  std::size_t n_samples;
  double mean;                // mean of the repeated estimates
  double std;                 // empirical spread (N−1 denominator)
  double mean_reported_sigma;  // average propagated sigma
};

/// For each N, `repeats` independent end-to-end estimates from fresh
/// samples. Repeat k at N index i for phase p draws from
/// derive_seed(seed, i, k, p).
inline std::vector<ConvergenceRow> convergence_study(const DensityOperator& rho, const NullifierPolynomial& poly,
                                                     const std::vector<std::size_t>& n_list, int repeats,
                                                     std::uint64_t seed) {
  if (repeats < 2) throw Error(ErrorCode::kInsufficientData, "need at least two repeats");
  const std::vector<double> phases = poly.phases();
  std::vector<QuadratureSampler> samplers;
  for (double th : phases) samplers.emplace_back(rho, th);
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    std::vector<double> estimates;
    double sigma_sum = 0.0;
    for (int k = 0; k < repeats; ++k) {
      QuadratureDataset data;
      for (std::size_t p = 0; p < phases.size(); ++p) {
        data.groups.push_back({phases[p], samplers[p].sample(n_list[i], derive_seed(seed, i, k, p))});
      }
      const auto est = estimate_nullifier(data, poly);
      estimates.push_back(est.mean);
      sigma_sum += est.sigma;
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / repeats;
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    rows.push_back({n_list[i], mean, std::sqrt(ss / (repeats - 1)), sigma_sum / repeats});
  }
  return rows;
}

}  // namespace cvnull
