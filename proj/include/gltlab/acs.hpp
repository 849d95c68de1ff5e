#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gltlab/exec.hpp"
#include "gltlab/spectra.hpp"
#include "gltlab/symbols.hpp"

namespace gltlab {

/// Realized low-rank plus small-norm split M = R + N.
struct Splitting {
  CMatrix rank_part;
  CMatrix norm_part;
  std::int64_t rank = 0;
  double norm = 0.0;
  std::int64_t order = 0;
  double rank_fraction() const { return order ? static_cast<double>(rank) / static_cast<double>(order) : 0.0; }
  double distance() const { return rank_fraction() + norm; }
};

struct SplittingPoint {
  std::int64_t rank = 0;   ///< argmin i (smallest on ties)
  double norm = 0.0;       ///< sigma_{i+1}, zero past the end
  std::int64_t order = 0;
  double rank_fraction() const { return order ? static_cast<double>(rank) / static_cast<double>(order) : 0.0; }
  double distance() const { return rank_fraction() + norm; }
};

/// min over i in [0, d_n] of i / d_n + sigma_{i+1}(M), with sigma_{d_n+1} = 0.
double splitting_distance(const CMatrix& m);
/// The argmin for a descending singular value list and matrix order d_n.
SplittingPoint splitting_point(std::span<const double> singular_values, std::int64_t order);
/// Explicit split from the truncated singular expansion at the argmin.
Splitting split(const CMatrix& m);

/// "Non-increasing toward 0": every value within the floor, or each step at
/// most slack times the previous one and the last value at most decay times
/// the first.
struct TrendPolicy {
  double slack = 1.5;
  double decay = 0.75;
  double floor = 1e-10;
};
bool trends_to_zero(std::span<const double> values, const TrendPolicy& policy = {});

/// B_{n,m} for approximation index m.
using SequenceFamily = std::function<CMatrix(std::int64_t m, const MultiIndex& n)>;

struct AcsRow {
  std::int64_t m = 0;
  MultiIndex n;
  std::int64_t order = 0;
  double rank_fraction = 0.0;
  double norm_part = 0.0;
  double splitting_distance = 0.0;
  double freq_rank = 1.0;
  double freq_norm = 1.0;
  double freq_S = 0.0;
  bool pass = false;
};

struct AcsCertificate {
  std::vector<std::int64_t> m_values;
  std::vector<double> c;      ///< per m
  std::vector<double> omega;  ///< per m
  std::vector<double> s;      ///< per m; zero for deterministic certificates
  std::vector<AcsRow> rows;   ///< m-major
  bool stochastic = false;
  /// "norm": R = 0 and N = A - B; "argmin": optimal truncated SVD split.
  std::string splitting_rule;
  double hoeffding_radius = 0.0;
  std::int64_t trials = 0;
  bool pass = false;
  TrendPolicy policy;

  /// Header "m,n,d_n,rank_frac,norm_part,freq_rank,freq_norm,freq_S,verdict".
  std::string to_csv() const;
};

/// Estimates c(m), omega(m) as the max over the two largest sizes. Two
/// splits are tried: the plain norm split (c = 0, omega = ||A - B||), and
/// the argmin split; the first whose sequences both trend to zero is kept.
AcsCertificate acs_check(const SequenceFamily& family, const MatrixSequence& target,
                         const std::vector<std::int64_t>& m_list, const std::vector<MultiIndex>& sizes,
                         const TrendPolicy& policy = {});

struct ZeroTestOptions {
  double tolerance = 0.1;
  double slack = 1.5;
};

struct ZeroDistributionResult {
  double p = 1.0;
  std::vector<MultiIndex> sizes;
  std::vector<std::int64_t> orders;
  std::vector<double> normalized_norms;  ///< ||A_n||_p / d_n^(1/p)
  std::vector<SplittingPoint> splits;
  bool schatten_pass = false;
  bool splitting_pass = false;
  bool pass = false;

  /// Header "n,d_n,p,normalized_norm,rank_frac,norm_part,splitting_distance".
  std::string to_csv() const;
};

/// PASS when either the normalized Schatten norm or the splitting distance
/// is non-increasing (with slack) and below tolerance at the largest size.
/// The Schatten criterion is sufficient only; the split is the
/// characterization, and it catches low-rank sequences for p = infinity.
ZeroDistributionResult zero_distribution_test(const MatrixSequence& seq, double p, const std::vector<MultiIndex>& sizes,
                                              const ZeroTestOptions& options = {});

struct SacsSample {
  CMatrix B, S, R, N;
  CMatrix A() const { return B + S + R + N; }
};

/// Seeded generator of the four parts of a stochastic approximating class.
/// Each (seed, m, n, trial) owns an independent engine, so draws are
/// reproducible and order independent.
struct RandomSequenceModel {
  std::string name;
  std::uint64_t seed = 0;
  std::function<SacsSample(std::int64_t m, const MultiIndex& n, std::mt19937_64& rng)> draw;
  std::function<double(std::int64_t m)> c_bound;      ///< rank fraction bound c(m)
  std::function<double(std::int64_t m)> omega_bound;  ///< norm bound omega(m)
  std::function<double(std::int64_t m)> s_bound;      ///< probability bound s(m) for S != 0

  SacsSample sample(std::int64_t m, const MultiIndex& n, std::int64_t trial) const;
};

std::uint64_t trial_seed(std::uint64_t seed, std::int64_t m, const MultiIndex& n, std::int64_t trial);

/// B = T_n(f_m) with f_m the degree-m truncation of f. N carries the tail
/// T_n(f - f_m) plus noise of size up to w0/m; R is random of rank
/// floor(c0/m d_n); S is a dense random matrix drawn with probability s(m).
/// The rank and norm bounds are violated on purpose with probability
/// violation/m each.
struct TruncationModelParams {
  enum class SDesign { zero, inverse_m, constant };
  double c0 = 0.5;
  double w0 = 0.5;
  SDesign s_design = SDesign::inverse_m;
  double s_value = 0.3;  ///< for SDesign::constant
  double violation = 0.25;
};
RandomSequenceModel truncation_model(const TrigPolynomial& f, const TruncationModelParams& params, std::uint64_t seed);

/// Monte Carlo frequencies of the events rank(R)/d_n <= c(m), ||N|| <= omega(m)
/// and S != 0. A row passes when each frequency meets its bound within the
/// Hoeffding radius sqrt(ln 20 / (2 trials)); the certificate additionally
/// requires the estimated c, omega, s to trend to zero over m.
AcsCertificate sacs_check(const RandomSequenceModel& model, const std::vector<std::int64_t>& m_list,
                          const std::vector<MultiIndex>& sizes, std::int64_t trials, const TrendPolicy& policy = {},
                          Exec exec = Exec::parallel);

double hoeffding_radius(std::int64_t trials);

}  // namespace gltlab
