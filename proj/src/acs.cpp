#include "gltlab/acs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gltlab/error.hpp"
#include "gltlab/linalg.hpp"
#include "gltlab/matgen.hpp"
#include "gltlab/parallel.hpp"
#include "gltlab/report.hpp"

namespace gltlab {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double max_of_last_two(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v.back();
  return std::max(v[v.size() - 1], v[v.size() - 2]);
}

void require_square(const CMatrix& a, std::int64_t order, const std::string& what, const MultiIndex& n) {
  if (a.rows() != a.cols() || (order >= 0 && a.rows() != order))
    throw Error(ErrorKind::invalid_size, what + " at n = " + n.to_string() + " has shape " +
                                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Splitting

SplittingPoint splitting_point(std::span<const double> s, std::int64_t order) {
  SplittingPoint best{0, s.empty() ? 0.0 : s[0], order};
  if (order <= 0) return {0, 0.0, order};
  double best_value = best.distance();
  const auto count = static_cast<std::int64_t>(s.size());
  for (std::int64_t i = 1; i <= order; ++i) {
    const double next = i < count ? s[static_cast<std::size_t>(i)] : 0.0;
    const double value = static_cast<double>(i) / static_cast<double>(order) + next;
    if (value < best_value) {
      best_value = value;
      best = {i, next, order};
    }
  }
  return best;
}

double splitting_distance(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (!m.allFinite()) throw Error(ErrorKind::numerical, "splitting distance of a matrix with non-finite entries");
  const auto s = linalg::singular_values(m);
  return splitting_point(as_span(s), std::min(m.rows(), m.cols())).distance();
}

Splitting split(const CMatrix& m) {
  Splitting out;
  out.order = std::min(m.rows(), m.cols());
  if (m.size() == 0) return out;
  const auto svd = linalg::svd(m);
  const auto point = splitting_point(as_span(svd.s), out.order);
  const Eigen::Index k = point.rank;
  out.rank = k;
  out.norm = point.norm;
  out.rank_part = svd.u.leftCols(k) * svd.s.head(k).asDiagonal() * svd.v.leftCols(k).adjoint();
  out.norm_part = m - out.rank_part;
  return out;
}

bool trends_to_zero(std::span<const double> v, const TrendPolicy& policy) {
  if (v.empty()) return false;
  if (std::all_of(v.begin(), v.end(), [&](double x) { return std::abs(x) <= policy.floor; })) return true;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > policy.slack * v[k - 1] && v[k] > policy.floor) return false;
  return v.back() <= policy.floor || (v.size() > 1 && v.back() <= policy.decay * v.front());
}

// ---------------------------------------------------------------------------
// Certificates

std::string AcsCertificate::to_csv() const {
  std::ostringstream out;
  out << "m,n,d_n,rank_frac,norm_part,freq_rank,freq_norm,freq_S,verdict\n";
  for (const auto& row : rows)
    out << row.m << ',' << report::csv_field(row.n.to_string()) << ',' << row.order << ','
        << report::number(row.rank_fraction) << ',' << report::number(row.norm_part) << ','
        << report::number(row.freq_rank) << ',' << report::number(row.freq_norm) << ','
        << report::number(row.freq_S) << ',' << (row.pass ? "PASS" : "FAIL") << '\n';
  return out.str();
}

AcsCertificate acs_check(const SequenceFamily& family, const MatrixSequence& target,
                         const std::vector<std::int64_t>& m_list, const std::vector<MultiIndex>& sizes,
                         const TrendPolicy& policy) {
  if (m_list.empty()) throw Error(ErrorKind::configuration, "m_list: at least one m is required");
  if (sizes.empty()) throw Error(ErrorKind::configuration, "sizes: at least one size is required");
  validate_sizes(sizes, static_cast<int>(sizes.front().dim()));
  for (std::size_t i = 1; i < m_list.size(); ++i)
    if (m_list[i] <= m_list[i - 1]) throw Error(ErrorKind::configuration, "m_list: values must increase strictly");

  struct Cell {
    SplittingPoint argmin;
    double spectral = 0.0;
    std::int64_t order = 0;
  };
  std::vector<std::vector<Cell>> cells(m_list.size(), std::vector<Cell>(sizes.size()));
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const CMatrix a = target(sizes[j]);
    require_square(a, -1, "target", sizes[j]);
    for (std::size_t i = 0; i < m_list.size(); ++i) {
      const CMatrix b = family(m_list[i], sizes[j]);
      require_square(b, a.rows(), "family member m = " + std::to_string(m_list[i]), sizes[j]);
      const auto s = linalg::singular_values(a - b);
      cells[i][j] = {splitting_point(as_span(s), a.rows()), s.size() ? s(0) : 0.0, a.rows()};
    }
  }

  std::vector<double> omega_norm, c_arg, omega_arg;
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    std::vector<double> sn, cf, wn;
    for (const auto& cell : cells[i]) {
      sn.push_back(cell.spectral);
      cf.push_back(cell.argmin.rank_fraction());
      wn.push_back(cell.argmin.norm);
    }
    omega_norm.push_back(max_of_last_two(sn));
    c_arg.push_back(max_of_last_two(cf));
    omega_arg.push_back(max_of_last_two(wn));
  }

  AcsCertificate cert;
  cert.m_values = m_list;
  cert.policy = policy;
  cert.s.assign(m_list.size(), 0.0);
  const bool norm_rule = trends_to_zero(omega_norm, policy);
  if (norm_rule) {
    cert.splitting_rule = "norm";
    cert.c.assign(m_list.size(), 0.0);
    cert.omega = omega_norm;
    cert.pass = true;
  } else {
    cert.splitting_rule = "argmin";
    cert.c = c_arg;
    cert.omega = omega_arg;
    cert.pass = trends_to_zero(c_arg, policy) && trends_to_zero(omega_arg, policy);
  }
  for (std::size_t i = 0; i < m_list.size(); ++i)
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      const auto& cell = cells[i][j];
      AcsRow row;
      row.m = m_list[i];
      row.n = sizes[j];
      row.order = cell.order;
      row.rank_fraction = norm_rule ? 0.0 : cell.argmin.rank_fraction();
      row.norm_part = norm_rule ? cell.spectral : cell.argmin.norm;
      row.splitting_distance = cell.argmin.distance();
      row.pass = cert.pass;
      cert.rows.push_back(std::move(row));
    }
  return cert;
}

// ---------------------------------------------------------------------------
// Zero-distribution test

std::string ZeroDistributionResult::to_csv() const {
  std::ostringstream out;
  out << "n,d_n,p,normalized_norm,rank_frac,norm_part,splitting_distance\n";
  for (std::size_t i = 0; i < sizes.size(); ++i)
    out << report::csv_field(sizes[i].to_string()) << ',' << orders[i] << ',' << report::number(p) << ','
        << report::number(normalized_norms[i]) << ',' << report::number(splits[i].rank_fraction()) << ','
        << report::number(splits[i].norm) << ',' << report::number(splits[i].distance()) << '\n';
  return out.str();
}

ZeroDistributionResult zero_distribution_test(const MatrixSequence& seq, double p, const std::vector<MultiIndex>& sizes,
                                              const ZeroTestOptions& options) {
  if (!(p >= 1.0)) throw Error(ErrorKind::domain, "Schatten exponent must be >= 1");
  if (sizes.empty()) throw Error(ErrorKind::configuration, "sizes: at least one size is required");
  validate_sizes(sizes, static_cast<int>(sizes.front().dim()));
  ZeroDistributionResult res;
  res.p = p;
  res.sizes = sizes;
  std::vector<double> distances;
  for (const auto& n : sizes) {
    const CMatrix a = seq(n);
    require_square(a, -1, "sequence member", n);
    const auto s = linalg::singular_values(a);
    const auto order = static_cast<std::int64_t>(a.rows());
    const double norm = schatten_norm_of(as_span(s), p);
    res.orders.push_back(order);
    res.normalized_norms.push_back(std::isinf(p) ? norm : norm / std::pow(static_cast<double>(order), 1.0 / p));
    res.splits.push_back(splitting_point(as_span(s), order));
    distances.push_back(res.splits.back().distance());
  }
  auto verdict = [&](const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
      if (v[k] > options.slack * v[k - 1]) return false;
    return v.back() <= options.tolerance;
  };
  res.schatten_pass = verdict(res.normalized_norms);
  res.splitting_pass = verdict(distances);
  res.pass = res.schatten_pass || res.splitting_pass;
  return res;
}

// ---------------------------------------------------------------------------
// Stochastic classes

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

double block_norm(const CMatrix& c) {
  if (c.size() == 1) return std::abs(c(0, 0));
  return Eigen::JacobiSVD<CMatrix>(c).singularValues()(0);
}

std::int64_t numerical_rank(const CMatrix& a) {
  if (a.size() == 0) return 0;
  const auto s = linalg::singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double tol = 1e-10 * s(0);
  std::int64_t k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++k;
  return k;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::int64_t m, const MultiIndex& n, std::int64_t trial) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ static_cast<std::uint64_t>(m));
  for (auto v : n) h = splitmix(h ^ static_cast<std::uint64_t>(v));
  return splitmix(h ^ static_cast<std::uint64_t>(trial));
}

SacsSample RandomSequenceModel::sample(std::int64_t m, const MultiIndex& n, std::int64_t trial) const {
  std::mt19937_64 rng(trial_seed(seed, m, n, trial));
  return draw(m, n, rng);
}

double hoeffding_radius(std::int64_t trials) {
  if (trials < 1) throw Error(ErrorKind::configuration, "trials must be positive");
  return std::sqrt(std::log(20.0) / (2.0 * static_cast<double>(trials)));
}

RandomSequenceModel truncation_model(const TrigPolynomial& f, const TruncationModelParams& params,
                                     std::uint64_t seed) {
  if (params.c0 < 0 || params.w0 < 0 || params.violation < 0 || params.violation > 1)
    throw Error(ErrorKind::configuration, "truncation model parameters out of range");
  RandomSequenceModel model;
  model.name = "truncation";
  model.seed = seed;
  const double c0 = params.c0, w0 = params.w0;
  auto tail_bound = [f](std::int64_t m) {
    double acc = 0.0;
    for (const auto& [k, c] : f.coefficients())
      if (k.max_abs_entry() > m) acc += block_norm(c);
    return acc;
  };
  model.c_bound = [c0](std::int64_t m) { return c0 / static_cast<double>(m); };
  model.omega_bound = [w0, tail_bound](std::int64_t m) { return tail_bound(m) + w0 / static_cast<double>(m); };
  switch (params.s_design) {
    case TruncationModelParams::SDesign::zero: model.s_bound = [](std::int64_t) { return 0.0; }; break;
    case TruncationModelParams::SDesign::inverse_m:
      model.s_bound = [](std::int64_t m) { return 1.0 / static_cast<double>(m); };
      break;
    case TruncationModelParams::SDesign::constant:
      model.s_bound = [v = params.s_value](std::int64_t) { return v; };
      break;
  }
  const auto c_bound = model.c_bound;
  const auto omega_bound = model.omega_bound;
  const auto s_bound = model.s_bound;
  const double violation = params.violation;
  model.draw = [f, c_bound, omega_bound, s_bound, w0, violation](std::int64_t m, const MultiIndex& n,
                                                                 std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const MultiIndex deg = MultiIndex::filled(n.dim(), m);
    const TrigPolynomial head = f.truncated(deg);
    TrigPolynomial tail(f.d(), f.r());
    for (const auto& [k, c] : f.coefficients())
      if (k.max_abs_entry() > m) tail.set(k, c);

    SacsSample out;
    out.B = toeplitz(head, n, {}, Exec::serial).values;
    const CMatrix tail_matrix = toeplitz(tail, n, {}, Exec::serial).values;
    const Eigen::Index order = out.B.rows();
    const double pv = violation / static_cast<double>(m);

    const bool rank_violation = unif(rng) < pv;
    auto k = static_cast<Eigen::Index>(std::floor(c_bound(m) * static_cast<double>(order)));
    if (rank_violation) k = std::min<Eigen::Index>(order, k + 1);
    out.R = k > 0 ? CMatrix(gaussian(order, k, rng) * gaussian(order, k, rng).adjoint() / static_cast<double>(order))
                  : CMatrix::Zero(order, order);

    const bool norm_violation = unif(rng) < pv;
    const double u = unif(rng);
    CMatrix noise = gaussian(order, order, rng);
    noise /= linalg::singular_values(noise)(0);
    const double scale = norm_violation ? 3.0 * omega_bound(m) : u * w0 / static_cast<double>(m);
    out.N = tail_matrix + scale * noise;

    const bool exceptional = unif(rng) < s_bound(m);
    out.S = exceptional ? CMatrix(gaussian(order, order, rng)) : CMatrix::Zero(order, order);
    return out;
  };
  return model;
}

AcsCertificate sacs_check(const RandomSequenceModel& model, const std::vector<std::int64_t>& m_list,
                          const std::vector<MultiIndex>& sizes, std::int64_t trials, const TrendPolicy& policy,
                          Exec exec) {
  if (trials < 100) throw Error(ErrorKind::configuration, "trials: at least 100 are required");
  if (m_list.empty()) throw Error(ErrorKind::configuration, "m_list: at least one m is required");
  for (std::size_t i = 0; i < m_list.size(); ++i)
    if (m_list[i] < 1 || (i > 0 && m_list[i] <= m_list[i - 1]))
      throw Error(ErrorKind::configuration, "m_list: values must be positive and increase strictly");
  if (sizes.empty()) throw Error(ErrorKind::configuration, "sizes: at least one size is required");
  validate_sizes(sizes, static_cast<int>(sizes.front().dim()));
  if (!model.draw || !model.c_bound || !model.omega_bound || !model.s_bound)
    throw Error(ErrorKind::configuration, "random sequence model is incomplete");

  AcsCertificate cert;
  cert.stochastic = true;
  cert.splitting_rule = "model";
  cert.m_values = m_list;
  cert.trials = trials;
  cert.policy = policy;
  cert.hoeffding_radius = hoeffding_radius(trials);
  const double radius = cert.hoeffding_radius;
  bool rows_pass = true;

  for (const auto m : m_list) {
    const double c_m = model.c_bound(m), w_m = model.omega_bound(m), s_m = model.s_bound(m);
    const double level = std::max(0.0, 1.0 - 1.0 / static_cast<double>(m));
    std::vector<double> c_est, w_est, s_est;
    for (const auto& n : sizes) {
      std::vector<double> rank_frac(static_cast<std::size_t>(trials)), norms(static_cast<std::size_t>(trials));
      std::vector<char> has_s(static_cast<std::size_t>(trials));
      std::int64_t order = 0;
      for_each_index(trials, exec, [&](std::int64_t t) {
        const auto draw = model.sample(m, n, t);
        const auto idx = static_cast<std::size_t>(t);
        rank_frac[idx] = static_cast<double>(numerical_rank(draw.R)) / static_cast<double>(draw.R.rows());
        norms[idx] = draw.N.size() ? linalg::singular_values(draw.N)(0) : 0.0;
        has_s[idx] = draw.S.size() && (draw.S.array() != cplx(0.0)).any() ? 1 : 0;
        if (t == 0) order = draw.B.rows();
      });
      std::int64_t ok_rank = 0, ok_norm = 0, s_count = 0;
      for (std::size_t t = 0; t < rank_frac.size(); ++t) {
        ok_rank += rank_frac[t] <= c_m + 1e-15 ? 1 : 0;
        ok_norm += norms[t] <= w_m * (1.0 + 1e-12) ? 1 : 0;
        s_count += has_s[t];
      }
      AcsRow row;
      row.m = m;
      row.n = n;
      row.order = order;
      const double T = static_cast<double>(trials);
      row.freq_rank = static_cast<double>(ok_rank) / T;
      row.freq_norm = static_cast<double>(ok_norm) / T;
      row.freq_S = static_cast<double>(s_count) / T;

      auto quantile = [&](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        auto idx = static_cast<std::size_t>(std::ceil(level * T)) ;
        idx = idx == 0 ? 0 : idx - 1;
        return v[std::min(idx, v.size() - 1)];
      };
      row.rank_fraction = quantile(rank_frac);
      row.norm_part = quantile(norms);
      row.splitting_distance = row.rank_fraction + row.norm_part;
      row.pass = row.freq_rank + radius > 1.0 - 1.0 / static_cast<double>(m) &&
                 row.freq_norm + radius > 1.0 - 1.0 / static_cast<double>(m) && row.freq_S <= s_m + radius;
      rows_pass = rows_pass && row.pass;
      c_est.push_back(row.rank_fraction);
      w_est.push_back(row.norm_part);
      s_est.push_back(row.freq_S);
      cert.rows.push_back(std::move(row));
    }
    cert.c.push_back(max_of_last_two(c_est));
    cert.omega.push_back(max_of_last_two(w_est));
    cert.s.push_back(max_of_last_two(s_est));
  }
  cert.pass = rows_pass && trends_to_zero(cert.c, policy) && trends_to_zero(cert.omega, policy) &&
              trends_to_zero(cert.s, policy);
  return cert;
}

}  // namespace gltlab
