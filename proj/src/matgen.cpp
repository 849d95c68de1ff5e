#include "gltlab/matgen.hpp"

#include <algorithm>
#include <map>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gltlab/error.hpp"
#include "gltlab/kernels.hpp"

namespace gltlab {

std::int64_t checked_order(int r, const MultiIndex& n, const GenerationLimits& limits) {
  const std::int64_t count = nu(n);
  if (r < 1) throw Error(ErrorKind::invalid_size, "block order r must be >= 1");
  if (count > limits.max_rows / r)
    throw Error(ErrorKind::size_cap, "matrix order r * nu(n) = " + std::to_string(r) + " * " +
                                         std::to_string(count) + " exceeds the cap of " +
                                         std::to_string(limits.max_rows) + " rows");
  return count * r;
}

DenseMatrix toeplitz(const TrigPolynomial& f, const MultiIndex& n, const GenerationLimits& limits, Exec exec) {
  if (static_cast<int>(n.dim()) != f.d())
    throw Error(ErrorKind::invalid_size, "size " + n.to_string() + " does not match symbol dimension " +
                                             std::to_string(f.d()));
  const auto order = checked_order(f.r(), n, limits);
  DenseMatrix out{CMatrix::Zero(order, order), f.r(), n};
  kernels::toeplitz_fill(f, n, out.values, exec);
  return out;
}

namespace {

// J^{(l)}_m: (i, j) entry is 1 when i - j = l.
Eigen::MatrixXd shift(std::int64_t m, std::int64_t l) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
  for (std::int64_t i = 0; i < m; ++i)
    if (i - l >= 0 && i - l < m) j(i, i - l) = 1.0;
  return j;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

DenseMatrix toeplitz_kronecker(const TrigPolynomial& f, const MultiIndex& n, const GenerationLimits& limits) {
  if (static_cast<int>(n.dim()) != f.d())
    throw Error(ErrorKind::invalid_size, "size " + n.to_string() + " does not match symbol dimension");
  const auto order = checked_order(f.r(), n, limits);
  const Eigen::Index r = f.r();
  DenseMatrix out{CMatrix::Zero(order, order), f.r(), n};
  for (const auto& [k, block] : f.coefficients()) {
    bool inside = true;
    for (std::size_t l = 0; l < n.dim(); ++l) inside = inside && std::abs(k[l]) < n[l];
    if (!inside) continue;
    Eigen::MatrixXd level = shift(n[0], k[0]);
    for (std::size_t l = 1; l < n.dim(); ++l) level = kron(level, shift(n[l], k[l]));
    for (Eigen::Index i = 0; i < level.rows(); ++i)
      for (Eigen::Index j = 0; j < level.cols(); ++j)
        if (level(i, j) != 0.0) out.values.block(i * r, j * r, r, r) += level(i, j) * block;
  }
  return out;
}

DenseMatrix diag_sampling(const CoefficientFunction& a, const MultiIndex& n, const GenerationLimits& limits,
                          Exec exec) {
  if (static_cast<int>(n.dim()) != a.d())
    throw Error(ErrorKind::invalid_size, "size " + n.to_string() + " does not match coefficient dimension");
  const auto order = checked_order(a.r(), n, limits);
  DenseMatrix out{CMatrix::Zero(order, order), a.r(), n};
  kernels::diag_fill(a, n, out.values, exec);
  return out;
}

void write_csv(const DenseMatrix& a, std::ostream& out) {
  out << "i,j,re,im\n";
  for (Eigen::Index i = 0; i < a.values.rows(); ++i)
    for (Eigen::Index j = 0; j < a.values.cols(); ++j) {
      const cplx v = a.values(i, j);
      if (v == 0.0) continue;
      out << (i + 1) << ',' << (j + 1) << ',' << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
}

namespace {

constexpr char kMagic[8] = {'G', 'L', 'T', 'M', 'A', 'T', '0', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.write(buf, 8);
}

template <class T>
T get_le(std::istream& in) {
  char buf[8];
  if (!in.read(buf, 8)) throw Error(ErrorKind::io, "truncated binary matrix");
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_binary(const DenseMatrix& a, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.r));
  put_le<std::uint64_t>(out, a.n.dim());
  for (auto v : a.n) put_le<std::uint64_t>(out, static_cast<std::uint64_t>(v));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.values.rows()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.values.cols()));
  for (Eigen::Index i = 0; i < a.values.rows(); ++i)
    for (Eigen::Index j = 0; j < a.values.cols(); ++j) {
      put_le<double>(out, a.values(i, j).real());
      put_le<double>(out, a.values(i, j).imag());
    }
}

DenseMatrix read_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw Error(ErrorKind::io, "not a binary matrix dump (bad magic)");
  DenseMatrix a;
  a.r = static_cast<int>(get_le<std::uint64_t>(in));
  const auto d = get_le<std::uint64_t>(in);
  if (d > 64) throw Error(ErrorKind::io, "implausible level count in binary matrix");
  std::vector<std::int64_t> n(d);
  for (auto& v : n) v = static_cast<std::int64_t>(get_le<std::uint64_t>(in));
  a.n = MultiIndex(std::move(n));
  const auto rows = get_le<std::uint64_t>(in);
  const auto cols = get_le<std::uint64_t>(in);
  if (rows > (1u << 20) || cols > (1u << 20)) throw Error(ErrorKind::io, "implausible matrix shape");
  a.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.values.rows(); ++i)
    for (Eigen::Index j = 0; j < a.values.cols(); ++j) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      a.values(i, j) = {re, im};
    }
  return a;
}

void write_coefficients_csv(const TrigPolynomial& f, std::ostream& out) {
  for (int l = 0; l < f.d(); ++l) out << "k_" << (l + 1) << ',';
  out << "row,col,re,im\n";
  for (const auto& [k, block] : f.coefficients())
    for (int i = 0; i < f.r(); ++i)
      for (int j = 0; j < f.r(); ++j) {
        for (auto v : k) out << v << ',';
        out << (i + 1) << ',' << (j + 1) << ',' << format_number(block(i, j).real()) << ','
            << format_number(block(i, j).imag()) << '\n';
      }
}

TrigPolynomial read_coefficients_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, "empty coefficient table");
  const auto columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  const int d = columns - 4;
  if (d < 1 || line.rfind("k_1,", 0) != 0)
    throw Error(ErrorKind::io, "coefficient table header must be k_1,...,k_d,row,col,re,im");
  struct Row {
    std::vector<std::int64_t> k;
    int i, j;
    cplx v;
  };
  std::vector<Row> rows;
  int r = 1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != columns)
      throw Error(ErrorKind::io, "coefficient table line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(columns) + " fields");
    try {
      Row row;
      for (int l = 0; l < d; ++l) row.k.push_back(std::stoll(cells[l]));
      row.i = std::stoi(cells[d]);
      row.j = std::stoi(cells[d + 1]);
      row.v = {std::stod(cells[d + 2]), std::stod(cells[d + 3])};
      if (row.i < 1 || row.j < 1) throw std::invalid_argument("index");
      r = std::max({r, row.i, row.j});
      rows.push_back(std::move(row));
    } catch (const std::exception&) {
      throw Error(ErrorKind::io, "coefficient table line " + std::to_string(line_no) + " is malformed");
    }
  }
  std::map<MultiIndex, CMatrix> blocks;
  for (const auto& row : rows) {
    auto [it, inserted] = blocks.try_emplace(MultiIndex(row.k), CMatrix::Zero(r, r));
    it->second(row.i - 1, row.j - 1) = row.v;
  }
  TrigPolynomial f(d, r);
  for (const auto& [k, b] : blocks) f.set(k, b);
  return f;
}

}  // namespace gltlab
