#include "gltlab/multiindex.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>

#include "gltlab/error.hpp"

namespace gltlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_size: return "invalid-size";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::domain: return "domain";
    case ErrorKind::singular_evaluation: return "singular-evaluation";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::size_cap: return "size-cap";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::mode: return "mode";
    case ErrorKind::calculus: return "calculus";
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::semantic: return "semantic";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

ParseError::ParseError(ErrorKind kind, int line, int column, const std::string& message)
    : Error(kind, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

MultiIndex::MultiIndex(std::vector<std::int64_t> entries) : entries_(std::move(entries)) {}

MultiIndex::MultiIndex(std::initializer_list<std::int64_t> entries) : entries_(entries) {}

MultiIndex MultiIndex::filled(std::size_t d, std::int64_t value) {
  return MultiIndex(std::vector<std::int64_t>(d, value));
}

std::int64_t MultiIndex::min_entry() const {
  if (entries_.empty()) throw Error(ErrorKind::invalid_size, "empty multi-index");
  return *std::min_element(entries_.begin(), entries_.end());
}

std::int64_t MultiIndex::max_abs_entry() const {
  std::int64_t m = 0;
  for (auto e : entries_) m = std::max(m, e < 0 ? -e : e);
  return m;
}

std::string MultiIndex::to_string() const {
  std::string out;
  for (std::size_t j = 0; j < entries_.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(entries_[j]);
  }
  return out;
}

MultiIndex MultiIndex::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s += c;
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  if (s.empty()) throw Error(ErrorKind::configuration, "empty multi-index");
  std::vector<std::int64_t> entries;
  std::size_t pos = 0;
  while (true) {
    auto comma = s.find(',', pos);
    auto token = std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
      throw Error(ErrorKind::configuration, "malformed multi-index '" + std::string(text) + "'");
    entries.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return MultiIndex(std::move(entries));
}

namespace {

void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorKind::invalid_size, "multi-index dimension mismatch: " + a.to_string() +
                                             " vs " + b.to_string());
}

}  // namespace

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  std::vector<std::int64_t> e(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) e[j] = a[j] + b[j];
  return MultiIndex(std::move(e));
}

MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  std::vector<std::int64_t> e(a.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) e[j] = a[j] - b[j];
  return MultiIndex(std::move(e));
}

MultiIndex operator-(const MultiIndex& a) {
  std::vector<std::int64_t> e(a.begin(), a.end());
  for (auto& v : e) v = -v;
  return MultiIndex(std::move(e));
}

MultiIndex operator+(const MultiIndex& a, std::int64_t s) {
  std::vector<std::int64_t> e(a.begin(), a.end());
  for (auto& v : e) v += s;
  return MultiIndex(std::move(e));
}

bool componentwise_leq(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  for (std::size_t j = 0; j < a.dim(); ++j)
    if (a[j] > b[j]) return false;
  return true;
}

std::int64_t nu(const MultiIndex& m) {
  if (m.empty()) throw Error(ErrorKind::invalid_size, "empty multi-index");
  std::int64_t p = 1;
  for (auto e : m) {
    if (e < 1) throw Error(ErrorKind::invalid_size, "non-positive size entry in " + m.to_string());
    if (p > std::numeric_limits<std::int64_t>::max() / e)
      throw Error(ErrorKind::invalid_size, "size product overflows for " + m.to_string());
    p *= e;
  }
  return p;
}

MultiIndexInterval::MultiIndexInterval(MultiIndex lower, MultiIndex upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty()) throw Error(ErrorKind::invalid_size, "empty interval bounds");
  if (!componentwise_leq(lower_, upper_))
    throw Error(ErrorKind::invalid_size,
                "interval lower bound " + lower_.to_string() + " exceeds " + upper_.to_string());
}

MultiIndexInterval MultiIndexInterval::ones_to(const MultiIndex& n) {
  nu(n);
  return MultiIndexInterval(MultiIndex::filled(n.dim(), 1), n);
}

bool MultiIndexInterval::contains(const MultiIndex& j) const {
  return j.dim() == dim() && componentwise_leq(lower_, j) && componentwise_leq(j, upper_);
}

std::int64_t lex_rank(const MultiIndex& j, const MultiIndexInterval& interval) {
  if (!interval.contains(j))
    throw Error(ErrorKind::out_of_range, "multi-index " + j.to_string() + " outside [" +
                                             interval.lower().to_string() + "; " +
                                             interval.upper().to_string() + "]");
  const auto ext = interval.extent();
  std::int64_t rank = 0;
  for (std::size_t l = 0; l < j.dim(); ++l) rank = rank * ext[l] + (j[l] - interval.lower()[l]);
  return rank;
}

MultiIndex lex_unrank(std::int64_t rank, const MultiIndexInterval& interval) {
  const auto ext = interval.extent();
  if (rank < 0 || rank >= nu(ext))
    throw Error(ErrorKind::out_of_range,
                "rank " + std::to_string(rank) + " outside [0, " + std::to_string(nu(ext)) + ")");
  std::vector<std::int64_t> e(ext.dim());
  for (std::size_t l = ext.dim(); l-- > 0;) {
    e[l] = interval.lower()[l] + rank % ext[l];
    rank /= ext[l];
  }
  return MultiIndex(std::move(e));
}

}  // namespace gltlab
