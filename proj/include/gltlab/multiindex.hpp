#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace gltlab {

/// A d-tuple of integers. Used both for sizes (entries >= 1) and for
/// offsets such as Fourier indices (any sign). Comparison is lexicographic.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::int64_t> entries);
  MultiIndex(std::initializer_list<std::int64_t> entries);

  static MultiIndex filled(std::size_t d, std::int64_t value);

  std::size_t dim() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::int64_t operator[](std::size_t j) const { return entries_[j]; }
  std::int64_t& operator[](std::size_t j) { return entries_[j]; }
  const std::vector<std::int64_t>& entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::int64_t min_entry() const;
  std::int64_t max_abs_entry() const;

  /// "2,3,4"
  std::string to_string() const;
  /// Accepts "2,3,4", optionally wrapped in parentheses; whitespace is ignored.
  static MultiIndex parse(std::string_view text);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    return a.entries_ <=> b.entries_;
  }

 private:
  std::vector<std::int64_t> entries_;
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a, const MultiIndex& b);
MultiIndex operator-(const MultiIndex& a);
/// Adds the scalar to every entry.
MultiIndex operator+(const MultiIndex& a, std::int64_t s);

/// Componentwise a <= b.
bool componentwise_leq(const MultiIndex& a, const MultiIndex& b);

/// Product of the entries. Throws invalid_size for a non-positive entry or
/// an empty index.
std::int64_t nu(const MultiIndex& m);

/// The set {j : lower <= j <= upper} enumerated with the last coordinate
/// varying fastest.
class MultiIndexInterval {
 public:
  MultiIndexInterval(MultiIndex lower, MultiIndex upper);
  /// [1, n]
  static MultiIndexInterval ones_to(const MultiIndex& n);

  const MultiIndex& lower() const noexcept { return lower_; }
  const MultiIndex& upper() const noexcept { return upper_; }
  std::size_t dim() const noexcept { return lower_.dim(); }
  MultiIndex extent() const { return upper_ - lower_ + 1; }
  std::int64_t cardinality() const { return nu(extent()); }
  bool contains(const MultiIndex& j) const;

 private:
  MultiIndex lower_;
  MultiIndex upper_;
};

/// 0-based position of j in the lexicographic enumeration of the interval.
std::int64_t lex_rank(const MultiIndex& j, const MultiIndexInterval& interval);
/// Inverse of lex_rank.
MultiIndex lex_unrank(std::int64_t rank, const MultiIndexInterval& interval);

}  // namespace gltlab
