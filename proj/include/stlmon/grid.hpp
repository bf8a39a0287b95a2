#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stlmon/errors.hpp"
#include "stlmon/util.hpp"

namespace stlmon {

struct GridDim {
  double lo = 0.0;
  double hi = 1.0;
  int cells = 1;
};

/// Uniform cell grid over a bounded box. Cells are addressed by a single
/// linear index (row-major, last dimension fastest); each cell is identified
/// with its center point, which lies strictly inside the bounds.
class GridSpec {
 public:
  GridSpec() = default;

  explicit GridSpec(std::vector<GridDim> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw ConfigError("grid needs at least one dimension");
    cell_count_ = 1;
    for (const auto& d : dims_) {
      if (!std::isfinite(d.lo) || !std::isfinite(d.hi))
        throw ConfigError("grid bounds must be finite");
      if (!(d.lo < d.hi)) throw ConfigError("grid bounds must satisfy lo < hi");
      if (d.cells < 1) throw ConfigError("grid needs at least one cell per dimension");
      if (cell_count_ > std::numeric_limits<int>::max() / d.cells)
        throw ConfigError("grid too large");
      cell_count_ *= d.cells;
    }
  }

  int dim() const { return static_cast<int>(dims_.size()); }
  int cell_count() const { return cell_count_; }
  const GridDim& dim_spec(int d) const { return dims_[static_cast<size_t>(d)]; }
  double step(int d) const {
    const auto& s = dims_[static_cast<size_t>(d)];
    return (s.hi - s.lo) / s.cells;
  }

  /// Containing cell of a point, or nullopt when the point is outside the box.
  std::optional<int> cell_of(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) throw DimensionMismatch("state dimension mismatch");
    int index = 0;
    for (size_t d = 0; d < dims_.size(); ++d) {
      const auto& s = dims_[d];
      if (!(x[d] >= s.lo && x[d] <= s.hi)) return std::nullopt;  // NaN lands here too
      int i = static_cast<int>((x[d] - s.lo) / step(static_cast<int>(d)));
      if (i >= s.cells) i = s.cells - 1;  // x exactly on the upper bound
      if (i < 0) i = 0;
      index = index * s.cells + i;
    }
    return index;
  }

  std::vector<double> center(int cell) const {
    std::vector<double> out(dims_.size());
    center_into(cell, out);
    return out;
  }

  void center_into(int cell, std::span<double> out) const {
    for (int d = dim() - 1; d >= 0; --d) {
      const auto& s = dims_[static_cast<size_t>(d)];
      int i = cell % s.cells;
      cell /= s.cells;
      out[static_cast<size_t>(d)] = s.lo + (i + 0.5) * step(d);
    }
  }

  std::string describe() const {
    std::string out = "grid";
    for (const auto& s : dims_) {
      out += " [" + fmt_double(s.lo) + "," + fmt_double(s.hi) + "]/" + std::to_string(s.cells);
    }
    return out;
  }

  bool operator==(const GridSpec& o) const {
    if (dims_.size() != o.dims_.size()) return false;
    for (size_t d = 0; d < dims_.size(); ++d) {
      if (dims_[d].lo != o.dims_[d].lo || dims_[d].hi != o.dims_[d].hi ||
          dims_[d].cells != o.dims_[d].cells)
        return false;
    }
    return true;
  }

 private:
  std::vector<GridDim> dims_;
  int cell_count_ = 0;
};

/// Set of grid cells, stored as a bitset over the linear cell index.
class StateSet {
 public:
  StateSet() = default;

  explicit StateSet(int cells, bool fill = false)
      : cells_(cells), words_((static_cast<size_t>(cells) + 63) / 64, 0) {
    if (fill) {
      for (auto& w : words_) w = ~0ull;
      mask_tail();
    }
  }

  static StateSet full(int cells) { return StateSet(cells, true); }

  int universe_size() const { return cells_; }

  bool test(int i) const {
    return (words_[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1ull;
  }
  void set(int i) { words_[static_cast<size_t>(i) >> 6] |= 1ull << (i & 63); }
  void reset(int i) { words_[static_cast<size_t>(i) >> 6] &= ~(1ull << (i & 63)); }

  int count() const {
    int n = 0;
    for (auto w : words_) n += __builtin_popcountll(w);
    return n;
  }
  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  bool all() const { return count() == cells_; }

  StateSet& operator|=(const StateSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  StateSet& operator&=(const StateSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  /// Set difference: keep cells not in o.
  StateSet& and_not(const StateSet& o) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  StateSet complement() const {
    StateSet out = *this;
    for (auto& w : out.words_) w = ~w;
    out.mask_tail();
    return out;
  }

  friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
  friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }

  bool operator==(const StateSet& o) const {
    return cells_ == o.cells_ && words_ == o.words_;
  }

  template <class F>
  void for_each(F&& f) const {
    for (size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        int b = __builtin_ctzll(bits);
        f(static_cast<int>(w * 64) + b);
        bits &= bits - 1;
      }
    }
  }

  std::vector<int> to_indices() const {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(count()));
    for_each([&](int i) { out.push_back(i); });
    return out;
  }

  int min_cell() const {
    for (size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return static_cast<int>(w * 64) + __builtin_ctzll(words_[w]);
    return -1;
  }
  int max_cell() const {
    for (size_t w = words_.size(); w-- > 0;)
      if (words_[w]) return static_cast<int>(w * 64) + 63 - __builtin_clzll(words_[w]);
    return -1;
  }

  /// Nibble-per-character encoding, cell 0 in the low bit of the first digit.
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    int nibbles = (cells_ + 3) / 4;
    out.reserve(static_cast<size_t>(nibbles));
    for (int n = 0; n < nibbles; ++n) {
      int v = static_cast<int>((words_[static_cast<size_t>(n) >> 4] >> ((n & 15) * 4)) & 0xf);
      out.push_back(digits[v]);
    }
    return out;
  }

  static StateSet from_hex(int cells, std::string_view hex) {
    StateSet out(cells);
    int nibbles = (cells + 3) / 4;
    if (static_cast<int>(hex.size()) != nibbles)
      throw ConfigError("state set encoding has wrong length");
    for (int n = 0; n < nibbles; ++n) {
      char c = hex[static_cast<size_t>(n)];
      int v = c >= '0' && c <= '9' ? c - '0'
            : c >= 'a' && c <= 'f' ? c - 'a' + 10
            : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                   : -1;
      if (v < 0) throw ConfigError("state set encoding has invalid digit");
      out.words_[static_cast<size_t>(n) >> 4] |= static_cast<std::uint64_t>(v) << ((n & 15) * 4);
    }
    out.mask_tail();
    return out;
  }

 private:
  void mask_tail() {
    if (cells_ & 63) words_.back() &= (1ull << (cells_ & 63)) - 1;
  }

  int cells_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace stlmon
