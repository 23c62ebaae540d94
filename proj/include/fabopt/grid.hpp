#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fabopt {

/// Dense row-major 2D array. Row index first, column second.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{}) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
      throw std::invalid_argument("grid dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int r, int c) const { return r >= 0 && r < rows_ && c >= 0 && c < cols_; }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool same_shape(const Grid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// Boolean pixel mask (0 or 1).
using Mask = Grid<std::uint8_t>;
/// Real-valued pixel array.
using RealGrid = Grid<double>;

/// Design pixels: -1 is void, +1 is solid.
class BinaryGrid {
 public:
  static constexpr std::int8_t kVoid = -1;
  static constexpr std::int8_t kSolid = 1;

  BinaryGrid() = default;
  BinaryGrid(int rows, int cols, std::int8_t fill = kVoid);

  /// Validates that every entry is exactly -1 or +1.
  static BinaryGrid from_values(int rows, int cols, std::vector<std::int8_t> values);
  /// +1 where the mask is set, -1 elsewhere.
  static BinaryGrid from_solid_mask(const Mask& solid);

  int rows() const { return values_.rows(); }
  int cols() const { return values_.cols(); }
  std::size_t size() const { return values_.size(); }

  std::int8_t operator()(int r, int c) const { return values_(r, c); }
  std::int8_t operator[](std::size_t i) const { return values_[i]; }
  void set(int r, int c, std::int8_t v);

  bool solid(int r, int c) const { return values_(r, c) > 0; }

  Mask solid_mask() const;
  Mask void_mask() const;
  BinaryGrid negated() const;
  BinaryGrid transposed() const;

  const Grid<std::int8_t>& values() const { return values_; }

  friend bool operator==(const BinaryGrid& a, const BinaryGrid& b) {
    return a.values_ == b.values_;
  }

 private:
  Grid<std::int8_t> values_;
};

Mask logical_not(const Mask& m);
Mask logical_and(const Mask& a, const Mask& b);
Mask logical_or(const Mask& a, const Mask& b);
bool any(const Mask& m);
std::size_t count(const Mask& m);

}  // namespace fabopt
