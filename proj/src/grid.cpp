#include "fabopt/grid.hpp"

namespace fabopt {

BinaryGrid::BinaryGrid(int rows, int cols, std::int8_t fill) : values_(rows, cols, fill) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("binary grid must be at least 1x1");
  }
  if (fill != kVoid && fill != kSolid) {
    throw std::invalid_argument("binary grid values must be -1 or +1");
  }
}

BinaryGrid BinaryGrid::from_values(int rows, int cols, std::vector<std::int8_t> values) {
  if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw std::invalid_argument("value count does not match grid shape");
  }
  BinaryGrid g(rows, cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != kVoid && values[i] != kSolid) {
      throw std::invalid_argument("binary grid values must be -1 or +1, got " +
                                  std::to_string(values[i]));
    }
  }
  g.values_.data() = std::move(values);
  return g;
}

BinaryGrid BinaryGrid::from_solid_mask(const Mask& solid) {
  BinaryGrid g(solid.rows(), solid.cols());
  for (std::size_t i = 0; i < solid.size(); ++i) {
    g.values_[i] = solid[i] ? kSolid : kVoid;
  }
  return g;
}

void BinaryGrid::set(int r, int c, std::int8_t v) {
  if (v != kVoid && v != kSolid) {
    throw std::invalid_argument("binary grid values must be -1 or +1");
  }
  values_(r, c) = v;
}

Mask BinaryGrid::solid_mask() const {
  Mask m(rows(), cols());
  for (std::size_t i = 0; i < size(); ++i) m[i] = values_[i] > 0;
  return m;
}

Mask BinaryGrid::void_mask() const {
  Mask m(rows(), cols());
  for (std::size_t i = 0; i < size(); ++i) m[i] = values_[i] < 0;
  return m;
}

BinaryGrid BinaryGrid::negated() const {
  BinaryGrid g = *this;
  for (auto& v : g.values_.data()) v = static_cast<std::int8_t>(-v);
  return g;
}

BinaryGrid BinaryGrid::transposed() const {
  BinaryGrid g(cols(), rows());
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < cols(); ++c) g.values_(c, r) = values_(r, c);
  }
  return g;
}

Mask logical_not(const Mask& m) {
  Mask out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = !m[i];
  return out;
}

Mask logical_and(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mask shape mismatch");
  Mask out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

Mask logical_or(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mask shape mismatch");
  Mask out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}

bool any(const Mask& m) {
  for (auto v : m.data()) {
    if (v) return true;
  }
  return false;
}

std::size_t count(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m.data()) n += v ? 1 : 0;
  return n;
}

}  // namespace fabopt
