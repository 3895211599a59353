#include "fracstick/voxel.hpp"

#include "fracstick/errors.hpp"

#include <cmath>

namespace fracstick {

VoxelSet::VoxelSet(int dim, const Vec3& lo, double h, const std::array<int, 3>& count)
    : dim_(dim), lo_(lo), h_(h), count_(count) {
  if (dim != 2 && dim != 3) throw DomainError("VoxelSet: dimension must be 2 or 3");
  if (!(h > 0)) throw DomainError("VoxelSet: spacing must be positive");
  if (dim == 2) count_[2] = 1;
  for (int k = 0; k < 3; ++k)
    if (count_[k] < 1) throw DomainError("VoxelSet: empty grid");
  bits_.assign(static_cast<std::size_t>(count_[0]) * count_[1] * count_[2], 0);
}

VoxelSet VoxelSet::from_predicate(int dim, const Vec3& lo, double h, const std::array<int, 3>& count,
                                  const std::function<bool(const Vec3&)>& inside) {
  VoxelSet v(dim, lo, h, count);
  for (std::size_t i = 0; i < v.size(); ++i) v.bits_[i] = inside(v.centre(i)) ? 1 : 0;
  return v;
}

std::array<int, 3> VoxelSet::coords(std::size_t idx) const {
  const int i = static_cast<int>(idx % count_[0]);
  const std::size_t rest = idx / count_[0];
  return {i, static_cast<int>(rest % count_[1]), static_cast<int>(rest / count_[1])};
}

Vec3 VoxelSet::centre(std::size_t idx) const {
  const auto c = coords(idx);
  Vec3 x{0, 0, 0};
  for (int k = 0; k < dim_; ++k) x[k] = lo_[k] + (c[k] + 0.5) * h_;
  return x;
}

std::size_t VoxelSet::cardinality() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

bool VoxelSet::contains(const Vec3& X) const {
  int c[3] = {0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    const double q = std::floor((X[k] - lo_[k]) / h_);
    if (q < 0 || q >= count_[k]) return false;
    c[k] = static_cast<int>(q);
  }
  return bits_[index(c[0], c[1], c[2])] != 0;
}

bool VoxelSet::same_grid(const VoxelSet& o) const {
  return dim_ == o.dim_ && lo_ == o.lo_ && h_ == o.h_ && count_ == o.count_;
}

VoxelSet VoxelSet::complement() const {
  VoxelSet out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

VoxelSet VoxelSet::intersect(const VoxelSet& o) const {
  if (!same_grid(o)) throw PreconditionError("VoxelSet: grids differ");
  VoxelSet out = *this;
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] & o.bits_[i];
  return out;
}

VoxelSet VoxelSet::minus(const VoxelSet& o) const {
  if (!same_grid(o)) throw PreconditionError("VoxelSet: grids differ");
  VoxelSet out = *this;
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] & (o.bits_[i] ^ 1);
  return out;
}

VoxelSet VoxelSet::unite(const VoxelSet& o) const {
  if (!same_grid(o)) throw PreconditionError("VoxelSet: grids differ");
  VoxelSet out = *this;
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] | o.bits_[i];
  return out;
}

VoxelSet VoxelSet::empty_like() const {
  VoxelSet out = *this;
  for (auto& b : out.bits_) b = 0;
  return out;
}

}  // namespace fracstick
