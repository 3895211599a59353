#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace fracstick {

using Vec3 = std::array<double, 3>;

/// Indicator of a set on a uniform voxel grid in R^dim (dim 2 or 3).
/// Voxel (i,j,k) is the cube lo + h*[i,i+1] x ...; its value is the set
/// membership of its midpoint.
class VoxelSet {
 public:
  VoxelSet() = default;
  VoxelSet(int dim, const Vec3& lo, double h, const std::array<int, 3>& count);

  /// Midpoint classification of `inside`.
  static VoxelSet from_predicate(int dim, const Vec3& lo, double h, const std::array<int, 3>& count,
                                 const std::function<bool(const Vec3&)>& inside);

  int dim() const { return dim_; }
  const Vec3& lo() const { return lo_; }
  double h() const { return h_; }
  const std::array<int, 3>& count() const { return count_; }
  std::size_t size() const { return bits_.size(); }

  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * count_[1] + j) * count_[0] + i;
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3 centre(std::size_t idx) const;

  bool at(std::size_t idx) const { return bits_[idx] != 0; }
  void set(std::size_t idx, bool v) { bits_[idx] = v ? 1 : 0; }
  std::size_t cardinality() const;

  /// Point membership; points outside the box are not in the set.
  bool contains(const Vec3& X) const;

  bool same_grid(const VoxelSet& other) const;
  VoxelSet complement() const;
  VoxelSet intersect(const VoxelSet& other) const;
  VoxelSet minus(const VoxelSet& other) const;
  VoxelSet unite(const VoxelSet& other) const;
  VoxelSet empty_like() const;

 private:
  int dim_ = 2;
  Vec3 lo_{0, 0, 0};
  double h_ = 1.0;
  std::array<int, 3> count_{1, 1, 1};
  std::vector<std::uint8_t> bits_;
};

}  // namespace fracstick
