#pragma once

#include "fracstick/kernel.hpp"
#include "fracstick/voxel.hpp"

namespace fracstick {

struct InteractionResult {
  double value = 0.0;
  /// Sum over adjacent pairs of |subcell average - midpoint rule|.
  double singular_estimate = 0.0;
};

struct PerimeterResult {
  /// In-box value; the true perimeter lies in [value, value + tail_bound]
  /// when E is contained in the box.
  double value = 0.0;
  double tail_bound = 0.0;
  double singular_estimate = 0.0;
};

/// L_s(A,B) = sum over voxel pairs of the kernel |x-y|^(-(n+1+s)) times h^(2(n+1)).
/// Pairs sharing a face, edge or corner use 2^d x 2^d subcell midpoints.
/// Pairs are visited in ascending (min, max) voxel order, so the result is
/// bitwise symmetric in A and B and independent of the worker count.
InteractionResult interaction_detailed(const VoxelSet& A, const VoxelSet& B, const FractionalParams& params);
double interaction(const VoxelSet& A, const VoxelSet& B, const FractionalParams& params);

/// Per_s(E, Omega) from the three L_s terms, with complements taken inside the box.
PerimeterResult fractional_perimeter(const VoxelSet& E, const VoxelSet& Omega, const FractionalParams& params);

/// L_s(A, E^c) - L_s(A, E \ A) for A inside E and Omega.
double energy_delta_remove(const VoxelSet& E, const VoxelSet& A, const VoxelSet& Omega,
                           const FractionalParams& params);

}  // namespace fracstick
