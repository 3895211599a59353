#include "fracstick/perimeter.hpp"

#include "fracstick/errors.hpp"
#include "fracstick/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace fracstick {
namespace {

/// Pair weights indexed by |offset| per axis.
class PairTable {
 public:
  PairTable(const VoxelSet& grid, const FractionalParams& params) : m_(grid.dim()), count_(grid.count()) {
    const double h = grid.h();
    const double e = m_ + params.s;
    weight_.assign(static_cast<std::size_t>(count_[0]) * count_[1] * count_[2], 0.0);
    singular_.assign(weight_.size(), 0.0);
    for (int k = 0; k < count_[2]; ++k)
      for (int j = 0; j < count_[1]; ++j)
        for (int i = 0; i < count_[0]; ++i) {
          if (i == 0 && j == 0 && k == 0) continue;
          const int d[3] = {i, j, k};
          double r2 = 0.0;
          for (int a = 0; a < m_; ++a) r2 += (d[a] * h) * (d[a] * h);
          const double mid = std::pow(h, 2 * m_) * std::pow(r2, -0.5 * e);
          double w = mid;
          if (std::max({i, j, k}) <= 1) {
            // average over subcell midpoints of both voxels
            const int sub = 1 << m_;
            double sum = 0.0;
            for (int sa = 0; sa < sub; ++sa)
              for (int sb = 0; sb < sub; ++sb) {
                double q2 = 0.0;
                for (int a = 0; a < m_; ++a) {
                  const double oa = ((sa >> a) & 1) ? 0.25 : -0.25;
                  const double ob = ((sb >> a) & 1) ? 0.25 : -0.25;
                  const double dx = h * (d[a] + ob - oa);
                  q2 += dx * dx;
                }
                sum += std::pow(q2, -0.5 * e);
              }
            w = std::pow(h, 2 * m_) * sum / (sub * sub);
            singular_[slot(i, j, k)] = std::fabs(w - mid);
          }
          weight_[slot(i, j, k)] = w;
        }
  }

  std::size_t slot(int i, int j, int k) const { return (static_cast<std::size_t>(k) * count_[1] + j) * count_[0] + i; }

  std::size_t lookup(const std::array<int, 3>& a, const std::array<int, 3>& b) const {
    return slot(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2]));
  }

  double weight(std::size_t slot) const { return weight_[slot]; }
  double singular(std::size_t slot) const { return singular_[slot]; }

 private:
  int m_;
  std::array<int, 3> count_;
  std::vector<double> weight_, singular_;
};

void check_params(const VoxelSet& v, const FractionalParams& params) {
  params.validate();
  if (v.dim() != params.n + 1) throw PreconditionError("perimeter: voxel dimension must be n+1");
}

}  // namespace

InteractionResult interaction_detailed(const VoxelSet& A, const VoxelSet& B, const FractionalParams& params) {
  if (!A.same_grid(B)) throw PreconditionError("interaction: sets live on different grids");
  check_params(A, params);
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A.at(i) && B.at(i)) throw PreconditionError("interaction: A and B overlap");
    if (A.at(i) || B.at(i)) members.push_back(i);
  }
  InteractionResult out;
  if (members.empty()) return out;
  const PairTable table(A, params);
  std::vector<std::array<int, 3>> coords(members.size());
  for (std::size_t k = 0; k < members.size(); ++k) coords[k] = A.coords(members[k]);

  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (members.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0), partial_sing(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    double sum = 0.0, sing = 0.0;
    const std::size_t end = std::min(members.size(), (b + 1) * kBlock);
    for (std::size_t p = b * kBlock; p < end; ++p) {
      const bool pa = A.at(members[p]);
      for (std::size_t q = p + 1; q < members.size(); ++q) {
        if (pa == A.at(members[q])) continue;
        const std::size_t slot = table.lookup(coords[p], coords[q]);
        sum += table.weight(slot);
        sing += table.singular(slot);
      }
    }
    partial[b] = sum;
    partial_sing[b] = sing;
  });
  for (std::size_t b = 0; b < blocks; ++b) {
    out.value += partial[b];
    out.singular_estimate += partial_sing[b];
  }
  return out;
}

double interaction(const VoxelSet& A, const VoxelSet& B, const FractionalParams& params) {
  return interaction_detailed(A, B, params).value;
}

PerimeterResult fractional_perimeter(const VoxelSet& E, const VoxelSet& Omega, const FractionalParams& params) {
  if (!E.same_grid(Omega)) throw PreconditionError("fractional_perimeter: E and Omega on different grids");
  check_params(E, params);
  const VoxelSet Ec = E.complement();
  const VoxelSet Oc = Omega.complement();
  const VoxelSet E_in = E.intersect(Omega), E_out = E.intersect(Oc);
  const VoxelSet Ec_in = Ec.intersect(Omega), Ec_out = Ec.intersect(Oc);
  PerimeterResult out;
  for (const auto& [a, b] : {std::pair{&E_in, &Ec_in}, std::pair{&E_in, &Ec_out}, std::pair{&E_out, &Ec_in}}) {
    const InteractionResult r = interaction_detailed(*a, *b, params);
    out.value += r.value;
    out.singular_estimate += r.singular_estimate;
  }
  // kernel mass beyond the box seen from each voxel of E inside Omega
  const int m = E.dim();
  const double h = E.h();
  const double S = sphere_measure(m - 1);
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (!E_in.at(i)) continue;
    const auto c = E.coords(i);
    double delta = INFINITY;
    for (int a = 0; a < m; ++a) delta = std::min({delta, c[a] * h, (E.count()[a] - 1 - c[a]) * h});
    if (delta <= 0.0) {
      out.tail_bound = INFINITY;
      continue;
    }
    out.tail_bound += std::pow(h, m) * S * std::pow(delta, -params.s) / params.s;
  }
  return out;
}

double energy_delta_remove(const VoxelSet& E, const VoxelSet& A, const VoxelSet& Omega,
                           const FractionalParams& params) {
  if (!E.same_grid(A) || !E.same_grid(Omega)) throw PreconditionError("energy_delta_remove: grids differ");
  for (std::size_t i = 0; i < A.size(); ++i)
    if (A.at(i) && !(E.at(i) && Omega.at(i))) throw PreconditionError("energy_delta_remove: A must lie in E and Omega");
  return interaction(A, E.complement(), params) - interaction(A, E.minus(A), params);
}

}  // namespace fracstick
