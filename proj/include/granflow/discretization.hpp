#pragma once

// Staggered strain/stress evaluation shared by the momentum solver and the
// energy diagnostics.
//
// D11, D22 live at cell centres and D12 at grid nodes (i hx, j hy). Each
// location carries a full tensor: cells take D12 as the average of their four
// corner nodes, nodes take D11 and D22 as the average of the adjacent cells.
// Nodes on a wall (corners excluded) hold the strain of a local balance between
// the bulk shear stress and the regularized slip traction.

#include <cstddef>
#include <vector>

#include "granflow/fields.hpp"
#include "granflow/rheology.hpp"

namespace granflow {

enum class WallSide { bottom, top, left, right };

struct WallNode {
  int i = 0;
  int j = 0;
  WallSide side = WallSide::bottom;
  double h_normal = 0.0;      // grid spacing normal to the wall
  double h_tangent = 0.0;
  double u0 = 0.0;            // tangential velocity on the nearest face (signed)
  double slip_speed = 0.0;    // |v_tau| on the wall
  double traction = 0.0;      // |s_n(v_tau)|
  double gamma_eff = 0.0;     // traction / |u0| (limit value at u0 = 0)
};

struct StressState {
  Grid grid;
  ScalarField tau;                      // yield stress per cell
  SymTensorField D, Z, V;               // cell tensors
  std::vector<SymTensor2> D_node, Z_node, V_node;  // (nx+1) x (ny+1)
  std::vector<double> tau_node;
  std::vector<WallNode> walls;

  std::size_t node_index(int i, int j) const {
    return static_cast<std::size_t>(j) * (grid.nx + 1) + i;
  }
  bool interior_node(int i, int j) const { return i > 0 && i < grid.nx && j > 0 && j < grid.ny; }
};

/// Solves 2 mu(|D|) (|u0| - w)/h = s_n(w) for the wall slip speed w in [0, |u0|].
/// `diag` carries the wall-node D11, D22 (its xy entry is ignored).
WallNode wall_balance(WallNode node, const SymTensor2& diag, double tau, const RheologyParams& rheology,
                      const SlipParams& slip);

StressState evaluate_stress_state(const VectorField& v, const ScalarField& tau,
                                  const RheologyParams& rheology, const SlipParams& slip);

/// Quadratures of the stress power: cells carry the diagonal pairing, interior
/// nodes the off-diagonal one. Wall-node work is accounted for by `slip`.
struct DissipationTerms {
  double stress_power = 0.0;  // (S, D)_h
  double plastic = 0.0;       // (Z, D)_h
  double viscous = 0.0;       // (V, D)_h
  double strain_sq = 0.0;     // ||D||_h^2
  double slip = 0.0;          // sum over walls of |s| |u0| h_t
};

DissipationTerms dissipation_terms(const StressState& state);

}  // namespace granflow
