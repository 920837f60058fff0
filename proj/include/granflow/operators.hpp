#pragma once

// Finite-difference operators on the MAC grid. None of them mutate inputs.

#include <cstdint>

#include "granflow/fields.hpp"

namespace granflow {

enum class AdvectionScheme { upwind, central };

/// Cell-centred symmetric gradient (centred differences, one-sided at boundary cells).
SymTensorField sym_gradient(const VectorField& v);

/// Conservative face-difference divergence, including whatever sits on boundary faces.
ScalarField divergence(const VectorField& v);

/// Face gradient of a cell-centred scalar; boundary normal faces are zero (Neumann).
VectorField gradient(const ScalarField& s);

/// Five-point Laplacian with zero normal derivative, equal to divergence(gradient(s)).
ScalarField laplacian_neumann(const ScalarField& s);

/// v . grad s at cell centres.
ScalarField advect_scalar(const ScalarField& s, const VectorField& v,
                          AdvectionScheme scheme = AdvectionScheme::upwind);

/// Smooth cutoff: 1 on [0, n], 0 on [2n, inf), cubic Hermite blend in between.
double cutoff_gn(double u, double n);
double cutoff_gn_derivative(double u, double n);

/// div(v (x) v) on interior faces, conservative central form.
VectorField convective_term(const VectorField& v);

/// div(v (x) v) G_n(|v|^2), the cutoff evaluated face by face.
VectorField convective_term_truncated(const VectorField& v, std::int64_t reg_n);

}  // namespace granflow
