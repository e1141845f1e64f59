#pragma once

#include <span>
#include <vector>

#include "mmfe/errors.hpp"
#include "mmfe/geometry.hpp"
#include "mmfe/mesh.hpp"

namespace mmfe {

// Compressed sparse row matrix; applied per field component.
struct CsrMatrix {
    std::size_t rows = 0;
    std::vector<int> row_ptr;  // rows + 1 entries
    std::vector<int> cols;     // ascending within each row
    std::vector<double> vals;

    void apply(std::span<const double> x, std::span<double> y) const;
    double entry(int r, int c) const;  // 0 for positions outside the pattern
};

// Sparse matrix of 3x3 blocks on the same node-adjacency pattern; couples
// the field components.
struct BlockCsrMatrix {
    std::size_t rows = 0;
    std::vector<int> row_ptr;
    std::vector<int> cols;
    std::vector<std::array<double, 9>> vals;  // row-major 3x3 per entry

    void apply_add(const VectorField& x, VectorField& y) const;
    double max_abs_entry() const;
};

// Assembled operators of the stabilized field equation
//   eps E_tt + sigma E_t - Lap E - grad div((eps - 1) E) = 0
// with P1 elements per component, coefficients piecewise constant per tet,
// and row-sum mass lumping.
struct FemSystem {
    std::vector<double> lumped_mass_eps;    // positive
    std::vector<double> lumped_mass_sigma;  // nonnegative
    CsrMatrix stiffness;                    // unweighted -Lap, componentwise
    BlockCsrMatrix divdiv;                  // (eps-1)-weighted grad-div coupling
    std::vector<int> interface_nodes;       // mesh boundary nodes, ascending
};

FemSystem assemble(const TetraMesh& mesh, const MaterialField& field);

// Three-level leapfrog state. After fem_step, E_curr holds time t and E_prev
// holds t - tau.
struct FemState {
    VectorField E_prev;
    VectorField E_curr;
    VectorField E_next;
    double t = 0.0;
    double tau = 0.0;
};

FemState make_fem_state(const TetraMesh& mesh, double tau);

// Explicit step with the sigma term centered at n:
//   (M_eps + tau/2 M_sigma) E^{n+1}
//     = 2 M_eps E^n - (M_eps - tau/2 M_sigma) E^{n-1} - tau^2 (K + B) E^n.
// Every node advances by this recurrence; interface nodes are Dirichlet
// receivers and must be overwritten afterwards (exchange or
// set_interface_values). Throws CflViolationError once any nodal amplitude
// exceeds blowup_bound.
void fem_step(FemState& state, const FemSystem& system,
              double blowup_bound = kDefaultBlowupBound);

void set_interface_values(FemState& state, const FemSystem& system,
                          std::span<const Vec3> values);

// Leapfrog invariant 1/2 |E^{n+1}-E^n|^2_M / tau^2 + 1/2 <(K+B) E^n, E^{n+1}>;
// exactly conserved when sigma = 0 and the boundary is frozen.
double discrete_energy(const FemState& state, const FemSystem& system);

// P1 basis gradients and the (positive) volume of one tetrahedron.
struct ElementGeometry {
    double volume;
    std::array<Vec3, 4> grad;
};

ElementGeometry element_geometry(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);

}  // namespace mmfe
