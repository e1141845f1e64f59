#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mmfe/errors.hpp"
#include "mmfe/geometry.hpp"

namespace mmfe {

enum class FdmNodeKind : std::uint8_t {
    Outer = 0,  // on the hybrid-domain boundary; absorbing / source updates
    Active,     // interior wave-equation stencil
    Overlap,    // first layer strictly inside the FEM box; receives FEM values
    Inactive,   // deeper inside the FEM box; untouched
};

// Structured grid for the vacuum wave equation on the hybrid domain. With a
// FEM box set, nodes strictly inside it are owned by the FEM solver except
// for the one-layer overlap band that closes the FDM stencil at the shared
// boundary shell.
struct FdmGrid {
    Box extent;
    double h = 0.0;
    int n = 0;  // nodes per axis
    std::vector<FdmNodeKind> kind;
    VectorField E_prev;
    VectorField E_curr;
    VectorField E_next;

    int index(int i, int j, int k) const { return (k * n + j) * n + i; }

    std::array<int, 3> lattice_of(int idx) const {
        return {idx % n, (idx / n) % n, idx / (n * n)};
    }

    Vec3 point(int i, int j, int k) const {
        return {extent.lo.x + i * h, extent.lo.y + j * h, extent.lo.z + k * h};
    }

    std::size_t node_count() const { return kind.size(); }
};

// fem_box, when set, must be lattice-aligned with the grid (LatticeMismatchError).
FdmGrid make_fdm_grid(const Box& extent, double h, const std::optional<Box>& fem_box);

// Leapfrog update E^{n+1} = 2E^n - E^{n-1} + tau^2 Lap_h E^n at Active nodes,
// per component; all other nodes carry their value forward. Rotates the time
// levels. Throws CflViolationError once any nodal amplitude exceeds
// blowup_bound.
void fdm_step(FdmGrid& grid, double tau, double blowup_bound = kDefaultBlowupBound);

// First-order absorbing update (interpolated Engquist-Majda) on the six
// outer faces,
//   E^{n+1}_b = E^n_{b-1} + (lambda-1)/(lambda+1) (E^{n+1}_{b-1} - E^n_b),
// lambda = tau/h, b-1 the inward neighbor; at lambda = 1 this is exact
// outflow transport. Faces are processed in axis order x1, x2, x3 (low side
// then high side); later writes win on edges/corners.
void apply_absorbing(FdmGrid& grid, double tau);

// Plane-wave excitation: during 0 <= t <= 2*pi/omega the top face (x3 max)
// carries E1 = amplitude sin(omega t), E2 = E3 = 0; afterwards the face is
// left to the absorbing update.
void apply_source(FdmGrid& grid, double t, double omega, double amplitude);

// Sum of squared discrete velocity plus squared forward gradients over nodes
// outside the FEM box; monotone after source switch-off.
double fdm_energy(const FdmGrid& grid, double tau);

}  // namespace mmfe
