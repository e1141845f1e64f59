#include "mmfe/fdm.hpp"

#include <cmath>
#include <string>

#include "mmfe/format.hpp"

namespace mmfe {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

int lattice_coord(double value, double origin, double h, const char* what) {
    const double raw = (value - origin) / h;
    const int idx = static_cast<int>(std::llround(raw));
    if (std::abs(idx * h + origin - value) > 1e-9 * h)
        throw LatticeMismatchError(std::string(what) + " coordinate " + format_shortest(value) +
                                   " is not on the grid lattice (origin " +
                                   format_shortest(origin) + ", h " + format_shortest(h) + ")");
    return idx;
}

}  // namespace

FdmGrid make_fdm_grid(const Box& extent, double h, const std::optional<Box>& fem_box) {
    if (h <= 0.0) throw NonDivisibleExtentError("grid step h must be positive");
    FdmGrid grid;
    grid.extent = extent;
    grid.h = h;

    const double ext = extent.hi.x - extent.lo.x;
    const int cells = static_cast<int>(std::llround(ext / h));
    for (int a = 0; a < 3; ++a) {
        const double e = extent.hi[a] - extent.lo[a];
        if (std::abs(e - ext) > 1e-12 || cells < 2 || std::abs(cells * h - ext) > 1e-9 * ext)
            throw NonDivisibleExtentError("hybrid extent must be a cube with edges divisible by h");
    }
    grid.n = cells + 1;

    const std::size_t total = static_cast<std::size_t>(grid.n) * grid.n * grid.n;
    grid.kind.assign(total, FdmNodeKind::Active);
    grid.E_prev.resize(total);
    grid.E_curr.resize(total);
    grid.E_next.resize(total);

    std::array<int, 3> flo{}, fhi{};
    if (fem_box) {
        for (int a = 0; a < 3; ++a) {
            flo[a] = lattice_coord(fem_box->lo[a], extent.lo[a], h, "FEM box");
            fhi[a] = lattice_coord(fem_box->hi[a], extent.lo[a], h, "FEM box");
            if (flo[a] < 1 || fhi[a] > grid.n - 2 || fhi[a] - flo[a] < 4)
                throw LatticeMismatchError(
                    "FEM box must sit strictly inside the hybrid domain with room for the "
                    "overlap band");
        }
    }

    for (int k = 0; k < grid.n; ++k) {
        for (int j = 0; j < grid.n; ++j) {
            for (int i = 0; i < grid.n; ++i) {
                const int idx = grid.index(i, j, k);
                if (i == 0 || i == grid.n - 1 || j == 0 || j == grid.n - 1 || k == 0 ||
                    k == grid.n - 1) {
                    grid.kind[idx] = FdmNodeKind::Outer;
                    continue;
                }
                if (!fem_box) continue;
                const int depth =
                    std::min({i - flo[0], fhi[0] - i, j - flo[1], fhi[1] - j, k - flo[2],
                              fhi[2] - k});
                if (depth == 1)
                    grid.kind[idx] = FdmNodeKind::Overlap;
                else if (depth >= 2)
                    grid.kind[idx] = FdmNodeKind::Inactive;
            }
        }
    }
    return grid;
}

void fdm_step(FdmGrid& grid, double tau, double blowup_bound) {
    const int n = grid.n;
    const double lam2 = (tau / grid.h) * (tau / grid.h);
    const int sx = 1, sy = n, sz = n * n;

    for (int c = 0; c < 3; ++c) {
        const std::vector<double>& prev = grid.E_prev[c];
        const std::vector<double>& curr = grid.E_curr[c];
        std::vector<double>& next = grid.E_next[c];
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    const int idx = grid.index(i, j, k);
                    if (grid.kind[idx] != FdmNodeKind::Active) {
                        next[idx] = curr[idx];
                        continue;
                    }
                    const double lap = curr[idx - sx] + curr[idx + sx] + curr[idx - sy] +
                                       curr[idx + sy] + curr[idx - sz] + curr[idx + sz] -
                                       6.0 * curr[idx];
                    next[idx] = 2.0 * curr[idx] - prev[idx] + lam2 * lap;
                }
            }
        }
    }

    std::swap(grid.E_prev, grid.E_curr);
    std::swap(grid.E_curr, grid.E_next);

    const double amp = grid.E_curr.max_node_norm();
    if (!(amp < blowup_bound))
        throw CflViolationError("grid amplitude " + std::to_string(amp) +
                                " exceeds blow-up bound; time step violates the stability limit");
}

void apply_absorbing(FdmGrid& grid, double tau) {
    const int n = grid.n;
    const double lambda = tau / grid.h;
    const double kappa = (lambda - 1.0) / (1.0 + lambda);
    const int stride[3] = {1, n, n * n};

    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side < 2; ++side) {
            const int inward = side == 0 ? stride[axis] : -stride[axis];
            const int fixed = side == 0 ? 0 : n - 1;
            // Whole face, edges and corners included.
            for (int b = 0; b < n; ++b) {
                for (int a = 0; a < n; ++a) {
                    int ijk[3];
                    ijk[axis] = fixed;
                    ijk[(axis + 1) % 3] = a;
                    ijk[(axis + 2) % 3] = b;
                    const int idx = grid.index(ijk[0], ijk[1], ijk[2]);
                    const int nb = idx + inward;
                    for (int c = 0; c < 3; ++c) {
                        grid.E_curr[c][idx] =
                            grid.E_prev[c][nb] +
                            kappa * (grid.E_curr[c][nb] - grid.E_prev[c][idx]);
                    }
                }
            }
        }
    }
}

void apply_source(FdmGrid& grid, double t, double omega, double amplitude) {
    if (t < 0.0 || t > kTwoPi / omega) return;
    const int n = grid.n;
    const double value = amplitude * std::sin(omega * t);
    const int k = n - 1;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int idx = grid.index(i, j, k);
            grid.E_curr[0][idx] = value;
            grid.E_curr[1][idx] = 0.0;
            grid.E_curr[2][idx] = 0.0;
        }
    }
}

double fdm_energy(const FdmGrid& grid, double tau) {
    const int n = grid.n;
    const double inv_tau = 1.0 / tau;
    const double inv_h = 1.0 / grid.h;
    const int stride[3] = {1, n, n * n};

    const auto outside_fem = [&](int idx) {
        return grid.kind[idx] == FdmNodeKind::Active || grid.kind[idx] == FdmNodeKind::Outer;
    };

    double energy = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const int idx = grid.index(i, j, k);
                if (!outside_fem(idx)) continue;
                const int ijk[3] = {i, j, k};
                for (int c = 0; c < 3; ++c) {
                    const double v = (grid.E_curr[c][idx] - grid.E_prev[c][idx]) * inv_tau;
                    energy += v * v;
                    for (int axis = 0; axis < 3; ++axis) {
                        if (ijk[axis] + 1 >= n) continue;
                        const int nb = idx + stride[axis];
                        if (!outside_fem(nb)) continue;
                        const double g = (grid.E_prev[c][nb] - grid.E_prev[c][idx]) * inv_h;
                        energy += g * g;
                    }
                }
            }
        }
    }
    return energy;
}

}  // namespace mmfe
