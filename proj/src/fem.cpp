#include "mmfe/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmfe {

namespace {

int csr_slot(const std::vector<int>& row_ptr, const std::vector<int>& cols, int r, int c) {
    const auto begin = cols.begin() + row_ptr[r];
    const auto end = cols.begin() + row_ptr[r + 1];
    const auto it = std::lower_bound(begin, end, c);
    return static_cast<int>(it - cols.begin());
}

}  // namespace

void CsrMatrix::apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (int s = row_ptr[r]; s < row_ptr[r + 1]; ++s) acc += vals[s] * x[cols[s]];
        y[r] = acc;
    }
}

double CsrMatrix::entry(int r, int c) const {
    for (int s = row_ptr[r]; s < row_ptr[r + 1]; ++s)
        if (cols[s] == c) return vals[s];
    return 0.0;
}

void BlockCsrMatrix::apply_add(const VectorField& x, VectorField& y) const {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
        for (int s = row_ptr[r]; s < row_ptr[r + 1]; ++s) {
            const int c = cols[s];
            const auto& b = vals[s];
            const double x0 = x[0][c], x1 = x[1][c], x2 = x[2][c];
            acc0 += b[0] * x0 + b[1] * x1 + b[2] * x2;
            acc1 += b[3] * x0 + b[4] * x1 + b[5] * x2;
            acc2 += b[6] * x0 + b[7] * x1 + b[8] * x2;
        }
        y[0][r] += acc0;
        y[1][r] += acc1;
        y[2][r] += acc2;
    }
}

double BlockCsrMatrix::max_abs_entry() const {
    double m = 0.0;
    for (const auto& b : vals)
        for (double v : b) m = std::max(m, std::abs(v));
    return m;
}

ElementGeometry element_geometry(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3) {
    const Vec3 e1 = p1 - p0;
    const Vec3 e2 = p2 - p0;
    const Vec3 e3 = p3 - p0;
    const double det = dot(cross(e1, e2), e3);

    ElementGeometry g;
    g.volume = det / 6.0;

    // Rows of the inverse edge matrix are the gradients of the barycentric
    // coordinates of p1..p3; p0's gradient closes the partition of unity.
    const Vec3 c1 = cross(e2, e3);
    const Vec3 c2 = cross(e3, e1);
    const Vec3 c3 = cross(e1, e2);
    g.grad[1] = (1.0 / det) * c1;
    g.grad[2] = (1.0 / det) * c2;
    g.grad[3] = (1.0 / det) * c3;
    g.grad[0] = {-g.grad[1].x - g.grad[2].x - g.grad[3].x,
                 -g.grad[1].y - g.grad[2].y - g.grad[3].y,
                 -g.grad[1].z - g.grad[2].z - g.grad[3].z};
    return g;
}

FemSystem assemble(const TetraMesh& mesh, const MaterialField& field) {
    const int n = static_cast<int>(mesh.nodes.size());

    FemSystem sys;
    sys.lumped_mass_eps.assign(n, 0.0);
    sys.lumped_mass_sigma.assign(n, 0.0);

    // Node adjacency (with self) defines the shared sparsity pattern.
    std::vector<std::vector<int>> adj(n);
    for (const auto& tet : mesh.tets)
        for (int a : tet)
            for (int b : tet) adj[a].push_back(b);
    sys.stiffness.rows = n;
    sys.stiffness.row_ptr.assign(n + 1, 0);
    for (int r = 0; r < n; ++r) {
        auto& row = adj[r];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        sys.stiffness.row_ptr[r + 1] = sys.stiffness.row_ptr[r] + static_cast<int>(row.size());
    }
    sys.stiffness.cols.reserve(sys.stiffness.row_ptr[n]);
    for (int r = 0; r < n; ++r)
        sys.stiffness.cols.insert(sys.stiffness.cols.end(), adj[r].begin(), adj[r].end());
    sys.stiffness.vals.assign(sys.stiffness.cols.size(), 0.0);

    sys.divdiv.rows = n;
    sys.divdiv.row_ptr = sys.stiffness.row_ptr;
    sys.divdiv.cols = sys.stiffness.cols;
    sys.divdiv.vals.assign(sys.stiffness.cols.size(), std::array<double, 9>{});

    for (int t = 0; t < static_cast<int>(mesh.tets.size()); ++t) {
        const auto& tet = mesh.tets[t];
        const ElementGeometry g = element_geometry(mesh.nodes[tet[0]], mesh.nodes[tet[1]],
                                                   mesh.nodes[tet[2]], mesh.nodes[tet[3]]);
        if (g.volume <= 0.0)
            throw DegenerateElementError("tet " + std::to_string(t) +
                                         " has non-positive volume");

        const double eps = field.eps[t];
        const double sigma = field.sigma[t];
        const double lump = g.volume / 4.0;
        const double stab = (eps - 1.0) * g.volume;

        for (int a = 0; a < 4; ++a) {
            sys.lumped_mass_eps[tet[a]] += eps * lump;
            sys.lumped_mass_sigma[tet[a]] += sigma * lump;
            for (int b = 0; b < 4; ++b) {
                const int slot = csr_slot(sys.stiffness.row_ptr, sys.stiffness.cols, tet[a],
                                          tet[b]);
                sys.stiffness.vals[slot] += g.volume * dot(g.grad[a], g.grad[b]);
                if (stab != 0.0) {
                    auto& blk = sys.divdiv.vals[slot];
                    for (int ca = 0; ca < 3; ++ca)
                        for (int cb = 0; cb < 3; ++cb)
                            blk[ca * 3 + cb] += stab * g.grad[a][ca] * g.grad[b][cb];
                }
            }
        }
    }

    for (int i = 0; i < n; ++i) {
        const auto idx = mesh.lattice_of(i);
        for (int a = 0; a < 3; ++a)
            if (idx[a] == 0 || idx[a] == mesh.nodes_per_axis[a] - 1) {
                sys.interface_nodes.push_back(i);
                break;
            }
    }
    return sys;
}

FemState make_fem_state(const TetraMesh& mesh, double tau) {
    FemState st;
    st.E_prev.resize(mesh.nodes.size());
    st.E_curr.resize(mesh.nodes.size());
    st.E_next.resize(mesh.nodes.size());
    st.tau = tau;
    return st;
}

void fem_step(FemState& state, const FemSystem& system, double blowup_bound) {
    const std::size_t n = system.lumped_mass_eps.size();
    const double tau = state.tau;

    for (int c = 0; c < 3; ++c)
        system.stiffness.apply(state.E_curr[c], state.E_next[c]);
    system.divdiv.apply_add(state.E_curr, state.E_next);

    for (std::size_t i = 0; i < n; ++i) {
        const double me = system.lumped_mass_eps[i];
        const double ms = 0.5 * tau * system.lumped_mass_sigma[i];
        const double inv = 1.0 / (me + ms);
        for (int c = 0; c < 3; ++c) {
            state.E_next[c][i] = inv * (2.0 * me * state.E_curr[c][i] -
                                        (me - ms) * state.E_prev[c][i] -
                                        tau * tau * state.E_next[c][i]);
        }
    }

    std::swap(state.E_prev, state.E_curr);
    std::swap(state.E_curr, state.E_next);
    state.t += tau;

    const double amp = state.E_curr.max_node_norm();
    if (!(amp < blowup_bound))
        throw CflViolationError("field amplitude " + std::to_string(amp) +
                                " exceeds blow-up bound at t = " + std::to_string(state.t) +
                                "; time step violates the stability limit");
}

void set_interface_values(FemState& state, const FemSystem& system,
                          std::span<const Vec3> values) {
    for (std::size_t k = 0; k < system.interface_nodes.size(); ++k) {
        const int node = system.interface_nodes[k];
        state.E_curr[0][node] = values[k].x;
        state.E_curr[1][node] = values[k].y;
        state.E_curr[2][node] = values[k].z;
    }
}

double discrete_energy(const FemState& state, const FemSystem& system) {
    const std::size_t n = system.lumped_mass_eps.size();
    const double tau = state.tau;

    double kinetic = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = system.lumped_mass_eps[i];
        for (int c = 0; c < 3; ++c) {
            const double d = state.E_curr[c][i] - state.E_prev[c][i];
            kinetic += m * d * d;
        }
    }
    kinetic /= 2.0 * tau * tau;

    VectorField w(n);
    for (int c = 0; c < 3; ++c) system.stiffness.apply(state.E_prev[c], w[c]);
    system.divdiv.apply_add(state.E_prev, w);
    double potential = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) potential += w[c][i] * state.E_curr[c][i];

    return kinetic + 0.5 * potential;
}

}  // namespace mmfe
