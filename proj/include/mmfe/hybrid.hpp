#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

#include "mmfe/fdm.hpp"
#include "mmfe/fem.hpp"
#include "mmfe/mesh.hpp"

namespace mmfe {

// Node-coincidence maps for the FEM/FDM exchange. Every FEM boundary node
// must land on an FDM lattice node (and vice versa for the overlap band);
// both maps are injective.
struct CouplingMaps {
    std::vector<std::pair<int, int>> fem_from_fdm;  // (fem interface node, fdm node)
    std::vector<std::pair<int, int>> fdm_from_fem;  // (fdm overlap node, fem node)
};

CouplingMaps build_coupling_maps(const TetraMesh& mesh, const FdmGrid& grid);

// Copies values at the shared step index: FEM interface nodes take the FDM
// solution, FDM overlap nodes take the FEM solution. Run after both solvers
// advanced and before either steps again.
void exchange(FemState& fem, FdmGrid& grid, const CouplingMaps& maps);

struct SimulationConfig {
    int month = -1;
    double h = 0.5;
    double tau = 0.05;
    double T_final = 30.0;
    double omega = 40.0;
    double amplitude = 1.0;
    double scaling_factor = 5.0;
    std::array<double, 2> stage_thresholds = {1.0, 3.5};
    int snapshot_stride = 100;
    int record_stride = 1;
    std::filesystem::path out_dir = "out";

    // Throws ConfigError / UnknownMonthError; the time step must satisfy
    // tau <= h / (2 sqrt(3)).
    void validate() const;
};

// Time series of the field at the FEM nodes on the top face x3 = max,
// ordered lexicographically; the principal output of a run.
struct BoundaryRecord {
    std::vector<int> nodes;
    std::vector<Vec3> node_coords;
    std::vector<double> times;
    std::array<std::vector<double>, 3> values;  // [comp][step * node_count + node]

    std::size_t step_count() const { return times.size(); }
    std::size_t node_count() const { return nodes.size(); }
    double value(int comp, std::size_t step, std::size_t node) const {
        return values[comp][step * node_count() + node];
    }
};

BoundaryRecord make_boundary_record(const TetraMesh& mesh);

// ||a - b||_2 / max(||a||_2, ||b||_2) over all components, steps and nodes.
double relative_l2(const BoundaryRecord& a, const BoundaryRecord& b);

// Coupled solver state. One advance() performs the full hybrid step:
// FDM stencil, absorbing/source faces, FEM leapfrog, node exchange.
struct HybridRun {
    const TetraMesh* mesh;
    FemSystem system;
    FemState fem;
    FdmGrid grid;
    CouplingMaps maps;
    double tau;
    double omega;
    double amplitude;
    int step_count = 0;
    double max_field = 0.0;  // running max over both solvers

    HybridRun(const TetraMesh& mesh_in, const MaterialField& field, const Box& hybrid_extent,
              double tau_in, double omega_in, double amplitude_in);

    void advance();

    double time() const { return step_count * tau; }

    void record_top_face(BoundaryRecord& rec) const;
};

struct RunResult {
    BoundaryRecord record;
    int steps = 0;
    double max_field = 0.0;
    double wall_seconds = 0.0;
};

// Full forward simulation per the config: builds phantom, mesh, systems and
// grid on the fixed domains (0,10)^3 inside (-2,12)^3, runs the coupled
// loop, writes the record, manifest and VTK snapshots under cfg.out_dir.
// On a numerical failure the partial record is flushed next to a FAILED
// marker before the error propagates.
RunResult run_simulation(const SimulationConfig& cfg);

}  // namespace mmfe
