#include "mmfe/hybrid.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "mmfe/format.hpp"
#include "mmfe/io.hpp"

namespace mmfe {

namespace {

int grid_index_of(const FdmGrid& grid, Vec3 p) {
    int ijk[3];
    for (int a = 0; a < 3; ++a) {
        const double raw = (p[a] - grid.extent.lo[a]) / grid.h;
        ijk[a] = static_cast<int>(std::llround(raw));
        if (ijk[a] < 0 || ijk[a] >= grid.n ||
            std::abs(grid.extent.lo[a] + ijk[a] * grid.h - p[a]) > 1e-9 * grid.h)
            throw LatticeMismatchError("mesh node (" + format_shortest(p.x) + ", " +
                                       format_shortest(p.y) + ", " + format_shortest(p.z) +
                                       ") does not coincide with an FDM lattice node");
    }
    return grid.index(ijk[0], ijk[1], ijk[2]);
}

}  // namespace

CouplingMaps build_coupling_maps(const TetraMesh& mesh, const FdmGrid& grid) {
    if (std::abs(mesh.h - grid.h) > 1e-12)
        throw LatticeMismatchError("mesh step " + format_shortest(mesh.h) +
                                   " differs from grid step " + format_shortest(grid.h));

    CouplingMaps maps;
    for (int node = 0; node < static_cast<int>(mesh.nodes.size()); ++node) {
        const auto idx = mesh.lattice_of(node);
        bool boundary = false;
        for (int a = 0; a < 3 && !boundary; ++a)
            boundary = idx[a] == 0 || idx[a] == mesh.nodes_per_axis[a] - 1;
        if (!boundary) continue;
        maps.fem_from_fdm.emplace_back(node, grid_index_of(grid, mesh.nodes[node]));
    }

    for (int g = 0; g < static_cast<int>(grid.node_count()); ++g) {
        if (grid.kind[g] != FdmNodeKind::Overlap) continue;
        const auto ijk = grid.lattice_of(g);
        const Vec3 p = grid.point(ijk[0], ijk[1], ijk[2]);
        int mi[3];
        for (int a = 0; a < 3; ++a) {
            const double raw = (p[a] - mesh.box.lo[a]) / mesh.h;
            mi[a] = static_cast<int>(std::llround(raw));
            if (mi[a] < 0 || mi[a] >= mesh.nodes_per_axis[a] ||
                std::abs(mesh.box.lo[a] + mi[a] * mesh.h - p[a]) > 1e-9 * mesh.h)
                throw LatticeMismatchError("FDM overlap node does not coincide with a mesh node");
        }
        maps.fdm_from_fem.emplace_back(g, mesh.node_index(mi[0], mi[1], mi[2]));
    }
    return maps;
}

void exchange(FemState& fem, FdmGrid& grid, const CouplingMaps& maps) {
    for (const auto& [fem_node, fdm_node] : maps.fem_from_fdm)
        for (int c = 0; c < 3; ++c) fem.E_curr[c][fem_node] = grid.E_curr[c][fdm_node];
    for (const auto& [fdm_node, fem_node] : maps.fdm_from_fem)
        for (int c = 0; c < 3; ++c) grid.E_curr[c][fdm_node] = fem.E_curr[c][fem_node];
}

void SimulationConfig::validate() const {
    melanoma_model(month);  // throws UnknownMonthError
    if (h <= 0.0) throw ConfigError("h must be positive");
    const double bound = h / (2.0 * std::sqrt(3.0));
    if (!(tau > 0.0) || tau > bound * (1.0 + 1e-12))
        throw ConfigError("tau = " + format_shortest(tau) +
                          " violates the stability requirement 0 < tau <= h/(2*sqrt(3)) = " +
                          format_shortest(bound));
    if (!(T_final > 0.0)) throw ConfigError("T must be positive");
    if (!(omega > 0.0)) throw ConfigError("omega must be positive");
    if (!std::isfinite(amplitude)) throw ConfigError("amplitude must be finite");
    if (!(scaling_factor > 0.0)) throw ConfigError("scaling_factor must be positive");
    if (!(stage_thresholds[0] > 0.0) || stage_thresholds[1] < stage_thresholds[0])
        throw ConfigError("stage_thresholds must be positive and ordered");
    if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
    if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
}

BoundaryRecord make_boundary_record(const TetraMesh& mesh) {
    BoundaryRecord rec;
    const int k_top = mesh.nodes_per_axis[2] - 1;
    for (int j = 0; j < mesh.nodes_per_axis[1]; ++j)
        for (int i = 0; i < mesh.nodes_per_axis[0]; ++i) {
            const int node = mesh.node_index(i, j, k_top);
            rec.nodes.push_back(node);
            rec.node_coords.push_back(mesh.nodes[node]);
        }
    return rec;
}

double relative_l2(const BoundaryRecord& a, const BoundaryRecord& b) {
    double diff2 = 0.0, na2 = 0.0, nb2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < a.values[c].size(); ++i) {
            const double va = a.values[c][i];
            const double vb = b.values[c][i];
            diff2 += (va - vb) * (va - vb);
            na2 += va * va;
            nb2 += vb * vb;
        }
    }
    const double denom = std::sqrt(std::max(na2, nb2));
    return denom == 0.0 ? 0.0 : std::sqrt(diff2) / denom;
}

HybridRun::HybridRun(const TetraMesh& mesh_in, const MaterialField& field,
                     const Box& hybrid_extent, double tau_in, double omega_in,
                     double amplitude_in)
    : mesh(&mesh_in),
      system(assemble(mesh_in, field)),
      fem(make_fem_state(mesh_in, tau_in)),
      grid(make_fdm_grid(hybrid_extent, mesh_in.h, mesh_in.box)),
      maps(build_coupling_maps(mesh_in, grid)),
      tau(tau_in),
      omega(omega_in),
      amplitude(amplitude_in) {}

void HybridRun::advance() {
    const double t_next = (step_count + 1) * tau;
    fdm_step(grid, tau);
    apply_absorbing(grid, tau);
    apply_source(grid, t_next, omega, amplitude);
    fem_step(fem, system);
    exchange(fem, grid, maps);
    ++step_count;

    max_field = std::max({max_field, fem.E_curr.max_node_norm(), grid.E_curr.max_node_norm()});
}

void HybridRun::record_top_face(BoundaryRecord& rec) const {
    rec.times.push_back(fem.t);
    for (int c = 0; c < 3; ++c)
        for (int node : rec.nodes) rec.values[c].push_back(fem.E_curr[c][node]);
}

RunResult run_simulation(const SimulationConfig& cfg) {
    cfg.validate();
    const auto wall_start = std::chrono::steady_clock::now();

    const SkinPhantom phantom = make_phantom(cfg.month, cfg.scaling_factor, cfg.stage_thresholds);
    const Box fem_box{{0.0, 0.0, 0.0}, {10.0, 10.0, 10.0}};
    const Box hybrid_extent{{-2.0, -2.0, -2.0}, {12.0, 12.0, 12.0}};

    const TetraMesh mesh = build_box_mesh(fem_box, cfg.h);
    const MaterialField field = assign_materials(mesh, phantom);
    HybridRun run(mesh, field, hybrid_extent, cfg.tau, cfg.omega, cfg.amplitude);

    BoundaryRecord record = make_boundary_record(mesh);
    const int steps = static_cast<int>(std::llround(cfg.T_final / cfg.tau));

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir / "snapshots", ec);
    if (ec)
        throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " +
                      ec.message());

    try {
        for (int n = 1; n <= steps; ++n) {
            run.advance();
            if (n % cfg.record_stride == 0) run.record_top_face(record);
            if (n % cfg.snapshot_stride == 0) {
                char name[32];
                std::snprintf(name, sizeof(name), "field_%06d.vtk", n);
                export_vtk(mesh, field, &run.fem.E_curr, cfg.out_dir / "snapshots" / name,
                           "hybrid field snapshot");
            }
        }
    } catch (const std::exception& e) {
        // Flush whatever was recorded, then mark the run as failed.
        write_boundary_series(record, cfg, cfg.out_dir);
        write_failure_marker(cfg.out_dir, e.what());
        throw;
    }

    write_boundary_series(record, cfg, cfg.out_dir);

    RunResult result;
    result.record = std::move(record);
    result.steps = steps;
    result.max_field = run.max_field;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

}  // namespace mmfe
