#pragma once

#include <filesystem>
#include <string>

#include "mmfe/format.hpp"
#include "mmfe/hybrid.hpp"
#include "mmfe/mesh.hpp"

namespace mmfe {

// Strict JSON config: unknown keys are rejected by name, month is required,
// everything else defaults (h=0.5, tau=0.05, omega=40, amplitude=1, T=30,
// scaling_factor=5, stage_thresholds=[1,3.5], snapshot_stride=100,
// record_stride=1, out_dir="out").
SimulationConfig read_config(const std::filesystem::path& path);
SimulationConfig parse_config_text(const std::string& text, const std::string& origin);

// E1.csv / E2.csv / E3.csv: one row per recorded step, first column t, then
// one column per observation node in manifest order, 17 significant digits.
// manifest.json carries schema version, month/config echo, node ids and
// coordinates, time step and record stride.
void write_boundary_series(const BoundaryRecord& rec, const SimulationConfig& cfg,
                           const std::filesystem::path& dir);
BoundaryRecord read_boundary_series(const std::filesystem::path& dir);

void write_mesh_stats(const MeshStats& stats, int month, double h,
                      const std::filesystem::path& path);

void write_failure_marker(const std::filesystem::path& dir, const std::string& what);

}  // namespace mmfe
