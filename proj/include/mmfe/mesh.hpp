#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mmfe/geometry.hpp"
#include "mmfe/phantom.hpp"

namespace mmfe {

struct BoundaryFace {
    int tet;
    int local_face;  // face opposite this local vertex
    int axis;        // outward normal axis, 0..2
    int side;        // 0 = low box face, 1 = high box face
};

// Structured tetrahedral mesh of an axis-aligned box. Every grid cube is cut
// into the 6 Kuhn tetrahedra around its main diagonal, which is conforming
// across cube faces without parity alternation. Nodes are ordered
// lexicographically by (x3, x2, x1) lattice index; tetrahedra are stored with
// positive orientation.
struct TetraMesh {
    Box box;
    double h = 0.0;
    std::array<int, 3> nodes_per_axis{};
    std::vector<Vec3> nodes;
    std::vector<std::array<int, 4>> tets;
    std::vector<BoundaryFace> boundary_faces;

    int node_index(int i, int j, int k) const {
        return (k * nodes_per_axis[1] + j) * nodes_per_axis[0] + i;
    }

    std::array<int, 3> lattice_of(int node) const {
        const int nx = nodes_per_axis[0];
        const int ny = nodes_per_axis[1];
        return {node % nx, (node / nx) % ny, node / (nx * ny)};
    }
};

// Throws NonDivisibleExtentError unless every box edge is a multiple of h.
TetraMesh build_box_mesh(const Box& box, double h);

Vec3 tet_centroid(const TetraMesh& mesh, int t);
double tet_volume(const TetraMesh& mesh, int t);

// Per-tetrahedron tissue kind and scaled coefficients, sampled at centroids.
struct MaterialField {
    std::vector<TissueKind> tissue;
    std::vector<double> eps;
    std::vector<double> sigma;
};

MaterialField assign_materials(const TetraMesh& mesh, const SkinPhantom& ph);
MaterialField uniform_field(const TetraMesh& mesh, TissueKind kind, double eps, double sigma);

struct MeshStats {
    std::size_t node_count = 0;
    std::size_t tet_count = 0;
    double total_volume = 0.0;
    std::array<double, kTissueKindCount> tissue_volume{};
    double min_dihedral_rad = 0.0;  // pi/4 for the Kuhn subdivision, any h
};

MeshStats mesh_stats(const TetraMesh& mesh, const MaterialField& field);

// Legacy ASCII VTK unstructured grid with per-cell tissue/eps/sigma scalars
// and an optional nodal vector field "E".
void export_vtk(const TetraMesh& mesh, const MaterialField& field,
                const VectorField* nodal_vectors, const std::filesystem::path& path,
                const std::string& title = "mmfe mesh");

// Compact little-endian cache (magic "MMFE1"): box, h, counts, then arrays.
void write_mesh_binary(const TetraMesh& mesh, const std::filesystem::path& path);
TetraMesh read_mesh_binary(const std::filesystem::path& path);

}  // namespace mmfe
