#include "mmfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "mmfe/errors.hpp"
#include "mmfe/format.hpp"

namespace mmfe {

namespace {

// The 6 Kuhn tetrahedra of the unit cube: vertex offsets accumulate one axis
// at a time along a permutation, so all tets share the main diagonal.
constexpr std::array<std::array<int, 3>, 6> kAxisPerms = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

double signed_volume(Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
    return dot(cross(b - a, c - a), d - a) / 6.0;
}

int cells_along(double lo, double hi, double h, int axis) {
    const double extent = hi - lo;
    const int n = static_cast<int>(std::llround(extent / h));
    if (n < 1 || std::abs(n * h - extent) > 1e-9 * std::max(extent, 1.0)) {
        throw NonDivisibleExtentError("box extent " + format_shortest(extent) + " along axis " +
                                      std::to_string(axis) + " is not a multiple of h = " +
                                      format_shortest(h));
    }
    return n;
}

uint64_t face_key(int a, int b, int c) {
    // Sorted triple packed into 21-bit fields; enough for meshes up to 2^21 nodes.
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 42) | (static_cast<uint64_t>(b) << 21) |
           static_cast<uint64_t>(c);
}

void collect_boundary_faces(TetraMesh& mesh) {
    std::unordered_map<uint64_t, std::pair<int, int>> first_seen;
    first_seen.reserve(mesh.tets.size() * 2);
    for (int t = 0; t < static_cast<int>(mesh.tets.size()); ++t) {
        const auto& tet = mesh.tets[t];
        for (int f = 0; f < 4; ++f) {
            const int a = tet[(f + 1) % 4];
            const int b = tet[(f + 2) % 4];
            const int c = tet[(f + 3) % 4];
            const uint64_t key = face_key(a, b, c);
            auto [it, inserted] = first_seen.try_emplace(key, t, f);
            if (!inserted) first_seen.erase(it);
        }
    }

    mesh.boundary_faces.clear();
    mesh.boundary_faces.reserve(first_seen.size());
    const auto lattice_extreme = [&](int node, int axis, int side) {
        const auto idx = mesh.lattice_of(node);
        return side == 0 ? idx[axis] == 0 : idx[axis] == mesh.nodes_per_axis[axis] - 1;
    };
    for (const auto& [key, loc] : first_seen) {
        const auto [t, f] = loc;
        const auto& tet = mesh.tets[t];
        const std::array<int, 3> face = {tet[(f + 1) % 4], tet[(f + 2) % 4], tet[(f + 3) % 4]};
        BoundaryFace bf{t, f, -1, -1};
        for (int axis = 0; axis < 3 && bf.axis < 0; ++axis) {
            for (int side = 0; side < 2; ++side) {
                if (lattice_extreme(face[0], axis, side) && lattice_extreme(face[1], axis, side) &&
                    lattice_extreme(face[2], axis, side)) {
                    bf.axis = axis;
                    bf.side = side;
                    break;
                }
            }
        }
        if (bf.axis < 0)
            throw LatticeMismatchError("boundary face of tet " + std::to_string(t) +
                                       " is not on a box face");
        mesh.boundary_faces.push_back(bf);
    }
    std::sort(mesh.boundary_faces.begin(), mesh.boundary_faces.end(),
              [](const BoundaryFace& l, const BoundaryFace& r) {
                  return std::tie(l.tet, l.local_face) < std::tie(r.tet, r.local_face);
              });
}

template <typename T>
void write_le(std::ofstream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    // Host is little-endian on every supported target; bytes go out as-is.
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

TetraMesh build_box_mesh(const Box& box, double h) {
    if (h <= 0.0) throw NonDivisibleExtentError("mesh size h must be positive");
    std::array<int, 3> cells{};
    for (int a = 0; a < 3; ++a) cells[a] = cells_along(box.lo[a], box.hi[a], h, a);

    TetraMesh mesh;
    mesh.box = box;
    mesh.h = h;
    mesh.nodes_per_axis = {cells[0] + 1, cells[1] + 1, cells[2] + 1};

    mesh.nodes.reserve(static_cast<std::size_t>(mesh.nodes_per_axis[0]) * mesh.nodes_per_axis[1] *
                       mesh.nodes_per_axis[2]);
    for (int k = 0; k < mesh.nodes_per_axis[2]; ++k)
        for (int j = 0; j < mesh.nodes_per_axis[1]; ++j)
            for (int i = 0; i < mesh.nodes_per_axis[0]; ++i)
                mesh.nodes.push_back({box.lo.x + i * h, box.lo.y + j * h, box.lo.z + k * h});

    mesh.tets.reserve(static_cast<std::size_t>(cells[0]) * cells[1] * cells[2] * 6);
    for (int k = 0; k < cells[2]; ++k) {
        for (int j = 0; j < cells[1]; ++j) {
            for (int i = 0; i < cells[0]; ++i) {
                for (const auto& perm : kAxisPerms) {
                    std::array<int, 3> off = {0, 0, 0};
                    std::array<int, 4> tet{};
                    tet[0] = mesh.node_index(i, j, k);
                    for (int step = 0; step < 3; ++step) {
                        off[perm[step]] = 1;
                        tet[step + 1] = mesh.node_index(i + off[0], j + off[1], k + off[2]);
                    }
                    const double vol = signed_volume(mesh.nodes[tet[0]], mesh.nodes[tet[1]],
                                                     mesh.nodes[tet[2]], mesh.nodes[tet[3]]);
                    if (vol < 0.0) std::swap(tet[2], tet[3]);
                    if (vol == 0.0)
                        throw DegenerateElementError("zero-volume tetrahedron in cube (" +
                                                     std::to_string(i) + "," + std::to_string(j) +
                                                     "," + std::to_string(k) + ")");
                    mesh.tets.push_back(tet);
                }
            }
        }
    }

    collect_boundary_faces(mesh);
    return mesh;
}

Vec3 tet_centroid(const TetraMesh& mesh, int t) {
    const auto& tet = mesh.tets[t];
    const Vec3 sum = mesh.nodes[tet[0]] + mesh.nodes[tet[1]] + mesh.nodes[tet[2]] +
                     mesh.nodes[tet[3]];
    return 0.25 * sum;
}

double tet_volume(const TetraMesh& mesh, int t) {
    const auto& tet = mesh.tets[t];
    return signed_volume(mesh.nodes[tet[0]], mesh.nodes[tet[1]], mesh.nodes[tet[2]],
                         mesh.nodes[tet[3]]);
}

MaterialField assign_materials(const TetraMesh& mesh, const SkinPhantom& ph) {
    MaterialField field;
    const std::size_t n = mesh.tets.size();
    field.tissue.resize(n);
    field.eps.resize(n);
    field.sigma.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const Vec3 c = tet_centroid(mesh, static_cast<int>(t));
        field.tissue[t] = tissue_at(c, ph);
        const Coefficients coeff = coefficients_at(c, ph);
        field.eps[t] = coeff.eps;
        field.sigma[t] = coeff.sigma;
    }
    return field;
}

MaterialField uniform_field(const TetraMesh& mesh, TissueKind kind, double eps, double sigma) {
    MaterialField field;
    field.tissue.assign(mesh.tets.size(), kind);
    field.eps.assign(mesh.tets.size(), eps);
    field.sigma.assign(mesh.tets.size(), sigma);
    return field;
}

MeshStats mesh_stats(const TetraMesh& mesh, const MaterialField& field) {
    MeshStats stats;
    stats.node_count = mesh.nodes.size();
    stats.tet_count = mesh.tets.size();
    stats.min_dihedral_rad = 4.0 * std::atan(1.0);  // start at pi, shrink below

    for (int t = 0; t < static_cast<int>(mesh.tets.size()); ++t) {
        const double vol = tet_volume(mesh, t);
        stats.total_volume += vol;
        stats.tissue_volume[static_cast<int>(field.tissue[t])] += vol;

        const auto& tet = mesh.tets[t];
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) {
                // Dihedral along edge (a,b): angle between the two incident
                // faces, measured between the other vertices' projections
                // onto the plane orthogonal to the edge.
                int others[2];
                int o = 0;
                for (int v = 0; v < 4; ++v)
                    if (v != a && v != b) others[o++] = v;
                Vec3 e = mesh.nodes[tet[b]] - mesh.nodes[tet[a]];
                e = (1.0 / norm(e)) * e;
                Vec3 u = mesh.nodes[tet[others[0]]] - mesh.nodes[tet[a]];
                Vec3 w = mesh.nodes[tet[others[1]]] - mesh.nodes[tet[a]];
                u = u - dot(u, e) * e;
                w = w - dot(w, e) * e;
                const double c = dot(u, w) / (norm(u) * norm(w));
                const double angle = std::acos(std::clamp(c, -1.0, 1.0));
                stats.min_dihedral_rad = std::min(stats.min_dihedral_rad, angle);
            }
        }
    }
    return stats;
}

void export_vtk(const TetraMesh& mesh, const MaterialField& field,
                const VectorField* nodal_vectors, const std::filesystem::path& path,
                const std::string& title) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");

    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";

    out << "POINTS " << mesh.nodes.size() << " float\n";
    for (const Vec3& p : mesh.nodes)
        out << format_shortest(p.x) << ' ' << format_shortest(p.y) << ' ' << format_shortest(p.z)
            << '\n';

    out << "CELLS " << mesh.tets.size() << ' ' << mesh.tets.size() * 5 << '\n';
    for (const auto& tet : mesh.tets)
        out << "4 " << tet[0] << ' ' << tet[1] << ' ' << tet[2] << ' ' << tet[3] << '\n';

    out << "CELL_TYPES " << mesh.tets.size() << '\n';
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) out << "10\n";

    out << "CELL_DATA " << mesh.tets.size() << '\n';
    out << "SCALARS tissue int 1\nLOOKUP_TABLE default\n";
    for (TissueKind k : field.tissue) out << static_cast<int>(k) << '\n';
    out << "SCALARS eps float 1\nLOOKUP_TABLE default\n";
    for (double v : field.eps) out << format_shortest(v) << '\n';
    out << "SCALARS sigma float 1\nLOOKUP_TABLE default\n";
    for (double v : field.sigma) out << format_shortest(v) << '\n';

    if (nodal_vectors != nullptr) {
        out << "POINT_DATA " << mesh.nodes.size() << '\n';
        out << "VECTORS E float\n";
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
            out << format_shortest((*nodal_vectors)[0][i]) << ' '
                << format_shortest((*nodal_vectors)[1][i]) << ' '
                << format_shortest((*nodal_vectors)[2][i]) << '\n';
    }

    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_mesh_binary(const TetraMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");

    out.write("MMFE1", 5);
    for (int a = 0; a < 3; ++a) write_le(out, mesh.box.lo[a]);
    for (int a = 0; a < 3; ++a) write_le(out, mesh.box.hi[a]);
    write_le(out, mesh.h);
    write_le(out, static_cast<uint64_t>(mesh.nodes.size()));
    write_le(out, static_cast<uint64_t>(mesh.tets.size()));
    for (const Vec3& p : mesh.nodes) {
        write_le(out, p.x);
        write_le(out, p.y);
        write_le(out, p.z);
    }
    for (const auto& tet : mesh.tets)
        for (int v : tet) write_le(out, static_cast<uint32_t>(v));

    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

TetraMesh read_mesh_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");

    char magic[5];
    in.read(magic, 5);
    if (!in || std::memcmp(magic, "MMFE1", 5) != 0)
        throw IoError(path.string() + ": bad magic, not an MMFE1 mesh file");

    TetraMesh mesh;
    for (int a = 0; a < 3; ++a) mesh.box.lo[a] = read_le<double>(in);
    for (int a = 0; a < 3; ++a) mesh.box.hi[a] = read_le<double>(in);
    mesh.h = read_le<double>(in);
    const auto node_count = read_le<uint64_t>(in);
    const auto tet_count = read_le<uint64_t>(in);
    for (int a = 0; a < 3; ++a)
        mesh.nodes_per_axis[a] =
            static_cast<int>(std::llround((mesh.box.hi[a] - mesh.box.lo[a]) / mesh.h)) + 1;

    mesh.nodes.resize(node_count);
    for (Vec3& p : mesh.nodes) {
        p.x = read_le<double>(in);
        p.y = read_le<double>(in);
        p.z = read_le<double>(in);
    }
    mesh.tets.resize(tet_count);
    for (auto& tet : mesh.tets)
        for (int v = 0; v < 4; ++v) tet[v] = static_cast<int>(read_le<uint32_t>(in));
    if (!in) throw IoError(path.string() + ": truncated mesh file");

    collect_boundary_faces(mesh);
    return mesh;
}

}  // namespace mmfe
