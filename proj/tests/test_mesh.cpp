#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "mmfe/mesh.hpp"
#include "test_util.hpp"

using namespace mmfe;

namespace {

const Box kUnitBox{{0, 0, 0}, {1, 1, 1}};
const Box kDomain{{0, 0, 0}, {10, 10, 10}};

double tumor_mesh_volume(const TetraMesh& mesh, const MaterialField& field) {
    double v = 0.0;
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
        if (field.tissue[t] == TissueKind::TumorStage1 ||
            field.tissue[t] == TissueKind::TumorStage2 ||
            field.tissue[t] == TissueKind::TumorStage3)
            v += tet_volume(mesh, static_cast<int>(t));
    }
    return v;
}

// Exhaustive face-sharing audit: interior faces twice, boundary faces once.
void check_conformity(const TetraMesh& mesh, std::size_t expected_boundary) {
    std::map<std::array<int, 3>, int> counts;
    for (const auto& tet : mesh.tets) {
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> face = {tet[(f + 1) % 4], tet[(f + 2) % 4], tet[(f + 3) % 4]};
            std::sort(face.begin(), face.end());
            ++counts[face];
        }
    }
    std::size_t boundary = 0;
    for (const auto& [face, count] : counts) {
        REQUIRE(count <= 2);
        if (count == 1) ++boundary;
    }
    CHECK(boundary == expected_boundary);
    CHECK(mesh.boundary_faces.size() == expected_boundary);
}

}  // namespace

TEST_CASE("single cube splits into 6 tets on 8 nodes") {
    const TetraMesh mesh = build_box_mesh(kUnitBox, 1.0);
    CHECK(mesh.nodes.size() == 8);
    CHECK(mesh.tets.size() == 6);
    double total = 0.0;
    for (int t = 0; t < 6; ++t) {
        const double v = tet_volume(mesh, t);
        CHECK(v > 0.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    check_conformity(mesh, 12);  // 2 triangles per cube face
}

TEST_CASE("standard domain at h=0.5 has the expected counts and exact volume") {
    const TetraMesh mesh = build_box_mesh(kDomain, 0.5);
    CHECK(mesh.nodes.size() == 9261);
    CHECK(mesh.tets.size() == 48000);

    double total = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.tets.size()); ++t) {
        const double v = tet_volume(mesh, t);
        REQUIRE(v > 0.0);
        total += v;
    }
    CHECK(std::abs(total - 1000.0) <= 1e-9 * 1000.0);
}

TEST_CASE("non-divisible extent is rejected") {
    CHECK_THROWS_AS(build_box_mesh(kDomain, 0.3), NonDivisibleExtentError);
}

TEST_CASE("all nodes lie on the h-lattice") {
    const TetraMesh mesh = build_box_mesh(kDomain, 0.5);
    for (const Vec3& p : mesh.nodes) {
        for (int a = 0; a < 3; ++a) {
            const double steps = p[a] / mesh.h;
            CHECK(std::abs(steps - std::round(steps)) < 1e-12);
        }
    }
}

TEST_CASE("face conformity, exhaustive at h=1 and h=0.5") {
    check_conformity(build_box_mesh(kDomain, 1.0), 6u * 10 * 10 * 2);
    check_conformity(build_box_mesh(kDomain, 0.5), 6u * 20 * 20 * 2);
}

TEST_CASE("boundary faces carry outward box-face tags") {
    const TetraMesh mesh = build_box_mesh(kDomain, 1.0);
    std::array<std::array<int, 2>, 3> per_face{};
    for (const BoundaryFace& bf : mesh.boundary_faces) {
        REQUIRE(bf.axis >= 0);
        REQUIRE(bf.axis < 3);
        ++per_face[bf.axis][bf.side];
        const auto& tet = mesh.tets[bf.tet];
        const double want = bf.side == 0 ? mesh.box.lo[bf.axis] : mesh.box.hi[bf.axis];
        for (int v = 0; v < 4; ++v) {
            if (v == bf.local_face) continue;
            CHECK(mesh.nodes[tet[v]][bf.axis] == want);
        }
    }
    for (int a = 0; a < 3; ++a)
        for (int s = 0; s < 2; ++s) CHECK(per_face[a][s] == 200);
}

TEST_CASE("month-22 material volume tracks the analytic cone and improves under refinement") {
    const SkinPhantom ph = make_phantom(22);
    const double analytic = analytic_tumor_volume(*ph.tumor);

    const TetraMesh coarse = build_box_mesh(kDomain, 0.5);
    const double coarse_err =
        std::abs(tumor_mesh_volume(coarse, assign_materials(coarse, ph)) - analytic);
    CHECK(coarse_err <= 0.15 * analytic);

    const TetraMesh fine = build_box_mesh(kDomain, 0.25);
    const double fine_err =
        std::abs(tumor_mesh_volume(fine, assign_materials(fine, ph)) - analytic);
    CHECK(fine_err < coarse_err);
}

TEST_CASE("month 0 marks only stage-1 tumor tets") {
    const TetraMesh mesh = build_box_mesh(kDomain, 0.5);
    const MaterialField field = assign_materials(mesh, make_phantom(0));
    for (TissueKind kind : field.tissue) {
        CHECK(kind != TissueKind::TumorStage2);
        CHECK(kind != TissueKind::TumorStage3);
    }
}

TEST_CASE("without a tumor the tets partition into the four slabs exactly") {
    const TetraMesh mesh = build_box_mesh(kDomain, 0.5);
    const MaterialField field = assign_materials(mesh, make_layered_phantom());
    const MeshStats stats = mesh_stats(mesh, field);

    CHECK(stats.tissue_volume[static_cast<int>(TissueKind::Immersion)] ==
          doctest::Approx(200.0).epsilon(1e-12));
    CHECK(stats.tissue_volume[static_cast<int>(TissueKind::Epidermis)] ==
          doctest::Approx(100.0).epsilon(1e-12));
    CHECK(stats.tissue_volume[static_cast<int>(TissueKind::Dermis)] ==
          doctest::Approx(250.0).epsilon(1e-12));
    CHECK(stats.tissue_volume[static_cast<int>(TissueKind::Fat)] ==
          doctest::Approx(450.0).epsilon(1e-12));
    CHECK(stats.tissue_volume[static_cast<int>(TissueKind::Vacuum)] == 0.0);
}

TEST_CASE("mesh stats aggregate volume and the Kuhn dihedral constant") {
    const TetraMesh coarse = build_box_mesh(kDomain, 1.0);
    const TetraMesh fine = build_box_mesh(kDomain, 0.5);
    const SkinPhantom ph = make_phantom(22);
    const MeshStats sc = mesh_stats(coarse, assign_materials(coarse, ph));
    const MeshStats sf = mesh_stats(fine, assign_materials(fine, ph));

    CHECK(std::abs(sc.total_volume - 1000.0) < 1e-6);
    CHECK(std::abs(sf.total_volume - 1000.0) < 1e-6);

    double tissue_sum = 0.0;
    for (double v : sf.tissue_volume) tissue_sum += v;
    CHECK(tissue_sum == doctest::Approx(1000.0).epsilon(1e-12));

    // Minimum dihedral of the Kuhn subdivision is pi/4 independent of h.
    CHECK(sc.min_dihedral_rad == doctest::Approx(std::atan(1.0)).epsilon(1e-12));
    CHECK(std::abs(sc.min_dihedral_rad - sf.min_dihedral_rad) < 1e-12);
}

TEST_CASE("builds are deterministic and the binary cache round-trips") {
    testutil::ScratchDir scratch("mesh_binary");
    const TetraMesh a = build_box_mesh(kDomain, 1.0);
    const TetraMesh b = build_box_mesh(kDomain, 1.0);

    write_mesh_binary(a, scratch.path() / "a.bin");
    write_mesh_binary(b, scratch.path() / "b.bin");
    CHECK(testutil::read_file(scratch.path() / "a.bin") ==
          testutil::read_file(scratch.path() / "b.bin"));

    const TetraMesh back = read_mesh_binary(scratch.path() / "a.bin");
    CHECK(back.nodes.size() == a.nodes.size());
    CHECK(back.tets.size() == a.tets.size());
    CHECK(back.h == a.h);
    CHECK(back.boundary_faces.size() == a.boundary_faces.size());
    write_mesh_binary(back, scratch.path() / "c.bin");
    CHECK(testutil::read_file(scratch.path() / "a.bin") ==
          testutil::read_file(scratch.path() / "c.bin"));
}

TEST_CASE("VTK export round-trips counts and omits POINT_DATA without vectors") {
    testutil::ScratchDir scratch("mesh_vtk");
    const TetraMesh mesh = build_box_mesh(kDomain, 1.0);
    const MaterialField field = assign_materials(mesh, make_phantom(22));

    const auto no_vec = scratch.path() / "mesh.vtk";
    export_vtk(mesh, field, nullptr, no_vec);
    const std::string text = testutil::read_file(no_vec);

    CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(text.find("POINTS 1331 float") != std::string::npos);
    CHECK(text.find("CELLS 6000 30000") != std::string::npos);
    CHECK(text.find("CELL_TYPES 6000") != std::string::npos);
    CHECK(text.find("SCALARS tissue int 1") != std::string::npos);
    CHECK(text.find("SCALARS eps float 1") != std::string::npos);
    CHECK(text.find("SCALARS sigma float 1") != std::string::npos);
    CHECK(text.find("POINT_DATA") == std::string::npos);

    VectorField vectors(mesh.nodes.size());
    vectors[0][0] = 1.25;
    const auto with_vec = scratch.path() / "mesh_field.vtk";
    export_vtk(mesh, field, &vectors, with_vec);
    const std::string text2 = testutil::read_file(with_vec);
    CHECK(text2.find("POINT_DATA 1331") != std::string::npos);
    CHECK(text2.find("VECTORS E float") != std::string::npos);

    // Writers are deterministic.
    export_vtk(mesh, field, &vectors, scratch.path() / "mesh_field2.vtk");
    CHECK(testutil::read_file(scratch.path() / "mesh_field2.vtk") == text2);
}
