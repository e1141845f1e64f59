#include "mmfe/phantom.hpp"

#include <cmath>

namespace mmfe {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct MonthRow {
    int month;
    TumorShape shape;
    double diameter;
    double depth;
};

// Tumor geometry by growth month.
constexpr std::array<MonthRow, 12> kGrowthTable = {{
    {0, TumorShape::Cylinder, 6.00, 0.15},
    {2, TumorShape::Cone, 6.09, 0.34},
    {4, TumorShape::Cone, 6.19, 0.71},
    {6, TumorShape::Cone, 6.28, 1.08},
    {8, TumorShape::Cone, 6.36, 1.46},
    {10, TumorShape::Cone, 6.45, 1.83},
    {12, TumorShape::Cone, 6.54, 2.20},
    {14, TumorShape::Cone, 6.62, 2.57},
    {16, TumorShape::Cone, 6.71, 2.95},
    {18, TumorShape::Cone, 6.79, 3.32},
    {20, TumorShape::Cone, 6.87, 3.69},
    {22, TumorShape::Cone, 6.96, 4.06},
}};

// Tissue dielectric table at 6 GHz, indexed by TissueKind minus Immersion.
constexpr std::array<TissueProperties, 7> kTissueTable = {{
    {32.0, 4.0, 2.0},  // Immersion
    {35.0, 4.0, 1.0},  // Epidermis
    {40.0, 9.0, 3.5},  // Dermis
    {9.0, 1.0, 5.5},   // Fat
    {45.0, 5.0, 1.0},  // TumorStage1 (depth < 1)
    {50.0, 5.0, 1.0},  // TumorStage2 (depth > 1)
    {60.0, 6.0, 1.0},  // TumorStage3 (depth > 1)
}};

constexpr std::array<std::string_view, kTissueKindCount> kTissueNames = {
    "Vacuum",      "Immersion",   "Epidermis",   "Dermis",
    "Fat",         "TumorStage1", "TumorStage2", "TumorStage3",
};

bool inside_tumor(Vec3 p, const SkinPhantom& ph) {
    if (!ph.tumor) return false;
    const MelanomaModel& m = *ph.tumor;
    const double base_z = ph.skin_surface_z;
    const double apex_z = base_z - m.depth;
    if (p.z < apex_z || p.z > base_z) return false;

    const double dx = p.x - ph.tumor_axis_x;
    const double dy = p.y - ph.tumor_axis_y;
    const double radial = std::sqrt(dx * dx + dy * dy);
    const double base_radius = 0.5 * m.diameter;

    if (m.shape == TumorShape::Cylinder) return radial <= base_radius;
    // Cone: apex down, radius grows linearly towards the base disk.
    return radial <= base_radius * (p.z - apex_z) / (base_z - apex_z);
}

}  // namespace

std::string_view tissue_name(TissueKind k) { return kTissueNames[static_cast<int>(k)]; }

const TissueProperties& tissue_properties(TissueKind k) {
    return kTissueTable[static_cast<int>(k) - static_cast<int>(TissueKind::Immersion)];
}

MelanomaModel melanoma_model(int month) {
    for (const MonthRow& row : kGrowthTable) {
        if (row.month == month) return {row.month, row.shape, row.diameter, row.depth};
    }
    throw UnknownMonthError(month);
}

TissueKind SkinPhantom::tumor_stage() const {
    const double d = tumor ? tumor->depth : 0.0;
    if (d < stage_thresholds[0]) return TissueKind::TumorStage1;
    if (d <= stage_thresholds[1]) return TissueKind::TumorStage2;
    return TissueKind::TumorStage3;
}

SkinPhantom make_phantom(int month, double scaling_factor,
                         std::array<double, 2> stage_thresholds) {
    SkinPhantom ph = make_layered_phantom(scaling_factor);
    ph.tumor = melanoma_model(month);
    ph.stage_thresholds = stage_thresholds;
    return ph;
}

SkinPhantom make_layered_phantom(double scaling_factor) {
    SkinPhantom ph;
    ph.box = {{0.0, 0.0, 0.0}, {10.0, 10.0, 10.0}};
    // Immersion medium takes the top 2 mm; the epidermis/dermis floors follow
    // the cumulative tissue depths below the skin surface (1 and 3.5 mm).
    ph.skin_surface_z = ph.box.hi.z - tissue_properties(TissueKind::Immersion).table_depth;
    ph.epidermis_floor_z = ph.skin_surface_z - tissue_properties(TissueKind::Epidermis).table_depth;
    ph.dermis_floor_z = ph.skin_surface_z - tissue_properties(TissueKind::Dermis).table_depth;
    ph.tumor = std::nullopt;
    ph.tumor_axis_x = 5.0;
    ph.tumor_axis_y = 5.0;
    ph.stage_thresholds = {1.0, 3.5};
    ph.scaling_factor = scaling_factor;
    return ph;
}

TissueKind tissue_at(Vec3 p, const SkinPhantom& ph) {
    if (!ph.box.contains(p)) return TissueKind::Vacuum;
    if (inside_tumor(p, ph)) return ph.tumor_stage();
    if (p.z >= ph.skin_surface_z) return TissueKind::Immersion;
    if (p.z > ph.epidermis_floor_z) return TissueKind::Epidermis;
    if (p.z > ph.dermis_floor_z) return TissueKind::Dermis;
    return TissueKind::Fat;
}

Coefficients coefficients_at(Vec3 p, const SkinPhantom& ph) {
    const TissueKind kind = tissue_at(p, ph);
    if (kind == TissueKind::Vacuum) return {1.0, 0.0};
    const TissueProperties& props = tissue_properties(kind);
    return {props.eps_r / ph.scaling_factor, props.sigma / ph.scaling_factor};
}

double analytic_tumor_volume(const MelanomaModel& m) {
    const double r = 0.5 * m.diameter;
    const double cylinder = kPi * r * r * m.depth;
    return m.shape == TumorShape::Cylinder ? cylinder : cylinder / 3.0;
}

}  // namespace mmfe
