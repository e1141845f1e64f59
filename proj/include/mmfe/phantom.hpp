#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "mmfe/errors.hpp"
#include "mmfe/geometry.hpp"

namespace mmfe {

enum class TissueKind : int {
    Vacuum = 0,
    Immersion,
    Epidermis,
    Dermis,
    Fat,
    TumorStage1,
    TumorStage2,
    TumorStage3,
};

inline constexpr int kTissueKindCount = 8;

std::string_view tissue_name(TissueKind k);

// Dielectric properties of one tissue at 6 GHz.
struct TissueProperties {
    double eps_r;        // relative permittivity
    double sigma;        // effective conductivity, S/m
    double table_depth;  // depth column, mm (threshold value for the tumor stages)
};

// Vacuum has no table row; passing it here is a programming error.
const TissueProperties& tissue_properties(TissueKind k);

enum class TumorShape { Cylinder, Cone };

// Tumor geometry for one growth month: a cylinder (month 0) or a downward
// cone (months 2..22) with the base disk in the skin-surface plane.
struct MelanomaModel {
    int month;
    TumorShape shape;
    double diameter;  // mm
    double depth;     // mm, vertical extent below the skin surface
};

inline constexpr std::array<int, 12> kTabulatedMonths = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22};

// Exact tabulated row; throws UnknownMonthError for anything else (no interpolation).
MelanomaModel melanoma_model(int month);

// Layered skin block of (0,10)^3 mm with an optional embedded tumor.
// The x3 axis points up; the immersion medium occupies the top 2 mm and the
// skin surface (top of the epidermis) sits at skin_surface_z.
struct SkinPhantom {
    Box box;
    double skin_surface_z;    // immersion above, epidermis below
    double epidermis_floor_z; // dermis below this
    double dermis_floor_z;    // fat below this, down to box.lo.z
    std::optional<MelanomaModel> tumor;
    double tumor_axis_x;
    double tumor_axis_y;
    std::array<double, 2> stage_thresholds;  // depth splits: stage1/2 and stage2/3, mm
    double scaling_factor;                   // divisor applied to (eps_r, sigma)

    // Stage of the embedded tumor, from its total depth against the thresholds.
    TissueKind tumor_stage() const;
};

SkinPhantom make_phantom(int month, double scaling_factor = 5.0,
                         std::array<double, 2> stage_thresholds = {1.0, 3.5});

// Layer stack only, no tumor.
SkinPhantom make_layered_phantom(double scaling_factor = 5.0);

// Total classification: tumor solid first, then layer by x3, Vacuum outside the box.
TissueKind tissue_at(Vec3 p, const SkinPhantom& ph);

struct Coefficients {
    double eps;
    double sigma;
};

// Scaled (eps_r, sigma) of the tissue at p; Vacuum maps to (1, 0) unscaled.
Coefficients coefficients_at(Vec3 p, const SkinPhantom& ph);

// Closed-form solid volume (cylinder or cone), mm^3.
double analytic_tumor_volume(const MelanomaModel& m);

}  // namespace mmfe
