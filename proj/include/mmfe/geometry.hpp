#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mmfe {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

struct Box {
    Vec3 lo;
    Vec3 hi;

    Vec3 extent() const { return hi - lo; }

    // Closed box membership.
    bool contains(Vec3 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
               p.z <= hi.z;
    }
};

// Nodal 3-component field stored as one contiguous array per component.
struct VectorField {
    std::array<std::vector<double>, 3> comp;

    VectorField() = default;
    explicit VectorField(std::size_t n) { resize(n); }

    void resize(std::size_t n) {
        for (auto& c : comp) c.assign(n, 0.0);
    }

    std::size_t size() const { return comp[0].size(); }

    std::vector<double>& operator[](int c) { return comp[c]; }
    const std::vector<double>& operator[](int c) const { return comp[c]; }

    void set_zero() {
        for (auto& c : comp)
            for (auto& v : c) v = 0.0;
    }

    Vec3 at(std::size_t i) const { return {comp[0][i], comp[1][i], comp[2][i]}; }

    // Largest Euclidean node norm; the blow-up monitor and run summaries use this.
    double max_node_norm() const {
        double m2 = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            const double n2 = comp[0][i] * comp[0][i] + comp[1][i] * comp[1][i] +
                              comp[2][i] * comp[2][i];
            if (n2 > m2) m2 = n2;
        }
        return std::sqrt(m2);
    }
};

}  // namespace mmfe
