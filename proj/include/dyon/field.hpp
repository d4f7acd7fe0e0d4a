#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace dyon {

// Storage order used by every profile and state vector.
enum class Field : int { f = 0, rho = 1, A = 2, B = 3, h = 4, sigma = 5 };

inline constexpr std::size_t kFieldCount = 6;

inline constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::f, Field::rho, Field::A, Field::B, Field::h, Field::sigma};

// Order in which one Schauder step re-solves the fields.
inline constexpr std::array<Field, kFieldCount> kSolveOrder = {
    Field::f, Field::B, Field::sigma, Field::h, Field::rho, Field::A};

constexpr std::size_t idx(Field fd) { return static_cast<std::size_t>(fd); }

constexpr std::string_view field_name(Field fd) {
    switch (fd) {
        case Field::f: return "f";
        case Field::rho: return "rho";
        case Field::A: return "A";
        case Field::B: return "B";
        case Field::h: return "h";
        case Field::sigma: return "sigma";
    }
    return "?";
}

// f and h are handled through their deviation from 1 near the origin.
constexpr double field_offset(Field fd) {
    return (fd == Field::f || fd == Field::h) ? 1.0 : 0.0;
}

}  // namespace dyon
