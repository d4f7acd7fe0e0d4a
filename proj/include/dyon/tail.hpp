#pragma once

#include <cstddef>
#include <vector>

#include "dyon/field.hpp"
#include "dyon/params.hpp"
#include "dyon/profile.hpp"

namespace dyon {

// Asymptotic condition at the truncation radius:
// field' = -(rate + power / r) (field - target).
struct FarCondition {
    double rate = 0;
    double power = 0;
    double target = 0;
};

FarCondition far_condition(Field fd, const DerivedConstants& c);

// Finite-difference Newton solve of one field's equation on nodes (i0, n),
// with value[i0] held fixed and the far condition at the last node. The other
// fields are read at the nodes of `frozen`. Fills value and deriv for j > i0.
void complete_tail(Field fd, const FieldProfile& frozen, const DerivedConstants& c, std::size_t i0,
                   std::vector<double>& value, std::vector<double>& deriv);

}  // namespace dyon
