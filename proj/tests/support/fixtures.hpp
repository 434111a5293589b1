#pragma once

#include <numbers>

#include "nsalpha/dynamics.hpp"
#include "nsalpha/eigenbasis.hpp"
#include "nsalpha/operators.hpp"
#include "nsalpha/recipes.hpp"

namespace nsalpha::testing {

inline BoxSpec cube(int n = 16) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return BoxSpec({two_pi, two_pi, two_pi}, n);
}

using nsalpha::low_mode_forcing;
using nsalpha::random_low_field;

}  // namespace nsalpha::testing
