#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pesinlab/systems.hpp"

namespace fixture {

using nlohmann::json;
namespace b = pesinlab::builtin;

inline std::vector<json> builtins() {
    return {b::cat_map(),
            b::linear_automorphism({{1, 1}, {1, 0}}),
            b::identity(2),
            b::perturbed_cat(0.05),
            b::rotation({0.3, 0.7}),
            b::standard_map(1.0),
            b::standard_map(0.0),
            b::block({b::cat_map(), b::rotation({0.3})}),
            b::power(b::cat_map(), 2)};
}

inline std::vector<json> linear_builtins() {
    return {b::cat_map(), b::linear_automorphism({{1, 1}, {1, 0}}), b::identity(2), b::rotation({0.3, 0.7}),
            b::linear_automorphism({{2, 1, 1}, {1, 1, 0}, {1, 0, 0}})};
}

inline pesinlab::SmoothSystem cat() { return pesinlab::make_system(b::cat_map()); }

}  // namespace fixture
