#pragma once

/// Built-in scenarios for `nsmap demo`. The files under scenarios/ carry the same text.

#include <array>
#include <optional>
#include <string_view>

namespace nsmap::cli {

struct Demo {
    std::string_view name;
    std::string_view yaml;
};

inline constexpr std::array<Demo, 3> kDemos{{
    {"oscillator-map", R"yaml(# Map between two harmonic oscillators with different frequencies.
kind: map-solve
signature: [1, -1, 1, -1]
m: 1
source: oscillator(2)
target: oscillator(1)
initial_state: [1, 0]
grid: {tau0: 0, tau1: 1, steps: 400}
output: {trajectory: true, order_check: true}
)yaml"},
    {"kaehler-fs", R"yaml(# Fubini-Study potential on C^2; holomorphic sectional curvature should come out as 2/c.
kind: kaehler-analyze
n: 2
potential: fs(1)
points:
  - [0, 0]
  - [[0.1, 0.2], [-0.05, 0.1]]
  - [[0.3, 0], [0, -0.2]]
)yaml"},
    {"cartan-identity", R"yaml(# Identity block form on two paired variables.
kind: cartan-demo
signature: [1, -1, 1, -1]
m: 2
form: cartan-identity
initial: {X: [1, 0.5], Xbar: [0.25, -1]}
restriction_index: 0
grid: {tau0: 0, tau1: 2, steps: 800}
)yaml"},
}};

inline std::optional<std::string_view> find_demo(std::string_view name)
{
    for (const Demo& d : kDemos) {
        if (d.name == name) return d.yaml;
    }
    return std::nullopt;
}

} // namespace nsmap::cli
