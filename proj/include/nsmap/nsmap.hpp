#pragma once

// Numerical core. The scenario/report layer under nsmap/cli/ additionally needs yaml-cpp.

#include <nsmap/errors.hpp>
#include <nsmap/structure.hpp>
#include <nsmap/ode.hpp>
#include <nsmap/map_solver.hpp>
#include <nsmap/cartan.hpp>
#include <nsmap/kaehler.hpp>
