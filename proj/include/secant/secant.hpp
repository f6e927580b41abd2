#pragma once

#include "secant/basins.hpp"
#include "secant/cycles.hpp"
#include "secant/polynomial.hpp"
#include "secant/render.hpp"
#include "secant/secant_map.hpp"
#include "secant/types.hpp"
