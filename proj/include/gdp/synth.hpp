#pragma once

#include <cstdint>

#include "gdp/image.hpp"

namespace gdp {

/// Deterministic piecewise-smooth test image: smooth background bumps, a few
/// flat shapes with hard edges and mild texture. Used for the shipped noise
/// calibration corpus and throughout the test suites.
Image make_structured_image(int width, int height, uint64_t seed);

/// Smooth random field (sum of random Gaussian bumps), for solver round trips.
Image make_smooth_image(int width, int height, uint64_t seed);

} // namespace gdp
