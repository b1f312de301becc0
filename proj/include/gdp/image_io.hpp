#pragma once

#include <string>

#include "gdp/image.hpp"

namespace gdp {

/// Reads an 8-bit PGM (P5), PPM (P6) or PNG file. Color inputs are converted
/// to gray with luma weights 0.299/0.587/0.114; values are scaled to [0,1].
Image load_image(const std::string& path);

/// Writes round(clamp(v,0,1)*255) as binary PGM or PNG depending on the
/// file extension (.png writes PNG, anything else binary P5).
void save_image(const Image& img, const std::string& path);

} // namespace gdp
