#pragma once

#include <string>

#include "regforge/image_ops.hpp"
#include "regforge/types.hpp"

namespace regforge {

Image8 load_png(const std::string& path);
void save_png(const Image8& image, const std::string& path);

void save_gray_png(const GrayImage& img, const std::string& path);

// Edge pixels rendered white on black.
void save_edge_png(const EdgeSet& edges, int height, int width, const std::string& path);

}  // namespace regforge
