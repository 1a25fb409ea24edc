#pragma once

#include <cstdint>
#include <vector>

#include "vostrack/geometry.hpp"

namespace vostrack {

// Run-length encoded binary mask. Runs are counted in row-major pixel order
// and alternate background/foreground, starting with a background run that
// may be zero. Canonical form: only the leading run may be zero, and the
// counts always sum to width*height.
struct RleMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> counts;

    bool operator==(const RleMask&) const = default;
};

// Per-pixel saliency in [0, 1], row-major.
struct SaliencyMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Throws Error(malformed_rle) when the counts violate the canonical form.
void validate_rle(const RleMask& rle);

RleMask rle_encode(int width, int height, const std::vector<std::uint8_t>& grid);
std::vector<std::uint8_t> rle_decode(const RleMask& rle);

std::uint64_t mask_area(const RleMask& rle);
bool mask_empty(const RleMask& rle);

std::uint64_t mask_intersection_area(const RleMask& a, const RleMask& b);
double mask_iou(const RleMask& a, const RleMask& b);
double mask_mean_saliency(const RleMask& mask, const SaliencyMap& sal);

// Tight bounding box of the foreground; (0,0,0,0) for an empty mask.
BoundingBox mask_bbox(const RleMask& rle);

// Shifts the foreground by (dx, dy), discarding pixels leaving the frame.
RleMask translate_mask(const RleMask& rle, int dx, int dy);

// Rasterizes a box interior (clipped to the frame) as a mask.
RleMask make_box_mask(int width, int height, const BoundingBox& box);

}  // namespace vostrack
