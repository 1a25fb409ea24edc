#include "vostrack/mask.hpp"

#include <algorithm>
#include <string>

#include "vostrack/errors.hpp"

namespace vostrack {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::io: return "io";
        case ErrorCode::parse: return "parse";
        case ErrorCode::config: return "config";
        case ErrorCode::input: return "input";
        case ErrorCode::spec: return "spec";
        case ErrorCode::malformed_rle: return "malformed_rle";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::missing_frame: return "missing_frame";
        case ErrorCode::empty_pool: return "empty_pool";
        case ErrorCode::size_limit: return "size_limit";
    }
    return "unknown";
}

void validate_rle(const RleMask& rle) {
    if (rle.width < 0 || rle.height < 0)
        raise(ErrorCode::malformed_rle, "negative mask dimensions");
    const std::uint64_t expected =
        static_cast<std::uint64_t>(rle.width) * static_cast<std::uint64_t>(rle.height);
    if (rle.counts.empty()) {
        if (expected != 0)
            raise(ErrorCode::malformed_rle, "empty run list for non-empty frame");
        return;
    }
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < rle.counts.size(); ++i) {
        if (i > 0 && rle.counts[i] == 0)
            raise(ErrorCode::malformed_rle,
                  "zero-length run at position " + std::to_string(i));
        total += rle.counts[i];
    }
    if (total != expected)
        raise(ErrorCode::malformed_rle,
              "run lengths sum to " + std::to_string(total) + ", expected " +
                  std::to_string(expected));
}

RleMask rle_encode(int width, int height, const std::vector<std::uint8_t>& grid) {
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (grid.size() != n)
        raise(ErrorCode::dimension_mismatch, "grid size does not match mask dimensions");
    RleMask rle;
    rle.width = width;
    rle.height = height;
    if (n == 0) return rle;
    std::uint8_t value = 0;  // runs start with background
    std::uint32_t run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t pixel = grid[i] ? 1 : 0;
        if (pixel == value) {
            ++run;
        } else {
            rle.counts.push_back(run);
            value = pixel;
            run = 1;
        }
    }
    rle.counts.push_back(run);
    return rle;
}

std::vector<std::uint8_t> rle_decode(const RleMask& rle) {
    validate_rle(rle);
    const std::size_t n =
        static_cast<std::size_t>(rle.width) * static_cast<std::size_t>(rle.height);
    std::vector<std::uint8_t> grid(n, 0);
    std::size_t pos = 0;
    std::uint8_t value = 0;
    for (std::uint32_t count : rle.counts) {
        if (value)
            std::fill(grid.begin() + pos, grid.begin() + pos + count, std::uint8_t{1});
        pos += count;
        value = 1 - value;
    }
    return grid;
}

std::uint64_t mask_area(const RleMask& rle) {
    std::uint64_t area = 0;
    for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
    return area;
}

bool mask_empty(const RleMask& rle) { return mask_area(rle) == 0; }

std::uint64_t mask_intersection_area(const RleMask& a, const RleMask& b) {
    if (a.width != b.width || a.height != b.height)
        raise(ErrorCode::dimension_mismatch, "mask dimensions differ");
    // Two-pointer sweep over the run streams; overlapping foreground runs
    // contribute the length of their overlap.
    std::uint64_t inter = 0;
    std::size_t ia = 0, ib = 0;
    std::uint64_t ca = ia < a.counts.size() ? a.counts[ia] : 0;
    std::uint64_t cb = ib < b.counts.size() ? b.counts[ib] : 0;
    bool va = false, vb = false;
    while (ia < a.counts.size() && ib < b.counts.size()) {
        const std::uint64_t step = std::min(ca, cb);
        if (va && vb) inter += step;
        ca -= step;
        cb -= step;
        if (ca == 0) {
            ++ia;
            if (ia < a.counts.size()) ca = a.counts[ia];
            va = !va;
        }
        if (cb == 0) {
            ++ib;
            if (ib < b.counts.size()) cb = b.counts[ib];
            vb = !vb;
        }
    }
    return inter;
}

double mask_iou(const RleMask& a, const RleMask& b) {
    const std::uint64_t inter = mask_intersection_area(a, b);
    const std::uint64_t area_a = mask_area(a);
    const std::uint64_t area_b = mask_area(b);
    const std::uint64_t uni = area_a + area_b - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double mask_mean_saliency(const RleMask& mask, const SaliencyMap& sal) {
    if (mask.width != sal.width || mask.height != sal.height)
        raise(ErrorCode::dimension_mismatch, "saliency map dimensions differ from mask");
    // Accumulate in row-major pixel order so the sum is reproducible.
    double sum = 0.0;
    std::uint64_t area = 0;
    std::size_t pos = 0;
    bool value = false;
    for (std::uint32_t count : mask.counts) {
        if (value) {
            for (std::uint32_t k = 0; k < count; ++k) sum += sal.values[pos + k];
            area += count;
        }
        pos += count;
        value = !value;
    }
    if (area == 0) return 0.0;
    return sum / static_cast<double>(area);
}

BoundingBox mask_bbox(const RleMask& rle) {
    int min_x = rle.width, min_y = rle.height, max_x = -1, max_y = -1;
    std::size_t pos = 0;
    bool value = false;
    for (std::uint32_t count : rle.counts) {
        if (value && count > 0 && rle.width > 0) {
            // A foreground run spans [pos, pos + count) in row-major order.
            const std::size_t first = pos;
            const std::size_t last = pos + count - 1;
            const int y0 = static_cast<int>(first / rle.width);
            const int y1 = static_cast<int>(last / rle.width);
            min_y = std::min(min_y, y0);
            max_y = std::max(max_y, y1);
            if (y0 == y1) {
                min_x = std::min(min_x, static_cast<int>(first % rle.width));
                max_x = std::max(max_x, static_cast<int>(last % rle.width));
            } else {
                // Run wraps at least one row boundary, so it touches both edges.
                min_x = 0;
                max_x = rle.width - 1;
            }
        }
        pos += count;
        value = !value;
    }
    if (max_x < 0) return BoundingBox{0, 0, 0, 0};
    return BoundingBox{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

RleMask translate_mask(const RleMask& rle, int dx, int dy) {
    const auto grid = rle_decode(rle);
    std::vector<std::uint8_t> shifted(grid.size(), 0);
    for (int y = 0; y < rle.height; ++y) {
        const int ny = y + dy;
        if (ny < 0 || ny >= rle.height) continue;
        for (int x = 0; x < rle.width; ++x) {
            if (!grid[static_cast<std::size_t>(y) * rle.width + x]) continue;
            const int nx = x + dx;
            if (nx < 0 || nx >= rle.width) continue;
            shifted[static_cast<std::size_t>(ny) * rle.width + nx] = 1;
        }
    }
    return rle_encode(rle.width, rle.height, shifted);
}

RleMask make_box_mask(int width, int height, const BoundingBox& box) {
    std::vector<std::uint8_t> grid(
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    const BoundingBox c = clip_box(box, width, height);
    if (c.w > 0 && c.h > 0) {
        for (int y = c.y; y < c.y + c.h; ++y)
            for (int x = c.x; x < c.x + c.w; ++x)
                grid[static_cast<std::size_t>(y) * width + x] = 1;
    }
    return rle_encode(width, height, grid);
}

}  // namespace vostrack
