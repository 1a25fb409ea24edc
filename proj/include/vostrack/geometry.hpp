#pragma once

#include <algorithm>
#include <cmath>

namespace vostrack {

// Axis-aligned box in pixel coordinates, (x, y) = top-left corner.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool operator==(const BoundingBox&) const = default;
};

// Center-parameterized box used for trajectory prediction and distances.
struct BoxVector {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool operator==(const BoxVector&) const = default;
};

inline BoxVector to_box_vector(const BoundingBox& b) {
    return BoxVector{b.x + b.w / 2.0, b.y + b.h / 2.0,
                     static_cast<double>(b.w), static_cast<double>(b.h)};
}

inline BoundingBox to_bounding_box(const BoxVector& v) {
    int w = std::max(1, static_cast<int>(std::lround(v.w)));
    int h = std::max(1, static_cast<int>(std::lround(v.h)));
    int x = static_cast<int>(std::lround(v.cx - v.w / 2.0));
    int y = static_cast<int>(std::lround(v.cy - v.h / 2.0));
    return BoundingBox{x, y, w, h};
}

// Euclidean norm of the componentwise difference (cx, cy, w, h).
inline double box_distance(const BoxVector& a, const BoxVector& b) {
    double dx = a.cx - b.cx;
    double dy = a.cy - b.cy;
    double dw = a.w - b.w;
    double dh = a.h - b.h;
    return std::sqrt(dx * dx + dy * dy + dw * dw + dh * dh);
}

inline double box_inner_product(const BoxVector& a, const BoxVector& b) {
    return a.cx * b.cx + a.cy * b.cy + a.w * b.w + a.h * b.h;
}

// Intersects the box with the frame rectangle; may produce w <= 0 / h <= 0
// when the box lies fully outside.
inline BoundingBox clip_box(const BoundingBox& b, int frame_w, int frame_h) {
    int x0 = std::max(b.x, 0);
    int y0 = std::max(b.y, 0);
    int x1 = std::min(b.x + b.w, frame_w);
    int y1 = std::min(b.y + b.h, frame_h);
    return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

inline double frame_diagonal(int frame_w, int frame_h) {
    return std::sqrt(static_cast<double>(frame_w) * frame_w +
                     static_cast<double>(frame_h) * frame_h);
}

}  // namespace vostrack
