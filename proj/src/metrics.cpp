#include "vostrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <utility>

#include "vostrack/errors.hpp"
#include "vostrack/lap.hpp"

namespace vostrack {

double jaccard(const RleMask& pred, const RleMask& gt) {
    if (mask_empty(pred) && mask_empty(gt)) return 1.0;
    return mask_iou(pred, gt);
}

double default_boundary_tolerance(int width, int height) {
    return std::ceil(0.008 * frame_diagonal(width, height));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional squared-distance lower envelope (Felzenszwalb &
// Huttenlocher). Infinite inputs mark absent seeds and are skipped; an
// all-infinite row stays infinite.
void edt_1d(std::vector<double>& f, std::vector<int>& v, std::vector<double>& z,
            std::vector<double>& d) {
    const int n = static_cast<int>(f.size());
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        double s = 0.0;
        while (true) {
            const int p = v[k];
            if (f[p] == kInf) {
                // Only the initial placeholder can be infinite.
                --k;
                break;
            }
            s = ((f[q] + static_cast<double>(q) * q) -
                 (f[p] + static_cast<double>(p) * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[k])
                --k;
            else
                break;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = kInf;
        }
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        if (f[v[0]] == kInf) {
            d[q] = kInf;
            continue;
        }
        while (z[k + 1] < q) ++k;
        const double dq = static_cast<double>(q - v[k]);
        d[q] = dq * dq + f[v[k]];
    }
    for (int q = 0; q < n; ++q) f[q] = d[q];
}

// Exact squared Euclidean distance to the nearest seed, in place over a
// width x height grid holding 0 at seeds and +inf elsewhere.
void squared_distance_transform(std::vector<double>& dist, int width, int height) {
    const int n = std::max(width, height);
    std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n)),
        z(static_cast<std::size_t>(n) + 1);
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int x = 0; x < width; ++x) {
        f.resize(height);
        for (int y = 0; y < height; ++y)
            f[y] = dist[static_cast<std::size_t>(y) * width + x];
        edt_1d(f, v, z, d);
        for (int y = 0; y < height; ++y)
            dist[static_cast<std::size_t>(y) * width + x] = f[y];
    }
    for (int y = 0; y < height; ++y) {
        f.resize(width);
        for (int x = 0; x < width; ++x)
            f[x] = dist[static_cast<std::size_t>(y) * width + x];
        edt_1d(f, v, z, d);
        for (int x = 0; x < width; ++x)
            dist[static_cast<std::size_t>(y) * width + x] = f[x];
    }
}

// Per-id analysis confined to the id's bounding box plus a tolerance pad:
// boundary pixels (absolute coordinates) and the squared-distance field to
// them inside the window. Anything outside the window is farther than the
// tolerance by construction.
struct IdWindow {
    int x0 = 0, y0 = 0, w = 0, h = 0;
    std::uint64_t area = 0;
    std::vector<std::pair<int, int>> boundary;
    std::vector<double> dist2;

    bool within(int x, int y) const {
        return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h;
    }
    double dist2_at(int x, int y) const {
        return dist2[static_cast<std::size_t>(y - y0) * w + (x - x0)];
    }
};

IdWindow analyze_grid(const std::vector<std::uint8_t>& grid, int width, int height,
                      int pad) {
    IdWindow win;
    int min_x = width, min_y = height, max_x = -1, max_y = -1;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!grid[static_cast<std::size_t>(y) * width + x]) continue;
            ++win.area;
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
        }
    }
    if (win.area == 0) return win;
    win.x0 = std::max(0, min_x - pad);
    win.y0 = std::max(0, min_y - pad);
    win.w = std::min(width - 1, max_x + pad) - win.x0 + 1;
    win.h = std::min(height - 1, max_y + pad) - win.y0 + 1;
    win.dist2.assign(static_cast<std::size_t>(win.w) * win.h, kInf);
    const auto at = [&](int x, int y) {
        return grid[static_cast<std::size_t>(y) * width + x] != 0;
    };
    for (int y = min_y; y <= max_y; ++y) {
        for (int x = min_x; x <= max_x; ++x) {
            if (!at(x, y)) continue;
            const bool edge = x == 0 || x == width - 1 || y == 0 || y == height - 1 ||
                              !at(x - 1, y) || !at(x + 1, y) || !at(x, y - 1) ||
                              !at(x, y + 1);
            if (!edge) continue;
            win.boundary.emplace_back(x, y);
            win.dist2[static_cast<std::size_t>(y - win.y0) * win.w + (x - win.x0)] = 0.0;
        }
    }
    squared_distance_transform(win.dist2, win.w, win.h);
    return win;
}

double boundary_f_from_windows(const IdWindow& pred, const IdWindow& gt,
                               double tolerance) {
    if (pred.boundary.empty() && gt.boundary.empty()) return 1.0;
    if (pred.boundary.empty() || gt.boundary.empty()) return 0.0;
    const double tol2 = tolerance * tolerance;
    std::uint64_t pred_hit = 0, gt_hit = 0;
    for (const auto& [x, y] : pred.boundary)
        if (gt.within(x, y) && gt.dist2_at(x, y) <= tol2) ++pred_hit;
    for (const auto& [x, y] : gt.boundary)
        if (pred.within(x, y) && pred.dist2_at(x, y) <= tol2) ++gt_hit;
    const double precision =
        static_cast<double>(pred_hit) / static_cast<double>(pred.boundary.size());
    const double recall =
        static_cast<double>(gt_hit) / static_cast<double>(gt.boundary.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double boundary_f(const RleMask& pred, const RleMask& gt, double tolerance) {
    if (pred.width != gt.width || pred.height != gt.height)
        raise(ErrorCode::dimension_mismatch, "mask dimensions differ");
    if (tolerance < 0.0) raise(ErrorCode::config, "tolerance must be non-negative");
    const int pad = static_cast<int>(std::floor(tolerance)) + 1;
    const IdWindow pred_win = analyze_grid(rle_decode(pred), pred.width, pred.height, pad);
    const IdWindow gt_win = analyze_grid(rle_decode(gt), gt.width, gt.height, pad);
    return boundary_f_from_windows(pred_win, gt_win, tolerance);
}

SeriesStats sequence_measures(const std::vector<double>& values) {
    if (values.empty()) raise(ErrorCode::input, "empty measure series");
    SeriesStats stats;
    double sum = 0.0;
    std::size_t above = 0;
    for (double value : values) {
        sum += value;
        if (value > 0.5) ++above;
    }
    stats.mean = sum / static_cast<double>(values.size());
    stats.recall = static_cast<double>(above) / static_cast<double>(values.size());
    // Contiguous temporal quarters, earlier bins absorbing the remainder.
    // Decay compares the first bin with the last non-empty one.
    const std::size_t count = values.size();
    const std::size_t base = count / 4;
    const std::size_t rem = count % 4;
    std::vector<std::pair<std::size_t, std::size_t>> bins;  // [begin, end)
    std::size_t begin = 0;
    for (std::size_t b = 0; b < 4; ++b) {
        const std::size_t size = base + (b < rem ? 1 : 0);
        bins.emplace_back(begin, begin + size);
        begin += size;
    }
    const auto bin_mean = [&](std::size_t b) {
        double s = 0.0;
        for (std::size_t i = bins[b].first; i < bins[b].second; ++i) s += values[i];
        return s / static_cast<double>(bins[b].second - bins[b].first);
    };
    std::size_t last = 3;
    while (bins[last].second == bins[last].first) --last;
    stats.decay = bin_mean(0) - bin_mean(last);
    return stats;
}

namespace {

// Dense per-frame instance split: window analysis per id plus a joint
// pixel histogram so every pair's intersection comes from one pass.
struct FrameAnalysis {
    std::map<int, IdWindow> windows;
    std::map<std::pair<int, int>, std::uint64_t> joint;  // (gt id, pred id)
};

FrameAnalysis analyze_frame(const FrameLabels& gt, const FrameLabels& pred, int pad) {
    FrameAnalysis out;
    std::map<int, std::vector<std::uint8_t>> gt_grids, pred_grids;
    const std::size_t n = gt.labels.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int g = gt.labels[i];
        const int p = pred.labels[i];
        if (g != 0) {
            auto& grid = gt_grids[g];
            if (grid.empty()) grid.assign(n, 0);
            grid[i] = 1;
        }
        if (p != 0) {
            auto& grid = pred_grids[p];
            if (grid.empty()) grid.assign(n, 0);
            grid[i] = 1;
        }
        if (g != 0 && p != 0) out.joint[{g, p}] += 1;
    }
    for (const auto& [id, grid] : gt_grids)
        out.windows[id] = analyze_grid(grid, gt.width, gt.height, pad);
    for (const auto& [id, grid] : pred_grids)
        out.windows[-id] = analyze_grid(grid, pred.width, pred.height, pad);
    return out;
}

}  // namespace

std::vector<InstanceMeasure> match_instances(const std::vector<FrameLabels>& pred,
                                             const std::vector<FrameLabels>& gt,
                                             double tolerance) {
    if (pred.size() != gt.size())
        raise(ErrorCode::dimension_mismatch, "frame counts differ");
    for (std::size_t t = 0; t < pred.size(); ++t)
        if (pred[t].width != gt[t].width || pred[t].height != gt[t].height)
            raise(ErrorCode::dimension_mismatch, "frame sizes differ");
    if (tolerance < 0.0) raise(ErrorCode::config, "tolerance must be non-negative");

    // Ground-truth lifespans: first and last frame where the id is present.
    std::map<int, std::pair<int, int>> lifespan;
    std::set<int> pred_id_set;
    for (std::size_t t = 0; t < gt.size(); ++t) {
        std::set<int> seen;
        for (int id : gt[t].labels)
            if (id != 0) seen.insert(id);
        for (int id : seen) {
            const auto it = lifespan.find(id);
            if (it == lifespan.end())
                lifespan[id] = {static_cast<int>(t), static_cast<int>(t)};
            else
                it->second.second = static_cast<int>(t);
        }
        for (int id : pred[t].labels)
            if (id != 0) pred_id_set.insert(id);
    }
    std::vector<int> gt_ids;
    for (const auto& [id, span] : lifespan) gt_ids.push_back(id);
    const std::vector<int> pred_ids(pred_id_set.begin(), pred_id_set.end());

    std::map<std::pair<int, int>, std::pair<std::vector<double>, std::vector<double>>>
        series;  // (gt id, pred id) -> J series, F series over the gt lifespan
    for (int gid : gt_ids)
        for (int pid : pred_ids) series[{gid, pid}] = {{}, {}};

    const int pad = static_cast<int>(std::floor(tolerance)) + 1;
    const IdWindow empty_window;
    for (std::size_t t = 0; t < gt.size(); ++t) {
        const FrameAnalysis frame = analyze_frame(gt[t], pred[t], pad);
        const auto window_of = [&](int key) -> const IdWindow& {
            const auto it = frame.windows.find(key);
            return it == frame.windows.end() ? empty_window : it->second;
        };
        for (int gid : gt_ids) {
            const auto span = lifespan[gid];
            if (static_cast<int>(t) < span.first || static_cast<int>(t) > span.second)
                continue;
            const IdWindow& g_win = window_of(gid);
            for (int pid : pred_ids) {
                auto& [j_series, f_series] = series[{gid, pid}];
                const IdWindow& p_win = window_of(-pid);
                if (g_win.area == 0 && p_win.area == 0) {
                    j_series.push_back(1.0);
                    f_series.push_back(1.0);
                    continue;
                }
                const auto joint_it = frame.joint.find({gid, pid});
                const std::uint64_t inter =
                    joint_it == frame.joint.end() ? 0 : joint_it->second;
                const std::uint64_t uni = g_win.area + p_win.area - inter;
                j_series.push_back(static_cast<double>(inter) /
                                   static_cast<double>(uni));
                f_series.push_back(boundary_f_from_windows(p_win, g_win, tolerance));
            }
        }
    }

    // Optimal pairing on mean (J+F)/2 gains.
    std::vector<std::vector<double>> gains(gt_ids.size(),
                                           std::vector<double>(pred_ids.size(), 0.0));
    for (std::size_t g = 0; g < gt_ids.size(); ++g) {
        for (std::size_t p = 0; p < pred_ids.size(); ++p) {
            const auto& [j_series, f_series] = series[{gt_ids[g], pred_ids[p]}];
            double j_sum = 0.0, f_sum = 0.0;
            for (double value : j_series) j_sum += value;
            for (double value : f_series) f_sum += value;
            const double n = static_cast<double>(j_series.size());
            gains[g][p] = n > 0 ? (j_sum / n + f_sum / n) / 2.0 : 0.0;
        }
    }
    std::vector<int> matched(gt_ids.size(), -1);
    if (!gt_ids.empty() && !pred_ids.empty()) matched = solve_max_assignment(gains);

    std::vector<InstanceMeasure> measures;
    for (std::size_t g = 0; g < gt_ids.size(); ++g) {
        InstanceMeasure m;
        m.gt_id = gt_ids[g];
        const auto span = lifespan[gt_ids[g]];
        const std::size_t length = static_cast<std::size_t>(span.second - span.first + 1);
        if (matched[g] >= 0) {
            m.pred_id = pred_ids[matched[g]];
            auto& [j_series, f_series] = series[{gt_ids[g], m.pred_id}];
            m.j_values = std::move(j_series);
            m.f_values = std::move(f_series);
        } else {
            m.pred_id = -1;
            m.j_values.assign(length, 0.0);
            m.f_values.assign(length, 0.0);
        }
        measures.push_back(std::move(m));
    }
    return measures;
}

SequenceReport evaluate(const std::vector<FrameLabels>& pred,
                        const std::vector<FrameLabels>& gt, double tolerance) {
    const std::vector<InstanceMeasure> measures = match_instances(pred, gt, tolerance);
    SequenceReport report;
    if (measures.empty()) {
        // Nothing to segment and nothing demanded: vacuous agreement.
        report.j_mean = report.j_recall = 1.0;
        report.f_mean = report.f_recall = 1.0;
        report.global_mean = 1.0;
        return report;
    }
    for (const InstanceMeasure& m : measures) {
        const SeriesStats j = sequence_measures(m.j_values);
        const SeriesStats f = sequence_measures(m.f_values);
        report.j_mean += j.mean;
        report.j_recall += j.recall;
        report.j_decay += j.decay;
        report.f_mean += f.mean;
        report.f_recall += f.recall;
        report.f_decay += f.decay;
    }
    const double n = static_cast<double>(measures.size());
    report.j_mean /= n;
    report.j_recall /= n;
    report.j_decay /= n;
    report.f_mean /= n;
    report.f_recall /= n;
    report.f_decay /= n;
    report.global_mean = (report.j_mean + report.f_mean) / 2.0;
    return report;
}

}  // namespace vostrack
