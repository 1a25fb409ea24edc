#include "vostrack/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "vostrack/errors.hpp"
#include "vostrack/rng.hpp"

namespace vostrack {

namespace {

constexpr int kMaxExhaustive = 6;

using Grid = std::vector<std::uint8_t>;

// Tracker state mirrored from the production pool, but carrying dense masks.
struct OracleTrack {
    int id = 0;
    std::vector<std::vector<double>> descriptors;
    std::vector<std::pair<int, BoxVector>> history;
    Grid mask;
    int frequency = 0;
    double saliency_sum = 0.0;
    int last_supported = -1;
};

struct DenseCandidate {
    Grid grid;
    BoundingBox box;
    std::vector<double> descriptor;
    double objectness = 0.0;
    bool detector = true;
};

std::uint64_t grid_area(const Grid& grid) {
    std::uint64_t area = 0;
    for (std::uint8_t pixel : grid) area += pixel ? 1 : 0;
    return area;
}

double grid_iou(const Grid& a, const Grid& b) {
    std::uint64_t inter = 0, area_a = 0, area_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool pa = a[i] != 0;
        const bool pb = b[i] != 0;
        if (pa) ++area_a;
        if (pb) ++area_b;
        if (pa && pb) ++inter;
    }
    const std::uint64_t uni = area_a + area_b - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double grid_mean_saliency(const Grid& grid, const SaliencyMap& sal) {
    double sum = 0.0;
    std::uint64_t area = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid[i]) continue;
        sum += sal.values[i];
        ++area;
    }
    if (area == 0) return 0.0;
    return sum / static_cast<double>(area);
}

BoundingBox grid_bbox(const Grid& grid, int width, int height) {
    int min_x = width, min_y = height, max_x = -1, max_y = -1;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (!grid[static_cast<std::size_t>(y) * width + x]) continue;
            min_x = std::min(min_x, x);
            min_y = std::min(min_y, y);
            max_x = std::max(max_x, x);
            max_y = std::max(max_y, y);
        }
    }
    if (max_x < 0) return BoundingBox{0, 0, 0, 0};
    return BoundingBox{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

Grid shift_grid(const Grid& grid, int width, int height, int dx, int dy) {
    Grid shifted(grid.size(), 0);
    for (int y = 0; y < height; ++y) {
        const int ny = y + dy;
        if (ny < 0 || ny >= height) continue;
        for (int x = 0; x < width; ++x) {
            if (!grid[static_cast<std::size_t>(y) * width + x]) continue;
            const int nx = x + dx;
            if (nx < 0 || nx >= width) continue;
            shifted[static_cast<std::size_t>(ny) * width + nx] = 1;
        }
    }
    return shifted;
}

BoxVector oracle_predict(const OracleTrack& track, int target_frame) {
    const auto& [last_frame, last_box] = track.history.back();
    if (track.history.size() == 1) return last_box;
    const auto& [prev_frame, prev_box] = track.history[track.history.size() - 2];
    const double span = static_cast<double>(last_frame - prev_frame);
    const double vx = (last_box.cx - prev_box.cx) / span;
    const double vy = (last_box.cy - prev_box.cy) / span;
    const double dt = static_cast<double>(target_frame - last_frame);
    return BoxVector{last_box.cx + vx * dt, last_box.cy + vy * dt, last_box.w, last_box.h};
}

Grid oracle_translate(const OracleTrack& track, int target_frame, int width, int height) {
    const BoxVector predicted = oracle_predict(track, target_frame);
    const BoxVector& anchor = track.history.back().second;
    const int dx = static_cast<int>(std::lround(predicted.cx - anchor.cx));
    const int dy = static_cast<int>(std::lround(predicted.cy - anchor.cy));
    return shift_grid(track.mask, width, height, dx, dy);
}

double descriptor_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double oracle_traj(const BoxVector& predicted, const BoxVector& candidate,
                   double alpha_traj, TrajMetric metric) {
    const double measure = metric == TrajMetric::distance
                               ? box_distance(predicted, candidate)
                               : box_inner_product(predicted, candidate);
    return std::min(1.0, std::max(0.0, 1.0 - std::min(measure / alpha_traj, 1.0)));
}

double oracle_reid(const std::vector<std::vector<double>>& descriptors,
                   const std::vector<double>& descriptor, double alpha_reid) {
    double nearest = descriptor_l2(descriptors[0], descriptor);
    for (std::size_t j = 1; j < descriptors.size(); ++j)
        nearest = std::min(nearest, descriptor_l2(descriptors[j], descriptor));
    return 1.0 - std::min(nearest / alpha_reid, 1.0);
}

struct Pick {
    double score = 0.0;
    int row = 0;
    int col = 0;
};

// Greedy rank: higher score first, ties to the lower row, then lower column.
bool pick_before(const Pick& a, const Pick& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
}

// Compares two matchings by their rank-sorted pick sequences; when one is a
// prefix of the other the longer matching wins, which is exactly the greedy
// trace (greedy never stops while an above-threshold pairing remains).
bool sequence_better(const std::vector<Pick>& a, const std::vector<Pick>& b) {
    const std::size_t common = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (a[i].row != b[i].row || a[i].col != b[i].col) return pick_before(a[i], b[i]);
    }
    return a.size() > b.size();
}

struct Enumerator {
    int rows = 0;
    int cols = 0;
    const std::vector<double>* totals = nullptr;  // rows * cols
    double threshold = 0.0;

    std::vector<bool> used_col;
    std::vector<Pick> current;
    std::vector<Pick> best;
    bool have_best = false;

    double total_at(int row, int col) const {
        return (*totals)[static_cast<std::size_t>(row) * cols + col];
    }

    void visit() {
        std::vector<Pick> sorted = current;
        std::sort(sorted.begin(), sorted.end(), pick_before);
        if (!have_best || sequence_better(sorted, best)) {
            best = std::move(sorted);
            have_best = true;
        }
    }

    void recurse(int row) {
        if (row == rows) {
            visit();
            return;
        }
        recurse(row + 1);  // row stays unmatched
        for (int col = 0; col < cols; ++col) {
            if (used_col[col]) continue;
            const double total = total_at(row, col);
            if (total < threshold) continue;
            used_col[col] = true;
            current.push_back(Pick{total, row, col});
            recurse(row + 1);
            current.pop_back();
            used_col[col] = false;
        }
    }
};

// All one-to-one partial matchings above the threshold, reduced to the one
// the greedy rule would build.
std::vector<Pick> enumerate_assignment(const std::vector<double>& totals, int rows,
                                       int cols, double threshold) {
    Enumerator e;
    e.rows = rows;
    e.cols = cols;
    e.totals = &totals;
    e.threshold = threshold;
    e.used_col.assign(cols, false);
    e.recurse(0);
    return e.best;
}

enum class Policy { translate, none, gt };

}  // namespace

SequenceResult oracle_track(const SequenceInput& input, const PipelineConfig& config) {
    validate_config(config);
    if (input.frame_count < 1) raise(ErrorCode::input, "sequence needs at least 1 frame");
    if (input.width <= 0 || input.height <= 0)
        raise(ErrorCode::input, "frame size must be positive");
    if (static_cast<int>(input.candidates.size()) != input.frame_count ||
        static_cast<int>(input.saliency.size()) != input.frame_count)
        raise(ErrorCode::input, "per-frame lists out of step with frame_count");

    ScoreWeights weights = config.pool.weights;
    if (weights.alpha_traj <= 0.0)
        weights.alpha_traj = 0.5 * frame_diagonal(input.width, input.height);
    const Policy policy = config.propagator == "translate" ? Policy::translate
                          : config.propagator == "none"    ? Policy::none
                                                           : Policy::gt;
    if (policy == Policy::gt && !input.has_ground_truth)
        raise(ErrorCode::config, "oracle propagator needs ground truth");

    SequenceResult result;
    result.width = input.width;
    result.height = input.height;
    result.labels.resize(input.frame_count);

    std::vector<OracleTrack> pool;
    int next_id = 1;
    bool growing = true;

    for (int t = 0; t < input.frame_count; ++t) {
        if (static_cast<int>(pool.size()) > kMaxExhaustive)
            raise(ErrorCode::size_limit, "more than 6 tracked instances at frame " +
                                             std::to_string(t));
        if (static_cast<int>(input.candidates[t].size()) > kMaxExhaustive)
            raise(ErrorCode::size_limit, "more than 6 detector candidates at frame " +
                                             std::to_string(t));

        // Resolves which ground-truth identity a track follows by best overlap
        // with the previous frame, as the production oracle propagator does.
        const auto gt_grid = [&](const OracleTrack& track) -> std::optional<Grid> {
            if (t <= 0 || t >= static_cast<int>(input.ground_truth.size()))
                return std::nullopt;
            int best_id = -1;
            double best_iou = 0.0;
            for (const auto& [id, mask] : input.ground_truth[t - 1].instance_masks) {
                const double iou = grid_iou(track.mask, rle_decode(mask));
                if (iou > best_iou) {
                    best_iou = iou;
                    best_id = id;
                }
            }
            if (best_id < 0) return std::nullopt;
            const auto& cur = input.ground_truth[t].instance_masks;
            const auto it = cur.find(best_id);
            if (it == cur.end()) return std::nullopt;
            return rle_decode(it->second);
        };

        std::vector<DenseCandidate> candidates;
        for (const CandidateProposal& cand : input.candidates[t]) {
            DenseCandidate dense;
            dense.grid = rle_decode(cand.mask);
            dense.box = cand.box;
            dense.descriptor = cand.descriptor;
            dense.objectness = cand.objectness;
            dense.detector = true;
            candidates.push_back(std::move(dense));
        }
        if (t > 0) {
            for (const OracleTrack& track : pool) {
                std::optional<Grid> grid;
                if (policy == Policy::translate) {
                    if (track.last_supported == t - 1) continue;
                    grid = oracle_translate(track, t, input.width, input.height);
                } else if (policy == Policy::gt) {
                    grid = gt_grid(track);
                } else {
                    continue;
                }
                if (!grid || grid_area(*grid) == 0) continue;
                DenseCandidate dense;
                dense.box = grid_bbox(*grid, input.width, input.height);
                dense.grid = std::move(*grid);
                dense.descriptor = track.descriptors.back();
                dense.objectness = config.pool.propagated_objectness;
                dense.detector = false;
                candidates.push_back(std::move(dense));
            }
        }

        const int rows = static_cast<int>(pool.size());
        const int cols = static_cast<int>(candidates.size());
        std::vector<Grid> references(rows);
        std::vector<BoxVector> predictions(rows);
        for (int row = 0; row < rows; ++row) {
            const OracleTrack& track = pool[row];
            if (policy == Policy::translate) {
                references[row] = oracle_translate(track, t, input.width, input.height);
            } else if (policy == Policy::gt) {
                auto grid = gt_grid(track);
                references[row] = grid ? std::move(*grid) : track.mask;
            } else {
                references[row] = track.mask;
            }
            predictions[row] = oracle_predict(track, t);
        }

        std::vector<double> totals(static_cast<std::size_t>(rows) * cols, 0.0);
        std::vector<double> reid(totals.size(), 0.0);
        for (int row = 0; row < rows; ++row) {
            for (int col = 0; col < cols; ++col) {
                reid[static_cast<std::size_t>(row) * cols + col] = oracle_reid(
                    pool[row].descriptors, candidates[col].descriptor, weights.alpha_reid);
            }
        }
        for (int col = 0; col < cols; ++col) {
            double max_reid = 0.0;
            for (int row = 0; row < rows; ++row)
                max_reid =
                    std::max(max_reid, reid[static_cast<std::size_t>(row) * cols + col]);
            for (int row = 0; row < rows; ++row) {
                const std::size_t cell = static_cast<std::size_t>(row) * cols + col;
                const double iou = grid_iou(references[row], candidates[col].grid);
                const double traj =
                    oracle_traj(predictions[row], to_box_vector(candidates[col].box),
                                weights.alpha_traj, weights.traj_metric);
                const double rel = max_reid <= 0.0 ? 0.0 : reid[cell] / max_reid;
                totals[cell] = weights.w_iou * iou + weights.w_traj * traj +
                               weights.w_reid * reid[cell] + weights.w_rel * rel;
            }
        }

        const double tau = growing ? config.pool.tau1 : config.pool.tau2;
        const std::vector<Pick> matching = enumerate_assignment(totals, rows, cols, tau);
        std::vector<int> row_match(rows, -1);
        std::vector<int> col_owner(cols, -1);
        std::vector<double> row_score(rows, 0.0);
        for (const Pick& pick : matching) {
            row_match[pick.row] = pick.col;
            col_owner[pick.col] = pick.row;
            row_score[pick.row] = pick.score;
        }

        std::map<int, double> frame_score;
        for (int row = 0; row < rows; ++row) {
            if (row_match[row] < 0) continue;
            const DenseCandidate& cand = candidates[row_match[row]];
            ProvenanceRecord rec;
            rec.frame = t;
            rec.instance_id = pool[row].id;
            rec.total_score = row_score[row];
            rec.kind = cand.detector ? MatchKind::detector : MatchKind::propagated;
            rec.candidate_index = cand.detector ? row_match[row] : -1;
            result.provenance.push_back(rec);
            frame_score[rec.instance_id] = rec.total_score;
        }

        for (int row = 0; row < rows; ++row) {
            if (row_match[row] < 0) continue;
            const DenseCandidate& cand = candidates[row_match[row]];
            OracleTrack& track = pool[row];
            track.descriptors.push_back(cand.descriptor);
            track.history.emplace_back(t, to_box_vector(cand.box));
            track.mask = cand.grid;
            track.frequency += 1;
            track.saliency_sum += grid_mean_saliency(cand.grid, input.saliency[t]);
            track.last_supported = t;
        }

        if (growing) {
            std::vector<const Grid*> claimed;
            for (int col = 0; col < cols; ++col)
                if (col_owner[col] >= 0) claimed.push_back(&candidates[col].grid);
            for (int col = 0; col < cols; ++col) {
                const DenseCandidate& cand = candidates[col];
                if (!cand.detector) continue;
                if (col_owner[col] >= 0) continue;
                if (cand.objectness < config.pool.spawn_objectness_min) continue;
                if (t > 0) {
                    bool overlapped = false;
                    for (const Grid* grid : claimed) {
                        if (grid_iou(cand.grid, *grid) >= config.pool.spawn_overlap_max) {
                            overlapped = true;
                            break;
                        }
                    }
                    if (overlapped) continue;
                }
                OracleTrack track;
                track.id = next_id++;
                track.descriptors.push_back(cand.descriptor);
                track.history.emplace_back(t, to_box_vector(cand.box));
                track.mask = cand.grid;
                track.frequency = 1;
                track.saliency_sum = grid_mean_saliency(cand.grid, input.saliency[t]);
                track.last_supported = t;
                ProvenanceRecord rec;
                rec.frame = t;
                rec.instance_id = track.id;
                rec.total_score = cand.objectness;
                rec.kind = MatchKind::spawn;
                rec.candidate_index = col;
                result.provenance.push_back(rec);
                frame_score[rec.instance_id] = rec.total_score;
                pool.push_back(std::move(track));
                claimed.push_back(&candidates[col].grid);
            }
        }

        if (growing && t == config.pool.M - 1) {
            std::vector<std::size_t> order(pool.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            if (config.selection_mode == SelectionMode::key) {
                std::vector<double> scores(pool.size());
                for (std::size_t i = 0; i < scores.size(); ++i) {
                    const OracleTrack& track = pool[i];
                    scores[i] =
                        config.selection.w_sal *
                            (track.saliency_sum / static_cast<double>(track.frequency)) +
                        config.selection.w_freq *
                            std::min(static_cast<double>(track.frequency) /
                                         static_cast<double>(config.pool.M),
                                     1.0);
                }
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    if (scores[a] != scores[b]) return scores[a] > scores[b];
                    return pool[a].id < pool[b].id;
                });
            } else {
                Rng rng(config.selection_seed);
                rng.shuffle(order);
            }
            if (order.size() > static_cast<std::size_t>(config.pool.K))
                order.resize(config.pool.K);
            std::sort(order.begin(), order.end());
            std::vector<OracleTrack> kept;
            kept.reserve(order.size());
            for (std::size_t index : order) kept.push_back(std::move(pool[index]));
            pool = std::move(kept);
            growing = false;
            result.selected_ids.clear();
            for (const OracleTrack& track : pool) result.selected_ids.push_back(track.id);
            std::sort(result.selected_ids.begin(), result.selected_ids.end());
        }

        FrameLabels& labels = result.labels[t];
        labels.width = input.width;
        labels.height = input.height;
        labels.labels.assign(static_cast<std::size_t>(input.width) * input.height, 0);
        std::vector<double> claim(labels.labels.size(), -1.0);
        for (const OracleTrack& track : pool) {
            if (track.last_supported != t) continue;
            const auto it = frame_score.find(track.id);
            if (it == frame_score.end()) continue;
            const double score = it->second;
            for (std::size_t i = 0; i < track.mask.size(); ++i) {
                if (!track.mask[i] || score <= claim[i]) continue;
                claim[i] = score;
                labels.labels[i] = track.id;
            }
        }
    }
    return result;
}

}  // namespace vostrack
