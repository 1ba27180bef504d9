#pragma once
#include <cstdint>
#include <utility>

#include <fmp/bp.hpp>

namespace fmp {

/// Two gray-level images and a square state space: state x encodes the
/// displacement (x / s - s/2, x % s - s/2) with s = sqrt(states).
struct FlowTask {
    int rows = 0;
    int cols = 0;
    int states = 0;
    Eigen::ArrayXXd im1;
    Eigen::ArrayXXd im2;
    double smoothness = 0.1; ///< weight of the pairwise flow distance

    int side() const;
    /// (row, column) displacement of a state.
    std::pair<int, int> flow(int state) const;
    int zero_state() const;
    void validate() const;

    /// im1 uniform random gray levels, im2 = im1 moved by (dy, dx) with
    /// edge clamping.
    static FlowTask synthetic(int rows, int cols, int states, std::uint64_t seed, int dy = 0, int dx = 0);
};

/// Min-sum grid: unary |im1(p) - im2(p + f(x))|, pairwise Euclidean
/// distance between flow vectors, one homogeneity class.
FactorGraph flow_graph(const FlowTask& task);

enum class GridTaskKind { random, flow, stereo };

struct GridConfig {
    GridTaskKind task = GridTaskKind::random;
    int rows = 8;
    int cols = 8;
    int states = 16;
    std::uint64_t seed = 1;
    Schedule schedule{ScheduleKind::random_sequential, 5, 1e-9, 1};
    ArgmaxMode argmax = ArgmaxMode::early_stop;
    int dy = 0; ///< flow task: true displacement
    int dx = 0;
};

/// random: max-product with U[0,1) unaries and one random homogeneous prior.
/// flow:   flow_graph of a synthetic task.
/// stereo: min-sum with unary (x - t)^2 for a random target t per pixel and
///         pairwise (x_a - x_b)^2; the regime where sorted search degrades.
FactorGraph grid_model(const GridConfig& cfg);

struct GridRun {
    Assignment states;
    BpTrace trace;
    double seconds = 0.0;
};

GridRun run_grid(const FactorGraph& g, const Schedule& schedule, MessageMode mode,
                 ArgmaxMode argmax = ArgmaxMode::early_stop);
GridRun run_grid(const GridConfig& cfg, MessageMode mode);

} // namespace fmp
