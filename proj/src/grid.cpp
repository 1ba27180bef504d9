#include <fmp/grid.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmp/rng.hpp>

namespace fmp {

int FlowTask::side() const
{
    return static_cast<int>(std::lround(std::sqrt(static_cast<double>(states))));
}

std::pair<int, int> FlowTask::flow(int state) const
{
    const int s = side();
    return {state / s - s / 2, state % s - s / 2};
}

int FlowTask::zero_state() const
{
    const int s = side();
    return (s / 2) * s + s / 2;
}

void FlowTask::validate() const
{
    if (states < 1 || side() * side() != states) {
        throw domain_error("flow task: states-per-node must be a perfect square");
    }
    if (rows < 2 || cols < 2) throw domain_error("flow task: images need at least 2 rows and 2 columns");
    if (im1.rows() != rows || im1.cols() != cols || im2.rows() != rows || im2.cols() != cols) {
        throw domain_error("flow task: images must both be rows x cols");
    }
}

FlowTask FlowTask::synthetic(int rows, int cols, int states, std::uint64_t seed, int dy, int dx)
{
    FlowTask t;
    t.rows = rows;
    t.cols = cols;
    t.states = states;
    if (rows < 1 || cols < 1) throw domain_error("flow task: images need positive dimensions");
    auto rng = trial_rng(seed, 0);
    t.im1.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) t.im1(r, c) = uniform01(rng);
    }
    t.im2.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            t.im2(r, c) = t.im1(std::clamp(r - dy, 0, rows - 1), std::clamp(c - dx, 0, cols - 1));
        }
    }
    t.validate();
    return t;
}

FactorGraph flow_graph(const FlowTask& task)
{
    task.validate();
    const int n = task.states;
    const Topology topo = Topology::grid(task.rows, task.cols);
    return build_topology(
        topo, n,
        [&](int v, int) {
            const int r = v / task.cols, c = v % task.cols;
            Eigen::ArrayXd u(n);
            for (int x = 0; x < n; ++x) {
                const auto [fy, fx] = task.flow(x);
                const int r2 = std::clamp(r + fy, 0, task.rows - 1);
                const int c2 = std::clamp(c + fx, 0, task.cols - 1);
                u[x] = std::abs(task.im1(r, c) - task.im2(r2, c2));
            }
            return u;
        },
        [&](int, int, int) {
            Eigen::ArrayXd p(Index(n) * n);
            for (int a = 0; a < n; ++a) {
                const auto [ay, ax] = task.flow(a);
                for (int b = 0; b < n; ++b) {
                    const auto [by, bx] = task.flow(b);
                    p[a * n + b] = task.smoothness * std::hypot(ay - by, ax - bx);
                }
            }
            return p;
        },
        min_sum, true);
}

FactorGraph grid_model(const GridConfig& cfg)
{
    const Topology topo = Topology::grid(cfg.rows, cfg.cols);
    const int n = cfg.states;
    if (n < 1) throw domain_error("grid: states must be positive");
    switch (cfg.task) {
        case GridTaskKind::flow:
            return flow_graph(FlowTask::synthetic(cfg.rows, cfg.cols, n, cfg.seed, cfg.dy, cfg.dx));
        case GridTaskKind::random: {
            auto rng = trial_rng(cfg.seed, 1);
            return build_topology(
                topo, n,
                [&](int, int card) {
                    Eigen::ArrayXd u(card);
                    for (auto& x : u) x = uniform01(rng);
                    return u;
                },
                [&](int, int, int card) {
                    Eigen::ArrayXd p(Index(card) * card);
                    for (auto& x : p) x = uniform01(rng);
                    return p;
                },
                max_product, true);
        }
        case GridTaskKind::stereo: {
            auto rng = trial_rng(cfg.seed, 2);
            return build_topology(
                topo, n,
                [&](int, int card) {
                    const double t = std::floor(uniform01(rng) * card);
                    Eigen::ArrayXd u(card);
                    for (int x = 0; x < card; ++x) u[x] = (x - t) * (x - t);
                    return u;
                },
                [&](int, int, int card) {
                    Eigen::ArrayXd p(Index(card) * card);
                    for (int a = 0; a < card; ++a) {
                        for (int b = 0; b < card; ++b) p[a * card + b] = double(a - b) * double(a - b);
                    }
                    return p;
                },
                min_sum, true);
        }
    }
    throw domain_error("grid: unknown task");
}

GridRun run_grid(const FactorGraph& g, const Schedule& schedule, MessageMode mode, ArgmaxMode argmax)
{
    BpOptions opts;
    opts.mode = mode;
    opts.argmax = argmax;
    const auto t0 = std::chrono::steady_clock::now();
    BpResult res = run_bp(g, schedule, opts);
    GridRun run;
    run.states = decode_map(g, res);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.trace = std::move(res.trace);
    return run;
}

GridRun run_grid(const GridConfig& cfg, MessageMode mode)
{
    return run_grid(grid_model(cfg), cfg.schedule, mode, cfg.argmax);
}

} // namespace fmp
