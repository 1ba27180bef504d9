#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fmp/analysis.hpp>
#include <fmp/bench.hpp>
#include <fmp/denoise.hpp>
#include <fmp/fit.hpp>
#include <fmp/grid.hpp>
#include <fmp/grouping.hpp>
#include <fmp/model_io.hpp>
#include <fmp/rng.hpp>

#ifndef FMP_DATA_DIR
#define FMP_DATA_DIR "data"
#endif

namespace {

using fmp::Index;

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// "64,128" or "2^6,2^7"; "2^6..2^13" expands to every power in between.
std::vector<Index> parse_sizes(const std::string& text)
{
    auto one = [](const std::string& t) -> Index {
        if (t.rfind("2^", 0) == 0) return Index(1) << std::stoi(t.substr(2));
        return std::stoll(t);
    };
    std::vector<Index> out;
    for (const auto& item : split(text, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(one(item));
            continue;
        }
        const Index lo = one(item.substr(0, dots));
        const Index hi = one(item.substr(dots + 2));
        if (item.rfind("2^", 0) == 0) {
            for (Index n = lo; n <= hi; n *= 2) out.push_back(n);
        } else {
            for (Index n = lo; n <= hi; ++n) out.push_back(n);
        }
    }
    if (out.empty()) throw fmp::domain_error("no sizes given");
    return out;
}

std::vector<double> parse_doubles(const std::string& text)
{
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(std::stod(item));
    return out;
}

template <class Rows>
void emit(const Rows& rows, const std::string& path)
{
    if (path.empty()) {
        fmp::write_csv(std::cout, rows);
        return;
    }
    std::ofstream out(path);
    if (!out) throw fmp::domain_error("cannot write '" + path + "'");
    fmp::write_csv(out, rows);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fmp::domain_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_factor(std::ostream& os, const fmp::Factor& f)
{
    os << "scope:";
    for (const auto& v : f.scope()) os << ' ' << v.id << '(' << v.cardinality << ')';
    os << "\nvalues:";
    for (Index i = 0; i < f.size(); ++i) os << ' ' << fmp::format_double(f[i]);
    os << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sorted-list max-product inference: benchmarks and tools"};
    app.require_subcommand(1);

    std::string sizes = "64,256,1024";
    int k = 2;
    int trials = 100;
    std::uint64_t seed = 1;
    std::string mode = "analysis";
    std::string corr = "0";
    std::string out;
    std::string model_path;
    std::string semiring = "max-sum";
    int reps = 5;

    auto common = [&](CLI::App* sub, bool with_mode_default_early) {
        sub->add_option("--n", sizes, "sizes: comma list, 2^a, or 2^a..2^b");
        sub->add_option("--trials", trials, "trials per size")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--mode", mode, "analysis | symmetric | early-stop")
            ->check(CLI::IsMember({"analysis", "symmetric", "early-stop"}));
        sub->add_option("--out", out, "CSV output path (default stdout)");
        if (with_mode_default_early) mode = "early-stop";
    };

    auto* argmax_cmd = app.add_subcommand("bench-argmax", "steps and probes of the sorted-list search on i.i.d. lists");
    common(argmax_cmd, false);
    argmax_cmd->add_option("--k", k, "number of lists")->check(CLI::Range(2, 64));

    auto* corr_cmd = app.add_subcommand("bench-correlated", "pair search on correlated Gaussian lists");
    common(corr_cmd, false);
    corr_cmd->add_option("--corr", corr, "correlation(s), comma list in [-1, 1]");

    auto* matmul_cmd = app.add_subcommand("matmul", "max-product matrix multiplication, fast against naive");
    common(matmul_cmd, false);
    matmul_cmd->add_option("--semiring", semiring, "max-product | max-sum | min-sum");

    std::string target;
    int max_k = 4;
    auto* marginal_cmd = app.add_subcommand("marginal", "max-marginal of a model treated as one clique");
    marginal_cmd->add_option("--model", model_path, "UAI MARKOV file")->required();
    marginal_cmd->add_option("--target", target, "comma list of variable ids")->required();
    marginal_cmd->add_option("--semiring", semiring, "max-product | max-sum | min-sum");
    marginal_cmd->add_option("--k", max_k, "largest number of non-X groups to try")->check(CLI::Range(2, 8));
    marginal_cmd->add_option("--mode", mode, "analysis | symmetric | early-stop");

    std::string corpus = std::string(FMP_DATA_DIR) + "/moby_excerpt.txt";
    std::string text;
    std::string input_path;
    double eps = 0.01;
    std::string text_model = "chain";
    Index heldout = 0;
    auto* denoise_cmd = app.add_subcommand("denoise", "bigram text denoising");
    denoise_cmd->add_option("--corpus", corpus, "training text (at least 10000 characters)");
    denoise_cmd->add_option("--text", text, "text to correct");
    denoise_cmd->add_option("--input", input_path, "file holding the text to correct");
    denoise_cmd->add_option("--eps", eps, "corruption rate")->check(CLI::Range(0.0, 0.999999));
    denoise_cmd->add_option("--model", text_model, "chain | skip-2")->check(CLI::IsMember({"chain", "skip-2"}));
    denoise_cmd->add_option("--heldout", heldout,
                            "train on all but the last N corpus characters, corrupt those and report accuracy");
    denoise_cmd->add_option("--seed", seed, "corruption seed");
    denoise_cmd->add_option("--mode", mode, "analysis | symmetric | early-stop");

    std::string task = "random";
    int rows = 8, cols = 8, iters = 5;
    std::string schedule = "random";
    auto* grid_cmd = app.add_subcommand("grid", "loopy BP on a grid, fast against naive messages");
    grid_cmd->add_option("--task", task, "random | flow | stereo")->check(CLI::IsMember({"random", "flow", "stereo"}));
    grid_cmd->add_option("--rows", rows)->check(CLI::Range(2, 4096));
    grid_cmd->add_option("--cols", cols)->check(CLI::Range(2, 4096));
    grid_cmd->add_option("--n", sizes, "states per node (comma list)");
    grid_cmd->add_option("--iters", iters, "iteration budget")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--schedule", schedule, "random | forward-backward | synchronous")
        ->check(CLI::IsMember({"random", "forward-backward", "synchronous"}));
    grid_cmd->add_option("--reps", reps, "timing repetitions")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--seed", seed);
    grid_cmd->add_option("--mode", mode, "analysis | symmetric | early-stop");
    grid_cmd->add_option("--out", out, "CSV output path (default stdout)");

    int length = 10;
    bool per_message = false;
    auto* chain_cmd = app.add_subcommand("chain", "BP on random chains, fast against naive");
    chain_cmd->add_option("--n", sizes, "states per node");
    chain_cmd->add_option("--length", length, "chain length")->check(CLI::Range(2, 1000000));
    chain_cmd->add_option("--reps", reps, "timing repetitions")->check(CLI::PositiveNumber);
    chain_cmd->add_option("--trials", trials, "messages per size with --per-message")->check(CLI::PositiveNumber);
    chain_cmd->add_option("--seed", seed);
    chain_cmd->add_flag("--per-message", per_message, "cost of single messages instead of whole runs");
    chain_cmd->add_option("--out", out, "CSV output path (default stdout)");

    std::string fit_in;
    std::string xcol = "N", ycol = "steps", where;
    auto* fit_cmd = app.add_subcommand("fit", "log-log slope of a CSV column against N");
    fit_cmd->add_option("--in", fit_in, "CSV file")->required();
    fit_cmd->add_option("--x", xcol, "x column");
    fit_cmd->add_option("--y", ycol, "y column (averaged per x)");
    fit_cmd->add_option("--where", where, "keep rows with column=value");

    CLI11_PARSE(app, argc, argv);

    try {
        const fmp::Semiring s = fmp::Semiring::parse(semiring);

        if (*argmax_cmd || *corr_cmd) {
            fmp::BenchConfig cfg;
            cfg.sizes = parse_sizes(sizes);
            cfg.k = k;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.mode = fmp::parse_argmax_mode(mode);
            cfg.out = out;
            if (*argmax_cmd) {
                cfg.experiment = "bench-argmax";
                emit(fmp::bench_argmax(cfg), out);
            } else {
                cfg.experiment = "bench-correlated";
                std::vector<fmp::CorrelatedRow> all;
                for (double c : parse_doubles(corr)) {
                    cfg.correlation = c;
                    const auto part = fmp::bench_correlated(cfg);
                    all.insert(all.end(), part.begin(), part.end());
                }
                emit(all, out);
            }
        } else if (*matmul_cmd) {
            emit(fmp::bench_matmul(parse_sizes(sizes), trials, seed, s, fmp::parse_argmax_mode(mode)), out);
        } else if (*marginal_cmd) {
            const fmp::FactorGraph g = fmp::load_model(model_path, s);
            g.validate();
            fmp::Scope m;
            for (const auto& id : split(target, ',')) m.push_back(g.variable(std::stoi(id)));
            fmp::sort_scope(m);
            const auto factors = g.factors();
            const fmp::Scope clique = fmp::joint_scope(factors);
            const fmp::Factor brute = fmp::max_marginal_brute(factors, clique, m, s);
            std::cout << "brute force\n";
            print_factor(std::cout, brute);
            const auto grouping = fmp::best_grouping(factors, m, max_k);
            if (!grouping) {
                std::cout << "no grouping beats enumeration for this model\n";
                return 0;
            }
            std::cout << "grouping: X=" << grouping->groups[0].size() << " factors, K=" << grouping->k()
                      << ", cost exponent " << fmp::format_double(grouping->cost.exponent()) << " vs "
                      << fmp::format_double(fmp::brute_cost(factors, m).exponent()) << " for enumeration\n";
            fmp::GroupedOptions go;
            go.mode = fmp::parse_argmax_mode(mode == "analysis" ? "early-stop" : mode);
            fmp::ProbeStats stats;
            go.stats = &stats;
            go.min_fast_states = 0;
            const fmp::Factor fast = fmp::max_marginal_grouped(factors, m, *grouping, s, go);
            std::cout << "grouped\n";
            print_factor(std::cout, fast);
            std::cout << "searches " << stats.calls << ", probes " << stats.probes << '\n';
            std::cout << "match: " << (fast == brute ? "exact" : "differs") << '\n';
            return fast == brute ? 0 : 2;
        } else if (*denoise_cmd) {
            const fmp::TextModel tm = text_model == "chain" ? fmp::TextModel::chain : fmp::TextModel::skip2;
            const fmp::ArgmaxMode am = fmp::parse_argmax_mode(mode == "analysis" ? "early-stop" : mode);
            std::string full = fmp::load_corpus(corpus);
            if (heldout > 0) {
                if (heldout >= static_cast<Index>(full.size())) throw fmp::domain_error("held-out part exceeds the corpus");
                const std::string truth = full.substr(full.size() - heldout);
                const fmp::TextPrior prior = fmp::learn_prior(full.substr(0, full.size() - heldout));
                auto rng = fmp::trial_rng(seed, 0);
                const std::string noisy = fmp::corrupt(truth, {prior.alphabet, eps}, rng);
                const auto r = fmp::run_denoise(prior, noisy, eps, tm, am);
                std::cout << "corrupted accuracy " << fmp::format_double(fmp::char_accuracy(truth, noisy)) << '\n'
                          << "decoded accuracy   " << fmp::format_double(fmp::char_accuracy(truth, r.text)) << '\n'
                          << "searches " << r.stats.calls << ", probes " << r.stats.probes << '\n';
                return 0;
            }
            if (!input_path.empty()) text = read_file(input_path);
            if (text.empty()) throw fmp::domain_error("denoise: give --text, --input or --heldout");
            const fmp::TextPrior prior = fmp::learn_prior(full);
            const auto r = fmp::run_denoise(prior, text, eps, tm, am);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << r.text << '\n';
            std::cerr << "changed " << r.changed << " characters\n";
        } else if (*grid_cmd) {
            std::ofstream file;
            if (!out.empty()) {
                file.open(out);
                if (!file) throw fmp::domain_error("cannot write '" + out + "'");
            }
            std::ostream& os = out.empty() ? std::cout : file;
            os << "N,mode,seconds,sort_seconds,search_seconds,probes,combines,iterations,agrees\n";
            for (Index n : parse_sizes(sizes)) {
                fmp::GridConfig cfg;
                cfg.task = task == "random" ? fmp::GridTaskKind::random
                           : task == "flow" ? fmp::GridTaskKind::flow
                                            : fmp::GridTaskKind::stereo;
                cfg.rows = rows;
                cfg.cols = cols;
                cfg.states = static_cast<int>(n);
                cfg.seed = seed;
                cfg.schedule.budget = iters;
                cfg.schedule.seed = seed;
                cfg.schedule.kind = schedule == "random"             ? fmp::ScheduleKind::random_sequential
                                    : schedule == "forward-backward" ? fmp::ScheduleKind::forward_backward
                                                                     : fmp::ScheduleKind::synchronous;
                cfg.argmax = fmp::parse_argmax_mode(mode == "analysis" ? "early-stop" : mode);
                const fmp::FactorGraph g = fmp::grid_model(cfg);
                fmp::GridRun runs[2];
                const char* names[2] = {"naive", "fast"};
                for (int m = 0; m < 2; ++m) {
                    std::vector<double> times;
                    for (int r = 0; r < reps; ++r) {
                        runs[m] = fmp::run_grid(g, cfg.schedule, m ? fmp::MessageMode::fast : fmp::MessageMode::naive,
                                                cfg.argmax);
                        times.push_back(runs[m].seconds);
                    }
                    std::sort(times.begin(), times.end());
                    runs[m].seconds = times[times.size() / 2];
                }
                const bool agrees = runs[0].states == runs[1].states;
                for (int m = 0; m < 2; ++m) {
                    const auto& t = runs[m].trace;
                    os << n << ',' << names[m] << ',' << fmp::format_double(runs[m].seconds) << ','
                       << fmp::format_double(t.sort_seconds) << ',' << fmp::format_double(t.search_seconds) << ','
                       << t.probes.probes << ',' << t.naive_combines << ',' << t.iterations << ','
                       << (agrees ? 1 : 0) << '\n';
                }
            }
        } else if (*chain_cmd) {
            if (per_message) {
                auto rows_n = fmp::bench_message_cost(parse_sizes(sizes), trials, seed, fmp::MessageMode::naive);
                const auto rows_f = fmp::bench_message_cost(parse_sizes(sizes), trials, seed, fmp::MessageMode::fast);
                rows_n.insert(rows_n.end(), rows_f.begin(), rows_f.end());
                emit(rows_n, out);
            } else {
                emit(fmp::bench_chain(parse_sizes(sizes), length, reps, seed), out);
            }
        } else if (*fit_cmd) {
            std::istringstream in(read_file(fit_in));
            std::string line;
            std::getline(in, line);
            const auto header = split(line, ',');
            auto column = [&](const std::string& name) {
                const auto it = std::find(header.begin(), header.end(), name);
                if (it == header.end()) throw fmp::domain_error("no column '" + name + "'");
                return static_cast<std::size_t>(it - header.begin());
            };
            const std::size_t xi = column(xcol), yi = column(ycol);
            std::size_t wi = 0;
            std::string wval;
            if (!where.empty()) {
                const auto eq = where.find('=');
                if (eq == std::string::npos) throw fmp::domain_error("--where expects column=value");
                wi = column(where.substr(0, eq));
                wval = where.substr(eq + 1);
            }
            std::map<double, std::pair<double, Index>> acc;
            while (std::getline(in, line)) {
                std::vector<std::string> cells;
                std::stringstream ss(line);
                std::string c;
                while (std::getline(ss, c, ',')) cells.push_back(c);
                if (cells.size() < header.size()) continue;
                if (!where.empty() && cells[wi] != wval) continue;
                auto& a = acc[std::stod(cells[xi])];
                a.first += std::stod(cells[yi]);
                ++a.second;
            }
            std::vector<double> xs, ys;
            for (const auto& [x, a] : acc) {
                xs.push_back(x);
                ys.push_back(a.first / static_cast<double>(a.second));
            }
            const fmp::PowerFit fit = fmp::fit_exponent(xs, ys);
            std::cout << "slope " << fmp::format_double(fit.slope) << "\nintercept " << fmp::format_double(fit.intercept)
                      << "\nresidual " << fmp::format_double(fit.residual) << '\n';
        }
    } catch (const fmp::parse_error& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
