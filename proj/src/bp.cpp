#include <fmp/bp.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include <fmp/detail/odometer.hpp>

namespace fmp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Row `q` of a pairwise table read along the other variable.
struct StridedRow {
    const double* base;
    Index stride;
    double operator[](Index j) const { return base[j * stride]; }
};

StridedRow row_toward(const Factor& f, int target_pos, Index q)
{
    const Index n1 = f.scope()[1].cardinality;
    if (target_pos == 0) return {f.values().data() + q * n1, 1};
    return {f.values().data() + q, n1};
}

void normalize(Eigen::ArrayXd& v, const Semiring& s)
{
    const double best = v[best_index(v, s)];
    if (!std::isfinite(best)) return;
    if (s.kind == SemiringKind::max_product) {
        if (best > 0.0) v /= best;
    } else {
        v -= best;
    }
}

double change(double a, double b, const Semiring& s)
{
    if (a == b) return 0.0;
    if (s.kind == SemiringKind::max_product) {
        if (a <= 0.0 || b <= 0.0) return std::numeric_limits<double>::infinity();
        return std::abs(std::log(a) - std::log(b));
    }
    return std::abs(a - b);
}

// best_j combine(mu[j], f(j, q)) for every state q of the target.
Eigen::ArrayXd pairwise_message(const Factor& f, int target_pos, const Eigen::ArrayXd& mu,
                                const SortedPermutation* mu_order, const SortedFactorView* view, MessageMode mode,
                                ArgmaxMode argmax, const Semiring& s, ProbeStats* stats, Index* naive_combines)
{
    const Index nt = f.scope()[target_pos].cardinality;
    const Index nu = f.scope()[1 - target_pos].cardinality;
    Eigen::ArrayXd out(nt);
    if (mode == MessageMode::naive) {
        for (Index q = 0; q < nt; ++q) {
            const StridedRow row = row_toward(f, target_pos, q);
            double best = s.combine(mu[0], row[0]);
            for (Index j = 1; j < nu; ++j) {
                const double v = s.combine(mu[j], row[j]);
                if (s.better(v, best)) best = v;
            }
            out[q] = best;
        }
        if (naive_combines) *naive_combines += nt * nu;
        return out;
    }
    for (Index q = 0; q < nt; ++q) {
        const auto o = fast_argmax_pair(mu, row_toward(f, target_pos, q), mu_order->ref(), view->row(q), argmax, s);
        if (stats) stats->add(o);
        out[q] = o.value;
    }
    return out;
}

// Enumerates the factor's scope; mus[p] is the incoming vector of scope
// position p (ignored at the target).
Eigen::ArrayXd general_message(const Factor& f, int target_pos, const std::vector<const Eigen::ArrayXd*>& mus,
                               const Semiring& s, Index* naive_combines)
{
    const Variable t = f.scope()[target_pos];
    if (f.arity() == 1) return f.values();
    Eigen::ArrayXd out = Eigen::ArrayXd::Constant(t.cardinality, s.worst());
    detail::Odometer odo(f.scope());
    Index flat = 0;
    do {
        const auto st = odo.states();
        double acc = 0.0;
        bool first = true;
        for (int p = 0; p < f.arity(); ++p) {
            if (p == target_pos) continue;
            const double m = (*mus[p])[st[p]];
            acc = first ? m : s.combine(acc, m);
            first = false;
        }
        const double v = s.combine(acc, f[flat++]);
        double& cell = out[st[target_pos]];
        if (s.better(v, cell)) cell = v;
    } while (odo.next());
    if (naive_combines) *naive_combines += f.size() * (f.arity() - 1);
    return out;
}

} // namespace

Index best_index(const Eigen::ArrayXd& v, const Semiring& s)
{
    if (v.size() == 0) throw domain_error("best_index: empty vector");
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i) {
        if (s.better(v[i], v[best])) best = i;
    }
    return best;
}

PresortedPrior::PresortedPrior(const Factor& f, std::span<const int> positions, const Semiring& s)
    : factor_(f), views_(f.arity())
{
    if (f.arity() != 2) throw domain_error("presorted priors are pairwise tables");
    for (int p : positions) ensure(p, s);
}

bool PresortedPrior::has(int position) const
{
    return position >= 0 && position < static_cast<int>(views_.size()) && views_[position].has_value();
}

const SortedFactorView& PresortedPrior::view(int position) const
{
    if (!has(position)) throw protocol_error("presorted prior has no view for position " + std::to_string(position));
    return *views_[position];
}

void PresortedPrior::ensure(int position, const Semiring& s)
{
    if (position < 0 || position >= static_cast<int>(views_.size())) {
        throw domain_error("presorted prior: position out of range");
    }
    if (views_[position]) return;
    views_[position].emplace(factor_, Scope{factor_.scope()[position]}, s);
    ++table_sorts_;
}

PresortedPrior presort_shared_prior(const Factor& f, const Semiring& s, std::span<const int> positions)
{
    static constexpr int both[] = {0, 1};
    return PresortedPrior(f, positions.empty() ? std::span<const int>(both) : positions, s);
}

Factor local_term(const FactorGraph& g, int var)
{
    const Variable v = g.variable(var);
    const Semiring& s = g.semiring();
    std::optional<Eigen::ArrayXd> acc;
    for (int f : g.factors_of(var)) {
        const Factor& u = g.factor(f);
        if (u.arity() != 1) continue;
        if (!acc) {
            acc = u.values();
        } else {
            for (Index i = 0; i < v.cardinality; ++i) (*acc)[i] = s.combine((*acc)[i], u[i]);
        }
    }
    if (!acc) acc = Eigen::ArrayXd::Constant(v.cardinality, s.identity());
    return Factor(Scope{v}, std::move(*acc));
}

namespace {

// mu_u: local term of u folded with messages into u from every non-unary
// factor except `exclude`, ascending factor order.
template <class Lookup>
Eigen::ArrayXd incoming_product(const FactorGraph& g, int u, int exclude, const Factor& local, Lookup&& lookup)
{
    const Semiring& s = g.semiring();
    Eigen::ArrayXd mu = local.values();
    for (int h : g.factors_of(u)) {
        if (h == exclude || g.factor(h).arity() < 2) continue;
        const Factor* m = lookup(h, u);
        if (!m) {
            throw protocol_error("missing message from factor " + std::to_string(h) + " to variable " +
                                 std::to_string(u));
        }
        for (Index i = 0; i < mu.size(); ++i) mu[i] = s.combine(mu[i], (*m)[i]);
    }
    return mu;
}

} // namespace

Message compute_message(const FactorGraph& g, int factor, int target, std::span<const Message> incoming,
                        const PresortedPrior* prior, const MessageOptions& opts)
{
    const Factor& f = g.factor(factor);
    const int tp = position_of(f.scope(), target);
    if (tp < 0) throw domain_error("compute_message: target variable is not in the factor scope");
    const Semiring& s = g.semiring();

    auto lookup = [&](int h, int u) -> const Factor* {
        for (const auto& m : incoming) {
            if (m.factor == h && m.variable == u) return &m.table;
        }
        return nullptr;
    };

    Eigen::ArrayXd out;
    if (f.arity() == 2) {
        const int up = 1 - tp;
        const int u = f.scope()[up].id;
        const Eigen::ArrayXd mu = incoming_product(g, u, factor, local_term(g, u), lookup);
        if (opts.mode == MessageMode::fast) {
            if (!prior) throw protocol_error("compute_message: fast mode needs a presorted prior");
            if (!prior->has(tp)) throw protocol_error("compute_message: prior not sorted toward the target");
            const auto& pv = prior->view(tp);
            if (pv.rows() != f.scope()[tp].cardinality || pv.cols() != f.scope()[up].cardinality) {
                throw domain_error("compute_message: prior shape does not match the factor");
            }
            const SortedPermutation order = sort_desc(mu, s);
            if (opts.stats) ++opts.stats->sorts;
            out = pairwise_message(f, tp, mu, &order, &pv, opts.mode, opts.argmax, s, opts.stats, nullptr);
        } else {
            out = pairwise_message(f, tp, mu, nullptr, nullptr, opts.mode, opts.argmax, s, nullptr,
                                   opts.naive_combines);
        }
    } else {
        std::vector<Eigen::ArrayXd> mus(f.arity());
        std::vector<const Eigen::ArrayXd*> ptrs(f.arity(), nullptr);
        for (int p = 0; p < f.arity(); ++p) {
            if (p == tp) continue;
            const int u = f.scope()[p].id;
            mus[p] = incoming_product(g, u, factor, local_term(g, u), lookup);
            ptrs[p] = &mus[p];
        }
        out = general_message(f, tp, ptrs, s, opts.naive_combines);
    }

    if (opts.include_target_unary) {
        const Factor lt = local_term(g, target);
        for (Index q = 0; q < out.size(); ++q) out[q] = s.combine(lt[q], out[q]);
    }
    if (opts.normalize) normalize(out, s);
    return Message{factor, target, Factor(Scope{f.scope()[tp]}, std::move(out)), 0};
}

BpResult run_bp(const FactorGraph& g, const Schedule& schedule, const BpOptions& opts)
{
    if (schedule.budget < 1) throw domain_error("run_bp: iteration budget must be at least 1");
    const Semiring& s = g.semiring();

    std::vector<Factor> locals;
    for (int v = 0; v < g.num_variables(); ++v) locals.push_back(local_term(g, v));

    struct Slot {
        int factor;
        int variable;
        int position;
    };
    std::vector<Slot> slots;
    std::vector<std::vector<int>> slot_of(g.num_factors());
    for (int f = 0; f < g.num_factors(); ++f) {
        const Factor& fac = g.factor(f);
        if (fac.arity() < 2) continue;
        for (int p = 0; p < fac.arity(); ++p) {
            slot_of[f].push_back(static_cast<int>(slots.size()));
            slots.push_back({f, fac.scope()[p].id, p});
        }
    }

    BpResult result;
    BpTrace& trace = result.trace;
    std::vector<Eigen::ArrayXd> msgs;
    for (const auto& sl : slots) {
        msgs.push_back(Eigen::ArrayXd::Constant(g.variable(sl.variable).cardinality, s.identity()));
    }

    // Sorted tables: one per homogeneity class, otherwise one per factor,
    // built the first time a factor sends a message.
    std::vector<std::shared_ptr<PresortedPrior>> priors(g.num_factors());
    std::vector<std::shared_ptr<PresortedPrior>> class_priors(g.num_classes());
    auto prior_for = [&](int f) -> PresortedPrior& {
        if (!priors[f]) {
            const int c = g.homogeneity_class(f);
            if (c >= 0 && class_priors[c]) {
                priors[f] = class_priors[c];
            } else {
                const auto t0 = Clock::now();
                priors[f] = std::make_shared<PresortedPrior>(presort_shared_prior(g.factor(f), s));
                trace.table_sorts += priors[f]->table_sorts();
                trace.sort_seconds += seconds_since(t0);
                if (c >= 0) class_priors[c] = priors[f];
            }
        }
        return *priors[f];
    };
    std::vector<std::optional<SortedPermutation>> mu_orders(slots.size());

    auto compute = [&](int si, const std::vector<Eigen::ArrayXd>& src) {
        const Slot& sl = slots[si];
        const Factor& f = g.factor(sl.factor);
        auto lookup = [&](int h, int u) -> const Eigen::ArrayXd* {
            const int p = position_of(g.factor(h).scope(), u);
            return &src[slot_of[h][p]];
        };
        auto mu_of = [&](int u) {
            Eigen::ArrayXd mu = locals[u].values();
            for (int h : g.factors_of(u)) {
                if (h == sl.factor || g.factor(h).arity() < 2) continue;
                const Eigen::ArrayXd& m = *lookup(h, u);
                for (Index i = 0; i < mu.size(); ++i) mu[i] = s.combine(mu[i], m[i]);
            }
            return mu;
        };
        ++trace.message_calls;
        if (f.arity() == 2) {
            const int up = 1 - sl.position;
            const Eigen::ArrayXd mu = mu_of(f.scope()[up].id);
            if (opts.mode == MessageMode::fast) {
                PresortedPrior& pr = prior_for(sl.factor);
                const auto t0 = Clock::now();
                auto& ord = mu_orders[si];
                if (!ord) {
                    ord = sort_desc(mu, s);
                    ++trace.vector_sorts;
                } else {
                    trace.resort_moves += ord->resort(mu, s);
                    ++trace.vector_resorts;
                }
                const auto t1 = Clock::now();
                trace.sort_seconds += std::chrono::duration<double>(t1 - t0).count();
                Eigen::ArrayXd out = pairwise_message(f, sl.position, mu, &*ord, &pr.view(sl.position), opts.mode,
                                                      opts.argmax, s, &trace.probes, nullptr);
                trace.search_seconds += seconds_since(t1);
                return out;
            }
            const auto t1 = Clock::now();
            Eigen::ArrayXd out = pairwise_message(f, sl.position, mu, nullptr, nullptr, opts.mode, opts.argmax, s,
                                                  nullptr, &trace.naive_combines);
            trace.search_seconds += seconds_since(t1);
            return out;
        }
        std::vector<Eigen::ArrayXd> mus(f.arity());
        std::vector<const Eigen::ArrayXd*> ptrs(f.arity(), nullptr);
        for (int p = 0; p < f.arity(); ++p) {
            if (p == sl.position) continue;
            mus[p] = mu_of(f.scope()[p].id);
            ptrs[p] = &mus[p];
        }
        const auto t1 = Clock::now();
        Eigen::ArrayXd out = general_message(f, sl.position, ptrs, s, &trace.naive_combines);
        trace.search_seconds += seconds_since(t1);
        return out;
    };

    // Update order within one iteration.
    std::vector<int> order;
    if (schedule.kind == ScheduleKind::forward_backward) {
        for (int f = 0; f < g.num_factors(); ++f) {
            for (std::size_t k = 1; k < slot_of[f].size(); ++k) order.push_back(slot_of[f][k]);
        }
        for (int f = g.num_factors() - 1; f >= 0; --f) {
            if (!slot_of[f].empty()) order.push_back(slot_of[f][0]);
        }
    } else {
        order.resize(slots.size());
        std::iota(order.begin(), order.end(), 0);
    }
    std::mt19937_64 rng(schedule.seed);

    for (int it = 1; it <= schedule.budget && !slots.empty(); ++it) {
        if (schedule.kind == ScheduleKind::random_sequential) std::shuffle(order.begin(), order.end(), rng);
        double residual = 0.0;
        const std::vector<Eigen::ArrayXd> snapshot =
            schedule.kind == ScheduleKind::synchronous ? msgs : std::vector<Eigen::ArrayXd>{};
        std::vector<Eigen::ArrayXd> next = schedule.kind == ScheduleKind::synchronous ? msgs
                                                                                      : std::vector<Eigen::ArrayXd>{};
        for (int si : order) {
            Eigen::ArrayXd raw = compute(si, schedule.kind == ScheduleKind::synchronous ? snapshot : msgs);
            if (opts.record_raw) {
                const Slot& sl = slots[si];
                trace.raw.push_back(
                    Message{sl.factor, sl.variable, Factor(Scope{g.variable(sl.variable)}, raw), it});
            }
            normalize(raw, s);
            Eigen::ArrayXd& dst = schedule.kind == ScheduleKind::synchronous ? next[si] : msgs[si];
            for (Index i = 0; i < raw.size(); ++i) residual = std::max(residual, change(raw[i], dst[i], s));
            dst = std::move(raw);
        }
        if (schedule.kind == ScheduleKind::synchronous) msgs = std::move(next);
        trace.residuals.push_back(residual);
        trace.iterations = it;
        if (residual < schedule.tolerance) {
            trace.converged = true;
            break;
        }
    }

    for (int v = 0; v < g.num_variables(); ++v) {
        Eigen::ArrayXd b = locals[v].values();
        for (int h : g.factors_of(v)) {
            if (g.factor(h).arity() < 2) continue;
            const Eigen::ArrayXd& m = msgs[slot_of[h][position_of(g.factor(h).scope(), v)]];
            for (Index i = 0; i < b.size(); ++i) b[i] = s.combine(b[i], m[i]);
        }
        result.beliefs.emplace_back(Scope{g.variable(v)}, std::move(b));
    }
    for (std::size_t si = 0; si < slots.size(); ++si) {
        result.messages.push_back(Message{slots[si].factor, slots[si].variable,
                                          Factor(Scope{g.variable(slots[si].variable)}, msgs[si]),
                                          trace.iterations});
    }
    return result;
}

Assignment decode_map(const FactorGraph& g, const BpResult& result)
{
    if (result.beliefs.empty()) throw domain_error("decode_map: no beliefs");
    if (static_cast<int>(result.beliefs.size()) != g.num_variables()) {
        throw domain_error("decode_map: one belief per variable required");
    }
    const Semiring& s = g.semiring();
    const int n = g.num_variables();

    Assignment out;
    out.scope = g.variables();
    out.states.assign(n, 0);

    // Forest check over the pairwise factors.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    bool forest = true;
    for (int f = 0; f < g.num_factors() && forest; ++f) {
        const Factor& fac = g.factor(f);
        if (fac.arity() == 1) continue;
        if (fac.arity() > 2) {
            forest = false;
            break;
        }
        const int a = find(fac.scope()[0].id), b = find(fac.scope()[1].id);
        if (a == b) forest = false;
        parent[a] = b;
    }

    if (!forest) {
        for (int v = 0; v < n; ++v) out.states[v] = static_cast<int>(best_index(result.beliefs[v].values(), s));
        return out;
    }

    std::map<std::pair<int, int>, const Factor*> msg;
    for (const auto& m : result.messages) msg[{m.factor, m.variable}] = &m.table;

    std::vector<bool> done(n, false);
    for (int root = 0; root < n; ++root) {
        if (done[root]) continue;
        out.states[root] = static_cast<int>(best_index(result.beliefs[root].values(), s));
        done[root] = true;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            for (int f : g.factors_of(p)) {
                const Factor& fac = g.factor(f);
                if (fac.arity() != 2) continue;
                const int cp = fac.scope()[0].id == p ? 1 : 0;
                const int c = fac.scope()[cp].id;
                if (done[c]) continue;
                Eigen::ArrayXd score = local_term(g, c).values();
                for (int h : g.factors_of(c)) {
                    if (h == f || g.factor(h).arity() < 2) continue;
                    const auto it = msg.find({h, c});
                    if (it == msg.end()) throw protocol_error("decode_map: result lacks a message");
                    for (Index i = 0; i < score.size(); ++i) score[i] = s.combine(score[i], (*it->second)[i]);
                }
                for (Index x = 0; x < score.size(); ++x) {
                    std::array<int, 2> st{};
                    st[1 - cp] = out.states[p];
                    st[cp] = static_cast<int>(x);
                    score[x] = s.combine(score[x], fac.at(st));
                }
                out.states[c] = static_cast<int>(best_index(score, s));
                done[c] = true;
                stack.push_back(c);
            }
        }
    }
    return out;
}

} // namespace fmp
