#include <fmp/clique.hpp>

#include <string>

#include <fmp/detail/odometer.hpp>

namespace fmp {

SortedFactorView::SortedFactorView(const Factor& f, const Scope& conditioning, const Semiring& s)
    : base_(f)
{
    conditioning_ = conditioning;
    sort_scope(conditioning_);
    if (!is_subset(conditioning_, f.scope())) {
        throw domain_error("sort_rows: conditioning variables are not in the factor scope");
    }
    conditioning_ = scope_intersection(conditioning_, f.scope());
    free_ = scope_difference(f.scope(), conditioning_);
    if (free_.empty()) throw domain_error("sort_rows: conditioning covers the whole scope, nothing to sort");

    rows_ = domain_size(conditioning_);
    cols_ = domain_size(free_);

    bool prefix = true;
    for (std::size_t p = 0; p < conditioning_.size(); ++p) prefix = prefix && f.scope()[p] == conditioning_[p];
    if (prefix) {
        buffer_ = f.shared_values();
    } else {
        Eigen::ArrayXd t(f.size());
        detail::Odometer odo(f.scope());
        const int sr = odo.track(conditioning_);
        const int sc = odo.track(free_);
        Index flat = 0;
        do {
            t[odo.index(sr) * cols_ + odo.index(sc)] = f[flat++];
        } while (odo.next());
        buffer_ = std::make_shared<const Eigen::ArrayXd>(std::move(t));
    }

    order_.resize(static_cast<std::size_t>(rows_ * cols_));
    inverse_.resize(order_.size());
    for (Index r = 0; r < rows_; ++r) {
        const auto off = static_cast<std::size_t>(r * cols_);
        const auto n = static_cast<std::size_t>(cols_);
        sort_indices(buffer_->data() + off, cols_, std::span<Rank>(order_).subspan(off, n),
                     std::span<Rank>(inverse_).subspan(off, n), s);
    }
}

SortedFactorView sort_rows(const Factor& f, const Scope& conditioning, const Semiring& s)
{
    return SortedFactorView(f, conditioning, s);
}

namespace {

struct CliqueRoles {
    Variable i, j, k;
};

CliqueRoles identify(const Factor& ij, const Factor& ik, const Factor& jk)
{
    if (ij.arity() != 2 || ik.arity() != 2 || jk.arity() != 2) {
        throw domain_error("max_marginal_3clique: all three factors must be pairwise");
    }
    const Scope shared = scope_intersection(ik.scope(), jk.scope());
    if (shared.size() != 1 || contains(ij.scope(), shared[0].id)) {
        throw domain_error("max_marginal_3clique: phi_ik and phi_jk must share exactly one variable outside phi_ij");
    }
    CliqueRoles r;
    r.k = shared[0];
    const Scope ik_rest = scope_difference(ik.scope(), shared);
    const Scope jk_rest = scope_difference(jk.scope(), shared);
    if (ik_rest[0].id == jk_rest[0].id) throw domain_error("max_marginal_3clique: i and j coincide");
    if (!contains(ij.scope(), ik_rest[0].id) || !contains(ij.scope(), jk_rest[0].id)) {
        throw domain_error("max_marginal_3clique: phi_ij must cover the non-shared variables");
    }
    r.i = ik_rest[0];
    r.j = jk_rest[0];
    if (ij.scope()[position_of(ij.scope(), r.i.id)] != r.i || ij.scope()[position_of(ij.scope(), r.j.id)] != r.j) {
        throw domain_error("max_marginal_3clique: cardinality mismatch between factors");
    }
    return r;
}

const SortedFactorView& view_or_build(const SortedFactorView* given, const Factor& f, const Variable& cond,
                                      const Semiring& s, SortedFactorView& storage, ProbeStats* stats)
{
    if (given) {
        if (given->conditioning() != Scope{cond} || given->base().scope() != f.scope()) {
            throw domain_error("max_marginal_3clique: presorted view does not match its factor");
        }
        return *given;
    }
    storage = SortedFactorView(f, Scope{cond}, s);
    if (stats) stats->sorts += storage.rows();
    return storage;
}

} // namespace

Factor max_marginal_3clique(const Factor& phi_ij, const Factor& phi_ik, const Factor& phi_jk, const Semiring& s,
                            const CliqueOptions& opts)
{
    const CliqueRoles r = identify(phi_ij, phi_ik, phi_jk);
    const Index ni = r.i.cardinality;
    const Index nj = r.j.cardinality;
    const Index nk = r.k.cardinality;

    // Output cells follow phi_ij's row-major layout.
    const bool i_first = phi_ij.scope()[0].id == r.i.id;
    const Index si = i_first ? nj : 1;
    const Index sj = i_first ? 1 : ni;

    Eigen::ArrayXd out(phi_ij.size());
    if (opts.argbest) opts.argbest->assign(static_cast<std::size_t>(phi_ij.size()), 0);

    if (nk < opts.min_fast_states) {
        const Index ik_si = phi_ik.scope()[0].id == r.i.id ? nk : 1;
        const Index ik_sk = phi_ik.scope()[0].id == r.i.id ? 1 : ni;
        const Index jk_sj = phi_jk.scope()[0].id == r.j.id ? nk : 1;
        const Index jk_sk = phi_jk.scope()[0].id == r.j.id ? 1 : nj;
        for (Index a = 0; a < ni; ++a) {
            for (Index b = 0; b < nj; ++b) {
                const Index cell = a * si + b * sj;
                double best = s.worst();
                int arg = 0;
                for (Index c = 0; c < nk; ++c) {
                    const double v = s.combine(s.combine(phi_ij[cell], phi_ik[a * ik_si + c * ik_sk]),
                                               phi_jk[b * jk_sj + c * jk_sk]);
                    if (c == 0 || s.better(v, best)) {
                        best = v;
                        arg = static_cast<int>(c);
                    }
                }
                out[cell] = best;
                if (opts.argbest) (*opts.argbest)[cell] = arg;
            }
        }
        return Factor(phi_ij.scope(), std::move(out));
    }

    SortedFactorView ik_storage, jk_storage;
    const SortedFactorView& vik = view_or_build(opts.ik_view, phi_ik, r.i, s, ik_storage, opts.stats);
    const SortedFactorView& vjk = view_or_build(opts.jk_view, phi_jk, r.j, s, jk_storage, opts.stats);

    for (Index a = 0; a < ni; ++a) {
        const auto va = vik.row_values(a);
        const PermRef pa = vik.row(a);
        for (Index b = 0; b < nj; ++b) {
            const auto vb = vjk.row_values(b);
            const auto o = fast_argmax_pair(va, vb, pa, vjk.row(b), opts.mode, s);
            if (opts.stats) opts.stats->add(o);
            const Index cell = a * si + b * sj;
            out[cell] = s.combine(s.combine(phi_ij[cell], va[o.best]), vb[o.best]);
            if (opts.argbest) (*opts.argbest)[cell] = static_cast<int>(o.best);
        }
    }
    return Factor(phi_ij.scope(), std::move(out));
}

} // namespace fmp
