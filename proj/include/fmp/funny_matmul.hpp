#pragma once
#include <vector>

#include <Eigen/Core>

#include <fmp/argmax.hpp>
#include <fmp/clique.hpp>
#include <fmp/permutation.hpp>

namespace fmp {

template <class Scalar>
using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// C(i,j) = best_k combine(A(i,k), B(k,j)), by triple loop.
template <class DA, class DB>
Table<typename DA::Scalar> funny_matmul_naive(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                                              const Semiring& s)
{
    using T = typename DA::Scalar;
    if (a.cols() != b.rows()) throw domain_error("funny_matmul: inner dimensions differ");
    if (a.cols() < 1) throw domain_error("funny_matmul: empty inner dimension");
    Table<T> c(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < b.cols(); ++j) {
            T best = s.combine(a(i, 0), static_cast<T>(b(0, j)));
            for (Index k = 1; k < a.cols(); ++k) {
                const T v = s.combine(a(i, k), static_cast<T>(b(k, j)));
                if (s.better(v, best)) best = v;
            }
            c(i, j) = best;
        }
    }
    return c;
}

/// Max-product (or max-sum / min-sum) matrix product.
///
/// Rows of A and columns of B are sorted once, then each output cell is a
/// pair search over the shared index: expected O(N^2 log N + N^2 sqrt N)
/// for N x N inputs instead of N^3.
template <class DA, class DB>
Table<typename DA::Scalar> funny_matmul(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                                        const Semiring& s, ArgmaxMode mode = ArgmaxMode::early_stop,
                                        ProbeStats* stats = nullptr)
{
    using T = typename DA::Scalar;
    if (a.cols() != b.rows()) throw domain_error("funny_matmul: inner dimensions differ");
    const Index n = a.cols();
    if (n < 1) throw domain_error("funny_matmul: empty inner dimension");

    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ar = a;
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor> bc = b.template cast<T>();

    std::vector<SortedPermutation> rows;
    rows.reserve(ar.rows());
    for (Index i = 0; i < ar.rows(); ++i) rows.push_back(sort_desc(ar.row(i).data(), n, s));
    std::vector<SortedPermutation> cols;
    cols.reserve(bc.cols());
    for (Index j = 0; j < bc.cols(); ++j) cols.push_back(sort_desc(bc.col(j).data(), n, s));
    if (stats) stats->sorts += ar.rows() + bc.cols();

    Table<T> c(ar.rows(), bc.cols());
    for (Index i = 0; i < ar.rows(); ++i) {
        const T* va = ar.row(i).data();
        for (Index j = 0; j < bc.cols(); ++j) {
            const auto out = fast_argmax_pair(va, bc.col(j).data(), rows[i].ref(), cols[j].ref(), mode, s);
            if (stats) stats->add(out);
            c(i, j) = out.value;
        }
    }
    return c;
}

} // namespace fmp
