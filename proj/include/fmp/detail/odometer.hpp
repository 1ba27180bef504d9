#pragma once
#include <span>
#include <vector>

#include <fmp/factor.hpp>

namespace fmp::detail {

// Walks dom(scope) in row-major order and keeps the flat index of the
// current assignment within each tracked sub-scope up to date.
class Odometer {
public:
    explicit Odometer(Scope scope)
        : scope_(std::move(scope)), states_(scope_.size(), 0) {}

    int track(const Scope& sub)
    {
        std::vector<Index> strides(scope_.size(), 0);
        Index stride = 1;
        for (auto it = sub.rbegin(); it != sub.rend(); ++it) {
            const int p = position_of(scope_, it->id);
            if (p < 0 || scope_[p].cardinality != it->cardinality) {
                throw domain_error("odometer: variable " + std::to_string(it->id) +
                                   " is not part of the enumerated scope");
            }
            strides[p] = stride;
            stride *= it->cardinality;
        }
        strides_.push_back(std::move(strides));
        index_.push_back(0);
        return static_cast<int>(index_.size()) - 1;
    }

    Index index(int slot) const { return index_[slot]; }
    std::span<const int> states() const { return states_; }
    const Scope& scope() const { return scope_; }

    // Advances to the next assignment; returns false after the last one
    // (all states wrap back to zero).
    bool next()
    {
        for (int p = static_cast<int>(scope_.size()) - 1; p >= 0; --p) {
            const int card = scope_[p].cardinality;
            if (++states_[p] < card) {
                for (std::size_t s = 0; s < index_.size(); ++s) index_[s] += strides_[s][p];
                return true;
            }
            states_[p] = 0;
            for (std::size_t s = 0; s < index_.size(); ++s) {
                index_[s] -= static_cast<Index>(card - 1) * strides_[s][p];
            }
        }
        return false;
    }

private:
    Scope scope_;
    std::vector<int> states_;
    std::vector<std::vector<Index>> strides_;
    std::vector<Index> index_;
};

} // namespace fmp::detail
