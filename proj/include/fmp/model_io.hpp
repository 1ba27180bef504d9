#pragma once
#include <string>
#include <string_view>

#include <fmp/graph.hpp>

namespace fmp {

/// Reads a UAI-style MARKOV model:
///
///     MARKOV
///     <variable count>
///     <cardinalities>
///     <factor count>
///     <arity> <variable ids...>      one line per factor
///     <entry count> <values...>      one table per factor, row-major over
///                                    the listed variable order
///
/// '#' starts a comment. Two comment forms carry information:
/// "# latent <factor>" marks a factor data-independent and
/// "# class <factor> <class>" puts it in a homogeneity class.
FactorGraph parse_model(std::string_view text, const Semiring& s = max_sum);

FactorGraph load_model(const std::string& path, const Semiring& s = max_sum);

/// Inverse of parse_model; scopes are written in ascending id order.
std::string serialize_model(const FactorGraph& g);

} // namespace fmp
