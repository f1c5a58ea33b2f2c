#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mmscs/frontend.hpp"

namespace mmscs {

/// `n` templated Solidity functions (transfers, mints, burns, withdrawals,
/// guards, loops, fallbacks) with matching docstrings, grouped into one
/// contract per entity noun and extracted through the frontend. Every unit's
/// graph is checked with validate(). Deterministic per seed; n >= 2.
std::vector<FunctionUnit> generate_synthetic_corpus(std::size_t n, std::uint64_t seed);

}  // namespace mmscs
