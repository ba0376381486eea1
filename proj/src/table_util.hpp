#pragma once

// Helpers for map tables over a product of per-agent alphabets, shared by
// the homomorphism enumerator and the one-step game search. Tables are
// row-major: the first agent's action varies slowest.

#include "atlr/cgm.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace atlr::detail
{

[[nodiscard]] std::size_t product( const std::vector< std::size_t >& sizes );
[[nodiscard]] std::vector< std::size_t > strides_of( const std::vector< std::size_t >& sizes );

// Offsets of all partial tuples over the agents in `mask`, lexicographic in
// agent order; the remaining agents contribute 0.
[[nodiscard]] std::vector< std::size_t > partial_codes( const std::vector< std::size_t >& sizes, AgentMask mask );

// All size vectors in [1, bound]^count ordered by total size, then
// lexicographically.
[[nodiscard]] std::vector< std::vector< std::size_t > > size_vectors( std::size_t count, std::size_t bound );

// Lexicographically minimal under independent renaming of each agent's
// actions.
[[nodiscard]] bool is_canonical( const std::vector< ActionId >& table, const std::vector< std::size_t >& sizes );

// Cheap necessary condition for is_canonical: for every agent, the slices of
// consecutive actions are in non-decreasing lexicographic order.
[[nodiscard]] bool rows_sorted( const std::vector< ActionId >& table, const std::vector< std::size_t >& sizes );

// Action names "<agent>.<k>", made distinct from every name in `taken`.
[[nodiscard]] std::vector< std::vector< std::string > > fresh_alphabets( const std::vector< std::string >& agents,
                                                                         const std::vector< std::size_t >& sizes,
                                                                         const std::set< std::string >& taken );

} // namespace atlr::detail
