#pragma once

#include "atlr/cgm.hpp"
#include "atlr/formula.hpp"
#include "atlr/state_set.hpp"

#include <cstddef>
#include <functional>
#include <optional>

namespace atlr
{

// Supplies the extension of a Split subformula. check_atl itself only handles
// Split-free formulas; the flat model checker plugs chain evaluation in here.
using SplitHook = std::function< StateSet( const Formula& split_node ) >;

struct CheckStats
{
    std::size_t max_fixpoint_iterations = 0;
};

// Fixed-point evaluation of the satisfaction relation. Coalition names are
// resolved against the model's agents (ModelError when unknown). A Split
// without a hook is a ContractError.
[[nodiscard]] StateSet check_atl( const Cgm& m, const Formula& f, const SplitHook& hook = {},
                                  CheckStats* stats = nullptr );

struct BruteForceOptions
{
    std::optional< std::size_t > horizon;           // default |W| * |Act_Ag| + 1
    std::size_t max_strategies = 1'000'000;         // per coalition
};

// Independent oracle: enumerates every memoryless strategy vector of the
// coalition and explores the induced runs with cycle detection.
[[nodiscard]] StateSet brute_force_atl( const Cgm& m, const Formula& f, const BruteForceOptions& opts = {} );

} // namespace atlr
