#pragma once

#include "atlr/cgm.hpp"
#include "atlr/formula.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace atlr
{

// Surjective map from the joint actions of the sub-agents onto the actions of
// the refined agent. `map` is row-major over `sub_alphabets` (first sub-agent
// slowest) and holds indices into the refined agent's alphabet.
struct Homomorphism
{
    std::string refined_agent;
    std::vector< std::string > subagents;
    std::vector< std::vector< std::string > > sub_alphabets;
    std::vector< ActionId > map;

    [[nodiscard]] std::vector< std::size_t > sizes() const;
    [[nodiscard]] std::size_t row_count() const;

    friend bool operator==( const Homomorphism&, const Homomorphism& ) = default;
};

struct RefinedModel
{
    Cgm base;
    Homomorphism hom;
    Cgm derived;
};

// Builds M' over (Ag \ {i}) u G, the sub-agents taking i's position in the
// agent order. Throws ModelError on alphabet mismatch or a non-surjective map.
[[nodiscard]] RefinedModel apply_hom( const Cgm& m, const Homomorphism& h );

// Applies a chain of homomorphisms left to right; returns every step.
[[nodiscard]] std::vector< RefinedModel > apply_chain( const Cgm& m, const std::vector< Homomorphism >& homs );

// Exhaustive check of the homomorphism conditions against `m`.
[[nodiscard]] std::vector< std::string > validate_hom( const Cgm& m, const RefinedModel& candidate );

// Visits every homomorphism refining `agent` into `subagents` with at most
// `bound` actions per sub-agent, one per class of per-sub-agent action
// renamings (the lexicographically least table). Order: total alphabet size,
// then size vector, then table. The visitor returns false to stop.
void for_each_hom( const Cgm& m, const std::string& agent, const std::vector< std::string >& subagents,
                   std::size_t bound, const std::function< bool( const Homomorphism& ) >& visit );

[[nodiscard]] std::vector< Homomorphism > enumerate_homs( const Cgm& m, const std::string& agent,
                                                          const std::vector< std::string >& subagents,
                                                          std::size_t bound );

struct RefineVerdict
{
    bool holds = false; // false means "false up to bound"
    std::vector< Homomorphism > witness;
    std::size_t candidates = 0;
};

// Direct semantics of a positive chain split i1 -> G1 . ... . body at state w,
// searching homomorphisms link by link with alphabets bounded by `bound`.
// Throws ResourceExceeded after `max_candidates` candidate homomorphisms.
[[nodiscard]] RefineVerdict brute_force_refine( const Cgm& m, StateId w, const std::vector< ChainLink >& chain,
                                                const Formula& body, std::size_t bound,
                                                std::size_t max_candidates = 10'000'000 );

} // namespace atlr
