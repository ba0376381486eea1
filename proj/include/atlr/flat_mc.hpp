#pragma once

#include "atlr/cgm.hpp"
#include "atlr/formula.hpp"
#include "atlr/onestep.hpp"
#include "atlr/refinement.hpp"
#include "atlr/state_set.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace atlr
{

// Actions a of agent i such that every completion of `context` (with i
// playing a) leads from w into `target`. `context` must leave i open.
[[nodiscard]] ActionMask forcing_set( const Cgm& m, AgentId i, const ActionVector& context, StateId w,
                                      const StateSet& target );

// Joint version for several refined agents: entry t (row-major over the
// agents' alphabets, in the order given) is true when the tuple t together
// with `context` forces the next state into `target`.
[[nodiscard]] std::vector< bool > product_forcing_set( const Cgm& m, const std::vector< AgentId >& refined,
                                                       const ActionVector& context, StateId w,
                                                       const StateSet& target );

// Maximal boxes R_1 x ... x R_m contained in a row-major set over `sizes`.
[[nodiscard]] std::vector< std::vector< ActionMask > > maximal_rectangles( const std::vector< bool >& set,
                                                                           const std::vector< std::size_t >& sizes );

// Replaces every until by its n-fold unfolding over next.
[[nodiscard]] Formula eliminate_until( const Formula& body, std::size_t n );

// A base agent together with the sub-agents that end up replacing it after
// a whole chain; later links that refine a sub-agent are folded in.
struct RefinementGroup
{
    std::string refined;
    AgentId agent = 0;
    std::vector< std::string > leaves;
};

struct NormalizedChain
{
    std::vector< ChainLink > links; // as written
    std::vector< RefinementGroup > groups;
    Formula body;
};

// Throws ModelError when a link refines an unknown agent or introduces a
// name already in use.
[[nodiscard]] NormalizedChain normalize_chain( const Cgm& m, const std::vector< ChainLink >& links,
                                               const Formula& body );

// Translation of a body that is a boolean combination of next-modalities
// over split-independent arguments into a constraint at w. Modalities whose
// value does not depend on the refinement are folded to constants.
[[nodiscard]] OneStepConstraint translate_tr( const Cgm& m, const NormalizedChain& chain, StateId w );

// Candidate extensions for the subformulas of an until-free chain body.
struct Assignment
{
    std::vector< Formula > nodes; // interned, children before parents
    std::vector< StateSet > values;
    std::vector< StateSet > lower;
    std::vector< StateSet > upper;
    std::vector< StateSet > relevant;  // states where the value is constrained
    std::vector< std::size_t > argument; // for next-modalities, the argument's node
    std::vector< std::size_t > partial; // nodes whose value was guessed
};

// Visits all assignments bottom-up; partially split modalities range over
// every set between their bounds. Stops when the visitor returns false.
// Throws ResourceExceeded past `max_assignments`.
void for_each_assignment( const Cgm& m, const NormalizedChain& chain,
                          const std::function< bool( const Assignment& ) >& visit,
                          std::size_t max_assignments = 1'000'000 );

[[nodiscard]] std::vector< Assignment > enumerate_assignments( const Cgm& m, const NormalizedChain& chain,
                                                               std::size_t max_assignments = 1'000'000 );

// For every guessed modality and relevant state w': the refined model must
// agree with the guess at w'.
[[nodiscard]] OneStepConstraint assignment_constraints( const Cgm& m, const NormalizedChain& chain,
                                                        const Assignment& a );

// Disjunctive normal form as a list of conjunctions of literals.
struct Literal
{
    OneStepAtom atom;
    bool positive = true;

    friend auto operator<=>( const Literal&, const Literal& ) = default;
};
using Dnf = std::vector< std::vector< Literal > >;

[[nodiscard]] Dnf to_dnf( const OneStepConstraint& c, std::size_t max_terms );

struct FlatOptions
{
    std::optional< std::size_t > bound; // per sub-agent; default max(2, |Act_i|)
    std::size_t max_assignments = 1'000'000;
    std::size_t max_dnf = 100'000;
    std::size_t max_nodes = 10'000'000;
    bool oracle = false; // evaluate chains with brute_force_refine instead
};

struct ChainOutcome
{
    bool holds = false;
    bool bounded = false; // a negative answer only covers alphabets up to the bound
    std::vector< Homomorphism > witness; // one per link, when holds
    std::size_t assignments = 0;
    std::size_t sat_calls = 0;
};

// Existential semantics of split i1 -> G1 . ... split im -> Gm . body at w.
[[nodiscard]] ChainOutcome solve_chain( const Cgm& m, StateId w, const std::vector< ChainLink >& links,
                                        const Formula& body, const FlatOptions& opts = {} );

enum class Verdict
{
    True,
    False,
    TrueUpToBound,
    FalseUpToBound,
    ResourceExceeded,
};

[[nodiscard]] std::string to_string( Verdict v );
[[nodiscard]] bool truth_of( Verdict v );

struct ChainReport
{
    std::size_t chain = 0; // index into classify_flat(f).chains
    StateId state = 0;
    bool positive = true;
    ChainOutcome outcome;
};

struct FlatResult
{
    Verdict verdict = Verdict::False;
    std::vector< ChainReport > chains;
    std::string message;
};

// Evaluates a flat formula at w. Throws ContractError when f is not flat.
[[nodiscard]] FlatResult check_flat( const Cgm& m, StateId w, const Formula& f, const FlatOptions& opts = {} );

} // namespace atlr
