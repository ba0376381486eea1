#pragma once

#include "atlr/cgm.hpp"
#include "atlr/refinement.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace atlr
{

// Subsets of the refined agent's alphabet (at most 64 actions).
using ActionMask = std::uint64_t;

[[nodiscard]] constexpr ActionMask full_actions( std::size_t n )
{
    return n >= 64 ? ~ActionMask{ 0 } : ( ActionMask{ 1 } << n ) - 1;
}

// Can(coalition, actions): the sub-agents in `coalition` can force the
// refined agent's action into `actions`. `group` selects the refined agent
// when several are refined at once.
struct OneStepAtom
{
    std::size_t group = 0;
    AgentMask coalition = 0;
    ActionMask actions = 0;

    friend auto operator<=>( const OneStepAtom&, const OneStepAtom& ) = default;
};

class OneStepConstraint
{
public:
    enum class Kind
    {
        True,
        False,
        Atom,
        Not,
        And,
        Or,
    };

    OneStepConstraint() = default;

    static OneStepConstraint top();
    static OneStepConstraint bottom();
    static OneStepConstraint can( OneStepAtom a );
    static OneStepConstraint negate( OneStepConstraint c );
    static OneStepConstraint all_of( std::vector< OneStepConstraint > cs );
    static OneStepConstraint any_of( std::vector< OneStepConstraint > cs );

    [[nodiscard]] Kind kind() const { return _kind; }
    [[nodiscard]] bool is_true() const { return _kind == Kind::True; }
    [[nodiscard]] bool is_false() const { return _kind == Kind::False; }
    [[nodiscard]] const OneStepAtom& atom() const { return _atom; }
    [[nodiscard]] const std::vector< OneStepConstraint >& children() const { return _children; }

    friend bool operator==( const OneStepConstraint&, const OneStepConstraint& ) = default;
    friend bool operator<( const OneStepConstraint& a, const OneStepConstraint& b );

private:
    Kind _kind = Kind::True;
    OneStepAtom _atom;
    std::vector< OneStepConstraint > _children;
};

[[nodiscard]] std::string to_string( const OneStepConstraint& c );

// Replaces atoms whose value is fixed by surjectivity of the step map:
// Can(C, {}) is false, Can(C, Act) is true, Can({}, a) iff a = Act, and
// Can(G, a) iff a is non-empty. `subagent_counts` and `alphabet_sizes` are
// indexed by group.
[[nodiscard]] OneStepConstraint fold_constants( const OneStepConstraint& c,
                                                const std::vector< std::size_t >& subagent_counts,
                                                const std::vector< std::size_t >& alphabet_sizes );

// The grand coalition can force every single action.
[[nodiscard]] OneStepConstraint grand_constraint( std::size_t alphabet_size, std::size_t subagent_count,
                                                  std::size_t group = 0 );

// The auxiliary one-step game: a reference state whose successors are
// labelled by the refined agent's actions. The label of every successor is
// unique by construction, so the game is just the step table.
struct OneStepGame
{
    std::size_t alphabet_size = 0;
    std::vector< std::size_t > sizes; // per sub-agent
    std::vector< ActionId > step;     // row-major, first sub-agent slowest

    [[nodiscard]] bool surjective() const;

    friend bool operator==( const OneStepGame&, const OneStepGame& ) = default;
};

[[nodiscard]] bool eval_atom( const OneStepGame& g, AgentMask coalition, ActionMask actions );

// Evaluates every atom against `g`, whatever its group.
[[nodiscard]] bool eval_constraint( const OneStepGame& g, const OneStepConstraint& c );

struct SatResult
{
    bool sat = false; // false means unsatisfiable up to the bound
    OneStepGame game;
    std::size_t nodes = 0;
};

// Bounded search for a surjective step table satisfying `c` with at most
// `bound` actions per sub-agent. Games are tried by total size, then size
// vector, then table in lexicographic order, so the reported witness is the
// least one. Throws ResourceExceeded past `max_nodes` search nodes.
[[nodiscard]] SatResult sat_onestep( const OneStepConstraint& c, std::size_t alphabet_size,
                                     std::size_t subagent_count, std::size_t bound,
                                     std::size_t max_nodes = 10'000'000 );

// Reads the step table as a homomorphism for `refined` -> `subagents`. Sub-agent
// action names are "<sub>.<k>", kept clear of `taken`.
[[nodiscard]] Homomorphism extract_hom( const OneStepGame& g, const std::string& refined,
                                        const std::vector< std::string >& subagents,
                                        const std::set< std::string >& taken = {} );

} // namespace atlr
