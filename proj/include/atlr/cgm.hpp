#pragma once

#include "atlr/state_set.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace atlr
{

// Agents, actions and states are interned to dense indices. Names are kept
// alongside for I/O and for resolving formulas.
using AgentId = std::size_t;
using ActionId = std::size_t;
using AgentMask = std::uint64_t;

inline constexpr ActionId unassigned = std::numeric_limits< ActionId >::max();
inline constexpr StateId no_state = std::numeric_limits< StateId >::max();
inline constexpr std::size_t max_agents = 64;

[[nodiscard]] constexpr AgentMask agent_bit( AgentId a ) { return AgentMask{ 1 } << a; }

[[nodiscard]] constexpr AgentMask all_agents( std::size_t n )
{
    return n >= 64 ? ~AgentMask{ 0 } : ( AgentMask{ 1 } << n ) - 1;
}

// One slot per agent of a model; unassigned slots are open. A vector whose
// domain is the whole agent set is a joint action.
class ActionVector
{
    std::vector< ActionId > _slots;

public:
    ActionVector() = default;
    explicit ActionVector( std::size_t agent_count ) : _slots( agent_count, unassigned ) {}
    explicit ActionVector( std::vector< ActionId > slots ) : _slots{ std::move( slots ) } {}

    [[nodiscard]] std::size_t size() const { return _slots.size(); }
    [[nodiscard]] bool assigned( AgentId a ) const { return _slots[ a ] != unassigned; }
    [[nodiscard]] ActionId operator[]( AgentId a ) const { return _slots[ a ]; }
    void set( AgentId a, ActionId act ) { _slots[ a ] = act; }
    void clear( AgentId a ) { _slots[ a ] = unassigned; }

    [[nodiscard]] AgentMask domain() const;
    [[nodiscard]] bool complete() const { return domain() == all_agents( _slots.size() ); }
    [[nodiscard]] std::span< const ActionId > slots() const { return _slots; }

    friend bool operator==( const ActionVector&, const ActionVector& ) = default;
};

// a_Γ · b_Δ; empty when the domains overlap.
[[nodiscard]] std::optional< ActionVector > merge( const ActionVector& a, const ActionVector& b );

// Finite concurrent game model. The transition function is a dense table
// indexed by (state, joint-action code); codes are row-major over the agent
// order, so the last agent varies fastest.
class Cgm
{
    std::vector< std::string > _agents;
    std::vector< std::vector< std::string > > _alphabets;
    std::vector< std::string > _states;
    std::vector< std::string > _propositions;
    std::vector< StateSet > _labels; // per proposition
    std::vector< std::size_t > _strides;
    std::size_t _vector_count = 1;
    std::vector< StateId > _transitions;

public:
    Cgm() = default;
    Cgm( std::vector< std::string > agents, std::vector< std::vector< std::string > > alphabets,
         std::vector< std::string > states );

    [[nodiscard]] std::size_t agent_count() const { return _agents.size(); }
    [[nodiscard]] std::size_t state_count() const { return _states.size(); }
    [[nodiscard]] std::size_t vector_count() const { return _vector_count; }

    [[nodiscard]] const std::vector< std::string >& agents() const { return _agents; }
    [[nodiscard]] const std::vector< std::string >& states() const { return _states; }
    [[nodiscard]] const std::vector< std::string >& propositions() const { return _propositions; }
    [[nodiscard]] const std::vector< std::string >& alphabet( AgentId a ) const { return _alphabets[ a ]; }
    [[nodiscard]] const std::vector< std::vector< std::string > >& alphabets() const { return _alphabets; }
    [[nodiscard]] std::size_t alphabet_size( AgentId a ) const { return _alphabets[ a ].size(); }
    [[nodiscard]] std::size_t stride( AgentId a ) const { return _strides[ a ]; }
    [[nodiscard]] AgentMask all() const { return all_agents( _agents.size() ); }

    [[nodiscard]] std::optional< AgentId > agent_index( std::string_view name ) const;
    [[nodiscard]] std::optional< StateId > state_index( std::string_view name ) const;
    [[nodiscard]] std::optional< ActionId > action_index( AgentId agent, std::string_view name ) const;

    // Throws ModelError naming the first unknown agent.
    [[nodiscard]] AgentMask mask_of( std::span< const std::string > names ) const;

    void add_label( StateId s, const std::string& proposition );
    [[nodiscard]] StateSet label_set( std::string_view proposition ) const;
    [[nodiscard]] const std::vector< StateSet >& labels() const { return _labels; }

    void set_transition( StateId from, std::size_t code, StateId to );
    void set_transition( StateId from, const ActionVector& joint, StateId to );
    [[nodiscard]] StateId target( StateId from, std::size_t code ) const
    {
        return _transitions[ from * _vector_count + code ];
    }
    [[nodiscard]] StateId target( StateId from, const ActionVector& joint ) const;

    [[nodiscard]] std::size_t encode( const ActionVector& joint ) const;
    [[nodiscard]] ActionVector decode( std::size_t code ) const;

    // Codes of all partial vectors over the agents in `mask`, in
    // lexicographic order of the agent-ordered action tuples. Agents outside
    // the mask contribute 0, so a full code is a sum of disjoint parts.
    [[nodiscard]] std::vector< std::size_t > partial_codes( AgentMask mask ) const;

    friend bool operator==( const Cgm&, const Cgm& ) = default;
};

// Empty when the model is well formed; otherwise one line per defect.
[[nodiscard]] std::vector< std::string > validate_cgm( const Cgm& m );

[[nodiscard]] StateSet successors( const Cgm& m, StateId w, const ActionVector& partial );

// States where the coalition can force the next state into `target`.
[[nodiscard]] StateSet pre( const Cgm& m, AgentMask coalition, const StateSet& target );

// States where every choice of the coalition admits a successor in `target`.
[[nodiscard]] StateSet dual_pre( const Cgm& m, AgentMask coalition, const StateSet& target );

} // namespace atlr
