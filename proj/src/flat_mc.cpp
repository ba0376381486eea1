#include "atlr/flat_mc.hpp"
#include "atlr/atl_checker.hpp"
#include "atlr/errors.hpp"
#include "table_util.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

namespace atlr
{

ActionMask forcing_set( const Cgm& m, AgentId i, const ActionVector& context, StateId w, const StateSet& target )
{
    if ( i >= m.agent_count() || context.size() != m.agent_count() || context.assigned( i ) )
        throw ContractError( "forcing_set: context must be a partial vector over the other agents" );
    auto bits = product_forcing_set( m, { i }, context, w, target );
    ActionMask out = 0;
    for ( std::size_t a = 0; a < bits.size(); ++a )
        if ( bits[ a ] )
            out |= ActionMask{ 1 } << a;
    return out;
}

std::vector< bool > product_forcing_set( const Cgm& m, const std::vector< AgentId >& refined,
                                         const ActionVector& context, StateId w, const StateSet& target )
{
    if ( w >= m.state_count() )
        throw ContractError( "forcing_set: state out of range" );
    AgentMask fixed = context.domain();
    std::size_t base = 0;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
        if ( context.assigned( a ) )
            base += context[ a ] * m.stride( a );
    std::vector< std::size_t > sizes;
    AgentMask refined_mask = 0;
    for ( auto i : refined )
    {
        if ( ( fixed | refined_mask ) & agent_bit( i ) )
            throw ContractError( "forcing_set: refined agents must be distinct and open in the context" );
        refined_mask |= agent_bit( i );
        sizes.push_back( m.alphabet_size( i ) );
    }
    const auto rest = m.partial_codes( m.all() & ~fixed & ~refined_mask );
    const auto strides = detail::strides_of( sizes );
    std::vector< bool > out( detail::product( sizes ), false );
    for ( std::size_t t = 0; t < out.size(); ++t )
    {
        std::size_t code = base;
        for ( std::size_t k = 0; k < refined.size(); ++k )
            code += ( t / strides[ k ] ) % sizes[ k ] * m.stride( refined[ k ] );
        out[ t ] = std::all_of( rest.begin(), rest.end(),
                                [ & ]( std::size_t r ) { return target.contains( m.target( w, code + r ) ); } );
    }
    return out;
}

std::vector< std::vector< ActionMask > > maximal_rectangles( const std::vector< bool >& set,
                                                             const std::vector< std::size_t >& sizes )
{
    std::size_t width = 0;
    for ( auto s : sizes )
        width += s;
    if ( width > 20 )
        throw ResourceExceeded( "maximal_rectangles: refined alphabets too large" );
    const auto strides = detail::strides_of( sizes );

    auto inside = [ & ]( const std::vector< ActionMask >& r ) {
        for ( std::size_t t = 0; t < set.size(); ++t )
        {
            bool member = true;
            for ( std::size_t k = 0; k < sizes.size() && member; ++k )
                member = ( ( r[ k ] >> ( ( t / strides[ k ] ) % sizes[ k ] ) ) & 1U ) != 0;
            if ( member && !set[ t ] )
                return false;
        }
        return true;
    };

    std::vector< std::vector< ActionMask > > boxes;
    std::vector< ActionMask > cur( sizes.size(), 1 );
    auto next = [ & ]() {
        for ( std::size_t k = sizes.size(); k-- > 0; )
        {
            if ( ++cur[ k ] <= full_actions( sizes[ k ] ) )
                return true;
            cur[ k ] = 1;
        }
        return false;
    };
    do
    {
        if ( inside( cur ) )
            boxes.push_back( cur );
    } while ( next() );

    auto within = []( const std::vector< ActionMask >& a, const std::vector< ActionMask >& b ) {
        for ( std::size_t k = 0; k < a.size(); ++k )
            if ( ( a[ k ] & ~b[ k ] ) != 0 )
                return false;
        return true;
    };
    std::vector< std::vector< ActionMask > > out;
    for ( const auto& a : boxes )
    {
        const bool dominated = std::any_of( boxes.begin(), boxes.end(),
                                            [ & ]( const auto& b ) { return a != b && within( a, b ); } );
        if ( !dominated )
            out.push_back( a );
    }
    return out;
}

Formula eliminate_until( const Formula& body, std::size_t n )
{
    if ( n == 0 )
        throw ContractError( "eliminate_until: state count must be positive" );
    std::unordered_map< const Node*, Formula > memo;
    auto go = [ & ]( auto& self, const Formula& f ) -> Formula {
        if ( !f )
            return f;
        if ( auto it = memo.find( f.get() ); it != memo.end() )
            return it->second;
        Formula out;
        switch ( f->op )
        {
        case Op::False:
        case Op::Atom:
            out = f;
            break;
        case Op::Implies:
            out = implies( self( self, f->lhs ), self( self, f->rhs ) );
            break;
        case Op::Next:
            out = next( f->agents, self( self, f->lhs ) );
            break;
        case Op::Split:
            out = split( f->name, f->agents, self( self, f->lhs ) );
            break;
        case Op::Until:
        case Op::DualUntil:
        {
            const auto phi = self( self, f->lhs );
            const auto psi = self( self, f->rhs );
            Formula theta = psi;
            for ( std::size_t k = 0; k < n; ++k )
            {
                const auto step = f->op == Op::Until ? next( f->agents, theta )
                                                     : negation( next( f->agents, negation( theta ) ) );
                theta = disjunction( psi, conjunction( phi, step ) );
            }
            out = theta;
            break;
        }
        }
        memo.emplace( f.get(), out );
        return out;
    };
    return go( go, body );
}

NormalizedChain normalize_chain( const Cgm& m, const std::vector< ChainLink >& links, const Formula& body )
{
    if ( links.empty() )
        throw ContractError( "normalize_chain: empty chain" );
    NormalizedChain out;
    out.links = links;
    out.body = body;
    std::set< std::string > used{ m.agents().begin(), m.agents().end() };
    for ( const auto& link : links )
    {
        if ( link.subagents.empty() )
            throw ModelError( "refinement of '" + link.refined + "' has no sub-agents" );
        for ( const auto& s : link.subagents )
            if ( !used.insert( s ).second )
                throw ModelError( "sub-agent '" + s + "' is not a fresh name" );

        bool placed = false;
        for ( auto& g : out.groups )
        {
            auto it = std::find( g.leaves.begin(), g.leaves.end(), link.refined );
            if ( it == g.leaves.end() )
                continue;
            it = g.leaves.erase( it );
            g.leaves.insert( it, link.subagents.begin(), link.subagents.end() );
            placed = true;
            break;
        }
        if ( placed )
            continue;
        const auto i = m.agent_index( link.refined );
        if ( !i )
            throw ModelError( "refined agent '" + link.refined + "' is not in scope" );
        if ( std::any_of( out.groups.begin(), out.groups.end(), [ & ]( const auto& g ) { return g.agent == *i; } ) )
            throw ModelError( "agent '" + link.refined + "' is refined twice" );
        out.groups.push_back( { link.refined, *i, link.subagents } );
    }
    return out;
}

namespace
{

// A next-modality of the body, resolved against the refined vocabulary.
struct Modality
{
    AgentMask base = 0;                  // unrefined base agents
    std::vector< AgentMask > per_group;  // leaves, indexed within each group
    AgentMask lower = 0;                 // base agents for the pessimistic reading
    AgentMask upper = 0;                 // base agents for the optimistic reading
    bool partial = false;
};

Modality resolve( const Cgm& m, const NormalizedChain& chain, const std::vector< std::string >& coalition )
{
    Modality mod;
    mod.per_group.assign( chain.groups.size(), 0 );
    for ( const auto& name : coalition )
    {
        bool found = false;
        for ( std::size_t k = 0; k < chain.groups.size() && !found; ++k )
        {
            const auto& leaves = chain.groups[ k ].leaves;
            auto it = std::find( leaves.begin(), leaves.end(), name );
            if ( it != leaves.end() )
            {
                mod.per_group[ k ] |= agent_bit( static_cast< std::size_t >( it - leaves.begin() ) );
                found = true;
            }
        }
        if ( found )
            continue;
        const auto a = m.agent_index( name );
        if ( !a )
            throw ModelError( "unknown agent '" + name + "'" );
        if ( std::any_of( chain.groups.begin(), chain.groups.end(), [ & ]( const auto& g ) { return g.agent == *a; } ) )
            throw ContractError( "agent '" + name + "' is refined away in the chain body" );
        mod.base |= agent_bit( *a );
    }
    mod.lower = mod.base;
    mod.upper = mod.base;
    for ( std::size_t k = 0; k < chain.groups.size(); ++k )
    {
        const auto own = mod.per_group[ k ];
        const auto whole = all_agents( chain.groups[ k ].leaves.size() );
        if ( own == whole )
            mod.lower |= agent_bit( chain.groups[ k ].agent );
        if ( own != 0 )
            mod.upper |= agent_bit( chain.groups[ k ].agent );
        if ( own != 0 && own != whole )
            mod.partial = true;
    }
    return mod;
}

std::vector< std::size_t > group_alphabets( const Cgm& m, const NormalizedChain& chain )
{
    std::vector< std::size_t > out;
    for ( const auto& g : chain.groups )
        out.push_back( m.alphabet_size( g.agent ) );
    return out;
}

std::vector< std::size_t > group_counts( const NormalizedChain& chain )
{
    std::vector< std::size_t > out;
    for ( const auto& g : chain.groups )
        out.push_back( g.leaves.size() );
    return out;
}

// "The refined model can force `target` from w' with coalition `mod`":
// some context for the unrefined members and some box of refined-agent
// tuples inside the joint forcing set, each side reachable by its sub-agents.
OneStepConstraint ability( const Cgm& m, const NormalizedChain& chain, const Modality& mod, StateId w,
                           const StateSet& target )
{
    std::vector< AgentId > refined;
    for ( const auto& g : chain.groups )
        refined.push_back( g.agent );
    const auto sizes = group_alphabets( m, chain );
    std::vector< OneStepConstraint > options;
    for ( auto ctx : m.partial_codes( mod.base ) )
    {
        auto context = m.decode( ctx );
        for ( AgentId a = 0; a < m.agent_count(); ++a )
            if ( ( mod.base & agent_bit( a ) ) == 0 )
                context.clear( a );
        const auto box_set = product_forcing_set( m, refined, context, w, target );
        for ( const auto& box : maximal_rectangles( box_set, sizes ) )
        {
            std::vector< OneStepConstraint > sides;
            for ( std::size_t k = 0; k < box.size(); ++k )
                sides.push_back( OneStepConstraint::can( { k, mod.per_group[ k ], box[ k ] } ) );
            options.push_back( OneStepConstraint::all_of( std::move( sides ) ) );
        }
    }
    return fold_constants( OneStepConstraint::any_of( std::move( options ) ), group_counts( chain ),
                           group_alphabets( m, chain ) );
}

bool mentions_refined( const NormalizedChain& chain, const Formula& f )
{
    if ( !f )
        return false;
    if ( f->op == Op::Next || f->op == Op::Until || f->op == Op::DualUntil )
        for ( const auto& name : f->agents )
            for ( const auto& g : chain.groups )
                if ( std::find( g.leaves.begin(), g.leaves.end(), name ) != g.leaves.end() )
                    return true;
    return mentions_refined( chain, f->lhs ) || mentions_refined( chain, f->rhs );
}

} // namespace

OneStepConstraint translate_tr( const Cgm& m, const NormalizedChain& chain, StateId w )
{
    auto go = [ & ]( auto& self, const Formula& f ) -> OneStepConstraint {
        switch ( f->op )
        {
        case Op::False:
            return OneStepConstraint::bottom();
        case Op::Atom:
            return m.label_set( f->name ).contains( w ) ? OneStepConstraint::top() : OneStepConstraint::bottom();
        case Op::Implies:
            return OneStepConstraint::any_of( { OneStepConstraint::negate( self( self, f->lhs ) ), self( self, f->rhs ) } );
        case Op::Next:
        {
            if ( mentions_refined( chain, f->lhs ) )
                throw ContractError( "translate_tr: modality arguments must not depend on the refinement" );
            const auto target = check_atl( m, f->lhs );
            const auto mod = resolve( m, chain, f->agents );
            if ( !mod.partial )
                return pre( m, mod.lower, target ).contains( w ) ? OneStepConstraint::top()
                                                                  : OneStepConstraint::bottom();
            return ability( m, chain, mod, w, target );
        }
        default:
            throw ContractError( "translate_tr: body must be a boolean combination of next-modalities" );
        }
    };
    return go( go, chain.body );
}

namespace
{

struct DagNode
{
    Op op = Op::False;
    StateSet label;
    std::size_t lhs = 0;
    std::size_t rhs = 0;
    Modality mod;
};

// Hash-consed subformula DAG of an until-free body.
class BodyDag
{
public:
    std::vector< Formula > formulas;
    std::vector< DagNode > nodes;

    BodyDag( const Cgm& m, const NormalizedChain& chain )
    {
        _root = intern( m, chain, chain.body );
    }

    [[nodiscard]] std::size_t root() const { return _root; }

    // Root constrained at `at`; modality arguments everywhere.
    [[nodiscard]] std::vector< StateSet > relevance( std::size_t universe, const StateSet& at ) const
    {
        std::vector< StateSet > rel( nodes.size(), StateSet{ universe } );
        rel[ _root ] = at;
        for ( std::size_t k = nodes.size(); k-- > 0; )
        {
            if ( rel[ k ].empty() )
                continue;
            const auto& n = nodes[ k ];
            if ( n.op == Op::Implies )
            {
                rel[ n.lhs ] |= rel[ k ];
                rel[ n.rhs ] |= rel[ k ];
            }
            else if ( n.op == Op::Next )
                rel[ n.lhs ] = StateSet::full( universe );
        }
        return rel;
    }

private:
    std::size_t _root = 0;
    std::unordered_map< const Node*, std::size_t > _by_pointer;
    std::map< std::tuple< Op, std::string, std::vector< std::string >, std::size_t, std::size_t >, std::size_t >
        _by_shape;

    std::size_t intern( const Cgm& m, const NormalizedChain& chain, const Formula& f )
    {
        if ( auto it = _by_pointer.find( f.get() ); it != _by_pointer.end() )
            return it->second;
        DagNode n;
        n.op = f->op;
        std::size_t lhs = 0;
        std::size_t rhs = 0;
        std::vector< std::string > agents;
        switch ( f->op )
        {
        case Op::False:
            n.label = StateSet{ m.state_count() };
            break;
        case Op::Atom:
            n.label = m.label_set( f->name );
            break;
        case Op::Implies:
            lhs = intern( m, chain, f->lhs );
            rhs = intern( m, chain, f->rhs );
            break;
        case Op::Next:
            lhs = intern( m, chain, f->lhs );
            agents = f->agents;
            std::sort( agents.begin(), agents.end() );
            n.mod = resolve( m, chain, f->agents );
            break;
        default:
            throw ContractError( "chain body must be until-free and split-free" );
        }
        n.lhs = lhs;
        n.rhs = rhs;
        auto key = std::make_tuple( f->op, f->name, agents, lhs, rhs );
        auto [ it, fresh ] = _by_shape.emplace( key, nodes.size() );
        if ( fresh )
        {
            formulas.push_back( f );
            nodes.push_back( std::move( n ) );
        }
        _by_pointer.emplace( f.get(), it->second );
        return it->second;
    }
};

void enumerate( const Cgm& m, const BodyDag& dag, const std::vector< StateSet >& relevant,
                const std::optional< StateId >& root_state, const std::function< bool( const Assignment& ) >& visit,
                std::size_t max_assignments, std::size_t& count )
{
    const std::size_t n = dag.nodes.size();
    Assignment a;
    a.nodes = dag.formulas;
    a.values.assign( n, StateSet{ m.state_count() } );
    a.lower = a.values;
    a.upper = a.values;
    a.relevant = relevant;
    for ( const auto& node : dag.nodes )
        a.argument.push_back( node.lhs );

    auto step = [ & ]( auto& self, std::size_t k ) -> bool {
        if ( k == n )
        {
            if ( ++count > max_assignments )
                throw ResourceExceeded( "assignment cap exceeded" );
            if ( root_state && !a.values[ dag.root() ].contains( *root_state ) )
                return true;
            return visit( a );
        }
        const auto& node = dag.nodes[ k ];
        switch ( node.op )
        {
        case Op::False:
        case Op::Atom:
            a.values[ k ] = node.label;
            break;
        case Op::Implies:
            a.values[ k ] = a.values[ node.lhs ].complement() | a.values[ node.rhs ];
            break;
        case Op::Next:
        {
            const auto& arg = a.values[ node.lhs ];
            a.lower[ k ] = pre( m, node.mod.lower, arg );
            if ( !node.mod.partial )
            {
                a.upper[ k ] = a.lower[ k ];
                a.values[ k ] = a.lower[ k ];
                break;
            }
            a.upper[ k ] = pre( m, node.mod.upper, arg );
            const auto free = ( ( a.upper[ k ] - a.lower[ k ] ) & relevant[ k ] ).members();
            if ( free.size() >= 63 )
                throw ResourceExceeded( "assignment cap exceeded" );
            a.partial.push_back( k );
            for ( std::uint64_t bits = 0; bits < ( std::uint64_t{ 1 } << free.size() ); ++bits )
            {
                a.values[ k ] = a.lower[ k ];
                for ( std::size_t j = 0; j < free.size(); ++j )
                    if ( ( bits >> j ) & 1U )
                        a.values[ k ].insert( free[ j ] );
                if ( !self( self, k + 1 ) )
                    return false;
            }
            a.partial.pop_back();
            return true;
        }
        default:
            break;
        }
        a.lower[ k ] = a.values[ k ];
        a.upper[ k ] = a.values[ k ];
        return self( self, k + 1 );
    };
    step( step, 0 );
}

} // namespace

void for_each_assignment( const Cgm& m, const NormalizedChain& chain,
                          const std::function< bool( const Assignment& ) >& visit, std::size_t max_assignments )
{
    BodyDag dag{ m, chain };
    const std::vector< StateSet > relevant( dag.nodes.size(), StateSet::full( m.state_count() ) );
    std::size_t count = 0;
    enumerate( m, dag, relevant, std::nullopt, visit, max_assignments, count );
}

std::vector< Assignment > enumerate_assignments( const Cgm& m, const NormalizedChain& chain,
                                                 std::size_t max_assignments )
{
    std::vector< Assignment > out;
    for_each_assignment(
        m, chain,
        [ & ]( const Assignment& a ) {
            out.push_back( a );
            return true;
        },
        max_assignments );
    return out;
}

OneStepConstraint assignment_constraints( const Cgm& m, const NormalizedChain& chain, const Assignment& a )
{
    std::vector< OneStepConstraint > parts;
    for ( auto k : a.partial )
    {
        const auto& f = a.nodes[ k ];
        const auto mod = resolve( m, chain, f->agents );
        const auto arg = a.argument.at( k );
        if ( arg >= k )
            throw ContractError( "assignment_constraints: malformed assignment" );
        a.relevant[ k ].for_each( [ & ]( StateId w ) {
            auto can = ability( m, chain, mod, w, a.values[ arg ] );
            parts.push_back( a.values[ k ].contains( w ) ? std::move( can )
                                                         : OneStepConstraint::negate( std::move( can ) ) );
        } );
    }
    return OneStepConstraint::all_of( std::move( parts ) );
}

namespace
{

void add_term( Dnf& out, std::vector< Literal > term, std::size_t max_terms )
{
    std::sort( term.begin(), term.end() );
    term.erase( std::unique( term.begin(), term.end() ), term.end() );
    for ( std::size_t k = 0; k + 1 < term.size(); ++k )
        if ( term[ k ].atom == term[ k + 1 ].atom )
            return; // contradictory
    if ( out.size() >= max_terms )
        throw ResourceExceeded( "DNF size cap exceeded" );
    out.push_back( std::move( term ) );
}

Dnf dnf( const OneStepConstraint& c, bool negated, std::size_t max_terms )
{
    using K = OneStepConstraint::Kind;
    Dnf out;
    switch ( c.kind() )
    {
    case K::True:
        if ( !negated )
            out.emplace_back();
        return out;
    case K::False:
        if ( negated )
            out.emplace_back();
        return out;
    case K::Atom:
        out.push_back( { Literal{ c.atom(), !negated } } );
        return out;
    case K::Not:
        return dnf( c.children().front(), !negated, max_terms );
    case K::And:
    case K::Or:
        break;
    }
    const bool disjunctive = ( c.kind() == K::Or ) != negated;
    if ( disjunctive )
    {
        for ( const auto& k : c.children() )
            for ( auto& term : dnf( k, negated, max_terms ) )
                add_term( out, std::move( term ), max_terms );
        return out;
    }
    out.emplace_back();
    for ( const auto& k : c.children() )
    {
        const auto factor = dnf( k, negated, max_terms );
        Dnf next;
        for ( const auto& a : out )
            for ( const auto& b : factor )
            {
                auto term = a;
                term.insert( term.end(), b.begin(), b.end() );
                add_term( next, std::move( term ), max_terms );
            }
        out = std::move( next );
        if ( out.empty() )
            break;
    }
    return out;
}

// Bounded one-step searches for each group, memoized by constraint.
class GroupSolver
{
public:
    GroupSolver( const std::vector< std::size_t >& alphabets, const std::vector< std::size_t >& counts,
                 const std::vector< std::size_t >& bounds, std::size_t max_nodes, ChainOutcome& outcome )
        : _alphabets{ alphabets }, _counts{ counts }, _bounds{ bounds }, _max_nodes{ max_nodes }, _outcome{ outcome }
    {}

    const SatResult& solve( std::size_t group, const OneStepConstraint& c )
    {
        auto key = std::make_pair( group, c );
        if ( auto it = _cache.find( key ); it != _cache.end() )
            return it->second;
        const auto folded = fold_constants( c, _counts, _alphabets );
        SatResult r;
        if ( !folded.is_false() )
        {
            ++_outcome.sat_calls;
            r = sat_onestep( folded, _alphabets[ group ], _counts[ group ], _bounds[ group ], _max_nodes );
            if ( !r.sat )
                _outcome.bounded = true;
        }
        return _cache.emplace( std::move( key ), std::move( r ) ).first->second;
    }

private:
    std::vector< std::size_t > _alphabets;
    std::vector< std::size_t > _counts;
    std::vector< std::size_t > _bounds;
    std::size_t _max_nodes;
    ChainOutcome& _outcome;
    std::map< std::pair< std::size_t, OneStepConstraint >, SatResult > _cache;
};

// Turns one game per group back into one homomorphism per written link.
// Sub-agents that are refined further get the product of their leaves'
// alphabets and an identity map.
std::vector< Homomorphism > decompose( const Cgm& m, const NormalizedChain& chain,
                                       const std::vector< OneStepGame >& games )
{
    std::map< std::string, std::size_t > size_of;
    for ( std::size_t k = 0; k < chain.groups.size(); ++k )
        for ( std::size_t j = 0; j < chain.groups[ k ].leaves.size(); ++j )
            size_of[ chain.groups[ k ].leaves[ j ] ] = games[ k ].sizes[ j ];
    for ( auto it = chain.links.rbegin(); it != chain.links.rend(); ++it )
    {
        std::size_t s = 1;
        for ( const auto& sub : it->subagents )
            s *= size_of.at( sub );
        size_of[ it->refined ] = s;
    }

    std::vector< Homomorphism > homs;
    Cgm cur = m;
    for ( const auto& link : chain.links )
    {
        const auto i = *cur.agent_index( link.refined );
        std::set< std::string > taken;
        for ( AgentId a = 0; a < cur.agent_count(); ++a )
            if ( a != i )
                taken.insert( cur.alphabet( a ).begin(), cur.alphabet( a ).end() );
        std::vector< std::size_t > sizes;
        for ( const auto& sub : link.subagents )
            sizes.push_back( size_of.at( sub ) );

        Homomorphism h;
        h.refined_agent = link.refined;
        h.subagents = link.subagents;
        h.sub_alphabets = detail::fresh_alphabets( link.subagents, sizes, taken );
        auto group = std::find_if( chain.groups.begin(), chain.groups.end(),
                                   [ & ]( const auto& g ) { return g.refined == link.refined; } );
        if ( group != chain.groups.end() )
            h.map = games[ static_cast< std::size_t >( group - chain.groups.begin() ) ].step;
        else
        {
            h.map.resize( detail::product( sizes ) );
            for ( std::size_t c = 0; c < h.map.size(); ++c )
                h.map[ c ] = c;
        }
        cur = apply_hom( cur, h ).derived;
        homs.push_back( std::move( h ) );
    }
    return homs;
}

std::size_t default_bound( const Cgm& m, AgentId i, const FlatOptions& opts )
{
    return opts.bound.value_or( std::max< std::size_t >( 2, m.alphabet_size( i ) ) );
}

ChainOutcome oracle_chain( const Cgm& m, StateId w, const std::vector< ChainLink >& links, const Formula& body,
                           const FlatOptions& opts )
{
    const auto chain = normalize_chain( m, links, body );
    std::size_t bound = 0;
    for ( const auto& g : chain.groups )
        bound = std::max( bound, default_bound( m, g.agent, opts ) );
    const auto r = brute_force_refine( m, w, links, body, bound, opts.max_nodes );
    ChainOutcome out;
    out.holds = r.holds;
    out.bounded = !r.holds;
    out.witness = r.witness;
    out.sat_calls = r.candidates;
    return out;
}

} // namespace

Dnf to_dnf( const OneStepConstraint& c, std::size_t max_terms ) { return dnf( c, false, max_terms ); }

ChainOutcome solve_chain( const Cgm& m, StateId w, const std::vector< ChainLink >& links, const Formula& body,
                          const FlatOptions& opts )
{
    if ( w >= m.state_count() )
        throw ContractError( "solve_chain: state out of range" );
    if ( contains_split( body ) )
        throw ContractError( "solve_chain: chain body must be split-free" );
    if ( opts.oracle )
        return oracle_chain( m, w, links, body, opts );

    auto chain = normalize_chain( m, links, body );
    chain.body = eliminate_until( body, m.state_count() );
    const auto alphabets = group_alphabets( m, chain );
    const auto counts = group_counts( chain );
    std::vector< std::size_t > bounds;
    for ( const auto& g : chain.groups )
        bounds.push_back( default_bound( m, g.agent, opts ) );

    ChainOutcome outcome;
    GroupSolver solver{ alphabets, counts, bounds, opts.max_nodes, outcome };
    BodyDag dag{ m, chain };
    const auto relevant = dag.relevance( m.state_count(), StateSet::singleton( m.state_count(), w ) );
    const std::size_t groups = chain.groups.size();

    std::optional< std::vector< OneStepGame > > found;
    auto try_assignment = [ & ]( const Assignment& a ) -> bool {
        ++outcome.assignments;
        const auto c = fold_constants( assignment_constraints( m, chain, a ), counts, alphabets );
        if ( c.is_false() )
            return true;
        if ( groups == 1 )
        {
            const auto& r = solver.solve( 0, c );
            if ( r.sat )
                found = std::vector< OneStepGame >{ r.game };
            return !found;
        }
        for ( const auto& term : to_dnf( c, opts.max_dnf ) )
        {
            std::vector< std::vector< OneStepConstraint > > per_group( groups );
            for ( const auto& lit : term )
            {
                auto atom = OneStepConstraint::can( lit.atom );
                per_group[ lit.atom.group ].push_back( lit.positive ? atom : OneStepConstraint::negate( atom ) );
            }
            std::vector< OneStepGame > games;
            for ( std::size_t k = 0; k < groups; ++k )
            {
                const auto& r = solver.solve( k, OneStepConstraint::all_of( std::move( per_group[ k ] ) ) );
                if ( !r.sat )
                    break;
                games.push_back( r.game );
            }
            if ( games.size() == groups )
            {
                found = std::move( games );
                return false;
            }
        }
        return true;
    };
    std::size_t count = 0;
    enumerate( m, dag, relevant, w, try_assignment, opts.max_assignments, count );

    if ( found )
    {
        outcome.holds = true;
        outcome.bounded = false;
        outcome.witness = decompose( m, chain, *found );
    }
    return outcome;
}

std::string to_string( Verdict v )
{
    switch ( v )
    {
    case Verdict::True:
        return "true";
    case Verdict::False:
        return "false";
    case Verdict::TrueUpToBound:
        return "true-up-to-bound";
    case Verdict::FalseUpToBound:
        return "false-up-to-bound";
    case Verdict::ResourceExceeded:
        return "resource-exceeded";
    }
    return "unknown";
}

bool truth_of( Verdict v ) { return v == Verdict::True || v == Verdict::TrueUpToBound; }

FlatResult check_flat( const Cgm& m, StateId w, const Formula& f, const FlatOptions& opts )
{
    if ( w >= m.state_count() )
        throw ContractError( "check_flat: state out of range" );
    const auto classification = classify_flat( f );
    if ( !classification.flat )
        throw ContractError( "formula is not flat: offending subformula " + to_string( classification.offending ) );

    std::unordered_map< const Node*, std::size_t > chain_of;
    for ( std::size_t k = 0; k < classification.chains.size(); ++k )
        chain_of.emplace( classification.chains[ k ].head.get(), k );

    // States at which each chain is needed: the root at w, modality
    // arguments everywhere.
    std::unordered_map< const Node*, StateSet > needed;
    auto mark = [ & ]( auto& self, const Formula& g, const StateSet& at ) -> void {
        if ( !g || at.empty() )
            return;
        switch ( g->op )
        {
        case Op::Split:
        {
            auto [ it, fresh ] = needed.emplace( g.get(), at );
            if ( !fresh )
                it->second |= at;
            return;
        }
        case Op::Implies:
            self( self, g->lhs, at );
            self( self, g->rhs, at );
            return;
        case Op::False:
        case Op::Atom:
            return;
        default:
            self( self, g->lhs, StateSet::full( m.state_count() ) );
            self( self, g->rhs, StateSet::full( m.state_count() ) );
        }
    };
    mark( mark, f, StateSet::singleton( m.state_count(), w ) );

    FlatResult result;
    bool under = false; // some positive chain may be missing states
    bool over = false;  // some negative chain may be missing states
    const SplitHook hook = [ & ]( const Formula& node ) {
        const auto k = chain_of.at( node.get() );
        const auto& chain = classification.chains[ k ];
        StateSet out{ m.state_count() };
        const auto at = needed.find( node.get() );
        if ( at == needed.end() )
            return out;
        at->second.for_each( [ & ]( StateId s ) {
            ChainReport report{ k, s, chain.positive, solve_chain( m, s, chain.links, chain.body, opts ) };
            if ( report.outcome.holds )
                out.insert( s );
            else if ( report.outcome.bounded )
                ( chain.positive ? under : over ) = true;
            result.chains.push_back( std::move( report ) );
        } );
        return out;
    };

    try
    {
        const bool value = check_atl( m, f, hook ).contains( w );
        if ( value )
            result.verdict = over ? Verdict::TrueUpToBound : Verdict::True;
        else
            result.verdict = under ? Verdict::FalseUpToBound : Verdict::False;
    }
    catch ( const ResourceExceeded& e )
    {
        result.verdict = Verdict::ResourceExceeded;
        result.message = e.what();
    }
    std::sort( result.chains.begin(), result.chains.end(),
               []( const auto& a, const auto& b ) { return std::tie( a.chain, a.state ) < std::tie( b.chain, b.state ); } );
    return result;
}

} // namespace atlr
