#include "atlr/refinement.hpp"
#include "atlr/atl_checker.hpp"
#include "atlr/errors.hpp"
#include "table_util.hpp"

#include <algorithm>
#include <set>

namespace atlr
{

std::vector< std::size_t > Homomorphism::sizes() const
{
    std::vector< std::size_t > s;
    for ( const auto& a : sub_alphabets )
        s.push_back( a.size() );
    return s;
}

std::size_t Homomorphism::row_count() const { return detail::product( sizes() ); }

namespace
{

AgentId refined_index( const Cgm& m, const std::string& agent )
{
    auto i = m.agent_index( agent );
    if ( !i )
        throw ModelError( "refined agent '" + agent + "' is not an agent of the model" );
    return *i;
}

std::vector< std::string > hom_shape_defects( const Cgm& m, const Homomorphism& h )
{
    std::vector< std::string > defects;
    const auto i = m.agent_index( h.refined_agent );
    if ( !i )
    {
        defects.push_back( "refined agent '" + h.refined_agent + "' is not an agent of the model" );
        return defects;
    }
    if ( h.subagents.empty() )
        defects.emplace_back( "empty sub-agent set" );
    if ( h.sub_alphabets.size() != h.subagents.size() )
    {
        defects.emplace_back( "one alphabet per sub-agent is required" );
        return defects;
    }
    for ( std::size_t j = 0; j < h.subagents.size(); ++j )
    {
        if ( m.agent_index( h.subagents[ j ] ) )
            defects.push_back( "sub-agent '" + h.subagents[ j ] + "' is not disjoint from the agents of the model" );
        if ( h.sub_alphabets[ j ].empty() )
            defects.push_back( "empty alphabet for sub-agent '" + h.subagents[ j ] + "'" );
    }
    if ( h.map.size() != h.row_count() )
    {
        defects.emplace_back( "map is not total over the sub-agent alphabets" );
        return defects;
    }
    std::vector< bool > hit( m.alphabet_size( *i ), false );
    for ( auto a : h.map )
    {
        if ( a >= hit.size() )
        {
            defects.emplace_back( "alphabet mismatch: map value outside the refined agent's alphabet" );
            return defects;
        }
        hit[ a ] = true;
    }
    for ( std::size_t a = 0; a < hit.size(); ++a )
        if ( !hit[ a ] )
            defects.push_back( "not surjective: action '" + m.alphabet( *i )[ a ] + "' of agent '" + h.refined_agent +
                               "' has no preimage" );
    return defects;
}

} // namespace

RefinedModel apply_hom( const Cgm& m, const Homomorphism& h )
{
    if ( auto defects = hom_shape_defects( m, h ); !defects.empty() )
        throw ModelError( defects.front() );
    const AgentId i = refined_index( m, h.refined_agent );

    std::vector< std::string > agents;
    std::vector< std::vector< std::string > > alphabets;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
    {
        if ( a == i )
        {
            agents.insert( agents.end(), h.subagents.begin(), h.subagents.end() );
            alphabets.insert( alphabets.end(), h.sub_alphabets.begin(), h.sub_alphabets.end() );
        }
        else
        {
            agents.push_back( m.agents()[ a ] );
            alphabets.push_back( m.alphabet( a ) );
        }
    }
    Cgm derived{ agents, alphabets, m.states() };
    for ( std::size_t p = 0; p < m.propositions().size(); ++p )
        m.labels()[ p ].for_each( [ & ]( StateId s ) { derived.add_label( s, m.propositions()[ p ] ); } );

    // Derived agent k corresponds to base agent k for k < i, to the
    // sub-agents for i <= k < i + |G|, and to base agent k - |G| + 1 after.
    const std::size_t g = h.subagents.size();
    const auto sub_strides = detail::strides_of( h.sizes() );
    for ( std::size_t code = 0; code < derived.vector_count(); ++code )
    {
        const auto joint = derived.decode( code );
        ActionVector base{ m.agent_count() };
        std::size_t row = 0;
        for ( AgentId k = 0; k < derived.agent_count(); ++k )
        {
            if ( k < i )
                base.set( k, joint[ k ] );
            else if ( k < i + g )
                row += joint[ k ] * sub_strides[ k - i ];
            else
                base.set( k - g + 1, joint[ k ] );
        }
        base.set( i, h.map[ row ] );
        const auto base_code = m.encode( base );
        for ( StateId s = 0; s < m.state_count(); ++s )
            derived.set_transition( s, code, m.target( s, base_code ) );
    }
    return { m, h, std::move( derived ) };
}

std::vector< RefinedModel > apply_chain( const Cgm& m, const std::vector< Homomorphism >& homs )
{
    std::vector< RefinedModel > steps;
    const Cgm* cur = &m;
    for ( const auto& h : homs )
    {
        steps.push_back( apply_hom( *cur, h ) );
        cur = &steps.back().derived;
    }
    return steps;
}

std::vector< std::string > validate_hom( const Cgm& m, const RefinedModel& candidate )
{
    std::vector< std::string > defects;
    if ( !( candidate.base == m ) )
        defects.emplace_back( "candidate is built over a different base model" );
    auto shape = hom_shape_defects( m, candidate.hom );
    defects.insert( defects.end(), shape.begin(), shape.end() );
    if ( !defects.empty() )
        return defects;

    const auto& h = candidate.hom;
    const auto& d = candidate.derived;
    const AgentId i = *m.agent_index( h.refined_agent );
    const std::size_t g = h.subagents.size();

    if ( d.states() != m.states() )
        defects.emplace_back( "state sets differ" );
    for ( const auto& p : m.propositions() )
        if ( !( d.label_set( p ) == m.label_set( p ) ) )
            defects.push_back( "valuation differs on '" + p + "'" );
    for ( const auto& p : d.propositions() )
        if ( !( d.label_set( p ) == m.label_set( p ) ) )
            defects.push_back( "valuation differs on '" + p + "'" );

    std::vector< std::string > expected_agents;
    std::vector< std::vector< std::string > > expected_alphabets;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
    {
        if ( a == i )
        {
            expected_agents.insert( expected_agents.end(), h.subagents.begin(), h.subagents.end() );
            expected_alphabets.insert( expected_alphabets.end(), h.sub_alphabets.begin(), h.sub_alphabets.end() );
        }
        else
        {
            expected_agents.push_back( m.agents()[ a ] );
            expected_alphabets.push_back( m.alphabet( a ) );
        }
    }
    if ( d.agents() != expected_agents )
        defects.emplace_back( "agent set is not (Ag \\ {" + h.refined_agent + "}) u G" );
    if ( d.alphabets() != expected_alphabets )
        defects.emplace_back( "alphabets of the derived model do not match" );
    if ( !defects.empty() )
        return defects;

    auto structural = validate_cgm( d );
    defects.insert( defects.end(), structural.begin(), structural.end() );
    if ( !defects.empty() )
        return defects;

    const auto sub_strides = detail::strides_of( h.sizes() );
    for ( std::size_t code = 0; code < d.vector_count(); ++code )
    {
        const auto joint = d.decode( code );
        ActionVector base{ m.agent_count() };
        std::size_t row = 0;
        for ( AgentId k = 0; k < d.agent_count(); ++k )
        {
            if ( k < i )
                base.set( k, joint[ k ] );
            else if ( k < i + g )
                row += joint[ k ] * sub_strides[ k - i ];
            else
                base.set( k - g + 1, joint[ k ] );
        }
        base.set( i, h.map[ row ] );
        for ( StateId s = 0; s < m.state_count(); ++s )
            if ( d.target( s, code ) != m.target( s, base ) )
            {
                std::string vec;
                for ( AgentId k = 0; k < d.agent_count(); ++k )
                    vec += ( k ? " " : "" ) + d.alphabet( k )[ joint[ k ] ];
                defects.push_back( "transition mismatch at (" + m.states()[ s ] + ", " + vec + ")" );
            }
    }
    return defects;
}

void for_each_hom( const Cgm& m, const std::string& agent, const std::vector< std::string >& subagents,
                   std::size_t bound, const std::function< bool( const Homomorphism& ) >& visit )
{
    const AgentId i = refined_index( m, agent );
    const std::size_t n = m.alphabet_size( i );
    std::set< std::string > taken;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
        if ( a != i )
            taken.insert( m.alphabet( a ).begin(), m.alphabet( a ).end() );

    for ( const auto& sizes : detail::size_vectors( subagents.size(), bound ) )
    {
        const std::size_t cells = detail::product( sizes );
        if ( cells < n )
            continue;
        Homomorphism h;
        h.refined_agent = agent;
        h.subagents = subagents;
        h.sub_alphabets = detail::fresh_alphabets( subagents, sizes, taken );
        h.map.assign( cells, 0 );

        std::vector< std::size_t > hits( n, 0 );
        std::size_t missing = n;
        bool stop = false;
        // Depth-first over cells in table order, values ascending, so tables
        // come out in lexicographic order.
        auto fill = [ & ]( auto& self, std::size_t cell ) -> void {
            if ( stop )
                return;
            if ( cell == cells )
            {
                if ( missing == 0 && detail::is_canonical( h.map, sizes ) && !visit( h ) )
                    stop = true;
                return;
            }
            for ( ActionId v = 0; v < n && !stop; ++v )
            {
                const bool fresh = hits[ v ] == 0;
                const std::size_t missing_after = missing - ( fresh ? 1 : 0 );
                if ( missing_after > cells - cell - 1 )
                    continue;
                h.map[ cell ] = v;
                ++hits[ v ];
                missing = missing_after;
                self( self, cell + 1 );
                --hits[ v ];
                missing += fresh ? 1 : 0;
            }
        };
        fill( fill, 0 );
        if ( stop )
            return;
    }
}

std::vector< Homomorphism > enumerate_homs( const Cgm& m, const std::string& agent,
                                            const std::vector< std::string >& subagents, std::size_t bound )
{
    std::vector< Homomorphism > out;
    for_each_hom( m, agent, subagents, bound, [ & ]( const Homomorphism& h ) {
        out.push_back( h );
        return true;
    } );
    return out;
}

RefineVerdict brute_force_refine( const Cgm& m, StateId w, const std::vector< ChainLink >& chain, const Formula& body,
                                  std::size_t bound, std::size_t max_candidates )
{
    if ( w >= m.state_count() )
        throw ModelError( "unknown state index " + std::to_string( w ) );
    if ( contains_split( body ) )
        throw ContractError( "brute_force_refine: chain body must be split-free" );
    RefineVerdict verdict;
    auto search = [ & ]( auto& self, std::size_t k, const Cgm& cur ) -> bool {
        if ( k == chain.size() )
            return check_atl( cur, body ).contains( w );
        bool found = false;
        for_each_hom( cur, chain[ k ].refined, chain[ k ].subagents, bound, [ & ]( const Homomorphism& h ) {
            if ( ++verdict.candidates > max_candidates )
                throw ResourceExceeded( "brute_force_refine: candidate cap exceeded" );
            const auto step = apply_hom( cur, h );
            verdict.witness.push_back( h );
            if ( self( self, k + 1, step.derived ) )
            {
                found = true;
                return false;
            }
            verdict.witness.pop_back();
            return true;
        } );
        return found;
    };
    verdict.holds = search( search, 0, m );
    return verdict;
}

} // namespace atlr
