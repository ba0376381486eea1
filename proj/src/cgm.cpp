#include "atlr/cgm.hpp"
#include "atlr/errors.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

namespace atlr
{

AgentMask ActionVector::domain() const
{
    AgentMask d = 0;
    for ( AgentId a = 0; a < _slots.size(); ++a )
        if ( _slots[ a ] != unassigned )
            d |= agent_bit( a );
    return d;
}

std::optional< ActionVector > merge( const ActionVector& a, const ActionVector& b )
{
    if ( a.size() != b.size() || ( a.domain() & b.domain() ) != 0 )
        return std::nullopt;
    ActionVector r = a;
    for ( AgentId i = 0; i < b.size(); ++i )
        if ( b.assigned( i ) )
            r.set( i, b[ i ] );
    return r;
}

Cgm::Cgm( std::vector< std::string > agents, std::vector< std::vector< std::string > > alphabets,
          std::vector< std::string > states )
    : _agents{ std::move( agents ) }, _alphabets{ std::move( alphabets ) }, _states{ std::move( states ) }
{
    if ( _agents.size() != _alphabets.size() )
        throw ModelError( "one alphabet per agent is required" );
    if ( _agents.size() > max_agents )
        throw ModelError( "at most 64 agents are supported" );
    _strides.assign( _agents.size(), 1 );
    _vector_count = 1;
    for ( std::size_t k = _agents.size(); k-- > 0; )
    {
        _strides[ k ] = _vector_count;
        _vector_count *= std::max< std::size_t >( _alphabets[ k ].size(), 1 );
    }
    _transitions.assign( _states.size() * _vector_count, no_state );
}

std::optional< AgentId > Cgm::agent_index( std::string_view name ) const
{
    auto it = std::find( _agents.begin(), _agents.end(), name );
    if ( it == _agents.end() )
        return std::nullopt;
    return static_cast< AgentId >( it - _agents.begin() );
}

std::optional< StateId > Cgm::state_index( std::string_view name ) const
{
    auto it = std::find( _states.begin(), _states.end(), name );
    if ( it == _states.end() )
        return std::nullopt;
    return static_cast< StateId >( it - _states.begin() );
}

std::optional< ActionId > Cgm::action_index( AgentId agent, std::string_view name ) const
{
    const auto& alpha = _alphabets[ agent ];
    auto it = std::find( alpha.begin(), alpha.end(), name );
    if ( it == alpha.end() )
        return std::nullopt;
    return static_cast< ActionId >( it - alpha.begin() );
}

AgentMask Cgm::mask_of( std::span< const std::string > names ) const
{
    AgentMask mask = 0;
    for ( const auto& n : names )
    {
        auto a = agent_index( n );
        if ( !a )
            throw ModelError( "agent '" + n + "' is not an agent of the model" );
        mask |= agent_bit( *a );
    }
    return mask;
}

void Cgm::add_label( StateId s, const std::string& proposition )
{
    auto it = std::find( _propositions.begin(), _propositions.end(), proposition );
    std::size_t idx = 0;
    if ( it == _propositions.end() )
    {
        idx = _propositions.size();
        _propositions.push_back( proposition );
        _labels.emplace_back( _states.size() );
    }
    else
        idx = static_cast< std::size_t >( it - _propositions.begin() );
    _labels[ idx ].insert( s );
}

StateSet Cgm::label_set( std::string_view proposition ) const
{
    auto it = std::find( _propositions.begin(), _propositions.end(), proposition );
    if ( it == _propositions.end() )
        return StateSet{ _states.size() };
    return _labels[ static_cast< std::size_t >( it - _propositions.begin() ) ];
}

void Cgm::set_transition( StateId from, std::size_t code, StateId to )
{
    assert( from < _states.size() && code < _vector_count );
    _transitions[ from * _vector_count + code ] = to;
}

void Cgm::set_transition( StateId from, const ActionVector& joint, StateId to )
{
    set_transition( from, encode( joint ), to );
}

StateId Cgm::target( StateId from, const ActionVector& joint ) const
{
    return target( from, encode( joint ) );
}

std::size_t Cgm::encode( const ActionVector& joint ) const
{
    assert( joint.size() == _agents.size() );
    std::size_t code = 0;
    for ( AgentId a = 0; a < _agents.size(); ++a )
    {
        assert( joint.assigned( a ) );
        code += joint[ a ] * _strides[ a ];
    }
    return code;
}

ActionVector Cgm::decode( std::size_t code ) const
{
    ActionVector v{ _agents.size() };
    for ( AgentId a = 0; a < _agents.size(); ++a )
    {
        v.set( a, code / _strides[ a ] );
        code %= _strides[ a ];
    }
    return v;
}

std::vector< std::size_t > Cgm::partial_codes( AgentMask mask ) const
{
    std::vector< std::size_t > codes{ 0 };
    for ( AgentId a = 0; a < _agents.size(); ++a )
    {
        if ( ( mask & agent_bit( a ) ) == 0 )
            continue;
        std::vector< std::size_t > next;
        next.reserve( codes.size() * _alphabets[ a ].size() );
        for ( auto c : codes )
            for ( std::size_t x = 0; x < _alphabets[ a ].size(); ++x )
                next.push_back( c + x * _strides[ a ] );
        codes = std::move( next );
    }
    return codes;
}

namespace
{

std::string describe_vector( const Cgm& m, std::size_t code )
{
    const auto v = m.decode( code );
    std::string out;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
    {
        if ( a > 0 )
            out += ' ';
        out += m.alphabet( a )[ v[ a ] ];
    }
    return out;
}

} // namespace

std::vector< std::string > validate_cgm( const Cgm& m )
{
    std::vector< std::string > defects;
    if ( m.agent_count() == 0 )
        defects.emplace_back( "no agents declared" );
    if ( m.state_count() == 0 )
        defects.emplace_back( "no states declared" );

    auto duplicates = [ & ]( const std::vector< std::string >& names, const char* what ) {
        std::vector< std::string > sorted = names;
        std::sort( sorted.begin(), sorted.end() );
        for ( std::size_t k = 1; k < sorted.size(); ++k )
            if ( sorted[ k ] == sorted[ k - 1 ] && ( k < 2 || sorted[ k - 2 ] != sorted[ k ] ) )
                defects.push_back( std::string( "duplicate " ) + what + " '" + sorted[ k ] + "'" );
    };
    duplicates( m.agents(), "agent" );
    duplicates( m.states(), "state" );

    std::map< std::string, AgentId > owner;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
    {
        if ( m.alphabet( a ).empty() )
            defects.push_back( "empty alphabet for agent '" + m.agents()[ a ] + "'" );
        duplicates( m.alphabet( a ), "action" );
        for ( const auto& act : m.alphabet( a ) )
        {
            auto [ it, fresh ] = owner.emplace( act, a );
            if ( !fresh && it->second != a )
                defects.push_back( "alphabets not disjoint: action '" + act + "' declared by agents '" +
                                   m.agents()[ it->second ] + "' and '" + m.agents()[ a ] + "'" );
        }
    }

    bool alphabets_ok = true;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
        alphabets_ok = alphabets_ok && !m.alphabet( a ).empty();
    if ( !alphabets_ok )
        return defects;

    for ( StateId s = 0; s < m.state_count(); ++s )
        for ( std::size_t code = 0; code < m.vector_count(); ++code )
        {
            const auto t = m.target( s, code );
            if ( t == no_state )
                defects.push_back( "missing transition at (" + m.states()[ s ] + ", " + describe_vector( m, code ) +
                                   ")" );
            else if ( t >= m.state_count() )
                defects.push_back( "transition at (" + m.states()[ s ] + ", " + describe_vector( m, code ) +
                                   ") targets an undeclared state" );
        }
    return defects;
}

StateSet successors( const Cgm& m, StateId w, const ActionVector& partial )
{
    if ( w >= m.state_count() )
        throw ModelError( "unknown state index " + std::to_string( w ) );
    if ( partial.size() != m.agent_count() )
        throw ModelError( "action vector does not match the agent set" );
    std::size_t base = 0;
    for ( AgentId a = 0; a < m.agent_count(); ++a )
        if ( partial.assigned( a ) )
        {
            if ( partial[ a ] >= m.alphabet_size( a ) )
                throw ModelError( "unknown action for agent '" + m.agents()[ a ] + "'" );
            base += partial[ a ] * m.stride( a );
        }
    StateSet out{ m.state_count() };
    for ( auto c : m.partial_codes( m.all() & ~partial.domain() ) )
        out.insert( m.target( w, base + c ) );
    return out;
}

StateSet pre( const Cgm& m, AgentMask coalition, const StateSet& target )
{
    const auto own = m.partial_codes( coalition );
    const auto rest = m.partial_codes( m.all() & ~coalition );
    StateSet out{ m.state_count() };
    for ( StateId w = 0; w < m.state_count(); ++w )
    {
        const bool forced = std::any_of( own.begin(), own.end(), [ & ]( std::size_t c ) {
            return std::all_of( rest.begin(), rest.end(),
                                [ & ]( std::size_t r ) { return target.contains( m.target( w, c + r ) ); } );
        } );
        if ( forced )
            out.insert( w );
    }
    return out;
}

StateSet dual_pre( const Cgm& m, AgentMask coalition, const StateSet& target )
{
    const auto own = m.partial_codes( coalition );
    const auto rest = m.partial_codes( m.all() & ~coalition );
    StateSet out{ m.state_count() };
    for ( StateId w = 0; w < m.state_count(); ++w )
    {
        const bool unavoidable = std::all_of( own.begin(), own.end(), [ & ]( std::size_t c ) {
            return std::any_of( rest.begin(), rest.end(),
                                [ & ]( std::size_t r ) { return target.contains( m.target( w, c + r ) ); } );
        } );
        if ( unavoidable )
            out.insert( w );
    }
    return out;
}

} // namespace atlr
