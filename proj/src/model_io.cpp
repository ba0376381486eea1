#include "atlr/model_io.hpp"
#include "atlr/errors.hpp"
#include "table_util.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

namespace atlr
{

namespace
{

struct Token
{
    std::string text;
    std::size_t column = 0;
};

struct Line
{
    std::size_t number = 0;
    std::vector< Token > tokens;
};

bool is_punct( char c ) { return c == ':' || c == '{' || c == '}' || c == ','; }

std::vector< Line > split_lines( std::string_view text )
{
    std::vector< Line > lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while ( start <= text.size() )
    {
        auto end = text.find( '\n', start );
        if ( end == std::string_view::npos )
            end = text.size();
        auto raw = text.substr( start, end - start );
        ++number;
        if ( auto hash = raw.find( '#' ); hash != std::string_view::npos )
            raw = raw.substr( 0, hash );
        Line line{ number, {} };
        std::size_t k = 0;
        while ( k < raw.size() )
        {
            const char c = raw[ k ];
            if ( c == ' ' || c == '\t' || c == '\r' )
            {
                ++k;
                continue;
            }
            if ( is_punct( c ) )
            {
                line.tokens.push_back( { std::string( 1, c ), k + 1 } );
                ++k;
                continue;
            }
            if ( raw.substr( k, 2 ) == "->" )
            {
                line.tokens.push_back( { "->", k + 1 } );
                k += 2;
                continue;
            }
            const auto begin = k;
            while ( k < raw.size() && raw[ k ] != ' ' && raw[ k ] != '\t' && raw[ k ] != '\r' && !is_punct( raw[ k ] ) &&
                    raw.substr( k, 2 ) != "->" )
                ++k;
            line.tokens.push_back( { std::string( raw.substr( begin, k - begin ) ), begin + 1 } );
        }
        if ( !line.tokens.empty() )
            lines.push_back( std::move( line ) );
        if ( end == text.size() )
            break;
        start = end + 1;
    }
    return lines;
}

[[noreturn]] void fail( const Line& line, std::size_t token, const std::string& message )
{
    const auto column = token < line.tokens.size() ? line.tokens[ token ].column
                                                   : ( line.tokens.empty() ? 1 : line.tokens.back().column + 1 );
    throw InputError( message, line.number, column );
}

// Names after a header, up to the end of the line.
std::vector< std::string > names_from( const Line& line, std::size_t first )
{
    std::vector< std::string > out;
    for ( std::size_t k = first; k < line.tokens.size(); ++k )
    {
        const auto& t = line.tokens[ k ].text;
        if ( t.size() == 1 && is_punct( t[ 0 ] ) )
            fail( line, k, "unexpected '" + t + "'" );
        if ( t == "->" )
            fail( line, k, "unexpected '->'" );
        out.push_back( t );
    }
    return out;
}

void expect( const Line& line, std::size_t k, const std::string& what )
{
    if ( k >= line.tokens.size() || line.tokens[ k ].text != what )
        fail( line, k, "expected '" + what + "'" );
}

class ModelReader
{
public:
    void feed( const Line& line )
    {
        const auto& head = line.tokens[ 0 ].text;
        if ( head == "agents" )
        {
            expect( line, 1, ":" );
            if ( _agents )
                fail( line, 0, "agents declared twice" );
            if ( _model )
                fail( line, 0, "agents declared after the model body" );
            _agents = names_from( line, 2 );
            _agents_line = line;
        }
        else if ( head == "actions" )
        {
            if ( !_agents )
                fail( line, 0, "actions declared before agents" );
            if ( _model )
                fail( line, 0, "actions declared after the model body" );
            if ( line.tokens.size() < 2 )
                fail( line, 1, "expected an agent name" );
            expect( line, 2, ":" );
            const auto& agent = line.tokens[ 1 ].text;
            auto it = std::find( _agents->begin(), _agents->end(), agent );
            if ( it == _agents->end() )
                fail( line, 1, "unknown agent '" + agent + "'" );
            if ( !_actions.emplace( agent, names_from( line, 3 ) ).second )
                fail( line, 1, "actions of agent '" + agent + "' declared twice" );
        }
        else if ( head == "states" )
        {
            expect( line, 1, ":" );
            if ( _states )
                fail( line, 0, "states declared twice" );
            if ( _model )
                fail( line, 0, "states declared after the model body" );
            _states = names_from( line, 2 );
        }
        else if ( head == "label" )
        {
            build( line );
            const auto s = state_at( line, 1 );
            expect( line, 2, ":" );
            for ( const auto& p : names_from( line, 3 ) )
                _model->add_label( s, p );
        }
        else if ( head == "trans" )
        {
            build( line );
            const auto s = state_at( line, 1 );
            expect( line, 2, ":" );
            const std::size_t n = _model->agent_count();
            ActionVector joint{ n };
            for ( AgentId a = 0; a < n; ++a )
            {
                const std::size_t k = 3 + a;
                if ( k >= line.tokens.size() || line.tokens[ k ].text == "->" )
                    fail( line, k,
                          "expected " + std::to_string( n ) + " actions, one per agent in declaration order" );
                auto act = _model->action_index( a, line.tokens[ k ].text );
                if ( !act )
                    fail( line, k,
                          "'" + line.tokens[ k ].text + "' is not an action of agent '" + _model->agents()[ a ] + "'" );
                joint.set( a, *act );
            }
            expect( line, 3 + n, "->" );
            const auto t = state_at( line, 4 + n );
            if ( line.tokens.size() > 5 + n )
                fail( line, 5 + n, "unexpected token after the target state" );
            const auto code = _model->encode( joint );
            if ( _model->target( s, code ) != no_state )
                fail( line, 0, "duplicate transition row" );
            _model->set_transition( s, code, t );
        }
        else
            fail( line, 0, "unknown directive '" + head + "'" );
        _last_line = line.number;
    }

    Cgm finish()
    {
        Line eof{ _last_line + 1, {} };
        build( eof );
        for ( StateId s = 0; s < _model->state_count(); ++s )
            for ( std::size_t code = 0; code < _model->vector_count(); ++code )
                if ( _model->target( s, code ) == no_state )
                {
                    const auto joint = _model->decode( code );
                    std::string vec;
                    for ( AgentId a = 0; a < _model->agent_count(); ++a )
                        vec += ( a ? " " : "" ) + _model->alphabet( a )[ joint[ a ] ];
                    throw InputError( "missing transition at (" + _model->states()[ s ] + ", " + vec + ")",
                                      _last_line + 1, 1 );
                }
        auto defects = validate_cgm( *_model );
        if ( !defects.empty() )
            throw InputError( defects.front(), _agents_line.number, 1 );
        return std::move( *_model );
    }

private:
    std::optional< std::vector< std::string > > _agents;
    std::map< std::string, std::vector< std::string > > _actions;
    std::optional< std::vector< std::string > > _states;
    std::optional< Cgm > _model;
    Line _agents_line;
    std::size_t _last_line = 0;

    void build( const Line& line )
    {
        if ( _model )
            return;
        if ( !_agents )
            fail( line, 0, "missing 'agents:' declaration" );
        if ( !_states )
            fail( line, 0, "missing 'states:' declaration" );
        std::vector< std::vector< std::string > > alphabets;
        for ( const auto& a : *_agents )
        {
            auto it = _actions.find( a );
            if ( it == _actions.end() )
                fail( line, 0, "missing 'actions " + a + ":' declaration" );
            alphabets.push_back( it->second );
        }
        // Name clashes must not reach the index maps.
        auto check = [ & ]( const std::vector< std::string >& names, const std::string& what ) {
            std::vector< std::string > sorted = names;
            std::sort( sorted.begin(), sorted.end() );
            auto dup = std::adjacent_find( sorted.begin(), sorted.end() );
            if ( dup != sorted.end() )
                throw InputError( "duplicate " + what + " '" + *dup + "'", _agents_line.number, 1 );
        };
        check( *_agents, "agent" );
        check( *_states, "state" );
        for ( const auto& a : alphabets )
            check( a, "action" );
        std::map< std::string, std::size_t > owner;
        for ( std::size_t a = 0; a < alphabets.size(); ++a )
            for ( const auto& act : alphabets[ a ] )
                if ( auto [ it, fresh ] = owner.emplace( act, a ); !fresh )
                    throw InputError( "alphabets not disjoint: action '" + act + "' declared by agents '" +
                                          ( *_agents )[ it->second ] + "' and '" + ( *_agents )[ a ] + "'",
                                      _agents_line.number, 1 );
        _model.emplace( *_agents, alphabets, *_states );
    }

    StateId state_at( const Line& line, std::size_t k ) const
    {
        if ( k >= line.tokens.size() )
            fail( line, k, "expected a state name" );
        auto s = _model->state_index( line.tokens[ k ].text );
        if ( !s )
            fail( line, k, "unknown state '" + line.tokens[ k ].text + "'" );
        return *s;
    }
};

std::string join( const std::vector< std::string >& names, const std::string& sep = " " )
{
    std::string out;
    for ( std::size_t k = 0; k < names.size(); ++k )
        out += ( k ? sep : "" ) + names[ k ];
    return out;
}

std::string line_of( const std::string& head, const std::vector< std::string >& names )
{
    return names.empty() ? head + "\n" : head + " " + join( names ) + "\n";
}

} // namespace

Cgm parse_model( std::string_view text )
{
    ModelReader reader;
    for ( const auto& line : split_lines( text ) )
        reader.feed( line );
    return reader.finish();
}

std::string write_model( const Cgm& m )
{
    std::string out = line_of( "agents:", m.agents() );
    for ( AgentId a = 0; a < m.agent_count(); ++a )
        out += line_of( "actions " + m.agents()[ a ] + ":", m.alphabet( a ) );
    out += line_of( "states:", m.states() );
    for ( StateId s = 0; s < m.state_count(); ++s )
    {
        std::vector< std::string > props;
        for ( std::size_t p = 0; p < m.propositions().size(); ++p )
            if ( m.labels()[ p ].contains( s ) )
                props.push_back( m.propositions()[ p ] );
        out += line_of( "label " + m.states()[ s ] + ":", props );
    }
    for ( StateId s = 0; s < m.state_count(); ++s )
        for ( std::size_t code = 0; code < m.vector_count(); ++code )
        {
            const auto joint = m.decode( code );
            std::vector< std::string > acts;
            for ( AgentId a = 0; a < m.agent_count(); ++a )
                acts.push_back( m.alphabet( a )[ joint[ a ] ] );
            const auto t = m.target( s, code );
            out += "trans " + m.states()[ s ] + ": " + join( acts ) + " -> " +
                   ( t == no_state ? std::string( "?" ) : m.states()[ t ] ) + "\n";
        }
    return out;
}

Witness parse_witness( const Cgm& base, std::string_view text )
{
    const auto lines = split_lines( text );
    auto first_hom = std::find_if( lines.begin(), lines.end(),
                                   []( const Line& l ) { return l.tokens.front().text == "hom"; } );
    ModelReader reader;
    for ( auto it = lines.begin(); it != first_hom; ++it )
    {
        if ( it->tokens.front().text == "map" )
            fail( *it, 0, "'map' outside a hom section" );
        reader.feed( *it );
    }
    Witness w{ reader.finish(), {} };
    if ( first_hom == lines.end() )
        return w;

    Cgm cur = base;
    for ( auto it = first_hom; it != lines.end(); )
    {
        const Line& head = *it;
        if ( head.tokens.front().text != "hom" )
            fail( head, 0, "expected 'hom'" );
        if ( head.tokens.size() < 2 )
            fail( head, 1, "expected the refined agent" );
        Homomorphism h;
        h.refined_agent = head.tokens[ 1 ].text;
        const auto i = cur.agent_index( h.refined_agent );
        if ( !i )
            fail( head, 1, "unknown agent '" + h.refined_agent + "'" );
        expect( head, 2, "->" );
        expect( head, 3, "{" );
        std::size_t k = 4;
        while ( true )
        {
            if ( k >= head.tokens.size() )
                fail( head, k, "expected a sub-agent name" );
            h.subagents.push_back( head.tokens[ k ].text );
            ++k;
            if ( k < head.tokens.size() && head.tokens[ k ].text == "," )
            {
                ++k;
                continue;
            }
            break;
        }
        expect( head, k, "}" );
        expect( head, k + 1, ":" );
        if ( head.tokens.size() > k + 2 )
            fail( head, k + 2, "unexpected token" );
        const std::size_t g = h.subagents.size();
        h.sub_alphabets.assign( g, {} );

        std::vector< std::pair< const Line*, std::vector< std::string > > > rows;
        for ( ++it; it != lines.end() && it->tokens.front().text == "map"; ++it )
        {
            const Line& row = *it;
            if ( row.tokens.size() != g + 3 || row.tokens[ g + 1 ].text != "->" )
                fail( row, std::min( row.tokens.size(), g + 1 ),
                      "expected 'map' with " + std::to_string( g ) + " sub-agent actions, '->' and an action" );
            std::vector< std::string > cells;
            for ( std::size_t j = 0; j < g; ++j )
            {
                const auto& name = row.tokens[ 1 + j ].text;
                auto& alpha = h.sub_alphabets[ j ];
                if ( std::find( alpha.begin(), alpha.end(), name ) == alpha.end() )
                    alpha.push_back( name );
                cells.push_back( name );
            }
            cells.push_back( row.tokens[ g + 2 ].text );
            rows.emplace_back( &row, std::move( cells ) );
        }
        if ( rows.empty() )
            fail( head, 0, "hom section without map lines" );

        const auto sizes = h.sizes();
        const auto strides = detail::strides_of( sizes );
        h.map.assign( detail::product( sizes ), unassigned );
        for ( const auto& [ row, cells ] : rows )
        {
            std::size_t code = 0;
            for ( std::size_t j = 0; j < g; ++j )
            {
                const auto& alpha = h.sub_alphabets[ j ];
                code += static_cast< std::size_t >( std::find( alpha.begin(), alpha.end(), cells[ j ] ) -
                                                    alpha.begin() ) *
                        strides[ j ];
            }
            auto act = cur.action_index( *i, cells.back() );
            if ( !act )
                fail( *row, g + 2, "'" + cells.back() + "' is not an action of agent '" + h.refined_agent + "'" );
            if ( h.map[ code ] != unassigned )
                fail( *row, 0, "duplicate map row" );
            h.map[ code ] = *act;
        }
        if ( std::find( h.map.begin(), h.map.end(), unassigned ) != h.map.end() )
            fail( head, 0, "map is not total over the sub-agent alphabets" );
        try
        {
            cur = apply_hom( cur, h ).derived;
        }
        catch ( const ModelError& e )
        {
            fail( head, 0, e.what() );
        }
        w.homs.push_back( std::move( h ) );
    }
    return w;
}

std::string write_witness( const Cgm& base, const std::vector< Homomorphism >& homs,
                           const std::vector< std::string >& header )
{
    std::string out;
    for ( const auto& h : header )
        out += "# " + h + "\n";
    const auto steps = apply_chain( base, homs );
    out += write_model( steps.empty() ? base : steps.back().derived );
    for ( std::size_t k = 0; k < homs.size(); ++k )
    {
        const auto& h = homs[ k ];
        const Cgm& cur = k == 0 ? base : steps[ k - 1 ].derived;
        const auto i = *cur.agent_index( h.refined_agent );
        out += "hom " + h.refined_agent + " -> {" + join( h.subagents, ", " ) + "}:\n";
        const auto sizes = h.sizes();
        const auto strides = detail::strides_of( sizes );
        for ( std::size_t code = 0; code < h.map.size(); ++code )
        {
            out += "map";
            for ( std::size_t j = 0; j < sizes.size(); ++j )
                out += " " + h.sub_alphabets[ j ][ ( code / strides[ j ] ) % sizes[ j ] ];
            out += " -> " + cur.alphabet( i )[ h.map[ code ] ] + "\n";
        }
    }
    return out;
}

std::vector< std::string > verify_witness( const Cgm& base, const Witness& w )
{
    std::vector< std::string > defects;
    if ( w.homs.empty() )
    {
        defects.emplace_back( "witness has no hom sections" );
        return defects;
    }
    Cgm cur = base;
    for ( std::size_t k = 0; k < w.homs.size(); ++k )
    {
        const auto prefix = "link " + std::to_string( k + 1 ) + ": ";
        RefinedModel step;
        try
        {
            step = apply_hom( cur, w.homs[ k ] );
        }
        catch ( const ModelError& e )
        {
            defects.push_back( prefix + e.what() );
            return defects;
        }
        if ( k + 1 == w.homs.size() )
            step.derived = w.model;
        for ( const auto& d : validate_hom( cur, step ) )
            defects.push_back( prefix + d );
        if ( !defects.empty() )
            return defects;
        cur = std::move( step.derived );
    }
    return defects;
}

} // namespace atlr
