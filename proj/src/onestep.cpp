#include "atlr/onestep.hpp"
#include "atlr/errors.hpp"
#include "table_util.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace atlr
{

OneStepConstraint OneStepConstraint::top() { return {}; }

OneStepConstraint OneStepConstraint::bottom()
{
    OneStepConstraint c;
    c._kind = Kind::False;
    return c;
}

OneStepConstraint OneStepConstraint::can( OneStepAtom a )
{
    OneStepConstraint c;
    c._kind = Kind::Atom;
    c._atom = a;
    return c;
}

OneStepConstraint OneStepConstraint::negate( OneStepConstraint c )
{
    switch ( c._kind )
    {
    case Kind::True:
        return bottom();
    case Kind::False:
        return top();
    case Kind::Not:
        return std::move( c._children.front() );
    default:
        break;
    }
    OneStepConstraint n;
    n._kind = Kind::Not;
    n._children.push_back( std::move( c ) );
    return n;
}

namespace
{

// Shared by all_of/any_of: `unit` is the neutral constant, `zero` absorbs.
OneStepConstraint combine( std::vector< OneStepConstraint > cs, OneStepConstraint::Kind op,
                           OneStepConstraint::Kind unit, OneStepConstraint::Kind zero,
                           OneStepConstraint ( *make )( std::vector< OneStepConstraint > ) )
{
    std::vector< OneStepConstraint > flat;
    for ( auto& c : cs )
    {
        if ( c.kind() == zero )
            return c;
        if ( c.kind() == unit )
            continue;
        if ( c.kind() == op )
            flat.insert( flat.end(), c.children().begin(), c.children().end() );
        else
            flat.push_back( std::move( c ) );
    }
    std::sort( flat.begin(), flat.end() );
    flat.erase( std::unique( flat.begin(), flat.end() ), flat.end() );
    // x and ~x together
    for ( const auto& c : flat )
        if ( c.kind() == OneStepConstraint::Kind::Not &&
             std::binary_search( flat.begin(), flat.end(), c.children().front() ) )
            return zero == OneStepConstraint::Kind::False ? OneStepConstraint::bottom() : OneStepConstraint::top();
    if ( flat.empty() )
        return unit == OneStepConstraint::Kind::True ? OneStepConstraint::top() : OneStepConstraint::bottom();
    if ( flat.size() == 1 )
        return std::move( flat.front() );
    return make( std::move( flat ) );
}

} // namespace

OneStepConstraint OneStepConstraint::all_of( std::vector< OneStepConstraint > cs )
{
    return combine( std::move( cs ), Kind::And, Kind::True, Kind::False, []( std::vector< OneStepConstraint > v ) {
        OneStepConstraint c;
        c._kind = Kind::And;
        c._children = std::move( v );
        return c;
    } );
}

OneStepConstraint OneStepConstraint::any_of( std::vector< OneStepConstraint > cs )
{
    return combine( std::move( cs ), Kind::Or, Kind::False, Kind::True, []( std::vector< OneStepConstraint > v ) {
        OneStepConstraint c;
        c._kind = Kind::Or;
        c._children = std::move( v );
        return c;
    } );
}

bool operator<( const OneStepConstraint& a, const OneStepConstraint& b )
{
    if ( a._kind != b._kind )
        return a._kind < b._kind;
    if ( a._atom != b._atom )
        return a._atom < b._atom;
    return std::lexicographical_compare( a._children.begin(), a._children.end(), b._children.begin(),
                                         b._children.end() );
}

namespace
{

std::string bits( std::uint64_t mask )
{
    std::string out = "{";
    bool first = true;
    for ( std::size_t k = 0; k < 64; ++k )
        if ( ( mask >> k ) & 1U )
        {
            out += ( first ? "" : "," ) + std::to_string( k );
            first = false;
        }
    return out + "}";
}

void print( std::ostream& os, const OneStepConstraint& c )
{
    using K = OneStepConstraint::Kind;
    switch ( c.kind() )
    {
    case K::True:
        os << "true";
        return;
    case K::False:
        os << "false";
        return;
    case K::Atom:
        os << "Can" << c.atom().group << "(" << bits( c.atom().coalition ) << "," << bits( c.atom().actions ) << ")";
        return;
    case K::Not:
        os << "~";
        print( os, c.children().front() );
        return;
    case K::And:
    case K::Or:
        os << "(";
        for ( std::size_t k = 0; k < c.children().size(); ++k )
        {
            if ( k > 0 )
                os << ( c.kind() == K::And ? " & " : " | " );
            print( os, c.children()[ k ] );
        }
        os << ")";
        return;
    }
}

} // namespace

std::string to_string( const OneStepConstraint& c )
{
    std::ostringstream os;
    print( os, c );
    return os.str();
}

OneStepConstraint fold_constants( const OneStepConstraint& c, const std::vector< std::size_t >& subagent_counts,
                                  const std::vector< std::size_t >& alphabet_sizes )
{
    using K = OneStepConstraint::Kind;
    switch ( c.kind() )
    {
    case K::True:
    case K::False:
        return c;
    case K::Atom:
    {
        const auto& a = c.atom();
        const auto full = full_actions( alphabet_sizes.at( a.group ) );
        const auto actions = a.actions & full;
        if ( actions == 0 )
            return OneStepConstraint::bottom();
        if ( actions == full )
            return OneStepConstraint::top();
        if ( a.coalition == 0 )
            return OneStepConstraint::bottom();
        if ( a.coalition == all_agents( subagent_counts.at( a.group ) ) )
            return OneStepConstraint::top();
        return OneStepConstraint::can( { a.group, a.coalition, actions } );
    }
    case K::Not:
        return OneStepConstraint::negate( fold_constants( c.children().front(), subagent_counts, alphabet_sizes ) );
    case K::And:
    case K::Or:
    {
        std::vector< OneStepConstraint > kids;
        for ( const auto& k : c.children() )
            kids.push_back( fold_constants( k, subagent_counts, alphabet_sizes ) );
        return c.kind() == K::And ? OneStepConstraint::all_of( std::move( kids ) )
                                  : OneStepConstraint::any_of( std::move( kids ) );
    }
    }
    return c;
}

OneStepConstraint grand_constraint( std::size_t alphabet_size, std::size_t subagent_count, std::size_t group )
{
    std::vector< OneStepConstraint > atoms;
    for ( std::size_t a = 0; a < alphabet_size; ++a )
        atoms.push_back( OneStepConstraint::can( { group, all_agents( subagent_count ), ActionMask{ 1 } << a } ) );
    return OneStepConstraint::all_of( std::move( atoms ) );
}

bool OneStepGame::surjective() const
{
    ActionMask seen = 0;
    for ( auto a : step )
        seen |= ActionMask{ 1 } << a;
    return seen == full_actions( alphabet_size );
}

bool eval_atom( const OneStepGame& g, AgentMask coalition, ActionMask actions )
{
    const auto own = detail::partial_codes( g.sizes, coalition );
    const auto rest = detail::partial_codes( g.sizes, all_agents( g.sizes.size() ) & ~coalition );
    return std::any_of( own.begin(), own.end(), [ & ]( std::size_t c ) {
        return std::all_of( rest.begin(), rest.end(),
                            [ & ]( std::size_t r ) { return ( ( actions >> g.step[ c + r ] ) & 1U ) != 0; } );
    } );
}

bool eval_constraint( const OneStepGame& g, const OneStepConstraint& c )
{
    using K = OneStepConstraint::Kind;
    switch ( c.kind() )
    {
    case K::True:
        return true;
    case K::False:
        return false;
    case K::Atom:
        return eval_atom( g, c.atom().coalition, c.atom().actions );
    case K::Not:
        return !eval_constraint( g, c.children().front() );
    case K::And:
        return std::all_of( c.children().begin(), c.children().end(),
                            [ & ]( const auto& k ) { return eval_constraint( g, k ); } );
    case K::Or:
        return std::any_of( c.children().begin(), c.children().end(),
                            [ & ]( const auto& k ) { return eval_constraint( g, k ); } );
    }
    return false;
}

namespace
{

enum class Tri
{
    False,
    Unknown,
    True,
};

// Depth-first fill of the step table in cell order; the constraint is
// evaluated in three-valued logic on the filled prefix after every cell.
class TableSearch
{
    const OneStepConstraint& _c;
    std::size_t _n;
    std::size_t _max_nodes;
    std::size_t& _nodes;

    std::vector< std::size_t > _sizes;
    std::size_t _cells = 0;
    std::size_t _row = 0; // cells per action of the first sub-agent
    std::map< AgentMask, std::pair< std::vector< std::size_t >, std::vector< std::size_t > > > _codes;
    std::vector< ActionId > _table;
    std::size_t _filled = 0;
    std::vector< std::size_t > _hits;
    std::size_t _missing = 0;

public:
    TableSearch( const OneStepConstraint& c, std::size_t n, std::size_t max_nodes, std::size_t& nodes )
        : _c{ c }, _n{ n }, _max_nodes{ max_nodes }, _nodes{ nodes }
    {}

    bool run( const std::vector< std::size_t >& sizes )
    {
        _sizes = sizes;
        _cells = detail::product( sizes );
        _row = _cells / sizes.front();
        _codes.clear();
        collect( _c );
        _table.assign( _cells, 0 );
        _filled = 0;
        _hits.assign( _n, 0 );
        _missing = _n;
        if ( _cells < _n || eval( _c ) == Tri::False )
            return false;
        return fill( 0 );
    }

    [[nodiscard]] const std::vector< ActionId >& table() const { return _table; }

private:
    void collect( const OneStepConstraint& c )
    {
        if ( c.kind() == OneStepConstraint::Kind::Atom )
        {
            const auto mask = c.atom().coalition;
            if ( !_codes.contains( mask ) )
                _codes.emplace( mask,
                                std::make_pair( detail::partial_codes( _sizes, mask ),
                                                detail::partial_codes( _sizes, all_agents( _sizes.size() ) & ~mask ) ) );
        }
        for ( const auto& k : c.children() )
            collect( k );
    }

    Tri atom( const OneStepAtom& a ) const
    {
        const auto& [ own, rest ] = _codes.at( a.coalition );
        bool open = false;
        for ( auto c : own )
        {
            bool bad = false;
            bool unknown = false;
            for ( auto r : rest )
            {
                const auto cell = c + r;
                if ( cell >= _filled )
                {
                    unknown = true;
                    break; // cells grow with r
                }
                if ( ( ( a.actions >> _table[ cell ] ) & 1U ) == 0 )
                {
                    bad = true;
                    break;
                }
            }
            if ( !bad && !unknown )
                return Tri::True;
            open = open || !bad;
        }
        return open ? Tri::Unknown : Tri::False;
    }

    Tri eval( const OneStepConstraint& c ) const
    {
        using K = OneStepConstraint::Kind;
        switch ( c.kind() )
        {
        case K::True:
            return Tri::True;
        case K::False:
            return Tri::False;
        case K::Atom:
            return atom( c.atom() );
        case K::Not:
        {
            const auto v = eval( c.children().front() );
            return v == Tri::Unknown ? v : ( v == Tri::True ? Tri::False : Tri::True );
        }
        case K::And:
        {
            Tri acc = Tri::True;
            for ( const auto& k : c.children() )
            {
                const auto v = eval( k );
                if ( v == Tri::False )
                    return v;
                if ( v == Tri::Unknown )
                    acc = v;
            }
            return acc;
        }
        case K::Or:
        {
            Tri acc = Tri::False;
            for ( const auto& k : c.children() )
            {
                const auto v = eval( k );
                if ( v == Tri::True )
                    return v;
                if ( v == Tri::Unknown )
                    acc = v;
            }
            return acc;
        }
        }
        return Tri::Unknown;
    }

    // Rows of the first sub-agent are contiguous; a least table has them in
    // non-decreasing order.
    bool row_order_ok( std::size_t cell ) const
    {
        if ( ( cell + 1 ) % _row != 0 || cell + 1 < 2 * _row )
            return true;
        const auto start = cell + 1 - _row;
        return !std::lexicographical_compare( _table.begin() + static_cast< std::ptrdiff_t >( start ),
                                              _table.begin() + static_cast< std::ptrdiff_t >( cell + 1 ),
                                              _table.begin() + static_cast< std::ptrdiff_t >( start - _row ),
                                              _table.begin() + static_cast< std::ptrdiff_t >( start ) );
    }

    bool fill( std::size_t cell )
    {
        if ( cell == _cells )
            return _missing == 0 && eval( _c ) == Tri::True;
        for ( ActionId v = 0; v < _n; ++v )
        {
            const bool fresh = _hits[ v ] == 0;
            const std::size_t missing_after = _missing - ( fresh ? 1 : 0 );
            if ( missing_after > _cells - cell - 1 )
                continue;
            if ( ++_nodes > _max_nodes )
                throw ResourceExceeded( "sat_onestep: search node cap exceeded" );
            _table[ cell ] = v;
            ++_hits[ v ];
            _missing = missing_after;
            _filled = cell + 1;
            if ( row_order_ok( cell ) && eval( _c ) != Tri::False && fill( cell + 1 ) )
                return true;
            --_hits[ v ];
            _missing += fresh ? 1 : 0;
            _filled = cell;
        }
        return false;
    }
};

} // namespace

SatResult sat_onestep( const OneStepConstraint& c, std::size_t alphabet_size, std::size_t subagent_count,
                       std::size_t bound, std::size_t max_nodes )
{
    if ( alphabet_size == 0 || alphabet_size > 64 )
        throw ContractError( "sat_onestep: alphabet size must be in [1, 64]" );
    if ( subagent_count == 0 || subagent_count > max_agents )
        throw ContractError( "sat_onestep: sub-agent count must be in [1, 64]" );
    if ( bound == 0 )
        throw ContractError( "sat_onestep: bound must be positive" );

    std::vector< std::size_t > counts( 1, subagent_count );
    std::vector< std::size_t > alphabets( 1, alphabet_size );
    // Group indices are irrelevant here; fold as group 0.
    auto regroup = [ & ]( auto& self, const OneStepConstraint& k ) -> OneStepConstraint {
        using K = OneStepConstraint::Kind;
        switch ( k.kind() )
        {
        case K::Atom:
            if ( ( k.atom().coalition & ~all_agents( subagent_count ) ) != 0 ||
                 ( k.atom().actions & ~full_actions( alphabet_size ) ) != 0 )
                throw ContractError( "sat_onestep: atom " + to_string( k ) + " is outside the vocabulary" );
            return OneStepConstraint::can( { 0, k.atom().coalition, k.atom().actions } );
        case K::Not:
            return OneStepConstraint::negate( self( self, k.children().front() ) );
        case K::And:
        case K::Or:
        {
            std::vector< OneStepConstraint > kids;
            for ( const auto& x : k.children() )
                kids.push_back( self( self, x ) );
            return k.kind() == K::And ? OneStepConstraint::all_of( std::move( kids ) )
                                      : OneStepConstraint::any_of( std::move( kids ) );
        }
        default:
            return k;
        }
    };
    const auto folded = fold_constants( regroup( regroup, c ), counts, alphabets );

    SatResult result;
    if ( folded.is_false() )
        return result;
    TableSearch search{ folded, alphabet_size, max_nodes, result.nodes };
    for ( const auto& sizes : detail::size_vectors( subagent_count, bound ) )
    {
        if ( search.run( sizes ) )
        {
            result.sat = true;
            result.game = { alphabet_size, sizes, search.table() };
            return result;
        }
    }
    return result;
}

Homomorphism extract_hom( const OneStepGame& g, const std::string& refined, const std::vector< std::string >& subagents,
                          const std::set< std::string >& taken )
{
    if ( subagents.size() != g.sizes.size() )
        throw ContractError( "extract_hom: sub-agent count does not match the game" );
    Homomorphism h;
    h.refined_agent = refined;
    h.subagents = subagents;
    h.sub_alphabets = detail::fresh_alphabets( subagents, g.sizes, taken );
    h.map = g.step;
    return h;
}

} // namespace atlr
