#include "table_util.hpp"

#include <algorithm>
#include <numeric>

namespace atlr::detail
{

std::size_t product( const std::vector< std::size_t >& sizes )
{
    return std::accumulate( sizes.begin(), sizes.end(), std::size_t{ 1 }, std::multiplies<>() );
}

std::vector< std::size_t > strides_of( const std::vector< std::size_t >& sizes )
{
    std::vector< std::size_t > strides( sizes.size(), 1 );
    std::size_t acc = 1;
    for ( std::size_t k = sizes.size(); k-- > 0; )
    {
        strides[ k ] = acc;
        acc *= sizes[ k ];
    }
    return strides;
}

std::vector< std::size_t > partial_codes( const std::vector< std::size_t >& sizes, AgentMask mask )
{
    const auto strides = strides_of( sizes );
    std::vector< std::size_t > codes{ 0 };
    for ( std::size_t j = 0; j < sizes.size(); ++j )
    {
        if ( ( mask & agent_bit( j ) ) == 0 )
            continue;
        std::vector< std::size_t > next;
        next.reserve( codes.size() * sizes[ j ] );
        for ( auto c : codes )
            for ( std::size_t x = 0; x < sizes[ j ]; ++x )
                next.push_back( c + x * strides[ j ] );
        codes = std::move( next );
    }
    return codes;
}

std::vector< std::vector< std::size_t > > size_vectors( std::size_t count, std::size_t bound )
{
    std::vector< std::vector< std::size_t > > out;
    std::vector< std::size_t > cur( count, 1 );
    if ( bound == 0 )
        return out;
    while ( true )
    {
        out.push_back( cur );
        std::size_t k = count;
        while ( k > 0 && cur[ k - 1 ] == bound )
            cur[ --k ] = 1;
        if ( k == 0 )
            break;
        ++cur[ k - 1 ];
    }
    std::stable_sort( out.begin(), out.end(), []( const auto& a, const auto& b ) {
        const auto sa = std::accumulate( a.begin(), a.end(), std::size_t{ 0 } );
        const auto sb = std::accumulate( b.begin(), b.end(), std::size_t{ 0 } );
        return sa != sb ? sa < sb : a < b;
    } );
    return out;
}

namespace
{

// Returns true when some renaming yields a strictly smaller table.
bool find_smaller( const std::vector< ActionId >& table, const std::vector< std::size_t >& sizes,
                   const std::vector< std::size_t >& strides, std::vector< std::vector< std::size_t > >& perms,
                   std::size_t agent )
{
    if ( agent == sizes.size() )
    {
        for ( std::size_t cell = 0; cell < table.size(); ++cell )
        {
            std::size_t source = 0;
            std::size_t rest = cell;
            for ( std::size_t j = 0; j < sizes.size(); ++j )
            {
                source += perms[ j ][ rest / strides[ j ] ] * strides[ j ];
                rest %= strides[ j ];
            }
            if ( table[ source ] != table[ cell ] )
                return table[ source ] < table[ cell ];
        }
        return false;
    }
    auto& p = perms[ agent ];
    std::iota( p.begin(), p.end(), std::size_t{ 0 } );
    do
    {
        if ( find_smaller( table, sizes, strides, perms, agent + 1 ) )
            return true;
    } while ( std::next_permutation( p.begin(), p.end() ) );
    return false;
}

} // namespace

bool is_canonical( const std::vector< ActionId >& table, const std::vector< std::size_t >& sizes )
{
    if ( !rows_sorted( table, sizes ) )
        return false;
    const auto strides = strides_of( sizes );
    std::vector< std::vector< std::size_t > > perms;
    for ( auto s : sizes )
        perms.emplace_back( s );
    return !find_smaller( table, sizes, strides, perms, 0 );
}

bool rows_sorted( const std::vector< ActionId >& table, const std::vector< std::size_t >& sizes )
{
    const auto strides = strides_of( sizes );
    for ( std::size_t j = 0; j < sizes.size(); ++j )
    {
        for ( std::size_t x = 0; x + 1 < sizes[ j ]; ++x )
        {
            // Compare slice x against slice x+1, cell by cell in table order.
            for ( std::size_t cell = 0; cell < table.size(); ++cell )
            {
                if ( ( cell / strides[ j ] ) % sizes[ j ] != x )
                    continue;
                const auto a = table[ cell ];
                const auto b = table[ cell + strides[ j ] ];
                if ( a != b )
                {
                    if ( b < a )
                        return false;
                    break;
                }
            }
        }
    }
    return true;
}

std::vector< std::vector< std::string > > fresh_alphabets( const std::vector< std::string >& agents,
                                                           const std::vector< std::size_t >& sizes,
                                                           const std::set< std::string >& taken )
{
    std::vector< std::vector< std::string > > out;
    for ( std::size_t j = 0; j < agents.size(); ++j )
    {
        std::string prefix = agents[ j ] + ".";
        auto clashes = [ & ]( const std::string& p ) {
            for ( std::size_t k = 0; k < sizes[ j ]; ++k )
                if ( taken.contains( p + std::to_string( k ) ) )
                    return true;
            return false;
        };
        while ( clashes( prefix ) )
            prefix = agents[ j ] + "'" + prefix.substr( agents[ j ].size() );
        std::vector< std::string > names;
        for ( std::size_t k = 0; k < sizes[ j ]; ++k )
            names.push_back( prefix + std::to_string( k ) );
        out.push_back( std::move( names ) );
    }
    return out;
}

} // namespace atlr::detail
