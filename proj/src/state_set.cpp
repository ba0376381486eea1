#include "atlr/state_set.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace atlr
{

StateSet::StateSet( std::size_t universe )
    : _universe{ universe }, _words( ( universe + 63 ) / 64, 0 )
{}

StateSet StateSet::full( std::size_t universe )
{
    StateSet s{ universe };
    std::fill( s._words.begin(), s._words.end(), ~std::uint64_t{ 0 } );
    s.trim();
    return s;
}

StateSet StateSet::singleton( std::size_t universe, StateId s )
{
    StateSet r{ universe };
    r.insert( s );
    return r;
}

void StateSet::trim()
{
    if ( _universe % 64 != 0 && !_words.empty() )
        _words.back() &= ( std::uint64_t{ 1 } << ( _universe % 64 ) ) - 1;
}

bool StateSet::contains( StateId s ) const
{
    return s < _universe && ( ( _words[ s / 64 ] >> ( s % 64 ) ) & 1U ) != 0;
}

void StateSet::insert( StateId s )
{
    assert( s < _universe );
    _words[ s / 64 ] |= std::uint64_t{ 1 } << ( s % 64 );
}

void StateSet::erase( StateId s )
{
    assert( s < _universe );
    _words[ s / 64 ] &= ~( std::uint64_t{ 1 } << ( s % 64 ) );
}

bool StateSet::empty() const
{
    return std::all_of( _words.begin(), _words.end(), []( auto w ) { return w == 0; } );
}

std::size_t StateSet::count() const
{
    std::size_t n = 0;
    for ( auto w : _words )
        n += static_cast< std::size_t >( std::popcount( w ) );
    return n;
}

bool StateSet::subset_of( const StateSet& other ) const
{
    assert( _universe == other._universe );
    for ( std::size_t i = 0; i < _words.size(); ++i )
        if ( ( _words[ i ] & ~other._words[ i ] ) != 0 )
            return false;
    return true;
}

bool StateSet::intersects( const StateSet& other ) const
{
    assert( _universe == other._universe );
    for ( std::size_t i = 0; i < _words.size(); ++i )
        if ( ( _words[ i ] & other._words[ i ] ) != 0 )
            return true;
    return false;
}

StateSet StateSet::complement() const
{
    StateSet r = *this;
    for ( auto& w : r._words )
        w = ~w;
    r.trim();
    return r;
}

StateSet& StateSet::operator&=( const StateSet& other )
{
    assert( _universe == other._universe );
    for ( std::size_t i = 0; i < _words.size(); ++i )
        _words[ i ] &= other._words[ i ];
    return *this;
}

StateSet& StateSet::operator|=( const StateSet& other )
{
    assert( _universe == other._universe );
    for ( std::size_t i = 0; i < _words.size(); ++i )
        _words[ i ] |= other._words[ i ];
    return *this;
}

StateSet& StateSet::operator-=( const StateSet& other )
{
    assert( _universe == other._universe );
    for ( std::size_t i = 0; i < _words.size(); ++i )
        _words[ i ] &= ~other._words[ i ];
    return *this;
}

std::vector< StateId > StateSet::members() const
{
    std::vector< StateId > out;
    for_each( [ & ]( StateId s ) { out.push_back( s ); } );
    return out;
}

bool operator<( const StateSet& a, const StateSet& b )
{
    if ( a._universe != b._universe )
        return a._universe < b._universe;
    return std::lexicographical_compare( a._words.begin(), a._words.end(), b._words.begin(), b._words.end() );
}

} // namespace atlr
