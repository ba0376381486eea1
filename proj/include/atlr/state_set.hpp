#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace atlr
{

using StateId = std::size_t;

// Dense subset of {0, ..., universe-1}.
class StateSet
{
    std::size_t _universe = 0;
    std::vector< std::uint64_t > _words;

    void trim();

public:
    StateSet() = default;
    explicit StateSet( std::size_t universe );

    static StateSet full( std::size_t universe );
    static StateSet singleton( std::size_t universe, StateId s );

    [[nodiscard]] std::size_t universe() const { return _universe; }
    [[nodiscard]] bool contains( StateId s ) const;
    void insert( StateId s );
    void erase( StateId s );

    [[nodiscard]] bool empty() const;
    [[nodiscard]] std::size_t count() const;
    [[nodiscard]] bool subset_of( const StateSet& other ) const;
    [[nodiscard]] bool intersects( const StateSet& other ) const;

    [[nodiscard]] StateSet complement() const;
    StateSet& operator&=( const StateSet& other );
    StateSet& operator|=( const StateSet& other );
    StateSet& operator-=( const StateSet& other );

    [[nodiscard]] std::vector< StateId > members() const;

    template < typename F >
    void for_each( F&& f ) const
    {
        for ( std::size_t w = 0; w < _words.size(); ++w )
        {
            auto bits = _words[ w ];
            while ( bits != 0 )
            {
                const auto low = static_cast< std::size_t >( __builtin_ctzll( bits ) );
                f( static_cast< StateId >( w * 64 + low ) );
                bits &= bits - 1;
            }
        }
    }

    friend bool operator==( const StateSet&, const StateSet& ) = default;
    friend bool operator<( const StateSet& a, const StateSet& b );
};

inline StateSet operator&( StateSet a, const StateSet& b ) { return a &= b; }
inline StateSet operator|( StateSet a, const StateSet& b ) { return a |= b; }
inline StateSet operator-( StateSet a, const StateSet& b ) { return a -= b; }

} // namespace atlr
