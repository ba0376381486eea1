#include "atlr/errors.hpp"
#include "atlr/model_io.hpp"
#include "support/corpus.hpp"

#include <doctest.h>

#include <algorithm>

using namespace atlr;
using atlr::testing::lock_model;

namespace
{

const char* lock_text = R"(# two-state lock
agents: 1 2
actions 1: u n
actions 2: w
states: locked unlocked
label unlocked: unlocked_p
trans locked: u w -> unlocked
trans locked: n w -> locked
trans unlocked: u w -> unlocked
trans unlocked: n w -> unlocked   # stays open
)";

std::string error_of( const std::string& text )
{
    try
    {
        (void)parse_model( text );
    }
    catch ( const InputError& e )
    {
        return e.what();
    }
    return "";
}

std::string replace( std::string text, const std::string& from, const std::string& to )
{
    const auto at = text.find( from );
    REQUIRE( at != std::string::npos );
    return text.replace( at, from.size(), to );
}

bool mentions( const std::vector< std::string >& defects, const std::string& text )
{
    return std::any_of( defects.begin(), defects.end(),
                        [ & ]( const std::string& d ) { return d.find( text ) != std::string::npos; } );
}

Homomorphism xor_hom()
{
    return Homomorphism{ "1", { "a", "b" }, { { "a0", "a1" }, { "b0", "b1" } }, { 1, 0, 0, 1 } };
}

} // namespace

TEST_CASE( "parse the lock model" )
{
    CHECK( parse_model( lock_text ) == lock_model() );
    // Label lines may be omitted and transition rows may come in any order.
    const auto shuffled = R"(agents: 1 2
actions 1: u n
actions 2: w
states: locked unlocked
trans unlocked: n w -> unlocked
trans locked: n w -> locked
trans unlocked: u w -> unlocked
trans locked: u w -> unlocked
label unlocked: unlocked_p
)";
    CHECK( parse_model( shuffled ) == lock_model() );
}

TEST_CASE( "write and reparse" )
{
    CHECK( parse_model( write_model( lock_model() ) ) == lock_model() );
    for ( const auto& m : atlr::testing::random_models( 6, 50, 4, 3, 3 ) )
    {
        const auto text = write_model( m );
        CHECK( parse_model( text ) == m );
        CHECK( write_model( parse_model( text ) ) == text );
    }
}

TEST_CASE( "diagnostics carry line and column" )
{
    CHECK( error_of( replace( lock_text, "trans locked: n w -> locked", "trans locked: x w -> locked" ) ) ==
           "8:15: 'x' is not an action of agent '1'" );
    CHECK( error_of( replace( lock_text, "trans locked: n w -> locked", "trans locked: u w -> locked" ) ) ==
           "8:1: duplicate transition row" );
    CHECK( error_of( replace( lock_text, "trans unlocked: n w -> unlocked   # stays open\n", "" ) ) ==
           "10:1: missing transition at (unlocked, n w)" );
    CHECK( error_of( replace( lock_text, "-> unlocked\ntrans locked", "-> nowhere\ntrans locked" ) ) ==
           "7:22: unknown state 'nowhere'" );
    CHECK( error_of( replace( lock_text, "trans locked: n w", "trans locked: n" ) ).starts_with( "8:17: expected 2 actions" ) );
    CHECK( error_of( replace( lock_text, "agents: 1 2", "agents 1 2" ) ) == "2:8: expected ':'" );
    CHECK( error_of( replace( lock_text, "agents: 1 2", "agentz: 1 2" ) ).starts_with( "2:1: unknown directive" ) );
    CHECK( error_of( replace( lock_text, "actions 2: w", "actions 2: u" ) )==
           "2:1: alphabets not disjoint: action 'u' declared by agents '1' and '2'" );
    CHECK( error_of( replace( lock_text, "actions 1: u n", "actions 1: u u" ) ).find( "duplicate action 'u'" ) !=
           std::string::npos );
    CHECK( error_of( replace( lock_text, "states: locked unlocked", "states: locked locked" ) )
               .find( "duplicate state 'locked'" ) != std::string::npos );
    CHECK( error_of( replace( lock_text, "actions 2: w\n", "" ) ).find( "missing 'actions 2:'" ) != std::string::npos );
    CHECK( error_of( "agents: 1\nagents: 2\n" ).starts_with( "2:1: agents declared twice" ) );
    CHECK( error_of( "agents: 1\nactions 1: a\nstates: s\ntrans s: a -> s extra\n" ).starts_with( "4:17: unexpected token" ) );
    CHECK( error_of( "agents: 1\nactions 1: a\nstates: s\ntrans s: a -> s\nstates: t\n" ).find( "twice" ) !=
           std::string::npos );
    CHECK( error_of( "" ).find( "missing 'agents:'" ) != std::string::npos );
}

TEST_CASE( "witness round trip" )
{
    const auto base = lock_model();
    const auto h = xor_hom();
    const auto text = write_witness( base, { h }, { "witness for chain 1", "body: <<a,b>> X unlocked_p" } );
    CHECK( text.starts_with( "# witness for chain 1\n" ) );
    const auto w = parse_witness( base, text );
    CHECK( w.homs == std::vector< Homomorphism >{ h } );
    CHECK( w.model == apply_hom( base, h ).derived );
    CHECK( verify_witness( base, w ).empty() );
    CHECK( write_witness( base, w.homs, { "witness for chain 1", "body: <<a,b>> X unlocked_p" } ) == text );

    const Homomorphism second{ "a", { "c", "d" }, { { "c0" }, { "d0", "d1" } }, { 0, 1 } };
    const auto chained = write_witness( base, { h, second } );
    const auto cw = parse_witness( base, chained );
    REQUIRE( cw.homs.size() == 2 );
    CHECK( cw.homs[ 1 ] == second );
    CHECK( verify_witness( base, cw ).empty() );
}

TEST_CASE( "tampered witnesses are rejected" )
{
    const auto base = lock_model();
    const auto text = write_witness( base, { xor_hom() } );

    auto w = parse_witness( base, text );
    w.model.set_transition( 0, 0, 1 );
    CHECK( mentions( verify_witness( base, w ), "link 1: transition mismatch at (locked" ) );

    const auto bad_map = replace( text, "map a1 b1 -> n", "map a1 b1 -> u" );
    const auto bw = parse_witness( base, bad_map );
    CHECK_FALSE( verify_witness( base, bw ).empty() );

    auto all_u = replace( replace( text, "map a0 b0 -> n", "map a0 b0 -> u" ), "map a1 b1 -> n", "map a1 b1 -> u" );
    CHECK_THROWS_AS( (void)parse_witness( base, all_u ), InputError );

    CHECK_THROWS_AS( (void)parse_witness( base, replace( text, "map a0 b0 -> n", "map a0 b0 -> z" ) ), InputError );
    CHECK_THROWS_AS( (void)parse_witness( base, replace( text, "map a0 b0 -> n\n", "" ) ), InputError );
    CHECK_THROWS_AS( (void)parse_witness( base, replace( text, "hom 1", "hom 7" ) ), InputError );
}
