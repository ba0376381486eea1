#include "atlr/atl_checker.hpp"
#include "atlr/errors.hpp"
#include "atlr/formula.hpp"
#include "support/corpus.hpp"

#include <doctest.h>

#include <random>

using namespace atlr;

namespace
{

const std::vector< std::string > two_agents{ "1", "2" };

std::string parse_error( std::string_view text, const std::optional< std::vector< std::string > >& ambient = two_agents )
{
    try
    {
        (void)parse_formula( text, ambient );
    }
    catch ( const InputError& e )
    {
        return e.what();
    }
    return "";
}

Formula p = atom( "p" );
Formula q = atom( "q" );

// Greatest fixed point of X = target ∩ pre(A, X), computed directly.
StateSet always_by_iteration( const Cgm& m, AgentMask a, const StateSet& target )
{
    StateSet x = target;
    while ( true )
    {
        auto next = target & pre( m, a, x );
        if ( next == x )
            return x;
        x = next;
    }
}

} // namespace

TEST_CASE( "grammar productions" )
{
    auto f = parse_formula( "<<1>> X p", two_agents );
    CHECK( f->op == Op::Next );
    CHECK( f->agents == std::vector< std::string >{ "1" } );
    CHECK( equal( f->lhs, p ) );

    auto g = parse_formula( "split 1 -> {a,b} . (<<a,2>> X p)", two_agents );
    REQUIRE( g->op == Op::Split );
    CHECK( g->name == "1" );
    CHECK( g->agents == std::vector< std::string >{ "a", "b" } );
    CHECK( equal( g->lhs, next( { "a", "2" }, p ) ) );

    CHECK( equal( parse_formula( "<<>> X p" ), next( {}, p ) ) );
    CHECK( equal( parse_formula( "[[1]] p U q" ), dual_until( { "1" }, p, q ) ) );
    CHECK( equal( parse_formula( "[[1,2]] X p" ), dual_next( { "1", "2" }, p ) ) );
    CHECK( equal( parse_formula( "<<1>> G p" ), always( { "1" }, p ) ) );
    CHECK( equal( parse_formula( "[[1]] F p" ), dual_eventually( { "1" }, p ) ) );
    CHECK( equal( parse_formula( "dsplit 1 -> {a} . p" ), negation( split( "1", { "a" }, negation( p ) ) ) ) );
    CHECK( equal( parse_formula( "true" ), implies( falsum(), falsum() ) ) );
}

TEST_CASE( "precedence" )
{
    CHECK( equal( parse_formula( "p & q | p -> q" ), implies( disjunction( conjunction( p, q ), p ), q ) ) );
    CHECK( equal( parse_formula( "p -> q -> p" ), implies( p, implies( q, p ) ) ) );
    CHECK( equal( parse_formula( "~p & q" ), conjunction( negation( p ), q ) ) );
    CHECK( equal( parse_formula( "<<1>> X p & q" ), conjunction( next( { "1" }, p ), q ) ) );
    CHECK( equal( parse_formula( "split 1 -> {a} . p & q" ), split( "1", { "a" }, conjunction( p, q ) ) ) );
}

TEST_CASE( "parse errors carry positions" )
{
    CHECK( parse_error( "split 1 -> {1,b} . p" ).find( "sub-agent '1' clashes with ambient agent" ) !=
           std::string::npos );
    CHECK( parse_error( "split 1 -> {1,b} . p" ).starts_with( "1:13:" ) );
    CHECK( parse_error( "<<3>> X p" ).find( "unbound agent name '3'" ) != std::string::npos );
    CHECK( parse_error( "split 1 -> {a} . <<1>> X p" ).find( "refined away" ) != std::string::npos );
    CHECK( parse_error( "split 1 -> {a} . split 2 -> {a} . p" ).find( "shadows" ) != std::string::npos );
    CHECK( parse_error( "<<1,1>> X p" ).find( "duplicate agent" ) != std::string::npos );
    CHECK( parse_error( "p &\n  ) " ).starts_with( "2:3:" ) );
    CHECK( parse_error( "<<1>> p" ).find( "expected 'U'" ) != std::string::npos );
    CHECK( parse_error( "p $ q" ).find( "unexpected character" ) != std::string::npos );
    CHECK( parse_error( "(p" ).find( "')'" ) != std::string::npos );
    CHECK( parse_error( "p q" ).find( "after formula" ) != std::string::npos );
    CHECK( parse_error( "X" ).find( "keyword" ) != std::string::npos );
    // Unchecked parsing accepts any names.
    CHECK( parse_error( "<<3>> X p", std::nullopt ).empty() );
}

TEST_CASE( "round trip through the printer" )
{
    std::mt19937 rng{ 7 };
    const std::vector< std::string > props{ "p", "q" };
    for ( int k = 0; k < 3000; ++k )
    {
        auto f = atlr::testing::random_formula( rng, 4, { "1", "2", "3" }, props );
        switch ( rng() % 4 )
        {
        case 0:
            f = split( "1", { "a", "b" }, f );
            break;
        case 1:
            f = conjunction( dual_split( "2", { "c" }, f ), f );
            break;
        default:
            break;
        }
        const auto text = to_string( f );
        const auto back = parse_formula( text );
        INFO( text );
        CHECK( equal( back, f ) );
        CHECK( to_string( back ) == text );
    }
}

TEST_CASE( "derived forms agree semantically with their definitions" )
{
    auto models = atlr::testing::random_models( 5, 60, 3, 2, 2 );
    auto two = atlr::testing::exhaustive_two_state();
    models.insert( models.end(), two.begin(), two.begin() + 100 );
    for ( const auto& m : models )
    {
        const auto all = StateSet::full( m.state_count() );
        const auto ps = m.label_set( "p" );
        const auto qs = m.label_set( "q" );
        CHECK( check_atl( m, truth() ) == all );
        CHECK( check_atl( m, falsum() ).empty() );
        CHECK( check_atl( m, negation( p ) ) == ps.complement() );
        CHECK( check_atl( m, conjunction( p, q ) ) == ( ps & qs ) );
        CHECK( check_atl( m, disjunction( p, q ) ) == ( ps | qs ) );
        for ( AgentMask a = 0; a <= m.all(); ++a )
        {
            const auto coal = atlr::testing::subset_of( m.agents(), a );
            CHECK( check_atl( m, always( coal, p ) ) == always_by_iteration( m, a, ps ) );
            CHECK( check_atl( m, dual_next( coal, p ) ) == dual_pre( m, a, ps ) );
            CHECK( check_atl( m, eventually( coal, p ) ) == check_atl( m, until( coal, truth(), p ) ) );
            CHECK( check_atl( m, dual_always( coal, p ) ) ==
                   check_atl( m, negation( eventually( coal, negation( p ) ) ) ) );
            CHECK( check_atl( m, dual_eventually( coal, p ) ) ==
                   check_atl( m, dual_until( coal, truth(), p ) ) );
        }
    }
}

TEST_CASE( "flat classification" )
{
    const std::vector< std::string > agents{ "i", "j", "k", "l" };
    auto flat = parse_formula(
        "<<i>> F ((split i -> {g1,g2} . split j -> {d1} . <<g1,d1>> X p) & dsplit k -> {u1} . dsplit l -> {x1} . q)",
        agents );
    auto c = classify_flat( flat );
    REQUIRE( c.flat );
    REQUIRE( c.chains.size() == 2 );
    CHECK( c.chains[ 0 ].links.size() == 2 );
    CHECK( c.chains[ 0 ].positive );
    CHECK( c.chains[ 0 ].links[ 1 ] == ChainLink{ "j", { "d1" } } );
    CHECK( equal( c.chains[ 0 ].body, next( { "g1", "d1" }, p ) ) );
    CHECK( c.chains[ 1 ].links.size() == 2 );
    CHECK_FALSE( c.chains[ 1 ].positive );
    CHECK( equal( c.chains[ 1 ].body, negation( q ) ) );

    auto mixed = classify_flat( parse_formula( "dsplit i -> {g} . split j -> {d} . p", agents ) );
    CHECK_FALSE( mixed.flat );
    REQUIRE( mixed.offending );
    CHECK( mixed.offending->op == Op::Split );

    auto interrupted = classify_flat( parse_formula( "split i -> {g} . <<k>> F split j -> {d} . p", agents ) );
    CHECK_FALSE( interrupted.flat );
    REQUIRE( interrupted.offending );

    auto none = classify_flat( parse_formula( "<<i>> X p", agents ) );
    CHECK( none.flat );
    CHECK( none.chains.empty() );

    // Double negations between links keep the chain.
    auto nn = classify_flat( parse_formula( "~split i -> {g} . ~~split j -> {d} . p", agents ) );
    REQUIRE( nn.flat );
    REQUIRE( nn.chains.size() == 1 );
    CHECK( nn.chains[ 0 ].links.size() == 2 );
    CHECK_FALSE( nn.chains[ 0 ].positive );
}

TEST_CASE( "flat classification ignores negation normal form of split-free parts" )
{
    const std::vector< std::string > agents{ "1", "2" };
    auto a = classify_flat( parse_formula( "~(p & ~split 1 -> {a} . <<a>> X ~q)", agents ) );
    auto b = classify_flat( parse_formula( "~p | split 1 -> {a} . <<a>> X ~q", agents ) );
    REQUIRE( a.flat );
    REQUIRE( b.flat );
    REQUIRE( a.chains.size() == b.chains.size() );
    CHECK( a.chains[ 0 ].positive == b.chains[ 0 ].positive );
}

TEST_CASE( "free agents" )
{
    CHECK( free_agents( p ).empty() );
    CHECK( free_agents( next( { "1", "2" }, p ) ) == std::vector< std::string >{ "1", "2" } );
    CHECK( free_agents( split( "1", { "a", "b" }, next( { "a", "2" }, p ) ) ) ==
           std::vector< std::string >{ "1", "2" } );
    CHECK( free_agents( until( { "3" }, next( { "1" }, p ), q ) ) == std::vector< std::string >{ "1", "3" } );
}

TEST_CASE( "split-freeness and negated operands" )
{
    CHECK_FALSE( contains_split( parse_formula( "<<1>> F p" ) ) );
    CHECK( contains_split( parse_formula( "p | dsplit 1 -> {a} . p" ) ) );
    CHECK( equal( negated_operand( negation( p ) ), p ) );
    CHECK_FALSE( negated_operand( p ) );
}
