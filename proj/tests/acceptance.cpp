// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "atlr/atl_checker.hpp"
#include "atlr/flat_mc.hpp"
#include "atlr/model_io.hpp"
#include "atlr/refinement.hpp"
#include "support/corpus.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace atlr;
using namespace atlr::testing;

namespace
{

// Wall-clock limits per criterion, in seconds.
constexpr double limit_atl = 300.0;
constexpr double limit_reduction = 600.0;
constexpr double limit_chain2 = 900.0;

// Minimum corpus sizes.
constexpr std::size_t min_two_state_models = 50;
constexpr std::size_t random_three_state_models = 200;
constexpr std::size_t min_reduction_instances = 500;
constexpr std::size_t k_axiom_instances = 200;
constexpr std::size_t chain2_instances = 100;
constexpr std::size_t oracle_bound = 2;
constexpr std::size_t bodies_per_state = 4;

struct Clock
{
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    [[nodiscard]] double seconds() const
    {
        return std::chrono::duration< double >( std::chrono::steady_clock::now() - start ).count();
    }
};

int failures = 0;

void verdict( int id, bool pass, const std::string& what, const std::string& detail )
{
    std::cout << ( pass ? "PASS" : "FAIL" ) << " [" << id << "] " << what << ": " << detail << std::endl;
    if ( !pass )
        ++failures;
}

std::string seconds( double s )
{
    std::ostringstream os;
    os.precision( 1 );
    os << std::fixed << s << "s";
    return os.str();
}

// Every chain witness produced by the suites, re-checked under criterion 8.
struct WitnessCase
{
    Cgm model;
    StateId state;
    Formula body;
    std::vector< Homomorphism > homs;
    std::string origin;
};
std::vector< WitnessCase > witnesses;

void collect( const Cgm& m, const Formula& f, const FlatResult& r, const std::string& origin )
{
    const auto chains = classify_flat( f ).chains;
    for ( const auto& c : r.chains )
        if ( c.outcome.holds )
            witnesses.push_back( { m, c.state, chains[ c.chain ].body, c.outcome.witness, origin } );
}

const std::vector< std::string > props{ "p", "q" };
const std::vector< std::string > gamma2{ "g1", "g2" };
const std::vector< std::string > gamma3{ "g1", "g2", "g3" };

std::vector< Cgm > three_state_corpus()
{
    return random_models( 2024, random_three_state_models, 3, 2, 2 );
}

// Models on which the refinement criteria quantify: the exhaustive
// two-state corpus, the random three-state corpus, and one-agent models.
std::vector< Cgm > refinement_corpus()
{
    auto out = exhaustive_two_state();
    for ( auto& m : three_state_corpus() )
        out.push_back( std::move( m ) );
    for ( auto& m : random_models( 77, 50, 3, 1, 2 ) )
        out.push_back( std::move( m ) );
    return out;
}

void criterion_atl()
{
    Clock clock;
    const auto two = exhaustive_two_state();
    const auto three = three_state_corpus();
    std::mt19937 rng{ 1 };
    std::vector< Formula > formulas;
    bool has_until = false;
    bool has_dual_until = false;
    while ( formulas.size() < 120 )
    {
        auto f = random_formula( rng, 3, { "1", "2" }, props );
        formulas.push_back( f );
        const auto text = to_string( f );
        has_until = has_until || text.find( "<<" ) != std::string::npos && text.find( " U " ) != std::string::npos;
        has_dual_until = has_dual_until || text.find( "[[" ) != std::string::npos;
    }
    std::size_t checks = 0;
    std::size_t agree = 0;
    for ( const auto* corpus : { &two, &three } )
        for ( const auto& m : *corpus )
            for ( const auto& f : formulas )
            {
                ++checks;
                agree += check_atl( m, f ) == brute_force_atl( m, f ) ? 1 : 0;
            }
    const double t = clock.seconds();
    const bool pass = two.size() >= min_two_state_models && three.size() == random_three_state_models &&
                      has_until && has_dual_until && agree == checks && t <= limit_atl;
    verdict( 1, pass, "check_atl equals brute_force_atl",
             std::to_string( agree ) + "/" + std::to_string( checks ) + " agree over " +
                 std::to_string( two.size() ) + " two-state and " + std::to_string( three.size() ) +
                 " three-state models x " + std::to_string( formulas.size() ) + " formulas in " + seconds( t ) +
                 " (limit " + seconds( limit_atl ) + ")" );
}

void criterion_reduction()
{
    Clock clock;
    std::mt19937 rng{ 2 };
    std::size_t instances = 0;
    std::size_t agree = 0;
    std::size_t holds = 0;
    std::string first_mismatch;
    for ( const auto& m : refinement_corpus() )
    {
        for ( StateId w = 0; w < m.state_count(); ++w )
            for ( std::size_t k = 0; k < bodies_per_state; ++k )
            {
                const auto& i = m.agents()[ rng() % m.agent_count() ];
                const auto vocabulary = refined_vocabulary( m, i, gamma2 );
                // The last body per state nests modalities and untils.
                const auto body = k + 1 < bodies_per_state ? random_onestep_body( rng, 1 + rng() % 3, vocabulary, props )
                                                           : random_formula( rng, 2, vocabulary, props );
                const auto f = split( i, gamma2, body );
                const auto r = check_flat( m, w, f );
                const auto oracle = brute_force_refine( m, w, { { i, gamma2 } }, body, oracle_bound );
                ++instances;
                if ( truth_of( r.verdict ) == oracle.holds && r.verdict != Verdict::ResourceExceeded )
                    ++agree;
                else if ( first_mismatch.empty() )
                    first_mismatch = "; first mismatch: " + to_string( f ) + " at " + m.states()[ w ];
                holds += oracle.holds ? 1 : 0;
                collect( m, f, r, "reduction" );
            }
    }
    const double t = clock.seconds();
    verdict( 2, instances >= min_reduction_instances && agree == instances && t <= limit_reduction,
             "check_flat agrees with brute_force_refine (bound 2)",
             std::to_string( agree ) + "/" + std::to_string( instances ) + " agree (" + std::to_string( holds ) +
                 " true) in " + seconds( t ) + " (limit " + seconds( limit_reduction ) + ")" + first_mismatch );
}

void criterion_power()
{
    std::size_t checks = 0;
    std::size_t pass = 0;
    for ( const auto& m : refinement_corpus() )
        for ( AgentId i = 0; i < m.agent_count(); ++i )
        {
            const auto& name = m.agents()[ i ];
            const auto homs = enumerate_homs( m, name, gamma2, oracle_bound );
            std::vector< RefinedModel > refined;
            for ( const auto& h : homs )
                refined.push_back( apply_hom( m, h ) );
            for ( std::uint64_t mask = 0; mask < ( std::uint64_t{ 1 } << m.agent_count() ); ++mask )
            {
                auto delta = subset_of( m.agents(), mask | agent_bit( i ) );
                auto others = subset_of( m.agents(), mask & ~agent_bit( i ) );
                auto refined_delta = others;
                refined_delta.insert( refined_delta.end(), gamma2.begin(), gamma2.end() );
                for ( const auto& p : props )
                {
                    const auto lhs = next( delta, atom( p ) );
                    const auto inner = next( refined_delta, atom( p ) );
                    const auto expected = check_atl( m, lhs );
                    // Route 1: every bounded homomorphism.
                    bool ok = true;
                    for ( const auto& r : refined )
                        ok = ok && check_atl( r.derived, inner ) == expected;
                    // Route 2: the reduction on the dual refinement.
                    const auto f = dual_split( name, gamma2, inner );
                    for ( StateId w = 0; w < m.state_count(); ++w )
                        ok = ok && truth_of( check_flat( m, w, f ).verdict ) == expected.contains( w );
                    ++checks;
                    pass += ok ? 1 : 0;
                }
            }
        }
    verdict( 3, checks > 0 && pass == checks, "power preservation <<D u {i}>>X p <-> [i->G]<<(D\\{i}) u G>>X p",
             std::to_string( pass ) + "/" + std::to_string( checks ) + " (model, agent, coalition, atom) cases hold" );
}

Formula denial_body( const std::string& p )
{
    Formula body = negation( next( {}, atom( p ) ) );
    for ( const auto& g : gamma2 )
        body = conjunction( body, negation( next( { g }, atom( p ) ) ) );
    return body;
}

Formula majority_body( const std::string& p )
{
    Formula body = negation( next( {}, atom( p ) ) );
    for ( std::uint64_t mask = 1; mask < 8; ++mask )
    {
        const auto delta = subset_of( gamma3, mask );
        const auto mod = next( delta, atom( p ) );
        body = conjunction( body, delta.size() >= 2 ? mod : negation( mod ) );
    }
    return body;
}

void criterion_denial_majority()
{
    std::size_t instances = 0;
    std::size_t pass = 0;
    std::string first_failure;
    for ( const auto& m : refinement_corpus() )
        for ( AgentId i = 0; i < m.agent_count(); ++i )
        {
            if ( m.alphabet_size( i ) != 2 )
                continue;
            const auto& name = m.agents()[ i ];
            for ( const auto& p : props )
            {
                const auto premise = check_atl( m, conjunction( negation( next( {}, atom( p ) ) ), next( { name }, atom( p ) ) ) );
                premise.for_each( [ & ]( StateId w ) {
                    bool ok = true;
                    for ( const auto& f : { split( name, gamma2, denial_body( p ) ), split( name, gamma3, majority_body( p ) ) } )
                    {
                        const auto r = check_flat( m, w, f );
                        collect( m, f, r, "denial/majority" );
                        bool witnessed = r.verdict == Verdict::True && r.chains.size() == 1 && r.chains[ 0 ].outcome.holds;
                        if ( witnessed )
                        {
                            const auto steps = apply_chain( m, r.chains[ 0 ].outcome.witness );
                            witnessed = validate_hom( m, steps.front() ).empty();
                        }
                        if ( !witnessed && first_failure.empty() )
                            first_failure = "; first failure: " + to_string( f ) + " at " + m.states()[ w ];
                        ok = ok && witnessed;
                    }
                    ++instances;
                    pass += ok ? 1 : 0;
                } );
            }
        }
    verdict( 4, instances > 0 && pass == instances, "denial and majority refinements exist",
             std::to_string( pass ) + "/" + std::to_string( instances ) + " premise instances confirmed" +
                 first_failure );
}

void criterion_kd()
{
    std::size_t serial = 0;
    std::size_t serial_ok = 0;
    const auto corpus = refinement_corpus();
    for ( const auto& m : corpus )
        for ( AgentId i = 0; i < m.agent_count(); ++i )
        {
            const auto f = split( m.agents()[ i ], gamma2, truth() );
            for ( StateId w = 0; w < m.state_count(); ++w )
            {
                const auto r = check_flat( m, w, f );
                ++serial;
                serial_ok += r.verdict == Verdict::True ? 1 : 0;
                if ( w == 0 )
                    collect( m, f, r, "seriality" );
            }
        }

    std::mt19937 rng{ 5 };
    std::size_t k_ok = 0;
    std::size_t k_oracle = 0;
    for ( std::size_t n = 0; n < k_axiom_instances; ++n )
    {
        const auto& m = corpus[ rng() % corpus.size() ];
        const auto& i = m.agents()[ rng() % m.agent_count() ];
        const auto vocabulary = refined_vocabulary( m, i, gamma2 );
        const auto phi = random_onestep_body( rng, 1 + rng() % 2, vocabulary, props );
        const auto psi = random_onestep_body( rng, 1 + rng() % 2, vocabulary, props );
        const auto box = [ & ]( const Formula& b ) { return dual_split( i, gamma2, b ); };
        const auto k = implies( box( implies( phi, psi ) ), implies( box( phi ), box( psi ) ) );
        const StateId w = rng() % m.state_count();
        auto opts = FlatOptions{};
        k_ok += truth_of( check_flat( m, w, k, opts ).verdict ) ? 1 : 0;
        opts.oracle = true;
        k_oracle += truth_of( check_flat( m, w, k, opts ).verdict ) ? 1 : 0;
    }
    verdict( 5, serial_ok == serial && k_ok == k_axiom_instances && k_oracle == k_axiom_instances,
             "KD: seriality and the K axiom",
             "<i->G>true at " + std::to_string( serial_ok ) + "/" + std::to_string( serial ) +
                 " (model, agent, state); K holds on " + std::to_string( k_ok ) + "/" +
                 std::to_string( k_axiom_instances ) + " (reduction) and " + std::to_string( k_oracle ) + "/" +
                 std::to_string( k_axiom_instances ) + " (oracle)" );
}

void criterion_until()
{
    std::mt19937 rng{ 6 };
    std::vector< Formula > formulas;
    while ( formulas.size() < 80 )
    {
        auto f = random_formula( rng, 3, { "1", "2" }, props );
        const auto text = to_string( f );
        if ( text.find( " U " ) != std::string::npos || text.find( " F " ) != std::string::npos ||
             text.find( " G " ) != std::string::npos )
            formulas.push_back( f );
    }
    std::size_t checks = 0;
    std::size_t agree = 0;
    auto run = [ & ]( const std::vector< Cgm >& corpus ) {
        for ( const auto& m : corpus )
            for ( const auto& f : formulas )
            {
                ++checks;
                agree += check_atl( m, f ) == check_atl( m, eliminate_until( f, m.state_count() ) ) ? 1 : 0;
            }
    };
    run( exhaustive_two_state() );
    run( three_state_corpus() );
    verdict( 6, checks > 0 && agree == checks, "until elimination preserves extensions",
             std::to_string( agree ) + "/" + std::to_string( checks ) + " (model, formula) pairs agree" );
}

void criterion_chain2()
{
    Clock clock;
    std::mt19937 rng{ 7 };
    const std::vector< std::string > g1{ "a", "b" };
    const std::vector< std::string > g2{ "c", "d" };
    auto models = random_models( 99, chain2_instances, 3, 2, 2 );
    for ( std::size_t k = 0; k < models.size(); k += 3 )
        models[ k ] = random_models( static_cast< std::uint32_t >( 1000 + k ), 1, 2 + k % 2, 3, 2 ).front();
    std::size_t agree = 0;
    std::size_t holds = 0;
    std::string first_mismatch;
    for ( const auto& m : models )
    {
        std::vector< std::string > vocabulary;
        for ( const auto& a : m.agents() )
            if ( a != "1" && a != "2" )
                vocabulary.push_back( a );
        vocabulary.insert( vocabulary.end(), g1.begin(), g1.end() );
        vocabulary.insert( vocabulary.end(), g2.begin(), g2.end() );
        const auto body = random_onestep_body( rng, 1 + rng() % 3, vocabulary, props );
        const auto f = split( "1", g1, split( "2", g2, body ) );
        const StateId w = rng() % m.state_count();
        const auto r = check_flat( m, w, f );
        const auto oracle = brute_force_refine( m, w, { { "1", g1 }, { "2", g2 } }, body, oracle_bound );
        if ( truth_of( r.verdict ) == oracle.holds && r.verdict != Verdict::ResourceExceeded )
            ++agree;
        else if ( first_mismatch.empty() )
            first_mismatch = "; first mismatch: " + to_string( f ) + " at " + m.states()[ w ];
        holds += oracle.holds ? 1 : 0;
        collect( m, f, r, "two-link chain" );
    }
    const double t = clock.seconds();
    verdict( 7, agree == models.size() && t <= limit_chain2, "two-link chains agree with two-level brute force",
             std::to_string( agree ) + "/" + std::to_string( models.size() ) + " agree (" + std::to_string( holds ) +
                 " true) in " + seconds( t ) + " (limit " + seconds( limit_chain2 ) + ")" + first_mismatch );
}

void criterion_witnesses()
{
    const auto dir = std::filesystem::temp_directory_path() / "atlr_acceptance";
    std::filesystem::create_directories( dir );
    const auto path = dir / "witness.cgm";
    std::size_t ok = 0;
    std::string first_failure;
    for ( const auto& w : witnesses )
    {
        bool good = false;
        try
        {
            {
                std::ofstream out( path );
                out << write_witness( w.model, w.homs, { "origin: " + w.origin } );
            }
            std::ifstream in( path );
            std::stringstream text;
            text << in.rdbuf();
            const auto loaded = parse_witness( w.model, text.str() );
            good = loaded.homs == w.homs && verify_witness( w.model, loaded ).empty() &&
                   check_atl( loaded.model, w.body ).contains( w.state );
        }
        catch ( const std::exception& e )
        {
            if ( first_failure.empty() )
                first_failure = std::string( "; " ) + e.what();
        }
        if ( !good && first_failure.empty() )
            first_failure = "; first failure from " + w.origin + ", body " + to_string( w.body );
        ok += good ? 1 : 0;
    }
    verdict( 8, !witnesses.empty() && ok == witnesses.size(), "witness files reload and re-verify",
             std::to_string( ok ) + "/" + std::to_string( witnesses.size() ) + " witnesses" + first_failure );
}

} // namespace

int main( int argc, char** argv )
{
    const std::vector< std::function< void() > > criteria{ criterion_atl,  criterion_reduction,
                                                           criterion_power, criterion_denial_majority,
                                                           criterion_kd,   criterion_until,
                                                           criterion_chain2, criterion_witnesses };
    // Optional argument: run a single criterion (1-based); 8 needs the
    // witnesses of the others, so it always runs after them.
    if ( argc > 1 )
    {
        const auto k = static_cast< std::size_t >( std::stoi( argv[ 1 ] ) );
        if ( k >= 1 && k <= 7 )
            criteria[ k - 1 ]();
        return failures;
    }
    for ( const auto& c : criteria )
        c();
    return failures;
}
