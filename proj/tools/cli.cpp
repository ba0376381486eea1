#include "cli.hpp"

#include "atlr/atl_checker.hpp"
#include "atlr/errors.hpp"
#include "atlr/flat_mc.hpp"
#include "atlr/formula.hpp"
#include "atlr/model_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace atlr::cli
{

namespace
{

std::string read_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw InputError( "cannot read '" + path + "'" );
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file( const std::string& path, const std::string& text )
{
    std::ofstream out( path, std::ios::binary );
    if ( !out || !( out << text ) )
        throw InputError( "cannot write '" + path + "'" );
}

// Prefixes the file name to positioned diagnostics.
template < typename F >
auto located( const std::string& path, F&& f )
{
    try
    {
        return f();
    }
    catch ( const InputError& e )
    {
        throw InputError( path + ":" + e.what() );
    }
}

std::string join( const std::vector< std::string >& v, const std::string& sep )
{
    std::string out;
    for ( std::size_t k = 0; k < v.size(); ++k )
        out += ( k ? sep : "" ) + v[ k ];
    return out;
}

std::string describe( const Homomorphism& h, const Cgm& before )
{
    const auto i = *before.agent_index( h.refined_agent );
    std::vector< std::string > sizes;
    for ( auto s : h.sizes() )
        sizes.push_back( std::to_string( s ) );
    std::vector< std::string > image;
    for ( auto a : h.map )
        image.push_back( before.alphabet( i )[ a ] );
    return "hom " + h.refined_agent + " -> {" + join( h.subagents, ", " ) + "}: sizes " + join( sizes, "x" ) +
           ", map " + join( image, " " );
}

struct CheckRequest
{
    std::string model_path;
    std::string formula;
    std::string formula_path;
    std::string state;
    std::optional< std::size_t > bound;
    std::size_t max_assignments = FlatOptions{}.max_assignments;
    std::size_t max_nodes = FlatOptions{}.max_nodes;
    std::size_t max_dnf = FlatOptions{}.max_dnf;
    std::string mode = "reduction";
    std::string witness_path;
};

struct VerifyRequest
{
    std::string model_path;
    std::string witness_path;
    std::string body;
    std::string state;
};

struct EmittedWitness
{
    std::vector< std::string > header;
    std::vector< Homomorphism > homs;
};

int run_check( const CheckRequest& req, std::ostream& out, std::ostream& err )
{
    const Cgm m = located( req.model_path, [ & ] { return parse_model( read_file( req.model_path ) ); } );
    const std::string text = req.formula_path.empty() ? req.formula : read_file( req.formula_path );
    const Formula f = located( req.formula_path.empty() ? std::string( "formula" ) : req.formula_path,
                               [ & ] { return parse_formula( text, m.agents() ); } );
    const auto classification = classify_flat( f );
    if ( !classification.flat )
        throw ModelError( "formula is not flat: " + to_string( classification.offending ) );

    std::vector< StateId > states;
    if ( req.state.empty() )
        for ( StateId s = 0; s < m.state_count(); ++s )
            states.push_back( s );
    else
    {
        auto s = m.state_index( req.state );
        if ( !s )
            throw ModelError( "unknown state '" + req.state + "'" );
        states.push_back( *s );
    }

    FlatOptions opts;
    opts.bound = req.bound;
    opts.max_assignments = req.max_assignments;
    opts.max_nodes = req.max_nodes;
    opts.max_dnf = req.max_dnf;
    const bool run_reduction = req.mode != "oracle";
    const bool run_oracle = req.mode != "reduction";

    out << "formula: " << to_string( f ) << "\n";
    out << "mode: " << req.mode << "\n";

    bool any_false = false;
    bool any_cap = false;
    bool any_discrepancy = false;
    std::map< std::pair< std::size_t, StateId >, EmittedWitness > witnesses;

    auto report = [ & ]( const std::string& label, const FlatResult& r ) {
        for ( const auto& c : r.chains )
        {
            out << "  " << label << "chain " << c.chain + 1 << " at " << m.states()[ c.state ] << ": ";
            if ( c.outcome.holds )
                out << "holds";
            else
                out << ( c.outcome.bounded ? "fails-up-to-bound" : "fails" );
            out << " (" << ( c.positive ? "positive" : "negative" ) << " occurrence)\n";
            Cgm cur = m;
            for ( const auto& h : c.outcome.witness )
            {
                out << "    " << describe( h, cur ) << "\n";
                cur = apply_hom( cur, h ).derived;
            }
        }
        if ( r.verdict == Verdict::ResourceExceeded )
            out << "  " << label << "reason: " << r.message << "\n";
    };

    auto collect = [ & ]( const FlatResult& r ) {
        for ( const auto& c : r.chains )
        {
            if ( !c.outcome.holds || witnesses.contains( { c.chain, c.state } ) )
                continue;
            const auto& chain = classification.chains[ c.chain ];
            EmittedWitness w;
            w.header.push_back( "witness for chain " + std::to_string( c.chain + 1 ) + " at state " +
                                m.states()[ c.state ] );
            w.header.push_back( "chain: " + to_string( chain.head ) );
            w.header.push_back( "body: " + to_string( chain.body ) );
            w.header.push_back( std::string( "occurrence: " ) + ( chain.positive ? "positive" : "negative" ) );
            w.homs = c.outcome.witness;
            witnesses.emplace( std::make_pair( c.chain, c.state ), std::move( w ) );
        }
    };

    for ( auto s : states )
    {
        const auto& name = m.states()[ s ];
        std::optional< FlatResult > red;
        std::optional< FlatResult > orc;
        const auto start = std::chrono::steady_clock::now();
        if ( run_reduction )
            red = check_flat( m, s, f, opts );
        if ( run_oracle )
        {
            auto o = opts;
            o.oracle = true;
            orc = check_flat( m, s, f, o );
        }
        const std::chrono::duration< double > elapsed = std::chrono::steady_clock::now() - start;

        const FlatResult& primary = red ? *red : *orc;
        out << "state " << name << ": " << to_string( primary.verdict );
        if ( red && orc )
        {
            out << " (oracle: " << to_string( orc->verdict ) << ")";
            const bool capped = red->verdict == Verdict::ResourceExceeded || orc->verdict == Verdict::ResourceExceeded;
            const bool oracle_approx = orc->verdict == Verdict::FalseUpToBound || orc->verdict == Verdict::TrueUpToBound;
            if ( !capped && !oracle_approx && truth_of( red->verdict ) != truth_of( orc->verdict ) )
            {
                out << " DISCREPANCY";
                any_discrepancy = true;
            }
        }
        out << "\n";
        if ( red )
            report( red && orc ? "reduction " : "", *red );
        if ( orc )
            report( red && orc ? "oracle " : "", *orc );
        err << "time " << name << ": " << std::fixed << std::setprecision( 3 ) << elapsed.count() << "s\n";

        if ( primary.verdict == Verdict::ResourceExceeded || ( orc && orc->verdict == Verdict::ResourceExceeded ) )
            any_cap = true;
        else if ( !truth_of( primary.verdict ) )
            any_false = true;
        collect( primary );
    }

    if ( !req.witness_path.empty() )
    {
        if ( witnesses.empty() )
            out << "witness: none\n";
        std::size_t k = 0;
        for ( const auto& [ key, w ] : witnesses )
        {
            const auto path = witnesses.size() == 1 ? req.witness_path : req.witness_path + "." + std::to_string( ++k );
            write_file( path, write_witness( m, w.homs, w.header ) );
            out << "witness: " << path << " (chain " << key.first + 1 << " at " << m.states()[ key.second ] << ")\n";
        }
    }

    if ( any_discrepancy )
        return discrepancy;
    if ( any_cap )
        return resource_cap;
    if ( any_false && states.size() == 1 )
        return semantic_false;
    return ok;
}

int run_verify( const VerifyRequest& req, std::ostream& out )
{
    const Cgm base = located( req.model_path, [ & ] { return parse_model( read_file( req.model_path ) ); } );
    const Witness w = located( req.witness_path, [ & ] { return parse_witness( base, read_file( req.witness_path ) ); } );
    auto defects = verify_witness( base, w );
    if ( !req.body.empty() )
    {
        const auto body = located( "body", [ & ] { return parse_formula( req.body, w.model.agents() ); } );
        if ( contains_split( body ) )
            throw ModelError( "body must be split-free" );
        std::vector< StateId > states;
        if ( req.state.empty() )
            for ( StateId s = 0; s < w.model.state_count(); ++s )
                states.push_back( s );
        else if ( auto s = w.model.state_index( req.state ) )
            states.push_back( *s );
        else
            throw ModelError( "unknown state '" + req.state + "'" );
        if ( defects.empty() )
        {
            const auto holds = check_atl( w.model, body );
            for ( auto s : states )
                if ( !holds.contains( s ) )
                    defects.push_back( "body does not hold at " + w.model.states()[ s ] );
        }
    }
    for ( const auto& d : defects )
        out << "defect: " << d << "\n";
    out << ( defects.empty() ? "witness ok" : "witness rejected" ) << "\n";
    return defects.empty() ? ok : semantic_false;
}

} // namespace

int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err )
{
    CLI::App app{ "Model checker for ATL with agent refinement" };
    app.name( "atlr" );
    app.require_subcommand( 1 );

    CheckRequest check;
    auto* c = app.add_subcommand( "check", "Evaluate a flat formula on a model" );
    c->add_option( "--model", check.model_path, "Model file" )->required();
    auto* formula = c->add_option( "--formula", check.formula, "Formula text" );
    auto* formula_file = c->add_option( "--formula-file", check.formula_path, "File holding the formula" );
    formula->excludes( formula_file );
    c->add_option( "--state", check.state, "State to evaluate (default: all)" );
    c->add_option( "--bound", check.bound, "Actions per sub-agent (default: max(2, |Act_i|))" )
        ->check( CLI::PositiveNumber );
    c->add_option( "--max-assignments", check.max_assignments, "Assignment cap" )->check( CLI::PositiveNumber );
    c->add_option( "--max-nodes", check.max_nodes, "One-step search node cap" )->check( CLI::PositiveNumber );
    c->add_option( "--max-dnf", check.max_dnf, "DNF term cap" )->check( CLI::PositiveNumber );
    c->add_option( "--mode", check.mode, "reduction, oracle or both" )
        ->check( CLI::IsMember( { "reduction", "oracle", "both" } ) );
    c->add_option( "--witness", check.witness_path, "Write witnesses here" );

    VerifyRequest verify;
    auto* v = app.add_subcommand( "verify", "Re-check a witness file against its base model" );
    v->add_option( "--model", verify.model_path, "Base model file" )->required();
    v->add_option( "--witness", verify.witness_path, "Witness file" )->required();
    v->add_option( "--body", verify.body, "Chain body to confirm in the refined model" );
    v->add_option( "--state", verify.state, "State at which the body must hold (default: all)" );

    std::vector< std::string > reversed( args.rbegin(), args.rend() );
    try
    {
        app.parse( reversed );
    }
    catch ( const CLI::CallForHelp& )
    {
        out << app.help();
        return ok;
    }
    catch ( const CLI::ParseError& e )
    {
        err << "error: " << e.what() << "\n";
        return input_error;
    }

    try
    {
        if ( c->parsed() )
        {
            if ( check.formula.empty() && check.formula_path.empty() )
                throw InputError( "one of --formula and --formula-file is required" );
            return run_check( check, out, err );
        }
        return run_verify( verify, out );
    }
    catch ( const ResourceExceeded& e )
    {
        err << "error: " << e.what() << "\n";
        return resource_cap;
    }
    catch ( const Error& e )
    {
        err << "error: " << e.what() << "\n";
        return input_error;
    }
}

} // namespace atlr::cli
