#include "cli.hpp"

#include "atlr/model_io.hpp"
#include "support/corpus.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fs = std::filesystem;

namespace
{

struct Run
{
    int code;
    std::string out;
    std::string err;
};

class Workspace
{
public:
    Workspace()
    {
        _dir = fs::temp_directory_path() / ( "atlr_cli_" + std::to_string( ::getpid() ) );
        fs::create_directories( _dir );
        write( "lock.cgm", atlr::write_model( atlr::testing::lock_model() ) );
    }
    ~Workspace() { fs::remove_all( _dir ); }

    std::string path( const std::string& name ) const { return ( _dir / name ).string(); }

    void write( const std::string& name, const std::string& text ) const
    {
        std::ofstream( path( name ) ) << text;
    }

    std::string read( const std::string& name ) const
    {
        std::ifstream in( path( name ) );
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

private:
    fs::path _dir;
};

Run atlr_run( const std::vector< std::string >& args )
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = atlr::cli::run( args, out, err );
    return { code, out.str(), err.str() };
}

const std::string xor_formula =
    "split 1 -> {a,b} . (~<<a>> X unlocked_p & ~<<b>> X unlocked_p & <<a,b>> X unlocked_p)";

} // namespace

TEST_CASE( "check: xor witness" )
{
    Workspace ws;
    const auto r = atlr_run( { "check", "--model", ws.path( "lock.cgm" ), "--state", "locked", "--formula",
                               xor_formula, "--witness", ws.path( "w.txt" ) } );
    CHECK( r.code == atlr::cli::ok );
    CHECK( r.out.find( "state locked: true\n" ) != std::string::npos );
    CHECK( r.out.find( "  chain 1 at locked: holds (positive occurrence)\n" ) != std::string::npos );
    CHECK( r.out.find( "    hom 1 -> {a, b}: sizes 2x2, map u n n u\n" ) != std::string::npos );
    CHECK( r.out.find( "witness: " + ws.path( "w.txt" ) + " (chain 1 at locked)" ) != std::string::npos );
    CHECK( r.err.find( "time locked: " ) != std::string::npos );
    CHECK( r.out.find( "time" ) == std::string::npos );

    const auto v = atlr_run( { "verify", "--model", ws.path( "lock.cgm" ), "--witness", ws.path( "w.txt" ), "--body",
                               "~<<a>> X unlocked_p & ~<<b>> X unlocked_p & <<a,b>> X unlocked_p", "--state",
                               "locked" } );
    CHECK( v.code == atlr::cli::ok );
    CHECK( v.out == "witness ok\n" );

    const auto wrong = atlr_run( { "verify", "--model", ws.path( "lock.cgm" ), "--witness", ws.path( "w.txt" ),
                                   "--body", "<<a>> X unlocked_p", "--state", "locked" } );
    CHECK( wrong.code == atlr::cli::semantic_false );
    CHECK( wrong.out == "defect: body does not hold at locked\nwitness rejected\n" );
}

TEST_CASE( "check: exit codes" )
{
    Workspace ws;
    const auto model = ws.path( "lock.cgm" );

    const auto f = atlr_run( { "check", "--model", model, "--state", "locked", "--formula",
                               "split 1 -> {a} . ~<<a>> X unlocked_p" } );
    CHECK( f.code == atlr::cli::semantic_false );
    CHECK( f.out.find( "state locked: false" ) != std::string::npos );

    // Over all states a false verdict is reported but not signalled.
    const auto all = atlr_run( { "check", "--model", model, "--formula", "unlocked_p" } );
    CHECK( all.code == atlr::cli::ok );
    CHECK( all.out.find( "state locked: false\nstate unlocked: true\n" ) != std::string::npos );

    const auto cap = atlr_run( { "check", "--model", model, "--state", "locked", "--formula", xor_formula,
                                 "--max-nodes", "2" } );
    CHECK( cap.code == atlr::cli::resource_cap );
    CHECK( cap.out.find( "resource-exceeded" ) != std::string::npos );

    const auto bounded = atlr_run( { "check", "--model", model, "--state", "locked", "--formula", xor_formula,
                                     "--bound", "1" } );
    CHECK( bounded.code == atlr::cli::semantic_false );
    CHECK( bounded.out.find( "false-up-to-bound" ) != std::string::npos );

    ws.write( "bad.cgm", "agents: 1\nactions 1: a\nstates: s\ntrans s: b -> s\n" );
    const auto bad = atlr_run( { "check", "--model", ws.path( "bad.cgm" ), "--formula", "true" } );
    CHECK( bad.code == atlr::cli::input_error );
    CHECK( bad.err == "error: " + ws.path( "bad.cgm" ) + ":4:10: 'b' is not an action of agent '1'\n" );

    const auto syntax = atlr_run( { "check", "--model", model, "--formula", "<<1>> X (p" } );
    CHECK( syntax.code == atlr::cli::input_error );
    CHECK( syntax.err.starts_with( "error: formula:1:" ) );

    const auto not_flat = atlr_run(
        { "check", "--model", model, "--formula", "split 1 -> {a} . <<a>> F split 2 -> {b} . true" } );
    CHECK( not_flat.code == atlr::cli::input_error );
    CHECK( not_flat.err.find( "not flat" ) != std::string::npos );

    CHECK( atlr_run( { "check", "--model", model, "--formula", "true", "--state", "ajar" } ).code ==
           atlr::cli::input_error );
    CHECK( atlr_run( { "check", "--model", model } ).code == atlr::cli::input_error );
    CHECK( atlr_run( { "check", "--model", model, "--formula", "true", "--mode", "fast" } ).code ==
           atlr::cli::input_error );
    CHECK( atlr_run( { "check", "--model", ws.path( "missing.cgm" ), "--formula", "true" } ).code ==
           atlr::cli::input_error );
    CHECK( atlr_run( {} ).code == atlr::cli::input_error );
}

TEST_CASE( "check: both modes agree" )
{
    Workspace ws;
    ws.write( "f.txt", xor_formula + "\n" );
    const auto r = atlr_run( { "check", "--model", ws.path( "lock.cgm" ), "--formula-file", ws.path( "f.txt" ),
                               "--mode", "both" } );
    CHECK( r.code == atlr::cli::ok );
    CHECK( r.out.find( "mode: both\n" ) != std::string::npos );
    CHECK( r.out.find( "state locked: true (oracle: true)\n" ) != std::string::npos );
    CHECK( r.out.find( "DISCREPANCY" ) == std::string::npos );
    CHECK( r.out.find( "  oracle chain 1 at locked: holds" ) != std::string::npos );
}

TEST_CASE( "check: several witnesses and deterministic output" )
{
    Workspace ws;
    const std::vector< std::string > args{ "check", "--model", ws.path( "lock.cgm" ), "--formula",
                                           "(split 1 -> {a,b} . <<a,b>> X unlocked_p) & dsplit 1 -> {c} . <<c>> X true",
                                           "--witness", ws.path( "w" ) };
    const auto first = atlr_run( args );
    const auto second = atlr_run( args );
    CHECK( first.code == atlr::cli::ok );
    CHECK( first.out == second.out );
    CHECK( fs::exists( ws.path( "w.1" ) ) );
    CHECK( fs::exists( ws.path( "w.2" ) ) );
    CHECK_FALSE( fs::exists( ws.path( "w" ) ) );
    CHECK( ws.read( "w.1" ).starts_with( "# witness for chain 1 at state locked\n" ) );
    for ( const auto* name : { "w.1", "w.2" } )
        CHECK( atlr_run( { "verify", "--model", ws.path( "lock.cgm" ), "--witness", ws.path( name ) } ).code ==
               atlr::cli::ok );
}

TEST_CASE( "verify: malformed witness" )
{
    Workspace ws;
    ws.write( "w.txt", "hom 1 -> {a}:\nmap x -> u\n" );
    const auto r = atlr_run( { "verify", "--model", ws.path( "lock.cgm" ), "--witness", ws.path( "w.txt" ) } );
    CHECK( r.code == atlr::cli::input_error );
    CHECK( r.err.find( ws.path( "w.txt" ) + ":" ) != std::string::npos );
}
