#include "atlr/formula.hpp"
#include "atlr/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace atlr
{

namespace
{

Formula make( Op op, std::string name, std::vector< std::string > agents, Formula lhs, Formula rhs )
{
    auto n = std::make_shared< Node >();
    n->op = op;
    n->name = std::move( name );
    n->agents = std::move( agents );
    n->lhs = std::move( lhs );
    n->rhs = std::move( rhs );
    return n;
}

} // namespace

Formula falsum() { return make( Op::False, {}, {}, nullptr, nullptr ); }
Formula truth() { return negation( falsum() ); }
Formula atom( std::string proposition ) { return make( Op::Atom, std::move( proposition ), {}, nullptr, nullptr ); }
Formula implies( Formula a, Formula b ) { return make( Op::Implies, {}, {}, std::move( a ), std::move( b ) ); }
Formula negation( Formula a ) { return implies( std::move( a ), falsum() ); }
Formula conjunction( Formula a, Formula b ) { return negation( implies( std::move( a ), negation( std::move( b ) ) ) ); }
Formula disjunction( Formula a, Formula b ) { return implies( negation( std::move( a ) ), std::move( b ) ); }

Formula next( std::vector< std::string > coalition, Formula a )
{
    return make( Op::Next, {}, std::move( coalition ), std::move( a ), nullptr );
}

Formula until( std::vector< std::string > coalition, Formula a, Formula b )
{
    return make( Op::Until, {}, std::move( coalition ), std::move( a ), std::move( b ) );
}

Formula dual_until( std::vector< std::string > coalition, Formula a, Formula b )
{
    return make( Op::DualUntil, {}, std::move( coalition ), std::move( a ), std::move( b ) );
}

Formula eventually( std::vector< std::string > coalition, Formula a )
{
    return until( std::move( coalition ), truth(), std::move( a ) );
}

Formula always( std::vector< std::string > coalition, Formula a )
{
    return negation( dual_until( std::move( coalition ), truth(), negation( std::move( a ) ) ) );
}

Formula dual_next( std::vector< std::string > coalition, Formula a )
{
    return negation( next( std::move( coalition ), negation( std::move( a ) ) ) );
}

Formula dual_eventually( std::vector< std::string > coalition, Formula a )
{
    return dual_until( std::move( coalition ), truth(), std::move( a ) );
}

Formula dual_always( std::vector< std::string > coalition, Formula a )
{
    return negation( until( std::move( coalition ), truth(), negation( std::move( a ) ) ) );
}

Formula split( std::string refined, std::vector< std::string > subagents, Formula body )
{
    return make( Op::Split, std::move( refined ), std::move( subagents ), std::move( body ), nullptr );
}

Formula dual_split( std::string refined, std::vector< std::string > subagents, Formula body )
{
    return negation( split( std::move( refined ), std::move( subagents ), negation( std::move( body ) ) ) );
}

Formula negated_operand( const Formula& f )
{
    if ( f && f->op == Op::Implies && f->rhs->op == Op::False )
        return f->lhs;
    return nullptr;
}

bool equal( const Formula& a, const Formula& b )
{
    if ( a == b )
        return true;
    if ( !a || !b )
        return false;
    if ( a->op != b->op || a->name != b->name || a->agents != b->agents )
        return false;
    return equal( a->lhs, b->lhs ) && equal( a->rhs, b->rhs );
}

bool contains_split( const Formula& f )
{
    if ( !f )
        return false;
    if ( f->op == Op::Split )
        return true;
    return contains_split( f->lhs ) || contains_split( f->rhs );
}

// ---------------------------------------------------------------------------
// Printing

namespace
{

enum Level
{
    level_implies = 0,
    level_or = 1,
    level_and = 2,
    level_unary = 3,
};

std::string join( const std::vector< std::string >& names )
{
    std::string out;
    for ( std::size_t k = 0; k < names.size(); ++k )
    {
        if ( k > 0 )
            out += ',';
        out += names[ k ];
    }
    return out;
}

// `tail` is true when nothing follows the printed text inside the enclosing
// expression; a split body extends as far right as possible, so a split that
// is not in tail position needs parentheses.
std::string print( const Formula& f, int level, bool tail );

std::string wrap( const std::string& s, bool parens ) { return parens ? "(" + s + ")" : s; }

std::string print_coalition( const Formula& f, bool tail )
{
    const std::string open = "<<" + join( f->agents ) + ">> ";
    if ( f->op == Op::Next )
        return open + "X " + print( f->lhs, level_unary, tail );
    const std::string lhs = print( f->lhs, level_unary, false );
    const std::string rhs = print( f->rhs, level_unary, tail );
    if ( f->op == Op::Until )
        return open + lhs + " U " + rhs;
    return "[[" + join( f->agents ) + "]] " + lhs + " U " + rhs;
}

std::string print( const Formula& f, int level, bool tail )
{
    switch ( f->op )
    {
    case Op::False:
        return "false";
    case Op::Atom:
        return f->name;
    case Op::Next:
    case Op::Until:
    case Op::DualUntil:
        return print_coalition( f, tail );
    case Op::Split:
    {
        const std::string body = "split " + f->name + " -> {" + join( f->agents ) + "} . " +
                                 print( f->lhs, level_implies, true );
        return wrap( body, !tail );
    }
    case Op::Implies:
        break;
    }

    if ( auto inner = negated_operand( f ) )
    {
        if ( auto conj_rhs = inner->op == Op::Implies ? negated_operand( inner->rhs ) : nullptr )
        {
            const bool parens = level > level_and;
            const std::string s = print( inner->lhs, level_and, false ) + " & " +
                                  print( conj_rhs, level_unary, tail || parens );
            return wrap( s, parens );
        }
        if ( inner->op == Op::False )
            return "true";
        return "~" + print( inner, level_unary, tail );
    }
    if ( auto disj_lhs = negated_operand( f->lhs ) )
    {
        const bool parens = level > level_or;
        const std::string s =
            print( disj_lhs, level_or, false ) + " | " + print( f->rhs, level_and, tail || parens );
        return wrap( s, parens );
    }
    const bool parens = level > level_implies;
    const std::string s =
        print( f->lhs, level_or, false ) + " -> " + print( f->rhs, level_implies, tail || parens );
    return wrap( s, parens );
}

} // namespace

std::string to_string( const Formula& f ) { return print( f, level_implies, true ); }

// ---------------------------------------------------------------------------
// Parsing

namespace
{

enum class Tok
{
    Ident,
    LParen,
    RParen,
    LAngle,   // <<
    RAngle,   // >>
    LBracket, // [[
    RBracket, // ]]
    LBrace,
    RBrace,
    Comma,
    Dot,
    Arrow,
    Or,
    And,
    Not,
    End,
};

struct Token
{
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

bool ident_char( char c ) { return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_' || c == '\''; }

std::vector< Token > tokenize( std::string_view text )
{
    std::vector< Token > out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto push = [ & ]( Tok k, std::size_t len ) {
        out.push_back( { k, std::string( text.substr( i, len ) ), line, col } );
        i += len;
        col += len;
    };
    while ( i < text.size() )
    {
        const char c = text[ i ];
        if ( c == '\n' )
        {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if ( std::isspace( static_cast< unsigned char >( c ) ) )
        {
            ++i;
            ++col;
            continue;
        }
        auto two = text.substr( i, 2 );
        if ( two == "<<" )
            push( Tok::LAngle, 2 );
        else if ( two == ">>" )
            push( Tok::RAngle, 2 );
        else if ( two == "[[" )
            push( Tok::LBracket, 2 );
        else if ( two == "]]" )
            push( Tok::RBracket, 2 );
        else if ( two == "->" )
            push( Tok::Arrow, 2 );
        else if ( c == '(' )
            push( Tok::LParen, 1 );
        else if ( c == ')' )
            push( Tok::RParen, 1 );
        else if ( c == '{' )
            push( Tok::LBrace, 1 );
        else if ( c == '}' )
            push( Tok::RBrace, 1 );
        else if ( c == ',' )
            push( Tok::Comma, 1 );
        else if ( c == '.' )
            push( Tok::Dot, 1 );
        else if ( c == '|' )
            push( Tok::Or, 1 );
        else if ( c == '&' )
            push( Tok::And, 1 );
        else if ( c == '~' )
            push( Tok::Not, 1 );
        else if ( ident_char( c ) )
        {
            std::size_t len = 1;
            while ( i + len < text.size() && ident_char( text[ i + len ] ) )
                ++len;
            push( Tok::Ident, len );
        }
        else
            throw InputError( std::string( "unexpected character '" ) + c + "'", line, col );
    }
    out.push_back( { Tok::End, "", line, col } );
    return out;
}

const std::set< std::string, std::less<> > keywords = { "false", "true", "X", "U", "F", "G", "split", "dsplit" };

class Parser
{
    std::vector< Token > _toks;
    std::size_t _pos = 0;
    bool _checked;
    // Agents usable in coalitions at the current point, plus every name bound
    // by an enclosing split and every agent refined away on the way down.
    std::vector< std::string > _in_scope;
    std::vector< std::string > _bound;
    std::vector< std::string > _refined_away;

public:
    Parser( std::string_view text, const std::optional< std::vector< std::string > >& ambient )
        : _toks{ tokenize( text ) }, _checked{ ambient.has_value() }
    {
        if ( ambient )
            _in_scope = *ambient;
    }

    Formula parse()
    {
        auto f = implication();
        if ( peek().kind != Tok::End )
            fail( "unexpected '" + peek().text + "' after formula" );
        return f;
    }

private:
    const Token& peek() const { return _toks[ _pos ]; }
    const Token& take() { return _toks[ _pos++ ]; }

    [[noreturn]] void fail( const std::string& msg ) const { fail_at( peek(), msg ); }
    [[noreturn]] static void fail_at( const Token& t, const std::string& msg )
    {
        throw InputError( msg, t.line, t.column );
    }

    bool is_keyword( std::string_view w ) const { return peek().kind == Tok::Ident && peek().text == w; }

    void expect( Tok k, const char* what )
    {
        if ( peek().kind != k )
            fail( std::string( "expected " ) + what + ( peek().kind == Tok::End ? " at end of input"
                                                                                  : ", found '" + peek().text + "'" ) );
        take();
    }

    std::string identifier( const char* what )
    {
        if ( peek().kind != Tok::Ident || keywords.contains( peek().text ) )
            fail( std::string( "expected " ) + what );
        return take().text;
    }

    std::vector< std::string > id_list( const char* what )
    {
        std::vector< std::string > ids;
        std::vector< const Token* > where;
        do
        {
            where.push_back( &peek() );
            ids.push_back( identifier( what ) );
        } while ( peek().kind == Tok::Comma && ( take(), true ) );
        for ( std::size_t k = 0; k < ids.size(); ++k )
            for ( std::size_t j = 0; j < k; ++j )
                if ( ids[ k ] == ids[ j ] )
                    fail_at( *where[ k ], "duplicate agent '" + ids[ k ] + "'" );
        return ids;
    }

    static bool has( const std::vector< std::string >& v, const std::string& x )
    {
        return std::find( v.begin(), v.end(), x ) != v.end();
    }

    void check_agent( const Token& at, const std::string& name ) const
    {
        if ( !_checked || has( _in_scope, name ) )
            return;
        if ( has( _refined_away, name ) )
            fail_at( at, "agent '" + name + "' is refined away in this scope" );
        fail_at( at, "unbound agent name '" + name + "'" );
    }

    std::vector< std::string > coalition( Tok close, const char* close_text )
    {
        take();
        std::vector< std::string > ids;
        if ( peek().kind != close )
        {
            const std::size_t start = _pos;
            ids = id_list( "agent name" );
            for ( std::size_t k = 0; k < ids.size(); ++k )
                check_agent( _toks[ start + 2 * k ], ids[ k ] );
        }
        expect( close, close_text );
        return ids;
    }

    Formula implication()
    {
        auto lhs = disjunct();
        if ( peek().kind == Tok::Arrow )
        {
            take();
            return implies( lhs, implication() );
        }
        return lhs;
    }

    Formula disjunct()
    {
        auto f = conjunct();
        while ( peek().kind == Tok::Or )
        {
            take();
            f = disjunction( f, conjunct() );
        }
        return f;
    }

    Formula conjunct()
    {
        auto f = unary();
        while ( peek().kind == Tok::And )
        {
            take();
            f = conjunction( f, unary() );
        }
        return f;
    }

    Formula temporal( std::vector< std::string > coal, bool dual )
    {
        if ( is_keyword( "X" ) )
        {
            take();
            auto a = unary();
            return dual ? dual_next( std::move( coal ), a ) : next( std::move( coal ), a );
        }
        if ( is_keyword( "F" ) )
        {
            take();
            auto a = unary();
            return dual ? dual_eventually( std::move( coal ), a ) : eventually( std::move( coal ), a );
        }
        if ( is_keyword( "G" ) )
        {
            take();
            auto a = unary();
            return dual ? dual_always( std::move( coal ), a ) : always( std::move( coal ), a );
        }
        auto a = unary();
        if ( !is_keyword( "U" ) )
            fail( "expected 'U', 'X', 'F' or 'G' after coalition" );
        take();
        auto b = unary();
        return dual ? dual_until( std::move( coal ), a, b ) : until( std::move( coal ), a, b );
    }

    Formula binder( bool dual )
    {
        take();
        const Token& refined_tok = peek();
        auto refined = identifier( "refined agent name" );
        check_agent( refined_tok, refined );
        expect( Tok::Arrow, "'->'" );
        expect( Tok::LBrace, "'{'" );
        const std::size_t start = _pos;
        auto subs = id_list( "sub-agent name" );
        if ( _checked )
            for ( std::size_t k = 0; k < subs.size(); ++k )
            {
                const Token& at = _toks[ start + 2 * k ];
                if ( has( _bound, subs[ k ] ) )
                    fail_at( at, "sub-agent '" + subs[ k ] + "' shadows an enclosing sub-agent" );
                if ( has( _in_scope, subs[ k ] ) || has( _refined_away, subs[ k ] ) )
                    fail_at( at, "sub-agent '" + subs[ k ] + "' clashes with ambient agent" );
            }
        expect( Tok::RBrace, "'}'" );
        expect( Tok::Dot, "'.'" );

        const auto saved_scope = _in_scope;
        const auto saved_bound = _bound;
        const auto saved_away = _refined_away;
        if ( _checked )
        {
            std::erase( _in_scope, refined );
            _refined_away.push_back( refined );
            for ( const auto& s : subs )
            {
                _in_scope.push_back( s );
                _bound.push_back( s );
            }
        }
        auto body = implication();
        _in_scope = saved_scope;
        _bound = saved_bound;
        _refined_away = saved_away;
        return dual ? dual_split( refined, std::move( subs ), body ) : split( refined, std::move( subs ), body );
    }

    Formula unary()
    {
        const Token& t = peek();
        switch ( t.kind )
        {
        case Tok::Not:
            take();
            return negation( unary() );
        case Tok::LParen:
        {
            take();
            auto f = implication();
            expect( Tok::RParen, "')'" );
            return f;
        }
        case Tok::LAngle:
        {
            auto c = coalition( Tok::RAngle, "'>>'" );
            return temporal( std::move( c ), false );
        }
        case Tok::LBracket:
        {
            auto c = coalition( Tok::RBracket, "']]'" );
            return temporal( std::move( c ), true );
        }
        case Tok::Ident:
            if ( t.text == "false" )
                return take(), falsum();
            if ( t.text == "true" )
                return take(), truth();
            if ( t.text == "split" )
                return binder( false );
            if ( t.text == "dsplit" )
                return binder( true );
            if ( keywords.contains( t.text ) )
                fail( "unexpected keyword '" + t.text + "'" );
            return atom( take().text );
        case Tok::End:
            fail( "unexpected end of formula" );
        default:
            fail( "unexpected '" + t.text + "'" );
        }
    }
};

} // namespace

Formula parse_formula( std::string_view text, const std::optional< std::vector< std::string > >& ambient )
{
    return Parser{ text, ambient }.parse();
}

// ---------------------------------------------------------------------------
// Static analysis

namespace
{

void collect_free( const Formula& f, std::set< std::string >& out )
{
    if ( !f )
        return;
    switch ( f->op )
    {
    case Op::False:
    case Op::Atom:
        return;
    case Op::Split:
    {
        std::set< std::string > inner;
        collect_free( f->lhs, inner );
        for ( const auto& s : f->agents )
            inner.erase( s );
        out.insert( inner.begin(), inner.end() );
        out.insert( f->name );
        return;
    }
    default:
        out.insert( f->agents.begin(), f->agents.end() );
        collect_free( f->lhs, out );
        collect_free( f->rhs, out );
    }
}

Formula strip_double_negation( Formula f )
{
    while ( true )
    {
        auto once = negated_operand( f );
        auto twice = negated_operand( once );
        if ( !twice )
            return f;
        f = twice;
    }
}

void walk( const Formula& f, bool positive, FlatClassification& out )
{
    if ( !out.flat || !f )
        return;
    switch ( f->op )
    {
    case Op::False:
    case Op::Atom:
        return;
    case Op::Split:
    {
        auto chain = chain_at( f );
        if ( contains_split( chain.body ) )
        {
            out.flat = false;
            out.offending = f;
            out.chains.clear();
            return;
        }
        chain.positive = positive;
        out.chains.push_back( std::move( chain ) );
        return;
    }
    case Op::Implies:
        walk( f->lhs, !positive, out );
        walk( f->rhs, positive, out );
        return;
    default:
        walk( f->lhs, positive, out );
        walk( f->rhs, positive, out );
    }
}

} // namespace

std::vector< std::string > free_agents( const Formula& f )
{
    std::set< std::string > s;
    collect_free( f, s );
    return { s.begin(), s.end() };
}

FlatChain chain_at( const Formula& split_node )
{
    FlatChain chain;
    chain.head = split_node;
    Formula cur = split_node;
    while ( true )
    {
        chain.links.push_back( { cur->name, cur->agents } );
        auto inner = strip_double_negation( cur->lhs );
        if ( inner->op == Op::Split )
        {
            cur = inner;
            continue;
        }
        chain.body = cur->lhs;
        return chain;
    }
}

FlatClassification classify_flat( const Formula& f )
{
    FlatClassification out;
    walk( f, true, out );
    return out;
}

} // namespace atlr
