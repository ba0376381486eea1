#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atlr
{

// Primitive connectives. Everything else (~, &, |, true, F, G, the dual
// next, dsplit) is desugared into these by the builders below.
enum class Op
{
    False,
    Atom,
    Implies,
    Next,      // <<A>> X lhs
    Until,     // <<A>> lhs U rhs
    DualUntil, // [[A]] lhs U rhs
    Split,     // split name -> {agents} . lhs
};

struct Node;
using Formula = std::shared_ptr< const Node >;

struct Node
{
    Op op = Op::False;
    std::string name;                 // proposition (Atom) or refined agent (Split)
    std::vector< std::string > agents; // coalition, or the sub-agents of a Split
    Formula lhs;
    Formula rhs;
};

[[nodiscard]] Formula falsum();
[[nodiscard]] Formula truth();
[[nodiscard]] Formula atom( std::string proposition );
[[nodiscard]] Formula implies( Formula a, Formula b );
[[nodiscard]] Formula negation( Formula a );
[[nodiscard]] Formula conjunction( Formula a, Formula b );
[[nodiscard]] Formula disjunction( Formula a, Formula b );
[[nodiscard]] Formula next( std::vector< std::string > coalition, Formula a );
[[nodiscard]] Formula until( std::vector< std::string > coalition, Formula a, Formula b );
[[nodiscard]] Formula dual_until( std::vector< std::string > coalition, Formula a, Formula b );
[[nodiscard]] Formula eventually( std::vector< std::string > coalition, Formula a );
[[nodiscard]] Formula always( std::vector< std::string > coalition, Formula a );
[[nodiscard]] Formula dual_next( std::vector< std::string > coalition, Formula a );
[[nodiscard]] Formula dual_eventually( std::vector< std::string > coalition, Formula a );
[[nodiscard]] Formula dual_always( std::vector< std::string > coalition, Formula a );
[[nodiscard]] Formula split( std::string refined, std::vector< std::string > subagents, Formula body );
[[nodiscard]] Formula dual_split( std::string refined, std::vector< std::string > subagents, Formula body );

// Recognizes Implies(a, False) and returns a.
[[nodiscard]] Formula negated_operand( const Formula& f );

[[nodiscard]] bool equal( const Formula& a, const Formula& b );
[[nodiscard]] bool contains_split( const Formula& f );

// Concrete syntax. The output re-sugars ~, &, |, true and parses back to a
// structurally equal formula.
[[nodiscard]] std::string to_string( const Formula& f );

// Parsing. When `ambient` is given, every coalition member must be an ambient
// agent or a sub-agent bound by an enclosing split, refined agents must be
// in scope, and sub-agents must be fresh.
[[nodiscard]] Formula parse_formula( std::string_view text,
                                     const std::optional< std::vector< std::string > >& ambient = std::nullopt );

// Agents a formula refers to without binding them, sorted.
[[nodiscard]] std::vector< std::string > free_agents( const Formula& f );

struct ChainLink
{
    std::string refined;
    std::vector< std::string > subagents;

    friend bool operator==( const ChainLink&, const ChainLink& ) = default;
};

// A maximal chain split i1 -> G1 . ... split im -> Gm . body. Links are
// joined through an even number of negations; `positive` is the polarity of
// the head occurrence.
struct FlatChain
{
    Formula head;
    std::vector< ChainLink > links;
    Formula body;
    bool positive = true;
};

// Follows a chain starting at a Split node.
[[nodiscard]] FlatChain chain_at( const Formula& split_node );

struct FlatClassification
{
    bool flat = true;
    Formula offending;
    std::vector< FlatChain > chains; // in left-to-right order; only when flat
};

[[nodiscard]] FlatClassification classify_flat( const Formula& f );

} // namespace atlr
