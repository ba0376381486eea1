#pragma once

#include "atlr/cgm.hpp"
#include "atlr/refinement.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace atlr
{

// Line-oriented model files:
//
//   agents: 1 2
//   actions 1: u n
//   states: locked unlocked
//   label unlocked: unlocked_p
//   trans locked: u w -> unlocked
//
// Action columns of `trans` follow the `agents:` order; every (state, joint
// action) pair appears exactly once. '#' starts a comment. Throws InputError
// with line and column.
[[nodiscard]] Cgm parse_model( std::string_view text );

// Canonical rendering; parse_model(write_model(m)) == m for models whose
// propositions are listed in first-use order.
[[nodiscard]] std::string write_model( const Cgm& m );

// A refined model followed by one section per chain link:
//
//   hom 1 -> {a, b}:
//   map a.0 b.0 -> u
//
// Sub-agent alphabets are read in order of first appearance per column.
struct Witness
{
    Cgm model;
    std::vector< Homomorphism > homs;
};

// The hom sections are resolved against `base`, link by link.
[[nodiscard]] Witness parse_witness( const Cgm& base, std::string_view text );

// `header` lines are written as comments.
[[nodiscard]] std::string write_witness( const Cgm& base, const std::vector< Homomorphism >& homs,
                                         const std::vector< std::string >& header = {} );

// Empty when every link passes validate_hom and the last one yields the
// stated model; otherwise one line per defect.
[[nodiscard]] std::vector< std::string > verify_witness( const Cgm& base, const Witness& w );

} // namespace atlr
