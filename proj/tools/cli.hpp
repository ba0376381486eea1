#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atlr::cli
{

enum Exit : int
{
    ok = 0,
    semantic_false = 1,
    input_error = 2,
    resource_cap = 3,
    discrepancy = 4,
};

// Runs `atlr <args...>`; the report goes to `out`, diagnostics and timing to
// `err`.
int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err );

} // namespace atlr::cli
