#include "atlr/errors.hpp"

namespace atlr
{

InputError::InputError( const std::string& message, std::size_t line, std::size_t column )
    : Error{ line == 0 ? message
                       : std::to_string( line ) + ":" + std::to_string( column ) + ": " + message },
      _line{ line }, _column{ column }
{}

} // namespace atlr
