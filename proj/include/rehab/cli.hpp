#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rehab::cli
{

enum ExitCode : int
{
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
};

/// Runs one of the simulate / analyze / report / signal subcommands.
int dispatch( const std::vector<std::string>& args, std::ostream& out, std::ostream& err );
int dispatch( int argc, const char* const* argv, std::ostream& out, std::ostream& err );

} // namespace rehab::cli
