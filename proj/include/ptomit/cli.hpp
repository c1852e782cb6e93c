#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptomit::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitPhysics = 1;
inline constexpr int kExitUsage = 2;

// Parses argv (argv[0] is the program name), runs the job and writes its
// outputs. Returns 0 on success, 1 on physics errors, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Fixed CSV number format: 17 significant digits, '.' decimal separator.
std::string format_number(double v);

} // namespace ptomit::cli
