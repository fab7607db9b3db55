#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "matmart/martingale.hpp"

namespace matmart {

/// Parse failure with position information; `what()` is formatted as
/// "<file>:<line>:<column>: <message>".
class KernelParseError : public std::runtime_error {
public:
    KernelParseError(std::string_view file, int line, int column, std::string_view message);

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Reads the kernel specification format:
///
///   # commentary
///   kernel <name>          (optional)
///   dim <d>
///   horizon <K>
///   states <n>
///   centered <true|false>  (optional, default false)
///   initial <index>        (optional, default 0)
///   state <index>
///   outcome <prob> -> <next-state> : <d*d entries, row-major>
///
/// Probabilities are decimal strings; they are re-validated (positivity,
/// per-state sum) when the spec is turned into a FiniteKernel.
KernelSpec parse_kernel_spec(std::istream& in, std::string_view filename);

/// Loads and parses a kernel file from disk.
KernelSpec load_kernel_spec(const std::string& path);

}  // namespace matmart
