// ISCAS'89 `.bench` reader and writer.

#ifndef SANSCRYPT_BENCH_HPP
#define SANSCRYPT_BENCH_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sanscrypt/netlist.hpp"

namespace sanscrypt {

class BenchSyntaxError : public std::runtime_error {
public:
    BenchSyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses `.bench` text. Keywords and gate kinds are case-insensitive, net
/// names are not. Structural problems surface as NetlistError.
Netlist parse_bench(std::string_view text, std::string name = "top");

/// Reads a file; the netlist is named after the file stem.
Netlist read_bench_file(const std::filesystem::path& path);

/// Deterministic LF-terminated text that reparses to an equal netlist.
std::string emit_bench(const Netlist& nl);

}  // namespace sanscrypt

#endif
