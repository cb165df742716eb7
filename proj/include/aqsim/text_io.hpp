// text_io.hpp - Shared helpers for the line-oriented text formats.

#ifndef AQSIM_TEXT_IO_HPP
#define AQSIM_TEXT_IO_HPP

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aqsim {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)),
          line_(line)
    {}

    std::size_t line() const { return line_; }
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::size_t line_;
};

// Splits on whitespace after stripping a trailing '#' comment.
std::vector<std::string> tokenize_line(std::string_view line);

std::int64_t parse_integer(const std::string& token);
std::uint64_t parse_seed(const std::string& token);

std::ifstream open_input(const std::string& path);
std::ofstream open_output(const std::string& path);

// Flat key-value config: `key = value` per line, '#' comments.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(std::istream& in, const std::string& source);
KeyValues load_key_values(const std::string& path);

}  // namespace aqsim

#endif  // AQSIM_TEXT_IO_HPP
