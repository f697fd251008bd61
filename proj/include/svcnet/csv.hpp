#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace svcnet::csv {

class CsvError : public std::runtime_error {
 public:
  explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

using Record = std::vector<std::string>;

/// RFC 4180 reader. Accepts LF or CRLF line ends and a trailing newline;
/// a leading UTF-8 BOM is skipped. Errors carry the 1-based line number.
std::vector<Record> parse(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// One record terminated by LF.
std::string format_record(const Record& fields);

}  // namespace svcnet::csv
