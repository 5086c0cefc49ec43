#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace aeca {

struct DelimitedRow {
    std::size_t line = 0;  // 1-based line number of the row's first line
    std::vector<std::string> fields;
};

struct DelimitedTable {
    char delimiter = ',';
    std::vector<std::string> header;
    std::vector<DelimitedRow> rows;
};

/// Picks tab if the header line contains a tab outside quotes, comma otherwise.
char detect_delimiter(std::string_view header_line);

/// Reads comma- or tab-delimited text with a header row. Handles RFC 4180
/// quoting, CRLF line ends and a leading UTF-8 BOM. Blank lines are skipped.
/// Throws Error(ParseError) on an unterminated quote.
DelimitedTable read_delimited(std::string_view text);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Quotes a field if it contains the delimiter, a quote or a line break.
std::string quote_field(std::string_view s, char delimiter);

}  // namespace aeca
