#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace datadesc::csv {

using Record = std::vector<std::string>;

/// RFC 4180 reader: comma delimiter, double-quote quoting with "" escapes,
/// quoted fields may span lines. Accepts LF and CRLF line endings. Invalid
/// UTF-8 sequences are replaced with U+FFFD before parsing.
std::vector<Record> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);

std::string format_record(const Record& record);

/// Replaces each invalid UTF-8 byte sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

}  // namespace datadesc::csv
