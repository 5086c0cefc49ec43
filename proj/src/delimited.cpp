#include "aeca/delimited.hpp"

#include <cctype>

#include "aeca/error.hpp"

namespace aeca {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

char detect_delimiter(std::string_view header_line) {
    bool quoted = false;
    for (char ch : header_line) {
        if (ch == '"') quoted = !quoted;
        if (ch == '\n') break;
        if (!quoted && ch == '\t') return '\t';
    }
    return ',';
}

std::string quote_field(std::string_view s, char delimiter) {
    if (s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

namespace {

bool is_blank(const std::vector<std::string>& fields) {
    for (const auto& f : fields) {
        if (!trim(f).empty()) return false;
    }
    return true;
}

}  // namespace

DelimitedTable read_delimited(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    DelimitedTable table;
    table.delimiter = detect_delimiter(text);
    const char delim = table.delimiter;

    std::vector<DelimitedRow> records;
    DelimitedRow current;
    std::string field;
    std::size_t line = 1;
    current.line = line;
    bool quoted = false;
    bool field_started = false;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(current));
        current = DelimitedRow{};
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field += ch;
            }
            continue;
        }
        if (ch == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (ch == delim) {
            end_field();
        } else if (ch == '\r') {
            // swallowed; '\n' ends the record
        } else if (ch == '\n') {
            end_record();
            ++line;
            current.line = line;
        } else {
            field += ch;
            if (!std::isspace(static_cast<unsigned char>(ch))) field_started = true;
        }
    }
    if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted field starting near line " + std::to_string(current.line));
    if (!field.empty() || !current.fields.empty()) end_record();

    bool have_header = false;
    for (auto& rec : records) {
        if (is_blank(rec.fields)) continue;
        if (!have_header) {
            for (auto& f : rec.fields) table.header.push_back(trim(f));
            have_header = true;
        } else {
            table.rows.push_back(std::move(rec));
        }
    }
    return table;
}

}  // namespace aeca
