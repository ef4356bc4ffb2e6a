#include "ibrisk/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ibrisk/errors.hpp"

namespace ibrisk::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

} // namespace

std::optional<std::size_t> Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path.string());
    }
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = split_line(line);
        if (line_no == 1 || table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_no << ": expected "
                << table.header.size() << " fields, got " << fields.size();
            throw validation_error(msg.str());
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) {
        throw validation_error(path.string() + ": empty file, header expected");
    }
    return table;
}

double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line, const std::string& column) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        std::ostringstream msg;
        msg << path.string() << ":" << line << ": field '" << column
            << "' is not a number: '" << field << "'";
        throw validation_error(msg.str());
    }
    return value;
}

int parse_int(const std::string& field, const std::filesystem::path& path,
              std::size_t line, const std::string& column) {
    int value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        std::ostringstream msg;
        msg << path.string() << ":" << line << ": field '" << column
            << "' is not an integer: '" << field << "'";
        throw validation_error(msg.str());
    }
    return value;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace ibrisk::csv
