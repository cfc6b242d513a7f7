#include "festcircuit/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace festcircuit::csv {

Reader::Reader(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {
    auto first = read_record();
    if (!first) throw std::runtime_error(source_ + ": missing header row");
    header_ = std::move(*first);
}

int Reader::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

int Reader::require_column(std::string_view name) const {
    const int idx = column(name);
    if (idx < 0) {
        throw std::runtime_error(source_ + ": missing required column '" + std::string(name) +
                                 "'");
    }
    return idx;
}

std::optional<Row> Reader::read_record() {
    int ch = in_.get();
    if (ch == EOF) return std::nullopt;

    ++line_;
    row_line_ = line_;
    Row fields;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;

    while (true) {
        if (ch == EOF) {
            if (in_quotes) {
                throw std::runtime_error(source_ + ":" + std::to_string(row_line_) +
                                         ": unterminated quoted field");
            }
            fields.push_back(std::move(field));
            return fields;
        }
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
        } else if (c == '"' && field.empty() && !quoted_field) {
            in_quotes = true;
            quoted_field = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return fields;
        } else {
            field.push_back(c);
        }
        ch = in_.get();
    }
}

std::optional<Row> Reader::next() {
    while (true) {
        auto rec = read_record();
        if (!rec) return std::nullopt;
        if (rec->size() == 1 && (*rec)[0].empty()) continue; // blank line
        if (rec->size() != header_.size()) {
            throw std::runtime_error(source_ + ":" + std::to_string(row_line_) + ": expected " +
                                     std::to_string(header_.size()) + " fields, got " +
                                     std::to_string(rec->size()));
        }
        return rec;
    }
}

void Writer::row(const Row& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        const std::string& f = fields[i];
        const bool needs_quote = f.find_first_of(",\"\n\r") != std::string::npos ||
                                 (!f.empty() && (f.front() == ' ' || f.back() == ' '));
        if (needs_quote) {
            out_ << '"';
            for (char c : f) {
                if (c == '"') out_ << '"';
                out_ << c;
            }
            out_ << '"';
        } else {
            out_ << f;
        }
    }
    out_ << '\n';
}

std::string fixed6(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

} // namespace festcircuit::csv
