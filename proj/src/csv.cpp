#include "netr/csv.hpp"

#include "netr/errors.hpp"

namespace netr {

std::vector<std::string> splitCsvLine(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

std::vector<std::string> splitOn(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

std::string csvEscape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

CsvReader::CsvReader(std::filesystem::path file, std::vector<std::string> expectedHeader)
    : file_(std::move(file)), in_(file_), header_(std::move(expectedHeader)) {
    if (!in_) {
        throw DataError(file_.string() + ": cannot open file");
    }
    std::vector<std::string> header;
    if (!next(header)) {
        throw DataError(file_.string() + ": missing header row");
    }
    if (header != header_) {
        std::string want;
        for (const auto& h : header_) {
            want += (want.empty() ? "" : ",") + h;
        }
        throw DataError(file_.string() + ":" + std::to_string(line_) + ": expected header '" + want +
                        "'");
    }
    headerDone_ = true;
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (!raw.empty() && raw.back() == '\r') {
            raw.pop_back();
        }
        if (raw.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        fields = splitCsvLine(raw);
        if (headerDone_ && fields.size() != header_.size()) {
            throw DataError(file_.string() + ":" + std::to_string(line_) + ": expected " +
                            std::to_string(header_.size()) + " fields, found " +
                            std::to_string(fields.size()));
        }
        return true;
    }
    return false;
}

void CsvReader::fail(std::string_view field, std::string_view what) const {
    throw DataError(file_.string() + ":" + std::to_string(line_) + ": field '" + std::string(field) +
                    "': " + std::string(what));
}

} // namespace netr
