#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace netr {

/// Line-oriented CSV reader with header validation. Fields may be wrapped in
/// double quotes (with "" as an escaped quote); quoted fields cannot span
/// lines. Errors are DataErrors prefixed with "file:line".
class CsvReader {
  public:
    CsvReader(std::filesystem::path file, std::vector<std::string> expectedHeader);

    /// Reads the next non-blank row. Returns false at end of file.
    bool next(std::vector<std::string>& fields);

    std::size_t lineNumber() const { return line_; }
    const std::filesystem::path& path() const { return file_; }

    /// "<file>:<line>: field '<name>': <what>"
    [[noreturn]] void fail(std::string_view field, std::string_view what) const;

  private:
    std::filesystem::path file_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
    bool headerDone_ = false;
};

std::vector<std::string> splitCsvLine(std::string_view line);

std::vector<std::string> splitOn(std::string_view text, char sep);

/// Quotes the field if it contains a comma, quote or newline.
std::string csvEscape(std::string_view field);

} // namespace netr
