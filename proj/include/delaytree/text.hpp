#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace delaytree {

// Line-oriented reader for the project's unquoted comma-separated files.
// Blank lines are skipped, CR before LF is stripped, and field views remain
// valid for as long as the underlying text does.
class CsvReader {
 public:
  CsvReader(std::string_view text, std::string source);

  // Consumes the first non-blank line and requires it to equal `header`.
  void expect_header(std::string_view header);

  // Advances to the next non-blank line. Returns false at end of input.
  bool next();

  std::size_t line_number() const noexcept { return line_number_; }
  const std::vector<std::string_view>& fields() const noexcept { return fields_; }
  std::string_view field(std::size_t i) const { return fields_.at(i); }
  const std::string& source() const noexcept { return source_; }

  // Throws DataError tagged with the current source and line.
  [[noreturn]] void fail(const std::string& reason) const;

  // Fails unless the current row has exactly `n` fields.
  void require_fields(std::size_t n) const;

 private:
  std::string_view text_;
  std::string source_;
  std::size_t offset_ = 0;
  std::size_t line_number_ = 0;
  std::vector<std::string_view> fields_;
};

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);
bool iequals(std::string_view a, std::string_view b);

// Full-string numeric parsing; surrounding whitespace is not accepted.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace delaytree
