#include "delaytree/text.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "delaytree/error.hpp"

namespace delaytree {

DataError::DataError(std::string reason) : std::runtime_error(reason), reason_(std::move(reason)) {}

DataError::DataError(std::string source, std::size_t line, std::string reason)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + reason),
      source_(std::move(source)),
      line_(line),
      reason_(std::move(reason)) {}

CsvReader::CsvReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

bool CsvReader::next() {
  while (offset_ < text_.size()) {
    std::size_t end = text_.find('\n', offset_);
    if (end == std::string_view::npos) end = text_.size();
    std::string_view line = text_.substr(offset_, end - offset_);
    offset_ = end + 1;
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    fields_ = split(line, ',');
    for (auto& f : fields_) f = trim(f);
    return true;
  }
  fields_.clear();
  return false;
}

void CsvReader::expect_header(std::string_view header) {
  if (!next()) fail("missing header, expected '" + std::string(header) + "'");
  auto expected = split(header, ',');
  if (fields_.size() != expected.size() || !std::equal(fields_.begin(), fields_.end(), expected.begin())) {
    fail("unexpected header, expected '" + std::string(header) + "'");
  }
}

void CsvReader::fail(const std::string& reason) const { throw DataError(source_, line_number_, reason); }

void CsvReader::require_fields(std::size_t n) const {
  if (fields_.size() != n) {
    fail("expected " + std::to_string(n) + " fields, found " + std::to_string(fields_.size()));
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  if (text.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError(path.string(), 0, "write failed");
}

}  // namespace delaytree
