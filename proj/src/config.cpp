#include "delaytree/config.hpp"

#include "delaytree/error.hpp"
#include "delaytree/text.hpp"

namespace delaytree {

ConfigFile ConfigFile::parse(std::string_view text, const std::string& source) {
  ConfigFile cfg;
  std::string section;
  std::size_t line_number = 0;
  std::size_t offset = 0;
  while (offset <= text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(offset, end - offset));
    offset = end + 1;
    ++line_number;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw DataError(source, line_number, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      cfg.sections_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError(source, line_number, "expected 'key = value'");
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw DataError(source, line_number, "empty key");
    cfg.sections_[section].emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  ConfigFile cfg = parse(read_file(path), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool ConfigFile::has_section(std::string_view section) const { return sections_.find(section) != sections_.end(); }

std::optional<std::string> ConfigFile::get(std::string_view section, std::string_view key) const {
  auto values = get_all(section, key);
  if (values.empty()) return std::nullopt;
  return values.back();
}

std::vector<std::string> ConfigFile::get_all(std::string_view section, std::string_view key) const {
  std::vector<std::string> out;
  auto it = sections_.find(section);
  if (it == sections_.end()) return out;
  for (const auto& [k, v] : it->second) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ConfigFile::entries(std::string_view section) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return {};
  return it->second;
}

std::filesystem::path ConfigFile::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

}  // namespace delaytree
