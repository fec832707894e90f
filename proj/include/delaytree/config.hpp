#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace delaytree {

// `key = value` pairs grouped under `[section]` headers. Lines starting with
// '#' or ';' are comments. Keys may repeat; get() returns the last value.
class ConfigFile {
 public:
  ConfigFile() = default;

  // Throws DataError naming the line on malformed input.
  static ConfigFile parse(std::string_view text, const std::string& source = "config");
  static ConfigFile load(const std::filesystem::path& path);

  bool has_section(std::string_view section) const;
  std::optional<std::string> get(std::string_view section, std::string_view key) const;
  std::vector<std::string> get_all(std::string_view section, std::string_view key) const;
  // Entries of a section in file order.
  std::vector<std::pair<std::string, std::string>> entries(std::string_view section) const;

  // Directory of the loaded file; relative paths in the file resolve against it.
  const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
  std::filesystem::path resolve(const std::string& path) const;

 private:
  std::map<std::string, std::vector<std::pair<std::string, std::string>>, std::less<>> sections_;
  std::filesystem::path base_dir_;
};

}  // namespace delaytree
