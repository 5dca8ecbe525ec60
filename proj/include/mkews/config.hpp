#pragma once

// Plain-text configuration files:
//
//   # comment
//   key = value          (global, applies to every subcommand)
//   [type1]
//   replicates = 5000    (applies to `type1` only, overrides globals)

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

namespace mkews {

using Settings = std::map<std::string, std::string>;

struct ConfigFile {
  std::map<std::string, Settings> sections;  // "" holds the global keys

  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::string& path);

  /// Global keys overlaid with the keys of `section`.
  Settings resolve(std::string_view section) const;
};

/// Inverse of ConfigFile::parse for a single section.
void write_config(std::ostream& out, std::string_view section, const Settings& settings);

}  // namespace mkews
