#include "mkews/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "mkews/errors.hpp"

namespace mkews {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile cfg;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      cfg.sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    cfg.sections[section][key] = trim(std::string_view(t).substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

Settings ConfigFile::resolve(std::string_view section) const {
  Settings out;
  if (auto it = sections.find(""); it != sections.end()) out = it->second;
  if (auto it = sections.find(std::string(section)); it != sections.end()) {
    for (const auto& [k, v] : it->second) out[k] = v;
  }
  return out;
}

void write_config(std::ostream& out, std::string_view section, const Settings& settings) {
  out << '[' << section << "]\n";
  for (const auto& [k, v] : settings) out << k << " = " << v << '\n';
}

}  // namespace mkews
