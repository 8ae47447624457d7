#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cachege {

/// Flat view of an INI/TOML-style file: "[dram]\naccess_time_s = 4e-9" and
/// "dram.access_time_s = 4e-9" both yield key "dram.access_time_s".
/// Quotes around values are stripped; '#' and ';' start comment lines.
class KeyValueFile {
public:
    static KeyValueFile parse(std::string_view text);
    static KeyValueFile load(const std::string& path);

    std::optional<std::string> get(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<long long> get_int(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace cachege
