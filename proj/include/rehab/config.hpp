#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "rehab/session.hpp"

namespace rehab
{

/// `key = value` lines; `#` starts a comment, `[section]` headers are ignored, and
/// values may be double-quoted.
std::map<std::string, std::string> parse_config( std::istream& in );
std::map<std::string, std::string> load_config( const std::filesystem::path& path );

/// Layered lookup: command line, then REHAB_<KEY> environment variables, then the config
/// file. Keys use underscores (best_time); the environment name is upper-cased.
class Settings
{
public:
    Settings() = default;
    Settings( std::map<std::string, std::string> cli, std::map<std::string, std::string> file, std::string env_prefix = "REHAB_" );

    std::optional<std::string> get( const std::string& key ) const;

    std::string get_or( const std::string& key, const std::string& fallback ) const;
    double get_or( const std::string& key, double fallback ) const;
    int get_or( const std::string& key, int fallback ) const;
    std::uint64_t get_or( const std::string& key, std::uint64_t fallback ) const;

private:
    std::map<std::string, std::string> cli_;
    std::map<std::string, std::string> file_;
    std::string env_prefix_;
};

/// Session configuration from settings keys: policy, estimator, trials, iterations, cp,
/// seed, patient, prior, target_start, target_end, target_span, best_time, max_time, hss_levels,
/// hss_window, session_id, and the arm lengths l1, l2, l3.
SessionConfig session_config_from( const Settings& s );

} // namespace rehab
