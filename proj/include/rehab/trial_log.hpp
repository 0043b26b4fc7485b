#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/session.hpp"

namespace rehab
{

inline constexpr const char* kTrialLogSchema = "rehab.trial_log";
inline constexpr int kTrialLogVersion = 1;

/// First line of every log. The scoring times are kept so logged outcomes can be re-scored.
struct TrialLogHeader
{
    std::string session_id;
    ScoringTimes times;
    std::string policy;
    std::uint64_t seed = 0;

    bool operator==( const TrialLogHeader& ) const = default;
};

struct TrialLog
{
    TrialLogHeader header;
    std::vector<TrialRecord> records;
};

TrialLogHeader make_header( const SessionConfig& cfg );

nlohmann::json to_json( const TrialRecord& r );
TrialRecord record_from_json( const nlohmann::json& j );

/// JSON lines: header, then one record per line.
void write_log( std::ostream& out, const TrialLog& log );

/// Writes through a temporary file and renames it into place.
void write_log( const std::filesystem::path& path, const TrialLog& log );

/// Throws SchemaMismatch for an unknown schema or version and CorruptLog (naming the
/// line) for unparsable lines or non-contiguous trial indices.
TrialLog read_log( std::istream& in );
TrialLog read_log( const std::filesystem::path& path );

/// Re-scores every record from its logged outcome; returns the first index whose
/// score_value differs, or -1 when the log replays exactly.
int first_replay_mismatch( const TrialLog& log );

} // namespace rehab
