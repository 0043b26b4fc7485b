#include "rehab/trial_log.hpp"

#include <fstream>
#include <sstream>

namespace rehab
{

TrialLogHeader make_header( const SessionConfig& cfg )
{
    return { cfg.session_id, cfg.times, to_string( cfg.policy ), cfg.seed };
}

nlohmann::json to_json( const TrialRecord& r )
{
    nlohmann::json j;
    j["session_id"] = r.session_id;
    j["trial_idx"] = r.trial_idx;
    j["orientation"] = { r.orientation.sh_yaw, r.orientation.sh_pitch, r.orientation.sh_roll, r.orientation.elbow };
    j["target_xyz"] = r.target_xyz;
    j["outcome"] = std::string( to_string( r.outcome ) );
    j["completion_time_s"] = r.completion_time_s ? nlohmann::json( *r.completion_time_s ) : nlohmann::json( nullptr );
    j["score_value"] = r.score_value;
    j["hss_level"] = r.hss_level;
    j["mas_item"] = std::string( to_string( r.mas_item ) );
    j["target_success"] = r.target_success;
    j["predicted_success"] = r.predicted_success;
    j["timestamp"] = r.timestamp;
    return j;
}

TrialRecord record_from_json( const nlohmann::json& j )
{
    TrialRecord r;
    r.session_id = j.at( "session_id" ).get<std::string>();
    r.trial_idx = j.at( "trial_idx" ).get<int>();
    const auto o = j.at( "orientation" ).get<std::array<double, 4>>();
    r.orientation = { o[0], o[1], o[2], o[3] };
    r.target_xyz = j.at( "target_xyz" ).get<std::array<double, 3>>();
    r.outcome = trial_result_from_string( j.at( "outcome" ).get<std::string>() );
    if( const auto& t = j.at( "completion_time_s" ); !t.is_null() )
        r.completion_time_s = t.get<double>();
    r.score_value = j.at( "score_value" ).get<double>();
    r.hss_level = j.at( "hss_level" ).get<int>();
    r.mas_item = mas_item_from_string( j.at( "mas_item" ).get<std::string>() );
    r.target_success = j.at( "target_success" ).get<double>();
    r.predicted_success = j.at( "predicted_success" ).get<double>();
    r.timestamp = j.at( "timestamp" ).get<double>();
    return r;
}

void write_log( std::ostream& out, const TrialLog& log )
{
    nlohmann::json header{ { "schema", kTrialLogSchema },
                           { "version", kTrialLogVersion },
                           { "session_id", log.header.session_id },
                           { "best_time", log.header.times.best },
                           { "max_time", log.header.times.max },
                           { "policy", log.header.policy },
                           { "seed", log.header.seed } };
    out << header.dump() << '\n';
    for( const auto& r : log.records )
        out << to_json( r ).dump() << '\n';
}

void write_log( const std::filesystem::path& path, const TrialLog& log )
{
    if( path.has_parent_path() )
        std::filesystem::create_directories( path.parent_path() );
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out( tmp, std::ios::binary | std::ios::trunc );
        if( !out )
            throw Error( Errc::Io, "cannot write " + tmp.string() );
        write_log( out, log );
        out.flush();
        if( !out )
            throw Error( Errc::Io, "write failed for " + tmp.string() );
    }
    std::filesystem::rename( tmp, path );
}

TrialLog read_log( std::istream& in )
{
    std::string line;
    if( !std::getline( in, line ) )
        throw Error( Errc::CorruptLog, "line 1: missing header" );

    TrialLog log;
    try
    {
        const auto h = nlohmann::json::parse( line );
        if( h.value( "schema", std::string() ) != kTrialLogSchema )
            throw Error( Errc::SchemaMismatch, "line 1: not a trial log" );
        if( h.value( "version", -1 ) != kTrialLogVersion )
            throw Error( Errc::SchemaMismatch, "line 1: unsupported log version " + h.value( "version", nlohmann::json() ).dump() );
        log.header.session_id = h.at( "session_id" ).get<std::string>();
        log.header.times = { h.at( "best_time" ).get<double>(), h.at( "max_time" ).get<double>() };
        log.header.policy = h.at( "policy" ).get<std::string>();
        log.header.seed = h.at( "seed" ).get<std::uint64_t>();
    }
    catch( const nlohmann::json::exception& e )
    {
        throw Error( Errc::CorruptLog, std::string( "line 1: " ) + e.what() );
    }

    std::size_t lineno = 1;
    while( std::getline( in, line ) )
    {
        ++lineno;
        if( line.empty() )
            continue;
        TrialRecord r;
        try
        {
            r = record_from_json( nlohmann::json::parse( line ) );
        }
        catch( const std::exception& e )
        {
            throw Error( Errc::CorruptLog, "line " + std::to_string( lineno ) + ": " + e.what() );
        }
        if( r.trial_idx != static_cast<int>( log.records.size() ) )
            throw Error( Errc::CorruptLog, "line " + std::to_string( lineno ) + ": trial index " + std::to_string( r.trial_idx ) +
                                               " breaks the sequence" );
        log.records.push_back( std::move( r ) );
    }
    return log;
}

TrialLog read_log( const std::filesystem::path& path )
{
    std::ifstream in( path, std::ios::binary );
    if( !in )
        throw Error( Errc::Io, "cannot open " + path.string() );
    return read_log( in );
}

int first_replay_mismatch( const TrialLog& log )
{
    for( const auto& r : log.records )
    {
        TrialOutcome o;
        o.result = r.outcome;
        o.completion_time = r.completion_time_s;
        if( score_trial( o, log.header.times ).value != r.score_value )
            return r.trial_idx;
    }
    return -1;
}

} // namespace rehab
