#include "rehab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

namespace rehab
{

namespace
{

std::string trim( const std::string& s )
{
    const auto b = s.find_first_not_of( " \t\r" );
    if( b == std::string::npos )
        return {};
    const auto e = s.find_last_not_of( " \t\r" );
    return s.substr( b, e - b + 1 );
}

template <typename T, typename Parse>
T parse_number( const std::string& key, const std::string& text, Parse parse )
{
    std::size_t used = 0;
    T value{};
    try
    {
        value = parse( text, &used );
    }
    catch( const std::exception& )
    {
        used = std::string::npos;
    }
    if( used != text.size() )
        throw Error( Errc::Config, "setting '" + key + "': cannot parse '" + text + "'" );
    return value;
}

} // namespace

std::map<std::string, std::string> parse_config( std::istream& in )
{
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while( std::getline( in, line ) )
    {
        ++lineno;
        bool quoted = false;
        for( std::size_t i = 0; i < line.size(); ++i )
        {
            if( line[i] == '"' )
                quoted = !quoted;
            else if( line[i] == '#' && !quoted )
            {
                line.resize( i );
                break;
            }
        }
        line = trim( line );
        if( line.empty() || line.front() == '[' )
            continue;
        const auto eq = line.find( '=' );
        if( eq == std::string::npos )
            throw Error( Errc::Config, "config line " + std::to_string( lineno ) + ": expected key = value" );
        std::string key = trim( line.substr( 0, eq ) );
        std::string value = trim( line.substr( eq + 1 ) );
        if( value.size() >= 2 && value.front() == '"' && value.back() == '"' )
            value = value.substr( 1, value.size() - 2 );
        std::replace( key.begin(), key.end(), '-', '_' );
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> load_config( const std::filesystem::path& path )
{
    std::ifstream in( path );
    if( !in )
        throw Error( Errc::Io, "cannot open config " + path.string() );
    return parse_config( in );
}

Settings::Settings( std::map<std::string, std::string> cli, std::map<std::string, std::string> file, std::string env_prefix )
    : cli_( std::move( cli ) ), file_( std::move( file ) ), env_prefix_( std::move( env_prefix ) )
{}

std::optional<std::string> Settings::get( const std::string& key ) const
{
    if( auto it = cli_.find( key ); it != cli_.end() )
        return it->second;
    std::string env = env_prefix_ + key;
    std::transform( env.begin(), env.end(), env.begin(), []( unsigned char c ) { return static_cast<char>( std::toupper( c ) ); } );
    if( const char* v = std::getenv( env.c_str() ) )
        return std::string( v );
    if( auto it = file_.find( key ); it != file_.end() )
        return it->second;
    return std::nullopt;
}

std::string Settings::get_or( const std::string& key, const std::string& fallback ) const { return get( key ).value_or( fallback ); }

double Settings::get_or( const std::string& key, double fallback ) const
{
    const auto v = get( key );
    return v ? parse_number<double>( key, *v, []( const std::string& s, std::size_t* n ) { return std::stod( s, n ); } ) : fallback;
}

int Settings::get_or( const std::string& key, int fallback ) const
{
    const auto v = get( key );
    return v ? parse_number<int>( key, *v, []( const std::string& s, std::size_t* n ) { return std::stoi( s, n ); } ) : fallback;
}

std::uint64_t Settings::get_or( const std::string& key, std::uint64_t fallback ) const
{
    const auto v = get( key );
    if( v && !v->empty() && v->front() == '-' )
        throw Error( Errc::Config, "setting '" + key + "' must be non-negative" );
    return v ? parse_number<std::uint64_t>( key, *v, []( const std::string& s, std::size_t* n ) { return std::stoull( s, n ); } ) : fallback;
}

SessionConfig session_config_from( const Settings& s )
{
    SessionConfig cfg;
    cfg.session_id = s.get_or( "session_id", cfg.session_id );
    cfg.policy = policy_from_string( s.get_or( "policy", std::string( to_string( cfg.policy ) ) ) );
    cfg.estimator = estimator_from_string( s.get_or( "estimator", std::string( to_string( cfg.estimator ) ) ) );
    cfg.trials = s.get_or( "trials", cfg.trials );
    cfg.uct.iterations = s.get_or( "iterations", cfg.uct.iterations );
    cfg.uct.cp = s.get_or( "cp", cfg.uct.cp );
    cfg.seed = s.get_or( "seed", cfg.seed );
    cfg.uct.seed = cfg.seed;
    cfg.patient = s.get_or( "patient", cfg.patient );
    cfg.prior = s.get_or( "prior", cfg.prior );
    cfg.schedule.start = s.get_or( "target_start", cfg.schedule.start );
    cfg.schedule.end = s.get_or( "target_end", cfg.schedule.end );
    cfg.schedule.span = s.get_or( "target_span", cfg.schedule.span );
    cfg.times.best = s.get_or( "best_time", cfg.times.best );
    cfg.times.max = s.get_or( "max_time", cfg.times.max );
    cfg.hss.levels = s.get_or( "hss_levels", cfg.hss.levels );
    cfg.hss.window = s.get_or( "hss_window", cfg.hss.window );
    cfg.arm.l1 = s.get_or( "l1", cfg.arm.l1 );
    cfg.arm.l2 = s.get_or( "l2", cfg.arm.l2 );
    cfg.arm.l3 = s.get_or( "l3", cfg.arm.l3 );
    cfg.validate();
    return cfg;
}

} // namespace rehab
