#include "rehab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "rehab/config.hpp"
#include "rehab/psychometrics.hpp"
#include "rehab/report.hpp"
#include "rehab/signal.hpp"
#include "rehab/trial_log.hpp"

namespace rehab::cli
{

namespace
{

namespace fs = std::filesystem;

/// Options whose values flow through the layered settings lookup.
struct LayeredOptions
{
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> options;

    CLI::Option* add( CLI::App& app, const std::string& flag, const std::string& key, const std::string& help )
    {
        auto* opt = app.add_option( flag, values[key], help );
        options.emplace_back( key, opt );
        return opt;
    }

    std::map<std::string, std::string> given() const
    {
        std::map<std::string, std::string> out;
        for( const auto& [key, opt] : options )
            if( opt->count() > 0 )
                out[key] = values.at( key );
        return out;
    }
};

struct SessionSummary
{
    std::string session_id;
    fs::path log_path;
    int trials = 0;
    double mean_score = 0.0;
    double success_rate = 0.0;
    int final_level = 1;
};

SessionSummary summarize( const SessionConfig& cfg, const std::vector<TrialRecord>& records, const fs::path& path )
{
    SessionSummary s;
    s.session_id = cfg.session_id;
    s.log_path = path;
    s.trials = static_cast<int>( records.size() );
    HssState hss = HssState::start( cfg.hss );
    int successes = 0;
    for( const auto& r : records )
    {
        s.mean_score += r.score_value;
        successes += r.outcome == TrialResult::Successful;
        TrialScore score;
        score.value = r.score_value;
        hss = hss_update( std::move( hss ), score );
    }
    if( s.trials > 0 )
    {
        s.mean_score /= s.trials;
        s.success_rate = static_cast<double>( successes ) / s.trials;
    }
    s.final_level = hss.level;
    return s;
}

fs::path log_path_for( const std::string& out, const std::string& session_id, bool many )
{
    if( out.empty() )
        return fs::path( "out" ) / ( session_id + ".jsonl" );
    const fs::path p( out );
    if( !many && p.extension() == ".jsonl" )
        return p;
    return p / ( session_id + ".jsonl" );
}

int run_simulate( const Settings& settings, std::ostream& out )
{
    const SessionConfig base = session_config_from( settings );
    const int sessions = settings.get_or( "sessions", 1 );
    if( sessions < 1 )
        throw Error( Errc::Config, "sessions must be at least 1" );
    const std::string out_arg = settings.get_or( "out", std::string() );
    const PatientProfile profile = resolve_profile( base.patient );

    std::vector<SessionConfig> configs;
    for( int k = 0; k < sessions; ++k )
    {
        SessionConfig cfg = base;
        if( sessions > 1 )
        {
            cfg.session_id = base.session_id + "_" + std::to_string( k );
            cfg.seed = base.seed + static_cast<std::uint64_t>( k );
            cfg.uct.seed = cfg.seed;
        }
        else if( !out_arg.empty() && fs::path( out_arg ).extension() == ".jsonl" && !settings.get( "session_id" ) )
            cfg.session_id = fs::path( out_arg ).stem().string();
        configs.push_back( std::move( cfg ) );
    }

    std::vector<std::future<SessionSummary>> tasks;
    for( const auto& cfg : configs )
        tasks.push_back( std::async( std::launch::async, [&cfg, &profile, &out_arg, sessions] {
            const auto records = run_session( cfg, profile );
            const fs::path path = log_path_for( out_arg, cfg.session_id, sessions > 1 );
            write_log( path, TrialLog{ make_header( cfg ), records } );
            return summarize( cfg, records, path );
        } ) );

    for( auto& t : tasks )
    {
        const SessionSummary s = t.get();
        out << std::fixed << std::setprecision( 4 ) << "session=" << s.session_id << " trials=" << s.trials
            << " mean_score=" << s.mean_score << " success_rate=" << s.success_rate << " final_hss_level=" << s.final_level
            << " log=" << s.log_path.string() << '\n';
    }
    return kOk;
}

int run_analyze( const std::string& responses, const std::string& out_dir, int categories, std::ostream& out )
{
    const auto matrix = rasch::read_responses_csv( fs::path( responses ), categories );
    const AnalysisReport report = analyze_responses( matrix );
    write_analysis_report( fs::path( out_dir ), report );

    const auto& r = report.reliability;
    out << std::fixed << std::setprecision( 3 ) << "persons=" << matrix.persons() << " items=" << matrix.items()
        << " converged=" << ( report.estimate.converged ? "yes" : "no" ) << " sweeps=" << report.estimate.iterations_used
        << " person_reliability=" << r.person_separation_reliability << " person_separation=" << r.person_separation_ratio
        << " item_reliability=" << r.item_separation_reliability << " item_separation=" << r.item_separation_ratio << '\n';
    out << "thresholds=";
    for( Eigen::Index k = 0; k < report.estimate.thresholds.size(); ++k )
        out << ( k ? "," : "" ) << report.estimate.thresholds[k];
    out << " category_order=" << ( report.curves.ordered() ? "ordered" : "disordered" );
    for( int k : report.curves.never_modal )
        out << " never_modal=" << k;
    out << '\n';
    return kOk;
}

int run_report( const std::string& log_file, const std::string& out_dir, std::ostream& out, std::ostream& err )
{
    const TrialLog log = read_log( fs::path( log_file ) );
    if( const int bad = first_replay_mismatch( log ); bad >= 0 )
    {
        err << "error: trial " << bad << " does not re-score to its logged value\n";
        return kDataError;
    }

    fs::create_directories( out_dir );
    std::vector<TaggedScore> tagged;
    int successes = 0;
    {
        std::ofstream trials( fs::path( out_dir ) / "trials.csv" );
        if( !trials )
            throw Error( Errc::Io, "cannot write trials.csv in " + out_dir );
        trials << std::setprecision( 10 );
        trials << "trial,sh_yaw,sh_pitch,sh_roll,elbow,x,y,z,outcome,completion_time_s,score,hss_level,mas_item,target_success,predicted_success\n";
        for( const auto& r : log.records )
        {
            trials << r.trial_idx << ',' << r.orientation.sh_yaw << ',' << r.orientation.sh_pitch << ',' << r.orientation.sh_roll << ','
                   << r.orientation.elbow << ',' << r.target_xyz[0] << ',' << r.target_xyz[1] << ',' << r.target_xyz[2] << ','
                   << to_string( r.outcome ) << ',';
            if( r.completion_time_s )
                trials << *r.completion_time_s;
            trials << ',' << r.score_value << ',' << r.hss_level << ',' << to_string( r.mas_item ) << ',' << r.target_success << ','
                   << r.predicted_success << '\n';
            TaggedScore t;
            t.item = r.mas_item;
            t.score.value = r.score_value;
            tagged.push_back( t );
            successes += r.outcome == TrialResult::Successful;
        }
    }
    const SessionScore total = session_score( tagged );
    {
        std::ofstream summary( fs::path( out_dir ) / "summary.csv" );
        if( !summary )
            throw Error( Errc::Io, "cannot write summary.csv in " + out_dir );
        summary << std::setprecision( 10 ) << "metric,value\n";
        summary << "trials," << log.records.size() << '\n';
        summary << "total_score," << total.total << '\n';
        for( int k = 0; k < kMasItemCount; ++k )
            summary << "score_" << to_string( static_cast<MasItem>( k ) ) << ',' << total.per_mas_item[static_cast<std::size_t>( k )] << '\n';
        summary << "success_rate," << ( log.records.empty() ? 0.0 : static_cast<double>( successes ) / log.records.size() ) << '\n';
        summary << "final_hss_level," << ( log.records.empty() ? 1 : log.records.back().hss_level ) << '\n';
    }
    out << "session=" << log.header.session_id << " trials=" << log.records.size() << " total_score=" << total.total
        << " report=" << out_dir << '\n';
    return kOk;
}

int run_signal( const std::string& in_csv, const std::string& out_csv, double rate, int window, std::ostream& out )
{
    const TimeSeries raw = read_csv( fs::path( in_csv ) );
    const TimeSeries uniform = resample_uniform( raw, rate );
    const TimeSeries smoothed = smooth( uniform, window );
    write_csv( fs::path( out_csv ), smoothed );
    out << "samples_in=" << raw.size() << " samples_out=" << smoothed.size() << " rate=" << rate << " window=" << window << '\n';
    return kOk;
}

} // namespace

int dispatch( const std::vector<std::string>& args, std::ostream& out, std::ostream& err )
{
    CLI::App app( "Adaptive rehabilitation task simulator and rating-scale analysis", "rehab" );
    app.require_subcommand( 1 );

    auto* simulate = app.add_subcommand( "simulate", "Run closed-loop sessions against a simulated patient" );
    LayeredOptions sim;
    sim.add( *simulate, "--policy", "policy", "Target generator: mcts or rog" );
    sim.add( *simulate, "--trials", "trials", "Trials per session" )->check( CLI::Number );
    sim.add( *simulate, "--iterations", "iterations", "Tree-search iterations per trial" )->check( CLI::Number );
    sim.add( *simulate, "--cp", "cp", "UCT exploration constant" )->check( CLI::Number );
    sim.add( *simulate, "--seed", "seed", "Random seed" )->check( CLI::Number );
    sim.add( *simulate, "--patient", "patient", "Patient profile JSON or preset (mild, moderate, severe)" );
    sim.add( *simulate, "--out", "out", "Log file (.jsonl) or output directory" );
    sim.add( *simulate, "--sessions", "sessions", "Number of independent sessions" )->check( CLI::Number );
    sim.add( *simulate, "--estimator", "estimator", "Planning model: model, profile or record" );
    sim.add( *simulate, "--prior", "prior", "Reference profile for the fitted planning model" );
    sim.add( *simulate, "--target-start", "target_start", "Initial target success rate" )->check( CLI::Number );
    sim.add( *simulate, "--target-end", "target_end", "Final target success rate" )->check( CLI::Number );
    sim.add( *simulate, "--target-span", "target_span", "Trials over which the target moves (0 = session)" )->check( CLI::Number );
    sim.add( *simulate, "--best-time", "best_time", "Completion time earning full credit (s)" )->check( CLI::Number );
    sim.add( *simulate, "--max-time", "max_time", "Completion time earning no credit (s)" )->check( CLI::Number );
    sim.add( *simulate, "--session-id", "session_id", "Session identifier" );
    std::string config_file;
    simulate->add_option( "--config", config_file, "key = value configuration file" );

    auto* analyze = app.add_subcommand( "analyze", "Rasch rating-scale analysis of a questionnaire response matrix" );
    std::string responses, analyze_out;
    int categories = 5;
    analyze->add_option( "--responses", responses, "Response CSV (header item_1..item_N)" )->required();
    analyze->add_option( "--out", analyze_out, "Report directory" )->required();
    analyze->add_option( "--categories", categories, "Rating categories" )->check( CLI::Range( 2, 20 ) );

    auto* report = app.add_subcommand( "report", "Summarize a trial log" );
    std::string log_file, report_out;
    report->add_option( "--log", log_file, "Trial log (.jsonl)" )->required();
    report->add_option( "--out", report_out, "Report directory" )->required();

    auto* signal = app.add_subcommand( "signal", "Resample and smooth a t,v CSV stream" );
    std::string in_csv, out_csv;
    double rate = 30.0;
    int window = 5;
    signal->add_option( "--in", in_csv, "Input CSV" )->required();
    signal->add_option( "--out", out_csv, "Output CSV" )->required();
    signal->add_option( "--rate", rate, "Output sampling rate (Hz)" );
    signal->add_option( "--window", window, "Moving-average window (odd)" );

    std::vector<std::string> argv( args.rbegin(), args.rend() );
    if( !argv.empty() )
        argv.pop_back(); // program name
    try
    {
        app.parse( argv );
    }
    catch( const CLI::CallForHelp& e )
    {
        return app.exit( e, out, err );
    }
    catch( const CLI::ParseError& e )
    {
        app.exit( e, out, err );
        err << app.help();
        return kUsage;
    }

    try
    {
        if( *simulate )
        {
            auto file = config_file.empty() ? std::map<std::string, std::string>{} : load_config( config_file );
            return run_simulate( Settings( sim.given(), std::move( file ) ), out );
        }
        if( *analyze )
            return run_analyze( responses, analyze_out, categories, out );
        if( *report )
            return run_report( log_file, report_out, out, err );
        if( *signal )
            return run_signal( in_csv, out_csv, rate, window, out );
    }
    catch( const std::exception& e )
    {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

int dispatch( int argc, const char* const* argv, std::ostream& out, std::ostream& err )
{
    return dispatch( std::vector<std::string>( argv, argv + argc ), out, err );
}

} // namespace rehab::cli
