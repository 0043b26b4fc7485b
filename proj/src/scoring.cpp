#include "rehab/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rehab/error.hpp"

namespace rehab
{

std::string_view to_string( TrialResult r )
{
    switch( r )
    {
    case TrialResult::Successful: return "successful";
    case TrialResult::PartiallySuccessful: return "partial";
    case TrialResult::NotSuccessful: return "failed";
    }
    return "failed";
}

TrialResult trial_result_from_string( std::string_view s )
{
    if( s == "successful" )
        return TrialResult::Successful;
    if( s == "partial" )
        return TrialResult::PartiallySuccessful;
    if( s == "failed" )
        return TrialResult::NotSuccessful;
    throw Error( Errc::InvalidArgument, "unknown trial result '" + std::string( s ) + "'" );
}

TrialScore score_trial( const TrialOutcome& outcome, ScoringTimes times )
{
    if( !( times.best > 0.0 && times.best < times.max ) )
        throw Error( Errc::InvalidTimes, "need 0 < best_time < max_time" );

    TrialScore s;
    switch( outcome.result )
    {
    case TrialResult::Successful:
    {
        s.base = 1.0;
        if( !outcome.completion_time || !( *outcome.completion_time > 0.0 ) )
            throw Error( Errc::InvalidArgument, "successful trial needs a positive completion time" );
        const double t = *outcome.completion_time;
        s.time_multiplier = std::clamp( ( times.max - t ) / ( times.max - times.best ), 0.0, 1.0 );
        break;
    }
    case TrialResult::PartiallySuccessful:
        s.base = 0.5;
        s.time_multiplier = 1.0;
        break;
    case TrialResult::NotSuccessful:
        s.base = 0.0;
        s.time_multiplier = 0.0;
        break;
    }
    s.value = s.base * s.time_multiplier;
    return s;
}

HoldProgress hold_trial_progress( std::span<const bool> steady_frames, double hold_required )
{
    if( !( hold_required >= 0.0 ) )
        throw Error( Errc::InvalidArgument, "hold_required must be non-negative" );

    const auto frames_needed = static_cast<long>( std::ceil( hold_required * kFrameRate - 1e-9 ) );
    HoldProgress p;
    long run = 0;
    for( bool steady : steady_frames )
    {
        if( run >= frames_needed )
            break;
        if( steady )
            ++run;
        else
        {
            ++p.resets;
            run = 0;
        }
    }
    p.elapsed_hold = static_cast<double>( run ) / kFrameRate;
    p.successful = run >= frames_needed;
    return p;
}

bool is_steady( double displacement, double radius ) { return std::abs( displacement ) < radius; }

std::string_view to_string( MasItem item )
{
    switch( item )
    {
    case MasItem::UpperArmFunction: return "upper_arm_function";
    case MasItem::HandMovements: return "hand_movements";
    case MasItem::AdvancedHandActivities: return "advanced_hand_activities";
    case MasItem::PosturalBalance: return "postural_balance";
    }
    return "advanced_hand_activities";
}

MasItem mas_item_from_string( std::string_view s )
{
    for( int i = 0; i < kMasItemCount; ++i )
    {
        const auto item = static_cast<MasItem>( i );
        if( to_string( item ) == s )
            return item;
    }
    throw Error( Errc::InvalidArgument, "unknown MAS item '" + std::string( s ) + "'" );
}

SessionScore session_score( std::span<const TaggedScore> scores )
{
    SessionScore out;
    for( const auto& s : scores )
    {
        out.total += s.score.value;
        out.per_mas_item[static_cast<int>( s.item )] += s.score.value;
    }
    return out;
}

} // namespace rehab
