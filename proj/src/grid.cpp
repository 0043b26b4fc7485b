#include "rehab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rehab
{

int GridAxis::nearest( double v ) const
{
    if( samples == 1 || max == min )
        return 0;
    const double pos = ( v - min ) / ( max - min ) * static_cast<double>( samples - 1 );
    return std::clamp( static_cast<int>( std::lround( pos ) ), 0, samples - 1 );
}

void ActionGrid::validate() const
{
    for( int d = 0; d < kJointDims; ++d )
    {
        const auto& a = axes[d];
        const std::string name = kJointNames[d];
        if( a.samples < 1 )
            throw Error( Errc::InvalidArgument, name + ": at least one sample required" );
        if( a.samples == 1 ? a.min != a.max : !( a.min < a.max ) )
            throw Error( Errc::InvalidArgument, name + ": need min < max (or min == max with one sample)" );
        if( a.min < kJointRanges[d].min || a.max > kJointRanges[d].max )
            throw Error( Errc::InvalidArgument, name + ": axis exceeds the joint range" );
    }
}

std::size_t ActionGrid::cell_count() const
{
    std::size_t n = 1;
    for( const auto& a : axes )
        n *= static_cast<std::size_t>( a.samples );
    return n;
}

std::size_t ActionGrid::cell_id( const GridIndex& idx ) const
{
    std::size_t id = 0;
    for( int d = 0; d < kJointDims; ++d )
        id = id * static_cast<std::size_t>( axes[d].samples ) + static_cast<std::size_t>( idx[d] );
    return id;
}

GridIndex ActionGrid::index_of( std::size_t cell ) const
{
    GridIndex idx{};
    for( int d = kJointDims - 1; d >= 0; --d )
    {
        const auto n = static_cast<std::size_t>( axes[d].samples );
        idx[d] = static_cast<int>( cell % n );
        cell /= n;
    }
    return idx;
}

GridIndex ActionGrid::nearest( const JointOrientation& orient ) const
{
    GridIndex idx{};
    for( int d = 0; d < kJointDims; ++d )
        idx[d] = axes[d].nearest( orient[d] );
    return idx;
}

JointOrientation ActionGrid::at( const GridIndex& idx ) const
{
    JointOrientation o;
    for( int d = 0; d < kJointDims; ++d )
        o[d] = axes[d].value( idx[d] );
    return o;
}

bool ActionGrid::on_grid( const JointOrientation& orient, double tol ) const
{
    const JointOrientation snapped = at( nearest( orient ) );
    for( int d = 0; d < kJointDims; ++d )
        if( std::abs( snapped[d] - orient[d] ) > tol )
            return false;
    return true;
}

} // namespace rehab
