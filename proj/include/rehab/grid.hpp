#pragma once

#include <array>
#include <cstddef>

#include "rehab/kinematics.hpp"

namespace rehab
{

/// Uniformly spaced samples over [min, max] inclusive.
struct GridAxis
{
    double min = 0.0;
    double max = 0.0;
    int samples = 2;

    double value( int i ) const
    {
        if( samples == 1 )
            return min;
        if( i == samples - 1 )
            return max;
        return min + ( max - min ) * static_cast<double>( i ) / static_cast<double>( samples - 1 );
    }

    /// Closest sample index to `v`, clamped to the axis.
    int nearest( double v ) const;
};

using GridIndex = std::array<int, kJointDims>;

/// Discretized orientation space searched by the generators, one axis per joint dimension
/// in the order yaw, pitch, roll, elbow.
struct ActionGrid
{
    std::array<GridAxis, kJointDims> axes{ GridAxis{ 0.0, 90.0, 10 }, GridAxis{ -90.0, 90.0, 19 },
                                           GridAxis{ -90.0, 0.0, 10 }, GridAxis{ 0.0, 120.0, 13 } };

    /// Throws InvalidArgument unless every axis lies inside the joint limits, has at least
    /// one sample and, with a single sample, collapses to a point.
    void validate() const;

    std::size_t cell_count() const;
    std::size_t cell_id( const GridIndex& idx ) const;
    GridIndex index_of( std::size_t cell ) const;
    GridIndex nearest( const JointOrientation& orient ) const;
    JointOrientation at( const GridIndex& idx ) const;
    bool on_grid( const JointOrientation& orient, double tol = 1e-9 ) const;
};

} // namespace rehab
