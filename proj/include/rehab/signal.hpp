#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

namespace rehab
{

/// Scalar stream with strictly increasing timestamps (seconds).
struct TimeSeries
{
    Eigen::VectorXd t;
    Eigen::VectorXd v;

    TimeSeries() = default;
    TimeSeries( Eigen::VectorXd times, Eigen::VectorXd values );

    Eigen::Index size() const { return t.size(); }

    /// Throws InvalidArgument unless sizes match, the series is non-empty and t increases.
    void validate() const;
};

/// Linear interpolation onto t0, t0 + 1/rate, ... <= t_end. Grid times that land on an
/// input timestamp (within 1e-9 of the step) take that sample's value unchanged.
TimeSeries resample_uniform( const TimeSeries& ts, double rate_hz = 30.0 );

/// True when consecutive spacings agree to `rel_tol` of the mean spacing.
bool is_uniform( const TimeSeries& ts, double rel_tol = 1e-6 );

/// Centered moving average over `window` (odd) samples. Near the ends the window shrinks
/// symmetrically, so the output has no phase shift and keeps its length.
TimeSeries smooth( const TimeSeries& ts, int window = 5 );

/// CSV with a `t,v` header.
TimeSeries read_csv( std::istream& in );
TimeSeries read_csv( const std::filesystem::path& path );
void write_csv( std::ostream& out, const TimeSeries& ts );
void write_csv( const std::filesystem::path& path, const TimeSeries& ts );

} // namespace rehab
