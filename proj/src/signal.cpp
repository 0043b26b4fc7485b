#include "rehab/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rehab/error.hpp"

namespace rehab
{

TimeSeries::TimeSeries( Eigen::VectorXd times, Eigen::VectorXd values )
    : t( std::move( times ) ), v( std::move( values ) )
{
    validate();
}

void TimeSeries::validate() const
{
    if( t.size() != v.size() )
        throw Error( Errc::InvalidArgument, "time and value vectors differ in length" );
    if( t.size() == 0 )
        throw Error( Errc::TooShort, "time series is empty" );
    for( Eigen::Index i = 0; i < t.size(); ++i )
    {
        if( !std::isfinite( t[i] ) || !std::isfinite( v[i] ) )
            throw Error( Errc::InvalidArgument, "non-finite sample at index " + std::to_string( i ) );
        if( i > 0 && !( t[i] > t[i - 1] ) )
            throw Error( Errc::InvalidArgument, "timestamps must strictly increase (index " + std::to_string( i ) + ")" );
    }
}

TimeSeries resample_uniform( const TimeSeries& ts, double rate_hz )
{
    if( !( rate_hz > 0.0 ) || !std::isfinite( rate_hz ) )
        throw Error( Errc::InvalidArgument, "rate must be positive" );
    if( ts.size() < 2 )
        throw Error( Errc::TooShort, "resampling needs at least two samples" );
    ts.validate();

    const double t0 = ts.t[0];
    const double t_end = ts.t[ts.size() - 1];
    const double step = 1.0 / rate_hz;
    const double snap = 1e-9 * step;
    const auto count = static_cast<Eigen::Index>( std::floor( ( t_end - t0 ) * rate_hz + 1e-9 ) ) + 1;

    TimeSeries out;
    out.t.resize( count );
    out.v.resize( count );
    const double* begin = ts.t.data();
    const double* end = begin + ts.size();
    for( Eigen::Index k = 0; k < count; ++k )
    {
        const double tk = t0 + static_cast<double>( k ) / rate_hz;
        // Segment [i, i+1] with t_i <= tk; the last knot uses the final segment.
        auto it = std::upper_bound( begin, end, tk );
        Eigen::Index i = std::max<Eigen::Index>( 0, ( it - begin ) - 1 );
        i = std::min( i, ts.size() - 2 );

        double value;
        if( std::abs( tk - ts.t[i] ) <= snap )
            value = ts.v[i];
        else if( std::abs( tk - ts.t[i + 1] ) <= snap )
            value = ts.v[i + 1];
        else
        {
            const double frac = ( tk - ts.t[i] ) / ( ts.t[i + 1] - ts.t[i] );
            value = ts.v[i] + ( ts.v[i + 1] - ts.v[i] ) * frac;
        }
        out.t[k] = tk;
        out.v[k] = value;
    }
    return out;
}

bool is_uniform( const TimeSeries& ts, double rel_tol )
{
    const Eigen::Index n = ts.size();
    if( n < 3 )
        return true;
    const double mean_step = ( ts.t[n - 1] - ts.t[0] ) / static_cast<double>( n - 1 );
    for( Eigen::Index i = 1; i < n; ++i )
        if( std::abs( ( ts.t[i] - ts.t[i - 1] ) - mean_step ) > rel_tol * mean_step )
            return false;
    return true;
}

TimeSeries smooth( const TimeSeries& ts, int window )
{
    if( window < 1 || window % 2 == 0 )
        throw Error( Errc::InvalidArgument, "smoothing window must be odd and positive" );
    ts.validate();
    if( !is_uniform( ts ) )
        throw Error( Errc::NotUniform, "smoothing requires uniformly sampled input; resample first" );

    const Eigen::Index n = ts.size();
    const Eigen::Index half = window / 2;

    TimeSeries out;
    out.t = ts.t;
    out.v.resize( n );
    for( Eigen::Index i = 0; i < n; ++i )
    {
        const Eigen::Index h = std::min( { half, i, n - 1 - i } );
        if( h == 0 )
        {
            out.v[i] = ts.v[i];
            continue;
        }
        double sum = 0.0;
        for( Eigen::Index j = i - h; j <= i + h; ++j )
            sum += ts.v[j];
        out.v[i] = sum / static_cast<double>( 2 * h + 1 );
    }
    return out;
}

TimeSeries read_csv( std::istream& in )
{
    std::string line;
    if( !std::getline( in, line ) )
        throw Error( Errc::TooShort, "empty CSV stream" );
    if( !line.empty() && line.back() == '\r' )
        line.pop_back();
    if( line != "t,v" )
        throw Error( Errc::InvalidArgument, "expected header 't,v', got '" + line + "'" );

    std::vector<double> times, values;
    std::size_t lineno = 1;
    while( std::getline( in, line ) )
    {
        ++lineno;
        if( !line.empty() && line.back() == '\r' )
            line.pop_back();
        if( line.empty() )
            continue;
        const auto comma = line.find( ',' );
        try
        {
            if( comma == std::string::npos )
                throw std::invalid_argument( "missing comma" );
            const double tv = std::stod( line.substr( 0, comma ) );
            const double vv = std::stod( line.substr( comma + 1 ) );
            times.push_back( tv );
            values.push_back( vv );
        }
        catch( const std::exception& )
        {
            throw Error( Errc::InvalidArgument, "malformed CSV row at line " + std::to_string( lineno ) );
        }
    }
    return TimeSeries( Eigen::Map<Eigen::VectorXd>( times.data(), static_cast<Eigen::Index>( times.size() ) ),
                       Eigen::Map<Eigen::VectorXd>( values.data(), static_cast<Eigen::Index>( values.size() ) ) );
}

TimeSeries read_csv( const std::filesystem::path& path )
{
    std::ifstream in( path );
    if( !in )
        throw Error( Errc::Io, "cannot open " + path.string() );
    return read_csv( in );
}

void write_csv( std::ostream& out, const TimeSeries& ts )
{
    std::ostringstream buf;
    buf.precision( 17 );
    buf << "t,v\n";
    for( Eigen::Index i = 0; i < ts.size(); ++i )
        buf << ts.t[i] << ',' << ts.v[i] << '\n';
    out << buf.str();
}

void write_csv( const std::filesystem::path& path, const TimeSeries& ts )
{
    std::ofstream out( path );
    if( !out )
        throw Error( Errc::Io, "cannot write " + path.string() );
    write_csv( out, ts );
}

} // namespace rehab
