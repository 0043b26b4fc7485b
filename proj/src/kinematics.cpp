#include "rehab/kinematics.hpp"

#include <cmath>
#include <sstream>

namespace rehab
{

const char* to_string( Errc code )
{
    switch( code )
    {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::Unreachable: return "Unreachable";
    case Errc::InvalidTimes: return "InvalidTimes";
    case Errc::TooShort: return "TooShort";
    case Errc::NotUniform: return "NotUniform";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::Io: return "Io";
    case Errc::Config: return "Config";
    }
    return "Unknown";
}

bool in_range( const JointOrientation& orient )
{
    for( int d = 0; d < kJointDims; ++d )
    {
        const double v = orient[d];
        if( !std::isfinite( v ) || v < kJointRanges[d].min || v > kJointRanges[d].max )
            return false;
    }
    return true;
}

void check_range( const JointOrientation& orient )
{
    for( int d = 0; d < kJointDims; ++d )
    {
        const double v = orient[d];
        if( !std::isfinite( v ) || v < kJointRanges[d].min || v > kJointRanges[d].max )
        {
            std::ostringstream msg;
            msg << kJointNames[d] << " = " << v << " outside [" << kJointRanges[d].min << ", " << kJointRanges[d].max << "]";
            throw Error( Errc::OutOfRange, msg.str() );
        }
    }
}

} // namespace rehab
