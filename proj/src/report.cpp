#include "rehab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rehab/error.hpp"

namespace rehab
{

namespace
{

std::ofstream open_out( const std::filesystem::path& path )
{
    std::ofstream out( path );
    if( !out )
        throw Error( Errc::Io, "cannot write " + path.string() );
    out.precision( 6 );
    out << std::fixed;
    return out;
}

/// Blank for NaN so spreadsheets read it as missing.
std::string num( double x, int precision = 6 )
{
    if( std::isnan( x ) )
        return "";
    if( std::isinf( x ) )
        return x > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s.precision( precision );
    s << std::fixed << x;
    return s.str();
}

const char* extreme_name( rasch::Extreme e )
{
    switch( e )
    {
    case rasch::Extreme::Minimum: return "minimum";
    case rasch::Extreme::Maximum: return "maximum";
    case rasch::Extreme::None: break;
    }
    return "";
}

} // namespace

AnalysisReport analyze_responses( const rasch::ResponseMatrix& responses, const rasch::JmleOptions& opts )
{
    AnalysisReport r;
    r.responses = responses;
    r.estimate = rasch::fit_jmle( responses, opts );
    r.fit = rasch::fit_statistics( responses, r.estimate );
    r.reliability = rasch::reliability( responses, r.estimate );
    r.map = rasch::wright_map( r.estimate, responses.item_labels );
    r.curves = rasch::category_curves( r.estimate );
    return r;
}

std::vector<std::string> analysis_report_files()
{
    return { "items.csv", "persons.csv", "reliability.csv", "wright_map.csv", "category_curves.csv", "wright_map.svg", "category_curves.svg" };
}

void write_analysis_report( const std::filesystem::path& dir, const AnalysisReport& report )
{
    std::filesystem::create_directories( dir );
    const auto& est = report.estimate;
    const auto& labels = report.responses.item_labels;

    {
        auto out = open_out( dir / "items.csv" );
        out << "item,difficulty_logit,infit_msq,outfit_msq,rmsr\n";
        for( std::size_t i = 0; i < report.fit.items.size(); ++i )
        {
            const auto& f = report.fit.items[i];
            const std::string label = i < labels.size() ? labels[i] : "item_" + std::to_string( i + 1 );
            out << label << ',' << num( est.item_difficulty[static_cast<Eigen::Index>( i )] ) << ',' << num( f.infit_msq ) << ','
                << num( f.outfit_msq ) << ',' << num( f.rmsr ) << '\n';
        }
    }
    {
        auto out = open_out( dir / "persons.csv" );
        out << "person,ability_logit,se,infit_msq,outfit_msq,rmsr,extreme\n";
        for( std::size_t v = 0; v < report.fit.persons.size(); ++v )
        {
            const auto& f = report.fit.persons[v];
            const auto idx = static_cast<Eigen::Index>( v );
            const bool extreme = est.person_extreme[v] != rasch::Extreme::None;
            out << "P" << v + 1 << ',' << num( est.person_ability[idx] ) << ',' << num( est.person_se[idx] ) << ','
                << ( extreme ? "" : num( f.infit_msq ) ) << ',' << ( extreme ? "" : num( f.outfit_msq ) ) << ','
                << ( extreme ? "" : num( f.rmsr ) ) << ',' << extreme_name( est.person_extreme[v] ) << '\n';
        }
    }
    {
        auto out = open_out( dir / "reliability.csv" );
        const auto& r = report.reliability;
        out << "scope,separation_reliability,separation_ratio\n";
        out << "person," << num( r.person_separation_reliability ) << ',' << num( r.person_separation_ratio ) << '\n';
        out << "item," << num( r.item_separation_reliability ) << ',' << num( r.item_separation_ratio ) << '\n';
    }
    {
        auto out = open_out( dir / "wright_map.csv" );
        rasch::write_wright_map_csv( out, report.map );
    }
    {
        auto out = open_out( dir / "category_curves.csv" );
        const auto& c = report.curves;
        out << "location";
        for( Eigen::Index k = 0; k < c.probability.cols(); ++k )
            out << ",p_" << k;
        out << '\n';
        for( Eigen::Index r = 0; r < c.location.size(); ++r )
        {
            out << num( c.location[r], 4 );
            for( Eigen::Index k = 0; k < c.probability.cols(); ++k )
                out << ',' << num( c.probability( r, k ), 8 );
            out << '\n';
        }
    }
    {
        auto out = open_out( dir / "wright_map.svg" );
        out << render_wright_map_svg( report.map );
    }
    {
        auto out = open_out( dir / "category_curves.svg" );
        out << render_category_curves_svg( report.curves );
    }
}

std::string render_wright_map_svg( const rasch::WrightMap& map )
{
    const double width = 520, height = 560, top = 30, bottom = 30, mid = 260;
    const double span = std::max( map.axis_max - map.axis_min, map.bin_width );
    auto y_of = [&]( double logit ) { return top + ( map.axis_max - logit ) / span * ( height - top - bottom ); };

    int max_count = 1;
    for( const auto& b : map.person_bins )
        max_count = std::max( max_count, b.persons );

    std::ostringstream s;
    s.precision( 2 );
    s << std::fixed;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<text x=\"" << mid - 120 << "\" y=\"18\">persons</text><text x=\"" << mid + 40 << "\" y=\"18\">items</text>\n";
    s << "<line x1=\"" << mid << "\" y1=\"" << top << "\" x2=\"" << mid << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    for( double tick = std::ceil( map.axis_min ); tick <= map.axis_max + 1e-9; tick += 1.0 )
        s << "<text x=\"" << mid - 28 << "\" y=\"" << y_of( tick ) + 4 << "\">" << tick << "</text>\n";
    for( const auto& b : map.person_bins )
    {
        if( b.persons == 0 )
            continue;
        const double w = 200.0 * b.persons / max_count;
        const double y0 = y_of( b.upper );
        s << "<rect x=\"" << mid - 32 - w << "\" y=\"" << y0 << "\" width=\"" << w << "\" height=\"" << y_of( b.lower ) - y0
          << "\" fill=\"steelblue\"/>\n";
    }
    for( const auto& it : map.items )
        s << "<circle cx=\"" << mid + 10 << "\" cy=\"" << y_of( it.logit ) << "\" r=\"3\"/><text x=\"" << mid + 18 << "\" y=\""
          << y_of( it.logit ) + 4 << "\">" << it.label << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string render_category_curves_svg( const rasch::CategoryCurves& curves )
{
    const double width = 600, height = 360, pad = 40;
    const double lo = curves.location[0];
    const double hi = curves.location[curves.location.size() - 1];
    auto x_of = [&]( double loc ) { return pad + ( loc - lo ) / ( hi - lo ) * ( width - 2 * pad ); };
    auto y_of = [&]( double p ) { return height - pad - p * ( height - 2 * pad ); };
    static const char* colours[] = { "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d" };

    std::ostringstream s;
    s.precision( 2 );
    s << std::fixed;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << width - 2 * pad << "\" height=\"" << height - 2 * pad
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << width / 2 - 60 << "\" y=\"" << height - 8 << "\">measure relative to item (logits)</text>\n";
    for( Eigen::Index k = 0; k < curves.probability.cols(); ++k )
    {
        s << "<polyline fill=\"none\" stroke=\"" << colours[k % 7] << "\" points=\"";
        for( Eigen::Index r = 0; r < curves.location.size(); ++r )
            s << x_of( curves.location[r] ) << ',' << y_of( curves.probability( r, k ) ) << ' ';
        s << "\"/>\n";
        const double peak = std::clamp( curves.peaks[k], lo, hi );
        s << "<text x=\"" << x_of( peak ) << "\" y=\"" << pad - 6 << "\" fill=\"" << colours[k % 7] << "\">" << k << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace rehab
