#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rehab/psychometrics.hpp"

namespace rehab
{

struct AnalysisReport
{
    rasch::ResponseMatrix responses;
    rasch::RaschEstimate estimate;
    rasch::FitReport fit;
    rasch::ReliabilityReport reliability;
    rasch::WrightMap map;
    rasch::CategoryCurves curves;
};

/// Fits the rating scale model and derives every table the report writer needs.
AnalysisReport analyze_responses( const rasch::ResponseMatrix& responses, const rasch::JmleOptions& opts = {} );

/// Files written by `write_analysis_report`, relative to the output directory.
std::vector<std::string> analysis_report_files();

/// items.csv, persons.csv, reliability.csv, wright_map.csv, category_curves.csv,
/// wright_map.svg and category_curves.svg.
void write_analysis_report( const std::filesystem::path& dir, const AnalysisReport& report );

std::string render_wright_map_svg( const rasch::WrightMap& map );
std::string render_category_curves_svg( const rasch::CategoryCurves& curves );

} // namespace rehab
