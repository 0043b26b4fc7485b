#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rehab/rng.hpp"

namespace rehab::rasch
{

/// Persons x items ordinal responses in 0..categories-1; kMissing marks a blank cell.
struct ResponseMatrix
{
    static constexpr int kMissing = -1;

    Eigen::MatrixXi data;
    int categories = 5;
    std::vector<std::string> item_labels;

    Eigen::Index persons() const { return data.rows(); }
    Eigen::Index items() const { return data.cols(); }
    int max_category() const { return categories - 1; }
    bool present( Eigen::Index v, Eigen::Index i ) const { return data( v, i ) != kMissing; }

    /// Throws InvalidArgument for out-of-range cells or a label count mismatch.
    void validate() const;
};

/// CSV with one header row of item labels (item_1, item_2, ...). Blank cells are missing.
ResponseMatrix read_responses_csv( std::istream& in, int categories = 5 );
ResponseMatrix read_responses_csv( const std::filesystem::path& path, int categories = 5 );
void write_responses_csv( std::ostream& out, const ResponseMatrix& m );

enum class Extreme
{
    None,
    Minimum,
    Maximum,
};

struct RaschEstimate
{
    Eigen::VectorXd person_ability;  ///< theta, logits
    Eigen::VectorXd item_difficulty; ///< delta, logits, centered over non-extreme items
    Eigen::VectorXd thresholds;      ///< tau_1..tau_m, summing to zero
    Eigen::VectorXd person_se;       ///< NaN for extreme persons
    Eigen::VectorXd item_se;         ///< NaN for extreme items
    std::vector<Extreme> person_extreme;
    std::vector<Extreme> item_extreme;
    bool converged = false;
    int iterations_used = 0;
    std::vector<double> log_likelihood; ///< joint log-likelihood after each sweep

    /// Estimate with known parameters and no extremes, e.g. for simulation studies.
    static RaschEstimate from_parameters( Eigen::VectorXd theta, Eigen::VectorXd delta, Eigen::VectorXd tau );
};

/// Rating-scale category probabilities P(X = 0..m) at location theta - delta.
/// Evaluated in log space; stable for |theta - delta| well beyond 50 logits.
Eigen::VectorXd rsm_category_prob( double theta, double delta, const Eigen::Ref<const Eigen::VectorXd>& thresholds );

/// E[X] at location eta = theta - delta.
double expected_score( double eta, const Eigen::Ref<const Eigen::VectorXd>& thresholds );

double log_likelihood( const ResponseMatrix& m, const RaschEstimate& est );

struct JmleOptions
{
    double tol = 1e-4;     ///< max parameter change (logits) for convergence
    int max_iter = 500;
    double max_step = 1.0; ///< Newton step clamp (logits)
};

/// Joint maximum likelihood for Andrich's rating scale model. Each sweep takes a
/// safeguarded Newton step for every person, every item and the threshold vector, then
/// re-centers item difficulties. Persons and items with extreme raw scores are dropped
/// (repeatedly, until none remain) and reported one logit beyond the interior range.
/// Throws DegenerateData when nothing estimable remains.
RaschEstimate fit_jmle( const ResponseMatrix& m, const JmleOptions& opts = {} );

struct ItemFit
{
    double infit_msq = 0.0;
    double outfit_msq = 0.0;
    double rmsr = 0.0;
    int count = 0;
};

struct FitReport
{
    std::vector<ItemFit> items;
    std::vector<ItemFit> persons;
    int zero_variance_cells = 0;
};

/// Infit = sum(y^2) / sum(W), outfit = mean(y^2 / W), rmsr = sqrt(mean(y^2)) with
/// y = x - E[x] and W = Var[x]. Missing cells and extreme persons/items are skipped;
/// cells with vanishing variance are left out of the mean squares and counted.
FitReport fit_statistics( const ResponseMatrix& m, const RaschEstimate& est );

struct ReliabilityReport
{
    double person_separation_reliability = 0.0;
    double item_separation_reliability = 0.0;
    double person_separation_ratio = 0.0;
    double item_separation_ratio = 0.0;
};

/// R = (observed variance - mean square error) / observed variance, clamped to [0, 1].
/// The observed variance divides by the number of measures.
double separation_reliability( const Eigen::Ref<const Eigen::VectorXd>& measures, const Eigen::Ref<const Eigen::VectorXd>& se );

/// G = sqrt(R / (1 - R)).
double separation_ratio( double reliability );

ReliabilityReport reliability( const ResponseMatrix& m, const RaschEstimate& est );

struct WrightBin
{
    double lower = 0.0;
    double upper = 0.0;
    int persons = 0;

    bool operator==( const WrightBin& ) const = default;
};

struct ItemPosition
{
    std::string label;
    double logit = 0.0;

    bool operator==( const ItemPosition& ) const = default;
};

struct WrightMap
{
    double bin_width = 0.25;
    double axis_min = 0.0;
    double axis_max = 0.0;
    std::vector<WrightBin> person_bins;
    std::vector<ItemPosition> items;

    bool operator==( const WrightMap& ) const = default;
};

/// Person histogram and item positions on a shared logit axis aligned to `bin_width`.
WrightMap wright_map( const RaschEstimate& est, const std::vector<std::string>& item_labels, double bin_width = 0.25 );

void write_wright_map_csv( std::ostream& out, const WrightMap& map );
WrightMap read_wright_map_csv( std::istream& in );

struct CategoryCurves
{
    Eigen::VectorXd location;    ///< theta - delta grid
    Eigen::MatrixXd probability; ///< location x category
    Eigen::VectorXd crossovers;  ///< P(k-1) = P(k) at location tau_k, k = 1..m
    Eigen::VectorXd peaks;       ///< location of each curve's maximum (grid ends for 0 and m)
    std::vector<int> never_modal; ///< categories that are never the most probable
    bool peaks_ascending = true;

    bool ordered() const { return never_modal.empty(); }
};

CategoryCurves category_curves( const Eigen::Ref<const Eigen::VectorXd>& thresholds, double lo = -6.0, double hi = 6.0, int points = 241 );
CategoryCurves category_curves( const RaschEstimate& est, double lo = -6.0, double hi = 6.0, int points = 241 );

/// Draws a response matrix from the rating scale model.
ResponseMatrix simulate_responses( const Eigen::Ref<const Eigen::VectorXd>& theta, const Eigen::Ref<const Eigen::VectorXd>& delta,
                                   const Eigen::Ref<const Eigen::VectorXd>& tau, Rng& rng );

enum class Construct
{
    Flow,
    Presence,
    Absorption,
};

const char* to_string( Construct c );

/// Construct tagged on engagement-questionnaire item `number` (1..16).
Construct engagement_construct( int number );

} // namespace rehab::rasch
