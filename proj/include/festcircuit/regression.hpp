#pragma once

#include <map>
#include <string>
#include <vector>

#include "festcircuit/linalg.hpp"
#include "festcircuit/socioeconomic.hpp"

namespace festcircuit::regression {

/// Fixed column order of the appearance model design matrix. Population is
/// centered at 1e7 persons, GDP per capita at 1e4 US$, hosted events get +1
/// smoothing before the log, distance enters in thousands of km, and the
/// interaction multiplies the two centered log terms.
inline const std::vector<std::string> kTermNames = {
    "intercept", "population", "gdp_per_capita", "events", "distance",
    "population_x_gdp_per_capita"};

struct Design {
    linalg::Matrix x;
    linalg::Vector y; // log10 appearance counts
    std::vector<std::string> countries;
    std::vector<std::string> warnings; // rows excluded (appearances < 1)
};

Design build_design(const std::vector<socio::CountryProfile>& profiles);

linalg::Vector design_row(double population, double gdp_per_capita, int events_hosted,
                          double distance_km);

struct Fit {
    std::vector<std::string> terms;
    linalg::Vector coefficients;
    linalg::Vector standard_errors;
    linalg::Vector t_stats;
    linalg::Vector p_values;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double f_statistic = 0.0;
    int df_model = 0;    // k
    int df_residual = 0; // n - k - 1
    linalg::Vector fitted;
    linalg::Vector residuals;
    std::vector<std::string> countries;
};

Fit ols_fit(const Design& design);

/// Expected appearance count on the linear scale, 10^(beta . x).
double predict_appearances(const linalg::Vector& coefficients, double population,
                           double gdp_per_capita, int events_hosted, double distance_km);

struct ResidualEntry {
    std::string country;
    double residual = 0.0; // log10 observed - log10 predicted
    double observed = 0.0;
    double predicted = 0.0;
};

/// Descending by residual, country code breaks ties.
std::vector<ResidualEntry> residual_ranking(const Fit& fit);

struct Diagnostics {
    std::map<std::string, double> vif; // per non-intercept term
    std::vector<std::string> high_vif_terms;
    std::vector<std::pair<double, double>> residual_vs_fitted;
    double residual_skewness = 0.0;
    double residual_excess_kurtosis = 0.0;
};

Diagnostics diagnostics(const Fit& fit, const Design& design);

struct UisFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    std::size_t n = 0;
    /// country -> log10 residual; negative means fewer festival appearances
    /// than its production volume predicts.
    std::map<std::string, double> residuals;
};

/// One-predictor OLS of log10(appearances) on log10(films produced) over the
/// countries present in both maps with counts >= 1.
UisFit uis_correlation(const std::map<std::string, double>& appearance_counts,
                       const std::map<std::string, double>& films_produced);

} // namespace festcircuit::regression
