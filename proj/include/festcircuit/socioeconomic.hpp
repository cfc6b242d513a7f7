#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "festcircuit/ingest.hpp"

namespace festcircuit::socio {

/// Sparse year -> value observations for one country indicator.
using YearSeries = std::map<int, double>;

/// Value at `year`: the observation itself, linear interpolation between the
/// bracketing observations, or the nearest endpoint outside the observed
/// span. Empty series is an error.
double series_value_at(const YearSeries& series, int year);

/// Dense series over [start, end] built with series_value_at.
YearSeries interpolate_series(const YearSeries& series, int start, int end);

struct PeriodAverage {
    double value = 0.0;
    bool unweighted_fallback = false; // all weights were zero
};

/// Average of per-year values weighted by per-year weights over [start, end].
/// Zero total weight falls back to the plain mean.
PeriodAverage weighted_period_average(const YearSeries& values, const std::map<int, double>& weights,
                                      int start, int end);

struct WorldBankData {
    std::map<std::string, YearSeries> population;     // country code -> series
    std::map<std::string, YearSeries> gdp_per_capita; // current US$, gdp / population per year
};

/// Long-format file: country_name, indicator, year, value. Population rows
/// use SP.POP.TOTL, total GDP rows NY.GDP.MKTP.CD; per capita values are
/// derived for years where both exist. Country names resolve through the
/// alias table.
WorldBankData load_world_bank(const std::filesystem::path& path, const CountryAliasTable& aliases);

struct Capital {
    std::string name;
    double lat = 0.0;
    double lon = 0.0;
};

std::map<std::string, Capital> load_capitals(const std::filesystem::path& path);

/// Great-circle distance in kilometres, mean Earth radius 6371.0 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

/// Distinct festival editions (festival_id) per host country.
std::map<std::string, int> hosted_event_counts(const std::vector<ScreeningRecord>& records);

/// Film-festival pair counts per producer country and event year.
std::map<std::string, std::map<int, double>> annual_appearance_weights(
    const std::vector<ScreeningRecord>& records);

struct CountryProfile {
    std::string country;
    double population = 0.0;     // period average, persons
    double gdp_per_capita = 0.0; // period average, current US$
    int events_hosted = 0;
    double distance_km = 0.0;  // capital to reference capital
    double appearances = 0.0;  // film-festival pairs in the period
};

struct CovariateTable {
    std::vector<CountryProfile> rows;          // countries with complete covariates
    std::vector<std::string> exclusion_notes;  // one per dropped country
};

/// Builds one profile per country appearing as producer in the period.
/// Countries missing population, GDP per capita or a capital are dropped
/// with a note. The reference country itself gets distance 0.
CovariateTable build_covariates(const std::vector<ScreeningRecord>& records,
                                const WorldBankData& wb,
                                const std::map<std::string, Capital>& capitals,
                                const std::string& reference_country, int period_start,
                                int period_end);

} // namespace festcircuit::socio
