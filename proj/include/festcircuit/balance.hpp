#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "festcircuit/ingest.hpp"
#include "festcircuit/socioeconomic.hpp"

namespace festcircuit::balance {

/// festival_series_id -> "A" or "B"; series not on file are B-listers.
class AccreditationTable {
public:
    static AccreditationTable load(const std::filesystem::path& path);
    static AccreditationTable empty();

    std::string classify(const std::string& festival_series_id) const;

private:
    std::map<std::string, std::string> by_series_;
};

enum class MissingPolicy { error, skip };

/// Per-country sparse attribute series (population or GDP per capita).
using AttributeSeries = std::map<std::string, socio::YearSeries>;

struct EntryValue {
    std::size_t record_index = 0;
    std::string producer;
    double log_value = 0.0; // log10 of attribute at the record's event year
};

struct EntryValues {
    std::vector<EntryValue> pairs;
    std::size_t skipped = 0; // pairs dropped under MissingPolicy::skip
};

/// One value per (record, producer) pair: log10 of the producer's attribute
/// at the record's event year.
EntryValues collect_entry_values(const std::vector<ScreeningRecord>& records,
                                 const AttributeSeries& series, MissingPolicy policy);

std::vector<double> entry_log_values(const std::vector<ScreeningRecord>& records,
                                     const AttributeSeries& series,
                                     MissingPolicy policy = MissingPolicy::error);

/// Arithmetic mean of log values = log10 of the geometric mean.
double geometric_mean_log(const std::vector<double>& log_values);

/// Unweighted mean of log10(attribute) over the participating countries:
/// the log-mean an equal-counts circuit would show.
double uniform_expectation(const std::map<std::string, double>& country_attribute);

/// Mean of log10(attribute) weighted by the attribute itself: the log-mean
/// of a circuit whose counts are attribute-proportional.
double proportional_expectation(const std::map<std::string, double>& country_attribute);

/// Sampling estimate of the two expectations above, for fidelity checks.
double simulated_expectation(const std::map<std::string, double>& country_attribute,
                             bool proportional, std::size_t samples, std::uint64_t seed);

struct BalanceReport {
    std::string split; // "all", "A-list", "B-list", or a region label
    std::string attribute;
    std::vector<double> log_values;
    double observed_log_mean = 0.0;
    double uniform = 0.0;
    double proportional = 0.0;
};

enum class SplitKind { all, accreditation, region };

/// One report per group. Expectations use the period-average attribute of
/// the countries participating in that group's entries. The region split
/// groups by the host country's region, unmapped hosts land in "other".
std::vector<BalanceReport> split_report(const std::vector<ScreeningRecord>& records,
                                        SplitKind kind, const std::string& attribute_name,
                                        const AttributeSeries& series,
                                        const std::map<std::string, double>& country_attribute,
                                        const AccreditationTable& accreditation,
                                        const std::map<std::string, std::string>& regions,
                                        MissingPolicy policy = MissingPolicy::error);

struct TrajectoryPoint {
    std::string festival_series_id;
    int year = 0;
    double observed_log_mean = 0.0;
    std::size_t n_entries = 0;
};

/// Per-series yearly geometric-mean trajectories, unweighted per-pair values.
std::vector<TrajectoryPoint> series_trajectories(const std::vector<ScreeningRecord>& records,
                                                 const AttributeSeries& series,
                                                 MissingPolicy policy = MissingPolicy::error);

} // namespace festcircuit::balance
