#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "festcircuit/balance.hpp"
#include "festcircuit/config.hpp"
#include "festcircuit/ingest.hpp"
#include "festcircuit/socioeconomic.hpp"

namespace festcircuit::pipeline {

/// Everything the analyses share, loaded once.
struct LoadedData {
    CountryAliasTable aliases;
    std::vector<ScreeningRecord> all_records;
    std::vector<ScreeningRecord> records; // period filtered
    std::size_t source_rows = 0;
    socio::WorldBankData wb;
    std::map<std::string, socio::Capital> capitals;
    balance::AccreditationTable accreditation;
    std::map<std::string, std::string> regions;
    std::vector<std::string> warnings;
};

LoadedData load_inputs(const RunConfig& config);

/// Writes validation.json into the output directory and prints a summary.
/// Returns a nonzero exit code on hard errors (unreadable inputs, alias
/// gaps); missing covariates only warn.
int cmd_validate(const RunConfig& config, std::ostream& log);

/// Runs the requested analyses ("balance", "fit", "flows", "diversity");
/// writes their output files plus manifest.json. Throws on hard errors.
void cmd_run(const RunConfig& config, const std::set<std::string>& analyses, std::ostream& log);

/// Period-average attribute per country with data, appearance weighted.
std::map<std::string, double> country_period_attribute(
    const std::vector<ScreeningRecord>& records,
    const std::map<std::string, socio::YearSeries>& series, int period_start, int period_end);

} // namespace festcircuit::pipeline
