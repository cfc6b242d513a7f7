#include "festcircuit/socioeconomic.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "festcircuit/csv.hpp"
#include "festcircuit/text.hpp"

namespace festcircuit::socio {

namespace {
constexpr double kEarthRadiusKm = 6371.0;
constexpr const char* kPopulationIndicator = "SP.POP.TOTL";
constexpr const char* kGdpIndicator = "NY.GDP.MKTP.CD";

double parse_number(const std::string& value, const std::string& where) {
    try {
        std::size_t pos = 0;
        double parsed = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw std::runtime_error("socio: bad numeric value '" + value + "' at " + where);
    }
}
} // namespace

double series_value_at(const YearSeries& series, int year) {
    if (series.empty()) throw std::invalid_argument("socio: value requested from empty series");
    auto upper = series.lower_bound(year);
    if (upper != series.end() && upper->first == year) return upper->second;
    if (upper == series.begin()) return upper->second;      // before first observation
    if (upper == series.end()) return std::prev(upper)->second; // after last observation
    auto lower = std::prev(upper);
    const double span = upper->first - lower->first;
    const double t = (year - lower->first) / span;
    return lower->second + t * (upper->second - lower->second);
}

YearSeries interpolate_series(const YearSeries& series, int start, int end) {
    YearSeries dense;
    for (int year = start; year <= end; ++year) dense[year] = series_value_at(series, year);
    return dense;
}

PeriodAverage weighted_period_average(const YearSeries& values, const std::map<int, double>& weights,
                                      int start, int end) {
    double weighted_sum = 0.0, weight_total = 0.0;
    double plain_sum = 0.0;
    int years = 0;
    for (int year = start; year <= end; ++year) {
        const double value = series_value_at(values, year);
        plain_sum += value;
        ++years;
        auto it = weights.find(year);
        const double w = it == weights.end() ? 0.0 : it->second;
        weighted_sum += w * value;
        weight_total += w;
    }
    if (weight_total > 0.0) return {weighted_sum / weight_total, false};
    return {plain_sum / years, true};
}

WorldBankData load_world_bank(const std::filesystem::path& path, const CountryAliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("socio: cannot open world bank file " + path.string());
    csv::Reader reader(in, path.filename().string());
    const auto name_col = reader.require_column("country_name");
    const auto indicator_col = reader.require_column("indicator");
    const auto year_col = reader.require_column("year");
    const auto value_col = reader.require_column("value");

    std::map<std::string, YearSeries> population, gdp_total;
    std::set<std::string> unknown;
    while (auto row = reader.next()) {
        const std::string where = path.filename().string() + ":" + std::to_string(reader.line_number());
        const std::string raw_name = text::trim((*row)[name_col]);
        const std::string indicator = text::trim((*row)[indicator_col]);
        const std::string raw_value = text::trim((*row)[value_col]);
        if (raw_value.empty()) continue; // missing observation
        auto code = aliases.resolve(raw_name);
        if (!code) {
            unknown.insert(raw_name);
            continue;
        }
        const int year = static_cast<int>(parse_number(text::trim((*row)[year_col]), where));
        const double value = parse_number(raw_value, where);
        if (indicator == kPopulationIndicator) {
            population[*code][year] = value;
        } else if (indicator == kGdpIndicator) {
            gdp_total[*code][year] = value;
        }
        // Other indicators are tolerated and skipped.
    }
    if (!unknown.empty()) {
        std::vector<std::string> offenders(unknown.begin(), unknown.end());
        std::ostringstream msg;
        msg << "socio: " << offenders.size() << " country name(s) missing from alias table:";
        for (const auto& name : offenders) msg << " '" << name << "'";
        throw AliasError(msg.str(), std::move(offenders));
    }

    WorldBankData data;
    data.population = std::move(population);
    for (const auto& [code, gdp_series] : gdp_total) {
        auto pop_it = data.population.find(code);
        if (pop_it == data.population.end()) continue;
        YearSeries per_capita;
        for (const auto& [year, gdp] : gdp_series) {
            auto pop_year = pop_it->second.find(year);
            if (pop_year != pop_it->second.end() && pop_year->second > 0.0) {
                per_capita[year] = gdp / pop_year->second;
            }
        }
        if (!per_capita.empty()) data.gdp_per_capita[code] = std::move(per_capita);
    }
    return data;
}

std::map<std::string, Capital> load_capitals(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("socio: cannot open capitals file " + path.string());
    csv::Reader reader(in, path.filename().string());
    const auto code_col = reader.require_column("code");
    const auto name_col = reader.require_column("capital");
    const auto lat_col = reader.require_column("lat");
    const auto lon_col = reader.require_column("lon");

    std::map<std::string, Capital> capitals;
    while (auto row = reader.next()) {
        const std::string where = path.filename().string() + ":" + std::to_string(reader.line_number());
        Capital cap;
        cap.name = text::trim((*row)[name_col]);
        cap.lat = parse_number(text::trim((*row)[lat_col]), where);
        cap.lon = parse_number(text::trim((*row)[lon_col]), where);
        capitals[text::trim((*row)[code_col])] = cap;
    }
    return capitals;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    const double deg = std::acos(-1.0) / 180.0;
    const double phi1 = lat1 * deg, phi2 = lat2 * deg;
    const double dphi = (lat2 - lat1) * deg, dlambda = (lon2 - lon1) * deg;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

std::map<std::string, int> hosted_event_counts(const std::vector<ScreeningRecord>& records) {
    std::map<std::string, std::set<std::string>> editions;
    for (const auto& rec : records) editions[rec.host_country].insert(rec.festival_id);
    std::map<std::string, int> counts;
    for (const auto& [country, ids] : editions) counts[country] = static_cast<int>(ids.size());
    return counts;
}

std::map<std::string, std::map<int, double>> annual_appearance_weights(
    const std::vector<ScreeningRecord>& records) {
    std::map<std::string, std::map<int, double>> weights;
    for (const auto& rec : records) {
        for (const auto& country : rec.producer_countries) {
            weights[country][rec.event_year] += 1.0;
        }
    }
    return weights;
}

CovariateTable build_covariates(const std::vector<ScreeningRecord>& records,
                                const WorldBankData& wb,
                                const std::map<std::string, Capital>& capitals,
                                const std::string& reference_country, int period_start,
                                int period_end) {
    auto ref_capital = capitals.find(reference_country);
    if (ref_capital == capitals.end()) {
        throw std::runtime_error("socio: no capital on file for reference country " +
                                 reference_country);
    }

    const auto weights = annual_appearance_weights(records);
    const auto hosted = hosted_event_counts(records);
    // The response count is the raw film-festival pair count per country;
    // fractional co-production weighting only enters the flow analysis.
    const auto appearances = ingest::country_appearance_counts(records, false);

    CovariateTable table;
    for (const auto& [country, total_appearances] : appearances) {
        auto note = [&](const std::string& reason) {
            table.exclusion_notes.push_back(country + ": " + reason);
        };
        auto pop_it = wb.population.find(country);
        if (pop_it == wb.population.end() || pop_it->second.empty()) {
            note("no population data");
            continue;
        }
        auto gdp_it = wb.gdp_per_capita.find(country);
        if (gdp_it == wb.gdp_per_capita.end() || gdp_it->second.empty()) {
            note("no GDP per capita data");
            continue;
        }
        auto cap_it = capitals.find(country);
        if (cap_it == capitals.end()) {
            note("no capital coordinates");
            continue;
        }

        const auto& country_weights = weights.at(country);
        CountryProfile profile;
        profile.country = country;
        profile.population =
            weighted_period_average(pop_it->second, country_weights, period_start, period_end).value;
        profile.gdp_per_capita =
            weighted_period_average(gdp_it->second, country_weights, period_start, period_end).value;
        auto hosted_it = hosted.find(country);
        profile.events_hosted = hosted_it == hosted.end() ? 0 : hosted_it->second;
        profile.distance_km =
            country == reference_country
                ? 0.0
                : haversine_km(cap_it->second.lat, cap_it->second.lon, ref_capital->second.lat,
                               ref_capital->second.lon);
        profile.appearances = total_appearances;
        table.rows.push_back(std::move(profile));
    }
    return table;
}

} // namespace festcircuit::socio
