#include "festcircuit/balance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "festcircuit/csv.hpp"
#include "festcircuit/text.hpp"

namespace festcircuit::balance {

AccreditationTable AccreditationTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("balance: cannot open accreditation file " + path.string());
    csv::Reader reader(in, path.filename().string());
    const auto series_col = reader.require_column("festival_series_id");
    const auto acc_col = reader.require_column("accreditation");

    AccreditationTable table;
    while (auto row = reader.next()) {
        const std::string series = text::trim((*row)[series_col]);
        const std::string acc = text::trim((*row)[acc_col]);
        if (acc != "A" && acc != "B") {
            throw std::runtime_error("balance: accreditation must be A or B, got '" + acc +
                                     "' at " + path.filename().string() + ":" +
                                     std::to_string(reader.line_number()));
        }
        table.by_series_[series] = acc;
    }
    return table;
}

AccreditationTable AccreditationTable::empty() { return AccreditationTable{}; }

std::string AccreditationTable::classify(const std::string& festival_series_id) const {
    auto it = by_series_.find(festival_series_id);
    return it == by_series_.end() ? "B" : it->second;
}

EntryValues collect_entry_values(const std::vector<ScreeningRecord>& records,
                                 const AttributeSeries& series, MissingPolicy policy) {
    EntryValues out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        for (const auto& producer : rec.producer_countries) {
            auto it = series.find(producer);
            if (it == series.end() || it->second.empty()) {
                if (policy == MissingPolicy::error) {
                    throw std::runtime_error("balance: no attribute data for country " + producer);
                }
                ++out.skipped;
                continue;
            }
            const double value = socio::series_value_at(it->second, rec.event_year);
            if (value <= 0.0) {
                if (policy == MissingPolicy::error) {
                    throw std::runtime_error("balance: non-positive attribute for country " +
                                             producer + " in year " +
                                             std::to_string(rec.event_year));
                }
                ++out.skipped;
                continue;
            }
            out.pairs.push_back({i, producer, std::log10(value)});
        }
    }
    return out;
}

std::vector<double> entry_log_values(const std::vector<ScreeningRecord>& records,
                                     const AttributeSeries& series, MissingPolicy policy) {
    std::vector<double> values;
    auto collected = collect_entry_values(records, series, policy);
    values.reserve(collected.pairs.size());
    for (const auto& pair : collected.pairs) values.push_back(pair.log_value);
    return values;
}

double geometric_mean_log(const std::vector<double>& log_values) {
    if (log_values.empty()) throw std::invalid_argument("balance: geometric mean of empty list");
    double sum = 0.0;
    for (double v : log_values) sum += v;
    return sum / static_cast<double>(log_values.size());
}

double uniform_expectation(const std::map<std::string, double>& country_attribute) {
    if (country_attribute.empty()) {
        throw std::invalid_argument("balance: expectation over empty country set");
    }
    double sum = 0.0;
    for (const auto& [country, value] : country_attribute) sum += std::log10(value);
    return sum / static_cast<double>(country_attribute.size());
}

double proportional_expectation(const std::map<std::string, double>& country_attribute) {
    if (country_attribute.empty()) {
        throw std::invalid_argument("balance: expectation over empty country set");
    }
    double weighted = 0.0, total = 0.0;
    for (const auto& [country, value] : country_attribute) {
        if (value <= 0.0) {
            throw std::invalid_argument("balance: non-positive attribute for " + country);
        }
        weighted += value * std::log10(value);
        total += value;
    }
    return weighted / total;
}

double simulated_expectation(const std::map<std::string, double>& country_attribute,
                             bool proportional, std::size_t samples, std::uint64_t seed) {
    if (country_attribute.empty()) {
        throw std::invalid_argument("balance: expectation over empty country set");
    }
    std::vector<double> logs;
    std::vector<double> cumulative;
    double total = 0.0;
    for (const auto& [country, value] : country_attribute) {
        logs.push_back(std::log10(value));
        total += proportional ? value : 1.0;
        cumulative.push_back(total);
    }

    std::mt19937_64 rng(seed);
    auto uniform01 = [&rng]() {
        return (rng() >> 11) * 0x1.0p-53; // 53 uniform mantissa bits
    };
    double sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const double u = uniform01() * total;
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        sum += logs[static_cast<std::size_t>(it - cumulative.begin())];
    }
    return sum / static_cast<double>(samples);
}

namespace {

BalanceReport make_report(std::string split, std::string attribute, std::vector<double> log_values,
                          const std::map<std::string, double>& participating) {
    BalanceReport report;
    report.split = std::move(split);
    report.attribute = std::move(attribute);
    report.observed_log_mean = geometric_mean_log(log_values);
    report.log_values = std::move(log_values);
    report.uniform = uniform_expectation(participating);
    report.proportional = proportional_expectation(participating);
    return report;
}

} // namespace

std::vector<BalanceReport> split_report(const std::vector<ScreeningRecord>& records,
                                        SplitKind kind, const std::string& attribute_name,
                                        const AttributeSeries& series,
                                        const std::map<std::string, double>& country_attribute,
                                        const AccreditationTable& accreditation,
                                        const std::map<std::string, std::string>& regions,
                                        MissingPolicy policy) {
    const auto entries = collect_entry_values(records, series, policy);

    auto group_of = [&](const ScreeningRecord& rec) -> std::string {
        switch (kind) {
            case SplitKind::all:
                return "all";
            case SplitKind::accreditation:
                return accreditation.classify(rec.festival_series_id) == "A" ? "A-list" : "B-list";
            case SplitKind::region: {
                auto it = regions.find(rec.host_country);
                return it == regions.end() ? "other" : it->second;
            }
        }
        throw std::logic_error("balance: unhandled split kind");
    };

    std::map<std::string, std::vector<double>> values_by_group;
    std::map<std::string, std::map<std::string, double>> participants_by_group;
    for (const auto& pair : entries.pairs) {
        const std::string group = group_of(records[pair.record_index]);
        values_by_group[group].push_back(pair.log_value);
        auto attr = country_attribute.find(pair.producer);
        if (attr != country_attribute.end()) {
            participants_by_group[group].emplace(attr->first, attr->second);
        }
    }

    std::vector<BalanceReport> reports;
    for (auto& [group, values] : values_by_group) {
        reports.push_back(
            make_report(group, attribute_name, std::move(values), participants_by_group[group]));
    }
    return reports;
}

std::vector<TrajectoryPoint> series_trajectories(const std::vector<ScreeningRecord>& records,
                                                 const AttributeSeries& series,
                                                 MissingPolicy policy) {
    const auto entries = collect_entry_values(records, series, policy);
    std::map<std::pair<std::string, int>, std::vector<double>> values;
    for (const auto& pair : entries.pairs) {
        const auto& rec = records[pair.record_index];
        values[{rec.festival_series_id, rec.event_year}].push_back(pair.log_value);
    }
    std::vector<TrajectoryPoint> points;
    for (const auto& [key, group] : values) {
        points.push_back({key.first, key.second, geometric_mean_log(group), group.size()});
    }
    return points;
}

} // namespace festcircuit::balance
