#include "festcircuit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "festcircuit/csv.hpp"
#include "festcircuit/text.hpp"

namespace festcircuit {

std::string film_identity_key(const FilmIdentity& id) {
    return id.normalized_title + '\x1f' + std::to_string(id.production_year);
}

AliasError::AliasError(std::string message, std::vector<std::string> offenders)
    : std::runtime_error(std::move(message)), offenders_(std::move(offenders)) {}

CountryAliasTable CountryAliasTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open alias table " + path.string());
    csv::Reader reader(in, path.filename().string());
    const auto raw_col = reader.require_column("raw_name");
    const auto code_col = reader.require_column("canonical_code");

    CountryAliasTable table;
    while (auto row = reader.next()) {
        std::string raw = text::trim((*row)[raw_col]);
        std::string code = text::trim((*row)[code_col]);
        if (raw.empty() || code.empty()) {
            throw std::runtime_error("ingest: empty alias fields at " + path.filename().string() +
                                     ":" + std::to_string(reader.line_number()));
        }
        auto [it, inserted] = table.raw_to_code_.emplace(raw, code);
        if (!inserted && it->second != code) {
            throw std::runtime_error("ingest: conflicting aliases for '" + raw + "' (" +
                                     it->second + " vs " + code + ")");
        }
        // Prefer a name that differs from the code as the display form.
        auto disp = table.code_to_display_.find(code);
        if (disp == table.code_to_display_.end() || disp->second == code) {
            table.code_to_display_[code] = raw;
        }
    }
    return table;
}

CountryAliasTable CountryAliasTable::passthrough() {
    CountryAliasTable table;
    table.passthrough_ = true;
    return table;
}

std::optional<std::string> CountryAliasTable::resolve(const std::string& raw) const {
    if (passthrough_) return raw;
    auto it = raw_to_code_.find(raw);
    if (it == raw_to_code_.end()) return std::nullopt;
    return it->second;
}

std::string CountryAliasTable::display_name(const std::string& code) const {
    auto it = code_to_display_.find(code);
    return it == code_to_display_.end() ? code : it->second;
}

namespace ingest {
namespace {

int parse_year(const std::string& value, const std::string& what, const std::string& where) {
    int year = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), year);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::runtime_error("ingest: bad " + what + " '" + value + "' at " + where);
    }
    return year;
}

void merge_unique(std::vector<std::string>& into, const std::vector<std::string>& extra) {
    for (const auto& item : extra) {
        if (std::find(into.begin(), into.end(), item) == into.end()) into.push_back(item);
    }
}

} // namespace

ParseResult parse_screenings(const std::filesystem::path& path, const CountryAliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open entries file " + path.string());
    csv::Reader reader(in, path.filename().string());

    const auto title_col = reader.require_column("film_title");
    const auto prod_year_col = reader.require_column("production_year");
    const auto fest_col = reader.require_column("festival_id");
    const auto series_col = reader.require_column("festival_series_id");
    const auto event_year_col = reader.require_column("event_year");
    const auto host_col = reader.require_column("host_country");
    const auto producer_col = reader.require_column("producer_country");
    const auto lang_col = reader.column("languages");
    const auto genre_col = reader.column("genre_tags");

    ParseResult result;
    // (normalized title, production year, festival id) -> index into records.
    std::map<std::string, std::size_t> listing_index;
    std::set<std::string> unknown_names;

    auto resolve = [&](const std::string& raw) {
        auto code = aliases.resolve(raw);
        if (!code) unknown_names.insert(raw);
        return code.value_or(raw);
    };

    while (auto row = reader.next()) {
        ++result.source_rows;
        const std::string where = path.filename().string() + ":" + std::to_string(reader.line_number());

        std::string title = text::trim((*row)[title_col]);
        if (title.empty()) throw std::runtime_error("ingest: empty film_title at " + where);
        std::string festival_id = text::trim((*row)[fest_col]);
        if (festival_id.empty()) throw std::runtime_error("ingest: empty festival_id at " + where);
        std::string producer = text::trim((*row)[producer_col]);
        if (producer.empty()) throw std::runtime_error("ingest: empty producer_country at " + where);

        const int production_year = parse_year(text::trim((*row)[prod_year_col]), "production_year", where);
        const int event_year = parse_year(text::trim((*row)[event_year_col]), "event_year", where);

        FilmIdentity id{text::normalize_title(title), production_year};
        const std::string key = film_identity_key(id) + '\x1f' + festival_id;

        std::string producer_code = resolve(producer);

        auto it = listing_index.find(key);
        if (it == listing_index.end()) {
            ScreeningRecord rec;
            rec.film_key = film_identity_key(id);
            rec.festival_id = festival_id;
            rec.festival_series_id = text::trim((*row)[series_col]);
            rec.event_year = event_year;
            rec.host_country = resolve(text::trim((*row)[host_col]));
            rec.producer_countries.push_back(producer_code);
            rec.production_year = production_year;
            if (lang_col >= 0) {
                for (auto piece : text::split_list((*row)[lang_col], ';'))
                    rec.languages.emplace_back(piece);
            }
            if (genre_col >= 0) {
                for (auto piece : text::split_list((*row)[genre_col], ';'))
                    rec.genre_tags.emplace_back(piece);
            }
            listing_index.emplace(key, result.records.size());
            result.records.push_back(std::move(rec));
        } else {
            ScreeningRecord& rec = result.records[it->second];
            if (std::find(rec.producer_countries.begin(), rec.producer_countries.end(),
                          producer_code) == rec.producer_countries.end()) {
                rec.producer_countries.push_back(producer_code);
            }
            if (lang_col >= 0) {
                std::vector<std::string> extra;
                for (auto piece : text::split_list((*row)[lang_col], ';'))
                    extra.emplace_back(piece);
                merge_unique(rec.languages, extra);
            }
            if (genre_col >= 0) {
                std::vector<std::string> extra;
                for (auto piece : text::split_list((*row)[genre_col], ';'))
                    extra.emplace_back(piece);
                merge_unique(rec.genre_tags, extra);
            }
            if (rec.event_year != event_year) {
                result.warnings.push_back("ingest: event_year mismatch within listing at " + where +
                                          ", keeping first value");
            }
        }
    }

    if (!unknown_names.empty()) {
        std::vector<std::string> offenders(unknown_names.begin(), unknown_names.end());
        std::ostringstream msg;
        msg << "ingest: " << offenders.size() << " country name(s) missing from alias table:";
        for (const auto& name : offenders) msg << " '" << name << "'";
        throw AliasError(msg.str(), std::move(offenders));
    }
    return result;
}

std::size_t distinct_film_count(const std::vector<ScreeningRecord>& records) {
    std::set<std::string> distinct;
    for (const auto& rec : records) distinct.insert(rec.film_key);
    return distinct.size();
}

std::vector<ScreeningRecord> filter_period(const std::vector<ScreeningRecord>& records, int start,
                                           int end) {
    std::vector<ScreeningRecord> kept;
    kept.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.event_year >= start && rec.event_year <= end) kept.push_back(rec);
    }
    return kept;
}

void FractionTally::add_unit_fraction(int denominator) {
    if (denominator <= 0) throw std::invalid_argument("FractionTally: denominator must be positive");
    if (denominator == 1) {
        ++units_;
    } else {
        ++per_denominator_[denominator];
    }
}

FractionTally& FractionTally::operator+=(const FractionTally& other) {
    units_ += other.units_;
    for (const auto& [den, count] : other.per_denominator_) per_denominator_[den] += count;
    return *this;
}

double FractionTally::value() const {
    double total = static_cast<double>(units_);
    for (const auto& [den, count] : per_denominator_) {
        total += static_cast<double>(count) / static_cast<double>(den);
    }
    return total;
}

std::map<std::string, FractionTally> country_appearance_tallies(
    const std::vector<ScreeningRecord>& records, bool weighted) {
    std::map<std::string, FractionTally> tallies;
    for (const auto& rec : records) {
        const int n = rec.producer_count();
        for (const auto& country : rec.producer_countries) {
            if (weighted) {
                tallies[country].add_unit_fraction(n);
            } else {
                tallies[country].add_units(1);
            }
        }
    }
    return tallies;
}

std::map<std::string, double> country_appearance_counts(const std::vector<ScreeningRecord>& records,
                                                        bool weighted) {
    std::map<std::string, double> counts;
    for (auto& [country, tally] : country_appearance_tallies(records, weighted)) {
        counts[country] = tally.value();
    }
    return counts;
}

} // namespace ingest
} // namespace festcircuit
