#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace festcircuit {

/// One film listed in one festival edition's program, collapsed over the
/// source's per-producer row duplication.
struct ScreeningRecord {
    std::string film_key; // set by ingest::assign_film_keys
    std::string festival_id;
    std::string festival_series_id;
    int event_year = 0;
    std::string host_country;
    std::vector<std::string> producer_countries; // non-empty, duplicate-free, source order
    int production_year = 0;
    std::vector<std::string> languages;
    std::vector<std::string> genre_tags;

    int producer_count() const { return static_cast<int>(producer_countries.size()); }
    double coproduction_weight() const { return 1.0 / producer_count(); }
};

struct FilmIdentity {
    std::string normalized_title;
    int production_year = 0;
};

std::string film_identity_key(const FilmIdentity& id);

/// Raised when input rows reference country names the alias table cannot
/// resolve; carries the full offender list.
class AliasError : public std::runtime_error {
public:
    AliasError(std::string message, std::vector<std::string> offenders);
    const std::vector<std::string>& offenders() const { return offenders_; }

private:
    std::vector<std::string> offenders_;
};

/// raw country name -> canonical code. The table must cover every raw name
/// appearing in any input; identity rows (code -> code) are fine. A
/// passthrough table accepts every name as already canonical.
class CountryAliasTable {
public:
    static CountryAliasTable load(const std::filesystem::path& path);
    static CountryAliasTable passthrough();

    std::optional<std::string> resolve(const std::string& raw) const;
    bool is_passthrough() const { return passthrough_; }
    /// Representative raw display name for a canonical code, the code itself
    /// when none was recorded.
    std::string display_name(const std::string& code) const;

private:
    bool passthrough_ = false;
    std::map<std::string, std::string> raw_to_code_;
    std::map<std::string, std::string> code_to_display_;
};

namespace ingest {

struct ParseResult {
    std::vector<ScreeningRecord> records; // collapsed, source order of first appearance
    std::size_t source_rows = 0;          // data rows before collapsing
    std::vector<std::string> warnings;
};

/// Parses the entries file (one source row per producer country) and
/// collapses rows of the same film-festival listing into single records.
/// Records share a film_key iff their normalized title and production year
/// match.
ParseResult parse_screenings(const std::filesystem::path& path, const CountryAliasTable& aliases);

std::size_t distinct_film_count(const std::vector<ScreeningRecord>& records);

std::vector<ScreeningRecord> filter_period(const std::vector<ScreeningRecord>& records, int start,
                                           int end);

/// Exact accumulator for sums of unit fractions 1/n plus whole units.
class FractionTally {
public:
    void add_unit_fraction(int denominator);
    void add_units(long long units) { units_ += units; }
    FractionTally& operator+=(const FractionTally& other);
    double value() const;
    bool empty() const { return units_ == 0 && per_denominator_.empty(); }

private:
    long long units_ = 0;
    std::map<int, long long> per_denominator_;
};

std::map<std::string, FractionTally> country_appearance_tallies(
    const std::vector<ScreeningRecord>& records, bool weighted);

/// Unweighted: +1 per (record, producer) pair. Weighted: +1/n per pair.
std::map<std::string, double> country_appearance_counts(const std::vector<ScreeningRecord>& records,
                                                        bool weighted);

} // namespace ingest
} // namespace festcircuit
