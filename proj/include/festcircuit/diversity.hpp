#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "festcircuit/ingest.hpp"
#include "festcircuit/linalg.hpp"
#include "festcircuit/socioeconomic.hpp"

namespace festcircuit::diversity {

struct EmbeddingSpace {
    std::string kind; // "genre" or "language"
    std::size_t dimension = 0;
    std::map<std::string, linalg::Vector> vectors;
    double max_distance = 0.0; // largest pairwise distance among the vectors

    const linalg::Vector* find(const std::string& tag) const;
};

double euclidean_distance(const linalg::Vector& a, const linalg::Vector& b);
double max_pairwise_distance(const std::map<std::string, linalg::Vector>& vectors);

/// Tag vectors induced from film-level co-occurrence: positive pointwise
/// mutual information matrix factorized through a deterministic symmetric
/// eigendecomposition, keeping the top `dimension` non-negative components.
/// Films are distinct film_key values; records with an empty key count as
/// their own film. Degenerate co-occurrence (no film with two tags) is an
/// error.
EmbeddingSpace train_genre_embeddings(const std::vector<ScreeningRecord>& records,
                                      std::size_t dimension = 8);

/// CSV with columns language_id, v1..vd. The header fixes the dimension.
EmbeddingSpace load_language_vectors(const std::filesystem::path& path);

using WeightedVector = std::pair<linalg::Vector, double>;

/// Normalized mean deviation: weighted mean vector mu, then
/// (sum w_i |v_i - mu| / sum w_i) / (max_distance / 2). Zero when every
/// vector coincides, 1 for an equal-weight bimodal sample at max distance.
double diversity(const std::vector<WeightedVector>& samples, double max_distance);
double diversity(const std::vector<WeightedVector>& samples, const EmbeddingSpace& space);

enum class MissingPolicy { error, exclude };

/// Keeps a record iff every producer country satisfies `attribute op
/// threshold` at the record's event year. Records whose producers lack
/// attribute data are an error or are excluded, per policy.
std::vector<ScreeningRecord> filter_by_criterion(
    const std::vector<ScreeningRecord>& records,
    const std::map<std::string, socio::YearSeries>& attribute, char op, double threshold,
    MissingPolicy policy = MissingPolicy::error);

struct Metric {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct DiversityEstimate {
    std::string attribute; // empty for the unfiltered baseline
    std::string op;        // "<", ">" or "all"
    double threshold = 0.0;
    bool defined = false; // false when the filtered set is empty
    Metric latent_genre;
    Metric latent_language;
    Metric language_count;     // distinct languages per bootstrap sample
    Metric language_count_pct; // percent of the full circuit's distinct languages
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    std::size_t filtered_size = 0;
    std::size_t sample_size = 0;           // entries drawn per repeat
    std::size_t skipped_genre_records = 0; // filtered records without usable tags
    std::size_t skipped_language_records = 0;
};

/// Per-record data reused across bootstrap repeats.
struct PreparedRecords {
    std::vector<std::optional<linalg::Vector>> genre_vectors;
    std::vector<std::vector<WeightedVector>> language_contributions; // weights sum to 1
    std::vector<std::vector<std::string>> languages;                 // raw labels
    std::size_t without_genre = 0;
    std::size_t without_language = 0;
};

PreparedRecords prepare_records(const std::vector<ScreeningRecord>& records,
                                const EmbeddingSpace& genre_space,
                                const EmbeddingSpace& language_space);

/// Bootstrap over the filtered records: each repeat draws sample_size entries
/// with replacement (repeat r seeds its own generator with seed + r), scores
/// the three metrics, and the estimate reports the repeat mean with a normal
/// approximation 95% interval. circuit_language_count scales the percent
/// metric.
DiversityEstimate bootstrap_diversity(const std::vector<ScreeningRecord>& filtered,
                                      const EmbeddingSpace& genre_space,
                                      const EmbeddingSpace& language_space,
                                      std::size_t sample_size, std::size_t circuit_language_count,
                                      std::size_t repeats, std::uint64_t seed);

std::size_t distinct_language_count(const std::vector<ScreeningRecord>& records);

/// Baseline estimate plus one estimate per (threshold, direction).
std::vector<DiversityEstimate> threshold_sweep(
    const std::vector<ScreeningRecord>& records,
    const std::map<std::string, socio::YearSeries>& attribute, const std::string& attribute_name,
    const std::vector<double>& thresholds, const EmbeddingSpace& genre_space,
    const EmbeddingSpace& language_space, std::size_t repeats, std::uint64_t seed,
    MissingPolicy policy = MissingPolicy::error);

} // namespace festcircuit::diversity
