#include "festcircuit/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "festcircuit/csv.hpp"
#include "festcircuit/text.hpp"

namespace festcircuit::diversity {

const linalg::Vector* EmbeddingSpace::find(const std::string& tag) const {
    auto it = vectors.find(tag);
    return it == vectors.end() ? nullptr : &it->second;
}

double euclidean_distance(const linalg::Vector& a, const linalg::Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("diversity: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
}

double max_pairwise_distance(const std::map<std::string, linalg::Vector>& vectors) {
    double best = 0.0;
    for (auto it = vectors.begin(); it != vectors.end(); ++it) {
        for (auto jt = std::next(it); jt != vectors.end(); ++jt) {
            best = std::max(best, euclidean_distance(it->second, jt->second));
        }
    }
    return best;
}

EmbeddingSpace train_genre_embeddings(const std::vector<ScreeningRecord>& records,
                                      std::size_t dimension) {
    if (dimension == 0) throw std::invalid_argument("diversity: dimension must be positive");

    // Tag sets per distinct film; records without a key stay separate films.
    std::map<std::string, std::set<std::string>> film_tags;
    std::size_t anonymous = 0;
    for (const auto& rec : records) {
        const std::string key =
            rec.film_key.empty() ? "\x1e" + std::to_string(anonymous++) : rec.film_key;
        film_tags[key].insert(rec.genre_tags.begin(), rec.genre_tags.end());
    }

    std::set<std::string> tag_set;
    for (const auto& [key, tags] : film_tags) tag_set.insert(tags.begin(), tags.end());
    std::vector<std::string> tags(tag_set.begin(), tag_set.end());
    std::map<std::string, std::size_t> tag_index;
    for (std::size_t i = 0; i < tags.size(); ++i) tag_index[tags[i]] = i;

    const std::size_t t = tags.size();
    linalg::Matrix cooc(t, t);
    bool any_pair = false;
    for (const auto& [key, tag_group] : film_tags) {
        std::vector<std::size_t> indices;
        for (const auto& tag : tag_group) indices.push_back(tag_index[tag]);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            for (std::size_t j = i + 1; j < indices.size(); ++j) {
                cooc.at(indices[i], indices[j]) += 1.0;
                cooc.at(indices[j], indices[i]) += 1.0;
                any_pair = true;
            }
        }
    }
    if (!any_pair) {
        throw std::runtime_error("diversity: no film carries two tags, cannot train embeddings");
    }

    std::vector<double> row_sums(t, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
            row_sums[i] += cooc.at(i, j);
            total += cooc.at(i, j);
        }
    }

    linalg::Matrix ppmi(t, t);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
            const double c = cooc.at(i, j);
            if (c <= 0.0 || row_sums[i] <= 0.0 || row_sums[j] <= 0.0) continue;
            const double pmi = std::log(c * total / (row_sums[i] * row_sums[j]));
            ppmi.at(i, j) = std::max(0.0, pmi);
        }
    }

    const auto eig = linalg::jacobi_eigen_symmetric(ppmi);
    EmbeddingSpace space;
    space.kind = "genre";
    space.dimension = dimension;
    for (std::size_t i = 0; i < t; ++i) {
        linalg::Vector v(dimension, 0.0);
        for (std::size_t k = 0; k < dimension && k < t; ++k) {
            if (eig.values[k] <= 0.0) break;
            v[k] = eig.vectors.at(i, k) * std::sqrt(eig.values[k]);
        }
        space.vectors[tags[i]] = std::move(v);
    }
    space.max_distance = max_pairwise_distance(space.vectors);
    return space;
}

EmbeddingSpace load_language_vectors(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("diversity: cannot open language vectors " + path.string());
    csv::Reader reader(in, path.filename().string());
    const auto& header = reader.header();
    const auto id_col = reader.require_column("language_id");
    std::vector<std::size_t> value_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != id_col) value_cols.push_back(i);
    }
    if (value_cols.empty()) {
        throw std::runtime_error("diversity: language vector file has no value columns");
    }

    EmbeddingSpace space;
    space.kind = "language";
    space.dimension = value_cols.size();
    while (auto row = reader.next()) {
        const std::string where = path.filename().string() + ":" + std::to_string(reader.line_number());
        linalg::Vector v;
        v.reserve(value_cols.size());
        for (auto col : value_cols) {
            try {
                v.push_back(std::stod((*row)[col]));
            } catch (const std::exception&) {
                throw std::runtime_error("diversity: bad vector component at " + where);
            }
        }
        space.vectors[text::trim((*row)[id_col])] = std::move(v);
    }
    if (space.vectors.empty()) {
        throw std::runtime_error("diversity: language vector file " + path.filename().string() +
                                 " has no rows");
    }
    space.max_distance = max_pairwise_distance(space.vectors);
    return space;
}

double diversity(const std::vector<WeightedVector>& samples, double max_distance) {
    if (samples.empty()) throw std::invalid_argument("diversity: empty sample");
    // The mean accumulates as an offset from the first vector, so a sample of
    // identical vectors lands on them exactly and scores an exact zero.
    const linalg::Vector& origin = samples.front().first;
    const std::size_t d = origin.size();
    linalg::Vector mu(d, 0.0);
    double weight_total = 0.0;
    for (const auto& [v, w] : samples) {
        if (v.size() != d) throw std::invalid_argument("diversity: dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) mu[i] += w * (v[i] - origin[i]);
        weight_total += w;
    }
    if (weight_total <= 0.0) throw std::invalid_argument("diversity: weights sum to zero");
    for (std::size_t i = 0; i < d; ++i) mu[i] = origin[i] + mu[i] / weight_total;

    double deviation = 0.0;
    for (const auto& [v, w] : samples) deviation += w * euclidean_distance(v, mu);
    deviation /= weight_total;
    if (max_distance <= 0.0) return 0.0; // single-point space, no spread possible
    // Two equal halves at the extremes sit max_distance/2 from their mean, so
    // that is the deviation an ideally polarized sample produces.
    return deviation / (0.5 * max_distance);
}

double diversity(const std::vector<WeightedVector>& samples, const EmbeddingSpace& space) {
    return diversity(samples, space.max_distance);
}

std::vector<ScreeningRecord> filter_by_criterion(
    const std::vector<ScreeningRecord>& records,
    const std::map<std::string, socio::YearSeries>& attribute, char op, double threshold,
    MissingPolicy policy) {
    if (op != '<' && op != '>') throw std::invalid_argument("diversity: op must be < or >");

    std::vector<ScreeningRecord> kept;
    for (const auto& rec : records) {
        bool all_match = true;
        for (const auto& producer : rec.producer_countries) {
            auto it = attribute.find(producer);
            if (it == attribute.end() || it->second.empty()) {
                if (policy == MissingPolicy::error) {
                    throw std::runtime_error("diversity: no attribute data for country " + producer);
                }
                all_match = false;
                break;
            }
            const double value = socio::series_value_at(it->second, rec.event_year);
            if (op == '<' ? !(value < threshold) : !(value > threshold)) {
                all_match = false;
                break;
            }
        }
        if (all_match) kept.push_back(rec);
    }
    return kept;
}

PreparedRecords prepare_records(const std::vector<ScreeningRecord>& records,
                                const EmbeddingSpace& genre_space,
                                const EmbeddingSpace& language_space) {
    PreparedRecords prepared;
    prepared.genre_vectors.reserve(records.size());
    prepared.language_contributions.reserve(records.size());
    prepared.languages.reserve(records.size());

    for (const auto& rec : records) {
        linalg::Vector mean(genre_space.dimension, 0.0);
        std::size_t known = 0;
        for (const auto& tag : rec.genre_tags) {
            if (const auto* v = genre_space.find(tag)) {
                for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += (*v)[i];
                ++known;
            }
        }
        if (known > 0) {
            for (double& c : mean) c /= static_cast<double>(known);
            prepared.genre_vectors.emplace_back(std::move(mean));
        } else {
            prepared.genre_vectors.emplace_back(std::nullopt);
            ++prepared.without_genre;
        }

        std::vector<WeightedVector> contributions;
        std::vector<const linalg::Vector*> found;
        for (const auto& lang : rec.languages) {
            if (const auto* v = language_space.find(lang)) found.push_back(v);
        }
        if (!found.empty()) {
            const double w = 1.0 / static_cast<double>(found.size());
            for (const auto* v : found) contributions.emplace_back(*v, w);
        } else {
            ++prepared.without_language;
        }
        prepared.language_contributions.push_back(std::move(contributions));
        prepared.languages.push_back(rec.languages);
    }
    return prepared;
}

std::size_t distinct_language_count(const std::vector<ScreeningRecord>& records) {
    std::set<std::string> labels;
    for (const auto& rec : records) labels.insert(rec.languages.begin(), rec.languages.end());
    return labels.size();
}

namespace {

Metric summarize(const std::vector<double>& repeats) {
    Metric metric;
    const double n = static_cast<double>(repeats.size());
    double sum = 0.0;
    for (double v : repeats) sum += v;
    metric.mean = sum / n;
    double ss = 0.0;
    for (double v : repeats) ss += (v - metric.mean) * (v - metric.mean);
    const double sd = repeats.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const double half_width = 1.96 * sd / std::sqrt(n);
    metric.ci_low = metric.mean - half_width;
    metric.ci_high = metric.mean + half_width;
    return metric;
}

Metric scale_metric(const Metric& m, double factor) {
    return {m.mean * factor, m.ci_low * factor, m.ci_high * factor};
}

} // namespace

DiversityEstimate bootstrap_diversity(const std::vector<ScreeningRecord>& filtered,
                                      const EmbeddingSpace& genre_space,
                                      const EmbeddingSpace& language_space,
                                      std::size_t sample_size, std::size_t circuit_language_count,
                                      std::size_t repeats, std::uint64_t seed) {
    if (repeats == 0) throw std::invalid_argument("diversity: repeats must be positive");

    DiversityEstimate estimate;
    estimate.repeats = repeats;
    estimate.seed = seed;
    estimate.filtered_size = filtered.size();
    estimate.sample_size = sample_size;
    if (filtered.empty()) return estimate; // defined stays false

    const PreparedRecords prepared = prepare_records(filtered, genre_space, language_space);
    estimate.skipped_genre_records = prepared.without_genre;
    estimate.skipped_language_records = prepared.without_language;

    std::vector<double> genre_repeats, language_repeats, count_repeats;
    genre_repeats.reserve(repeats);
    language_repeats.reserve(repeats);
    count_repeats.reserve(repeats);

    std::vector<WeightedVector> genre_samples, language_samples;
    for (std::size_t r = 0; r < repeats; ++r) {
        std::mt19937_64 rng(seed + r);
        genre_samples.clear();
        language_samples.clear();
        std::set<std::string> sample_languages;
        for (std::size_t s = 0; s < sample_size; ++s) {
            // Modulo keeps draws identical across library implementations;
            // the tiny bias is immaterial next to bootstrap noise.
            const std::size_t idx = static_cast<std::size_t>(rng() % filtered.size());
            if (prepared.genre_vectors[idx]) {
                genre_samples.emplace_back(*prepared.genre_vectors[idx], 1.0);
            }
            for (const auto& contribution : prepared.language_contributions[idx]) {
                language_samples.push_back(contribution);
            }
            sample_languages.insert(prepared.languages[idx].begin(), prepared.languages[idx].end());
        }
        genre_repeats.push_back(
            genre_samples.empty() ? 0.0 : diversity(genre_samples, genre_space.max_distance));
        language_repeats.push_back(
            language_samples.empty() ? 0.0
                                     : diversity(language_samples, language_space.max_distance));
        count_repeats.push_back(static_cast<double>(sample_languages.size()));
    }

    estimate.defined = true;
    estimate.latent_genre = summarize(genre_repeats);
    estimate.latent_language = summarize(language_repeats);
    estimate.language_count = summarize(count_repeats);
    estimate.language_count_pct =
        circuit_language_count == 0
            ? Metric{}
            : scale_metric(estimate.language_count, 100.0 / circuit_language_count);
    return estimate;
}

std::vector<DiversityEstimate> threshold_sweep(
    const std::vector<ScreeningRecord>& records,
    const std::map<std::string, socio::YearSeries>& attribute, const std::string& attribute_name,
    const std::vector<double>& thresholds, const EmbeddingSpace& genre_space,
    const EmbeddingSpace& language_space, std::size_t repeats, std::uint64_t seed,
    MissingPolicy policy) {
    const std::size_t circuit_languages = distinct_language_count(records);

    std::vector<DiversityEstimate> estimates;
    DiversityEstimate baseline =
        bootstrap_diversity(records, genre_space, language_space, records.size(),
                            circuit_languages, repeats, seed);
    baseline.attribute = attribute_name;
    baseline.op = "all";
    estimates.push_back(std::move(baseline));

    for (double threshold : thresholds) {
        for (char op : {'<', '>'}) {
            auto filtered = filter_by_criterion(records, attribute, op, threshold, policy);
            DiversityEstimate estimate =
                bootstrap_diversity(filtered, genre_space, language_space, records.size(),
                                    circuit_languages, repeats, seed);
            estimate.attribute = attribute_name;
            estimate.op = std::string(1, op);
            estimate.threshold = threshold;
            estimates.push_back(std::move(estimate));
        }
    }
    return estimates;
}

} // namespace festcircuit::diversity
