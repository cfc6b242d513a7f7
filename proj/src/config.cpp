#include "festcircuit/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "festcircuit/text.hpp"

namespace festcircuit {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    if (p.empty() || p.is_absolute()) return p;
    return base / p;
}

void read_path(const json& j, const char* key, const std::filesystem::path& base,
               std::filesystem::path& out) {
    if (j.contains(key)) out = resolve(base, j.at(key).get<std::string>());
}

template <typename T>
void read_value(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

std::uint64_t RunConfig::hash() const {
    std::ostringstream digest;
    digest << entries_path.string() << '\n'
           << world_bank_path.string() << '\n'
           << uis_path.string() << '\n'
           << capitals_path.string() << '\n'
           << aliases_path.string() << '\n'
           << accreditation_path.string() << '\n'
           << language_vectors_path.string() << '\n'
           << period_start << ' ' << period_end << ' ' << uis_start << ' ' << uis_end << '\n'
           << reference_country << ' ' << seed << ' ' << repeats << ' ' << embedding_dimension
           << ' ' << star_coverage << ' ' << min_hosted_events << '\n';
    for (double t : population_thresholds) digest << t << ' ';
    digest << '\n';
    for (double t : gdppc_thresholds) digest << t << ' ';
    return text::fnv1a64(digest.str());
}

RunConfig load_config(const std::optional<std::filesystem::path>& config_path,
                      const std::optional<std::filesystem::path>& data_root,
                      const ConfigOverrides& overrides) {
    RunConfig config;
    config.capitals_path = bundled_data_dir() / "capitals.csv";
    config.regions_path = bundled_data_dir() / "regions.csv";

    std::filesystem::path base;
    if (data_root) {
        base = *data_root;
    } else if (config_path) {
        base = config_path->parent_path();
    }

    if (config_path) {
        std::ifstream in(*config_path);
        if (!in) throw std::runtime_error("config: cannot open " + config_path->string());
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::runtime_error("config: " + config_path->string() + " is not valid JSON: " +
                                     e.what());
        }
        read_path(j, "entries", base, config.entries_path);
        read_path(j, "world_bank", base, config.world_bank_path);
        read_path(j, "uis", base, config.uis_path);
        read_path(j, "capitals", base, config.capitals_path);
        read_path(j, "aliases", base, config.aliases_path);
        read_path(j, "accreditation", base, config.accreditation_path);
        read_path(j, "language_vectors", base, config.language_vectors_path);
        read_path(j, "regions", base, config.regions_path);
        read_value(j, "period_start", config.period_start);
        read_value(j, "period_end", config.period_end);
        read_value(j, "uis_start", config.uis_start);
        read_value(j, "uis_end", config.uis_end);
        read_value(j, "reference_country", config.reference_country);
        read_value(j, "seed", config.seed);
        read_value(j, "repeats", config.repeats);
        read_value(j, "embedding_dimension", config.embedding_dimension);
        read_value(j, "star_coverage", config.star_coverage);
        read_value(j, "min_hosted_events", config.min_hosted_events);
        read_value(j, "workers", config.workers);
        read_value(j, "population_thresholds", config.population_thresholds);
        read_value(j, "gdppc_thresholds", config.gdppc_thresholds);
        if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
    } else if (data_root) {
        // Conventional filenames under the dataset root.
        config.entries_path = base / "entries.csv";
        config.world_bank_path = base / "world_bank.csv";
        if (std::filesystem::exists(base / "uis.csv")) config.uis_path = base / "uis.csv";
        if (std::filesystem::exists(base / "aliases.csv")) config.aliases_path = base / "aliases.csv";
        if (std::filesystem::exists(base / "accreditation.csv")) {
            config.accreditation_path = base / "accreditation.csv";
        }
        if (std::filesystem::exists(base / "language_vectors.csv")) {
            config.language_vectors_path = base / "language_vectors.csv";
        }
        if (std::filesystem::exists(base / "capitals.csv")) {
            config.capitals_path = base / "capitals.csv";
        }
        if (std::filesystem::exists(base / "regions.csv")) {
            config.regions_path = base / "regions.csv";
        }
    }

    if (overrides.period_start) config.period_start = *overrides.period_start;
    if (overrides.period_end) config.period_end = *overrides.period_end;
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.repeats) config.repeats = *overrides.repeats;
    if (overrides.reference_country) config.reference_country = *overrides.reference_country;
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    if (overrides.workers) config.workers = *overrides.workers;

    if (config.period_start > config.period_end) {
        throw std::runtime_error("config: period start is after period end");
    }
    if (config.repeats < 1) throw std::runtime_error("config: repeats must be at least 1");
    return config;
}

std::filesystem::path bundled_data_dir() {
#ifdef FESTCIRCUIT_BUNDLED_DATA_DIR
    return FESTCIRCUIT_BUNDLED_DATA_DIR;
#else
    return "data";
#endif
}

} // namespace festcircuit
