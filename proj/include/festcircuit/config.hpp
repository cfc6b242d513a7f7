#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace festcircuit {

struct RunConfig {
    std::filesystem::path entries_path;
    std::filesystem::path world_bank_path;
    std::filesystem::path uis_path;            // optional input
    std::filesystem::path capitals_path;       // defaults to the bundled table
    std::filesystem::path aliases_path;        // optional, passthrough without it
    std::filesystem::path accreditation_path;  // optional, everything B without it
    std::filesystem::path language_vectors_path; // optional input
    std::filesystem::path regions_path;        // defaults to the bundled table

    int period_start = 2012;
    int period_end = 2021;
    int uis_start = 2011;
    int uis_end = 2017;
    std::string reference_country = "FR";
    std::uint64_t seed = 42;
    std::size_t repeats = 100;
    std::size_t embedding_dimension = 8;
    double star_coverage = 0.2;
    int min_hosted_events = 5;
    std::size_t workers = 1;
    std::vector<double> population_thresholds = {1e6, 5e6, 2e7, 1e8, 3e8};
    std::vector<double> gdppc_thresholds = {1e3, 3e3, 1e4, 3e4, 5e4};
    std::filesystem::path out_dir = "out";

    /// Stable digest of the analysis-relevant settings.
    std::uint64_t hash() const;
};

struct ConfigOverrides {
    std::optional<int> period_start;
    std::optional<int> period_end;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> repeats;
    std::optional<std::string> reference_country;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::size_t> workers;
};

/// Loads JSON config (all fields optional), resolves relative dataset paths
/// against data_root (FESTCIRCUIT_DATA_DIR or the config file's directory),
/// then applies flag overrides. Without a config file, defaults plus the
/// data_root's conventional filenames are used.
RunConfig load_config(const std::optional<std::filesystem::path>& config_path,
                      const std::optional<std::filesystem::path>& data_root,
                      const ConfigOverrides& overrides);

std::filesystem::path bundled_data_dir();

} // namespace festcircuit
