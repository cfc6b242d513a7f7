#include "festcircuit/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "festcircuit/csv.hpp"
#include "festcircuit/diversity.hpp"
#include "festcircuit/flows.hpp"
#include "festcircuit/regression.hpp"
#include "festcircuit/text.hpp"

namespace festcircuit::pipeline {

namespace {

using nlohmann::json;

std::map<std::string, std::string> load_regions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("pipeline: cannot open regions file " + path.string());
    csv::Reader reader(in, path.filename().string());
    const auto code_col = reader.require_column("code");
    const auto region_col = reader.require_column("region");
    std::map<std::string, std::string> regions;
    while (auto row = reader.next()) {
        regions[text::trim((*row)[code_col])] = text::trim((*row)[region_col]);
    }
    return regions;
}

/// UIS feature film production counts summed over [start, end] per country.
std::map<std::string, double> load_uis_totals(const std::filesystem::path& path,
                                              const CountryAliasTable& aliases, int start,
                                              int end) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("pipeline: cannot open UIS file " + path.string());
    csv::Reader reader(in, path.filename().string());
    const auto name_col = reader.require_column("country_name");
    const auto year_col = reader.require_column("year");
    const auto count_col = reader.require_column("feature_films_produced");

    std::map<std::string, double> totals;
    std::set<std::string> unknown;
    while (auto row = reader.next()) {
        const std::string where = path.filename().string() + ":" + std::to_string(reader.line_number());
        const std::string raw_value = text::trim((*row)[count_col]);
        if (raw_value.empty()) continue;
        auto code = aliases.resolve(text::trim((*row)[name_col]));
        if (!code) {
            unknown.insert(text::trim((*row)[name_col]));
            continue;
        }
        int year = 0;
        double count = 0.0;
        try {
            year = std::stoi(text::trim((*row)[year_col]));
            count = std::stod(raw_value);
        } catch (const std::exception&) {
            throw std::runtime_error("pipeline: bad UIS row at " + where);
        }
        if (year < start || year > end) continue;
        totals[*code] += count;
    }
    if (!unknown.empty()) {
        std::vector<std::string> offenders(unknown.begin(), unknown.end());
        std::ostringstream msg;
        msg << "pipeline: " << offenders.size() << " UIS country name(s) missing from alias table:";
        for (const auto& name : offenders) msg << " '" << name << "'";
        throw AliasError(msg.str(), std::move(offenders));
    }
    return totals;
}

std::string sanitize_token(const std::string& label) {
    std::string token;
    for (char c : text::to_lower_ascii(label)) {
        token += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
    }
    return token;
}

std::string digest_hex(const std::filesystem::path& path) {
    const std::string bytes = csv::read_text_file(path);
    std::ostringstream hex;
    hex << std::hex << text::fnv1a64(bytes);
    return hex.str();
}

struct RunContext {
    const RunConfig& config;
    LoadedData& data;
    std::filesystem::path out_dir;
    json exclusions = json::object();
};

void write_country_aggregates(RunContext& ctx, const socio::CovariateTable& covariates) {
    std::ostringstream out;
    csv::Writer writer(out);
    writer.row({"country", "population", "gdp_per_capita", "events_hosted", "distance_km",
                "appearances"});
    for (const auto& row : covariates.rows) {
        writer.row({row.country, csv::fixed6(row.population), csv::fixed6(row.gdp_per_capita),
                    std::to_string(row.events_hosted), csv::fixed6(row.distance_km),
                    csv::fixed6(row.appearances)});
    }
    csv::write_text_file(ctx.out_dir / "country_aggregates.csv", out.str());
}

void run_balance(RunContext& ctx, std::ostream& log) {
    const auto& config = ctx.config;
    const auto& data = ctx.data;

    std::ostringstream reports_out;
    csv::Writer reports(reports_out);
    reports.row({"split_kind", "split", "attribute", "observed_log_mean", "uniform", "proportional",
                 "n_entries"});

    std::size_t skipped_pairs = 0;
    const std::map<std::string, const balance::AttributeSeries*> attributes = {
        {"population", &data.wb.population},
        {"gdp_per_capita", &data.wb.gdp_per_capita},
    };
    const std::map<balance::SplitKind, std::string> kinds = {
        {balance::SplitKind::all, "all"},
        {balance::SplitKind::accreditation, "accreditation"},
        {balance::SplitKind::region, "region"},
    };

    for (const auto& [attr_name, series] : attributes) {
        const auto country_attr =
            country_period_attribute(data.records, *series, config.period_start, config.period_end);
        const auto collected =
            balance::collect_entry_values(data.records, *series, balance::MissingPolicy::skip);
        skipped_pairs = std::max(skipped_pairs, collected.skipped);

        for (const auto& [kind, kind_name] : kinds) {
            const auto group_reports = balance::split_report(
                data.records, kind, attr_name, *series, country_attr, data.accreditation,
                data.regions, balance::MissingPolicy::skip);
            for (const auto& report : group_reports) {
                reports.row({kind_name, report.split, report.attribute,
                             csv::fixed6(report.observed_log_mean), csv::fixed6(report.uniform),
                             csv::fixed6(report.proportional),
                             std::to_string(report.log_values.size())});

                std::ostringstream values_out;
                csv::Writer values(values_out);
                values.row({"log_value"});
                for (double v : report.log_values) values.row({csv::fixed6(v)});
                csv::write_text_file(ctx.out_dir / ("balance_values_" + sanitize_token(attr_name) +
                                                    "_" + sanitize_token(report.split) + ".csv"),
                                     values_out.str());
            }
        }
    }
    csv::write_text_file(ctx.out_dir / "balance.csv", reports_out.str());

    std::ostringstream traj_out;
    csv::Writer traj(traj_out);
    traj.row({"attribute", "festival_series_id", "year", "observed_log_mean", "n_entries"});
    for (const auto& [attr_name, series] : attributes) {
        const auto points =
            balance::series_trajectories(data.records, *series, balance::MissingPolicy::skip);
        for (const auto& point : points) {
            traj.row({attr_name, point.festival_series_id, std::to_string(point.year),
                      csv::fixed6(point.observed_log_mean), std::to_string(point.n_entries)});
        }
    }
    csv::write_text_file(ctx.out_dir / "balance_trajectories.csv", traj_out.str());

    ctx.exclusions["balance_skipped_pairs"] = skipped_pairs;
    log << "balance: reports written, " << skipped_pairs << " entry pairs lacked attribute data\n";
}

void run_fit(RunContext& ctx, std::ostream& log) {
    const auto& config = ctx.config;
    const auto& data = ctx.data;

    const auto covariates =
        socio::build_covariates(data.records, data.wb, data.capitals, config.reference_country,
                                config.period_start, config.period_end);
    write_country_aggregates(ctx, covariates);
    ctx.exclusions["covariates"] = covariates.exclusion_notes;

    const auto design = regression::build_design(covariates.rows);
    ctx.exclusions["regression_rows"] = design.warnings;
    const auto fit = regression::ols_fit(design);

    std::ostringstream table_out;
    csv::Writer table(table_out);
    table.row({"term", "beta", "se", "t", "p"});
    for (std::size_t j = 0; j < fit.terms.size(); ++j) {
        table.row({fit.terms[j], csv::fixed6(fit.coefficients[j]),
                   csv::fixed6(fit.standard_errors[j]), csv::fixed6(fit.t_stats[j]),
                   csv::fixed6(fit.p_values[j])});
    }
    csv::write_text_file(ctx.out_dir / "regression_table.csv", table_out.str());

    std::ostringstream ranking_out;
    csv::Writer ranking(ranking_out);
    ranking.row({"country", "residual", "observed", "predicted"});
    for (const auto& entry : regression::residual_ranking(fit)) {
        ranking.row({entry.country, csv::fixed6(entry.residual), csv::fixed6(entry.observed),
                     csv::fixed6(entry.predicted)});
    }
    csv::write_text_file(ctx.out_dir / "residual_ranking.csv", ranking_out.str());

    const auto diag = regression::diagnostics(fit, design);
    json diag_json;
    diag_json["n"] = fit.countries.size();
    diag_json["df_model"] = fit.df_model;
    diag_json["df_residual"] = fit.df_residual;
    diag_json["r_squared"] = fit.r_squared;
    diag_json["adj_r_squared"] = fit.adj_r_squared;
    diag_json["f_statistic"] = fit.f_statistic;
    diag_json["vif"] = diag.vif;
    diag_json["high_vif_terms"] = diag.high_vif_terms;
    diag_json["residual_skewness"] = diag.residual_skewness;
    diag_json["residual_excess_kurtosis"] = diag.residual_excess_kurtosis;

    if (!config.uis_path.empty()) {
        const auto uis_totals =
            load_uis_totals(config.uis_path, data.aliases, config.uis_start, config.uis_end);
        const auto cropped =
            ingest::filter_period(data.all_records, config.uis_start, config.uis_end);
        const auto appearances = ingest::country_appearance_counts(cropped, false);
        const auto uis_fit = regression::uis_correlation(appearances, uis_totals);

        std::ostringstream uis_out;
        csv::Writer uis(uis_out);
        uis.row({"country", "films_produced", "appearances", "residual"});
        for (const auto& [country, residual] : uis_fit.residuals) {
            uis.row({country, csv::fixed6(uis_totals.at(country)),
                     csv::fixed6(appearances.at(country)), csv::fixed6(residual)});
        }
        csv::write_text_file(ctx.out_dir / "uis_correlation.csv", uis_out.str());

        json uis_json;
        uis_json["slope"] = uis_fit.slope;
        uis_json["intercept"] = uis_fit.intercept;
        uis_json["r_squared"] = uis_fit.r_squared;
        uis_json["adj_r_squared"] = uis_fit.adj_r_squared;
        uis_json["n"] = uis_fit.n;
        uis_json["period"] = {config.uis_start, config.uis_end};
        diag_json["uis"] = uis_json;
    }

    csv::write_text_file(ctx.out_dir / "diagnostics.json", diag_json.dump(2) + "\n");
    log << "fit: " << fit.countries.size() << " countries, adjusted R^2 "
        << csv::fixed6(fit.adj_r_squared) << "\n";
}

void run_flows(RunContext& ctx, std::ostream& log) {
    const auto& config = ctx.config;
    const auto& data = ctx.data;

    const auto matrix = flows::FlowMatrix::build(data.records);

    std::ostringstream matrix_out;
    csv::Writer matrix_csv(matrix_out);
    std::vector<std::string> header = {"producer"};
    header.insert(header.end(), matrix.hosts().begin(), matrix.hosts().end());
    matrix_csv.row(header);
    for (const auto& producer : matrix.producers()) {
        std::vector<std::string> row = {producer};
        for (const auto& host : matrix.hosts()) row.push_back(csv::fixed6(matrix.cell(producer, host)));
        matrix_csv.row(row);
    }
    csv::write_text_file(ctx.out_dir / "flow_matrix.csv", matrix_out.str());

    const auto shares = flows::row_normalize(matrix);
    std::ostringstream shares_out;
    csv::Writer shares_csv(shares_out);
    header = {"producer"};
    header.insert(header.end(), shares.hosts.begin(), shares.hosts.end());
    header.push_back("row_total");
    shares_csv.row(header);
    for (std::size_t i = 0; i < shares.producers.size(); ++i) {
        std::vector<std::string> row = {shares.producers[i]};
        for (double share : shares.shares[i]) row.push_back(csv::fixed6(share));
        row.push_back(csv::fixed6(shares.row_totals[i]));
        shares_csv.row(row);
    }
    csv::write_text_file(ctx.out_dir / "flow_shares.csv", shares_out.str());

    const auto hosted = socio::hosted_event_counts(data.records);
    const auto balances = flows::trade_balances(matrix, hosted, config.min_hosted_events);
    std::ostringstream balance_out;
    csv::Writer balance_csv(balance_out);
    balance_csv.row({"country", "imports", "exports", "domestic", "domestic_share", "balance",
                     "flag"});
    for (const auto& tb : balances) {
        balance_csv.row({tb.country, csv::fixed6(tb.imports), csv::fixed6(tb.exports),
                         csv::fixed6(tb.domestic), csv::fixed6(tb.domestic_share),
                         tb.balance ? csv::fixed6(*tb.balance) : "", tb.flag});
    }
    csv::write_text_file(ctx.out_dir / "trade_balance.csv", balance_out.str());

    json stars_json;
    stars_json["coverage"] = config.star_coverage;
    stars_json["networks"] = json::array();
    for (const auto& tb : balances) {
        const auto star = flows::star_network(matrix, tb.country, config.star_coverage);
        json star_json;
        star_json["center"] = star.center;
        star_json["domestic"] = star.domestic;
        star_json["partners"] = json::array();
        for (const auto& partner : star.partners) {
            star_json["partners"].push_back({{"country", partner.country},
                                             {"imports", partner.imports},
                                             {"exports", partner.exports}});
        }
        star_json["others"] = {{"imports", star.others.imports},
                               {"exports", star.others.exports}};
        stars_json["networks"].push_back(std::move(star_json));
    }
    csv::write_text_file(ctx.out_dir / "star_networks.json", stars_json.dump(2) + "\n");
    log << "flows: " << matrix.producers().size() << " producers x " << matrix.hosts().size()
        << " hosts, " << balances.size() << " balance rows\n";
}

void run_diversity(RunContext& ctx, std::ostream& log) {
    const auto& config = ctx.config;
    const auto& data = ctx.data;

    if (config.language_vectors_path.empty()) {
        throw std::runtime_error("pipeline: diversity requires a language vectors file");
    }
    const auto language_space = diversity::load_language_vectors(config.language_vectors_path);
    const auto genre_space =
        diversity::train_genre_embeddings(data.records, config.embedding_dimension);

    struct Scenario {
        const std::map<std::string, socio::YearSeries>* series;
        std::string attribute;
        std::vector<double> thresholds;
    };
    const std::vector<Scenario> scenarios = {
        {&data.wb.population, "population", config.population_thresholds},
        {&data.wb.gdp_per_capita, "gdp_per_capita", config.gdppc_thresholds},
    };

    std::vector<std::vector<diversity::DiversityEstimate>> results(scenarios.size());
    auto run_scenario = [&](std::size_t i) {
        results[i] = diversity::threshold_sweep(
            data.records, *scenarios[i].series, scenarios[i].attribute, scenarios[i].thresholds,
            genre_space, language_space, config.repeats, config.seed,
            diversity::MissingPolicy::exclude);
    };
    if (config.workers > 1 && scenarios.size() > 1) {
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < scenarios.size(); ++i) threads.emplace_back(run_scenario, i);
        for (auto& t : threads) t.join();
    } else {
        for (std::size_t i = 0; i < scenarios.size(); ++i) run_scenario(i);
    }

    std::ostringstream sweep_out;
    csv::Writer sweep(sweep_out);
    sweep.row({"attribute", "op", "threshold", "metric", "mean", "ci_low", "ci_high", "repeats",
               "seed", "skipped_records"});
    for (const auto& sweep_results : results) {
        for (const auto& est : sweep_results) {
            const std::string threshold = est.op == "all" ? "" : csv::fixed6(est.threshold);
            auto emit = [&](const std::string& metric, const diversity::Metric& m,
                            std::size_t skipped) {
                sweep.row({est.attribute, est.op, threshold, metric,
                           est.defined ? csv::fixed6(m.mean) : "",
                           est.defined ? csv::fixed6(m.ci_low) : "",
                           est.defined ? csv::fixed6(m.ci_high) : "",
                           std::to_string(est.repeats), std::to_string(est.seed),
                           std::to_string(skipped)});
            };
            emit("latent_genre", est.latent_genre, est.skipped_genre_records);
            emit("latent_language", est.latent_language, est.skipped_language_records);
            emit("language_count", est.language_count, 0);
            emit("language_count_pct", est.language_count_pct, 0);
        }
    }
    csv::write_text_file(ctx.out_dir / "diversity_sweep.csv", sweep_out.str());
    log << "diversity: " << results[0].size() + results[1].size() << " scenarios at "
        << config.repeats << " repeats\n";
}

json config_json(const RunConfig& config) {
    json j;
    j["entries"] = config.entries_path.string();
    j["world_bank"] = config.world_bank_path.string();
    j["uis"] = config.uis_path.string();
    j["capitals"] = config.capitals_path.string();
    j["aliases"] = config.aliases_path.string();
    j["accreditation"] = config.accreditation_path.string();
    j["language_vectors"] = config.language_vectors_path.string();
    j["regions"] = config.regions_path.string();
    j["period"] = {config.period_start, config.period_end};
    j["uis_period"] = {config.uis_start, config.uis_end};
    j["reference_country"] = config.reference_country;
    j["seed"] = config.seed;
    j["repeats"] = config.repeats;
    j["embedding_dimension"] = config.embedding_dimension;
    j["star_coverage"] = config.star_coverage;
    j["min_hosted_events"] = config.min_hosted_events;
    j["population_thresholds"] = config.population_thresholds;
    j["gdppc_thresholds"] = config.gdppc_thresholds;
    return j;
}

void write_manifest(RunContext& ctx, const std::set<std::string>& analyses) {
    json manifest;
    manifest["schema_version"] = "1.0.0";
    manifest["analyses"] = analyses;
    manifest["config"] = config_json(ctx.config);
    std::ostringstream hash_hex;
    hash_hex << std::hex << ctx.config.hash();
    manifest["config_hash"] = hash_hex.str();
    manifest["seed"] = ctx.config.seed;
    manifest["wb_indicators"] = {"SP.POP.TOTL", "NY.GDP.MKTP.CD current US$, no PPP adjustment"};

    json inputs = json::object();
    for (const auto& path :
         {ctx.config.entries_path, ctx.config.world_bank_path, ctx.config.uis_path,
          ctx.config.capitals_path, ctx.config.aliases_path, ctx.config.accreditation_path,
          ctx.config.language_vectors_path, ctx.config.regions_path}) {
        if (!path.empty() && std::filesystem::exists(path)) {
            inputs[path.filename().string()] = digest_hex(path);
        }
    }
    manifest["input_digests"] = inputs;
    manifest["exclusions"] = ctx.exclusions;
    manifest["warnings"] = ctx.data.warnings;
    csv::write_text_file(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace

LoadedData load_inputs(const RunConfig& config) {
    LoadedData data;
    data.aliases = config.aliases_path.empty() ? CountryAliasTable::passthrough()
                                               : CountryAliasTable::load(config.aliases_path);

    auto parsed = ingest::parse_screenings(config.entries_path, data.aliases);
    data.source_rows = parsed.source_rows;
    data.warnings = std::move(parsed.warnings);
    data.all_records = std::move(parsed.records);
    data.records = ingest::filter_period(data.all_records, config.period_start, config.period_end);

    data.wb = socio::load_world_bank(config.world_bank_path, data.aliases);
    data.capitals = socio::load_capitals(config.capitals_path);
    data.accreditation = config.accreditation_path.empty()
                             ? balance::AccreditationTable::empty()
                             : balance::AccreditationTable::load(config.accreditation_path);
    data.regions = config.regions_path.empty() || !std::filesystem::exists(config.regions_path)
                       ? std::map<std::string, std::string>{}
                       : load_regions(config.regions_path);
    return data;
}

std::map<std::string, double> country_period_attribute(
    const std::vector<ScreeningRecord>& records,
    const std::map<std::string, socio::YearSeries>& series, int period_start, int period_end) {
    const auto weights = socio::annual_appearance_weights(records);
    std::map<std::string, double> values;
    for (const auto& [country, country_weights] : weights) {
        auto it = series.find(country);
        if (it == series.end() || it->second.empty()) continue;
        values[country] =
            socio::weighted_period_average(it->second, country_weights, period_start, period_end)
                .value;
    }
    return values;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
    json report;
    report["period"] = {config.period_start, config.period_end};
    int exit_code = 0;

    try {
        LoadedData data = load_inputs(config);

        std::set<std::string> festivals, series_ids, producers, hosts;
        for (const auto& rec : data.records) {
            festivals.insert(rec.festival_id);
            series_ids.insert(rec.festival_series_id);
            hosts.insert(rec.host_country);
            producers.insert(rec.producer_countries.begin(), rec.producer_countries.end());
        }
        std::set<std::string> countries = producers;
        countries.insert(hosts.begin(), hosts.end());

        report["source_rows"] = data.source_rows;
        report["records_total"] = data.all_records.size();
        report["records_in_period"] = data.records.size();
        report["films"] = ingest::distinct_film_count(data.records);
        report["festivals"] = festivals.size();
        report["festival_series"] = series_ids.size();
        report["producer_countries"] = producers.size();
        report["host_countries"] = hosts.size();
        report["countries"] = countries.size();
        report["unmapped_names"] = json::array();

        const auto covariates =
            socio::build_covariates(data.records, data.wb, data.capitals,
                                    config.reference_country, config.period_start,
                                    config.period_end);
        report["countries_with_covariates"] = covariates.rows.size();
        report["missing_covariates"] = covariates.exclusion_notes;
        report["warnings"] = data.warnings;

        log << "validate: " << data.source_rows << " source rows, " << data.records.size()
            << " records in period, " << report["films"] << " films, " << festivals.size()
            << " festivals in " << series_ids.size() << " series, " << countries.size()
            << " countries\n";
        if (!covariates.exclusion_notes.empty()) {
            log << "validate: " << covariates.exclusion_notes.size()
                << " countries lack covariates (see validation.json)\n";
        }
    } catch (const AliasError& e) {
        report["unmapped_names"] = e.offenders();
        report["error"] = e.what();
        log << "validate: " << e.what() << "\n";
        exit_code = 1;
    } catch (const std::exception& e) {
        report["error"] = e.what();
        log << "validate: " << e.what() << "\n";
        exit_code = 1;
    }

    std::filesystem::create_directories(config.out_dir);
    csv::write_text_file(config.out_dir / "validation.json", report.dump(2) + "\n");
    return exit_code;
}

void cmd_run(const RunConfig& config, const std::set<std::string>& analyses, std::ostream& log) {
    for (const auto& analysis : analyses) {
        if (analysis != "balance" && analysis != "fit" && analysis != "flows" &&
            analysis != "diversity") {
            throw std::invalid_argument("pipeline: unknown analysis '" + analysis + "'");
        }
    }

    LoadedData data = load_inputs(config);
    std::filesystem::create_directories(config.out_dir);
    RunContext ctx{config, data, config.out_dir};

    if (analyses.count("balance")) run_balance(ctx, log);
    if (analyses.count("fit")) run_fit(ctx, log);
    if (analyses.count("flows")) run_flows(ctx, log);
    if (analyses.count("diversity")) run_diversity(ctx, log);
    write_manifest(ctx, analyses);
}

} // namespace festcircuit::pipeline
