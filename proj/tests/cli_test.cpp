#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "festcircuit/config.hpp"
#include "festcircuit/csv.hpp"
#include "festcircuit/pipeline.hpp"
#include "test_util.hpp"

using namespace festcircuit;

namespace {

struct Country {
    const char* code;
    const char* name;
    double population;
    double gdp_per_capita;
    const char* capital;
    double lat;
    double lon;
    const char* region;
    double films_produced; // per UIS row, two rows each
};

const std::vector<Country> kCountries = {
    {"FR", "France", 6.6e7, 4.0e4, "Paris", 48.8566, 2.3522, "Europe", 120.0},
    {"DE", "Germany", 8.2e7, 4.5e4, "Berlin", 52.5200, 13.4050, "Europe", 100.0},
    {"IT", "Italy", 6.0e7, 3.4e4, "Rome", 41.9028, 12.4964, "Europe", 60.0},
    {"ES", "Spain", 4.7e7, 2.8e4, "Madrid", 40.4168, -3.7038, "Europe", 55.0},
    {"PL", "Poland", 3.8e7, 1.4e4, "Warsaw", 52.2297, 21.0122, "Europe", 30.0},
    {"JP", "Japan", 1.27e8, 4.1e4, "Tokyo", 35.6762, 139.6503, "Asia", 200.0},
    {"US", "United States", 3.2e8, 5.6e4, "Washington", 38.9072, -77.0369, "Americas", 400.0},
    {"BR", "Brazil", 2.1e8, 1.0e4, "Brasilia", -15.7939, -47.8828, "Americas", 70.0},
};

/// Complete synthetic dataset: ten festival years across three festival
/// series, eight producer countries, full covariate files.
struct Fixture {
    testutil::TempDir dir;
    RunConfig config;
    std::size_t source_rows = 0;
    std::size_t records = 0;
    std::size_t records_in_period = 0;
    std::set<std::string> films_in_period;

    Fixture() {
        std::string entries =
            "film_title,production_year,festival_id,festival_series_id,event_year,host_country,"
            "producer_country,languages,genre_tags\n";
        auto add = [&](const std::string& title, int prod_year, const std::string& fest,
                       const std::string& series, int event_year, const std::string& host,
                       const std::vector<std::string>& producers, const std::string& langs,
                       const std::string& tags) {
            for (const auto& producer : producers) {
                entries += title + "," + std::to_string(prod_year) + "," + fest + "," + series +
                           "," + std::to_string(event_year) + "," + host + "," + producer + "," +
                           langs + "," + tags + "\n";
                ++source_rows;
            }
            ++records;
            if (event_year >= 2012 && event_year <= 2021) {
                ++records_in_period;
                films_in_period.insert(title + "/" + std::to_string(prod_year));
            }
        };
        auto code = [&](int i) { return std::string(kCountries[i % kCountries.size()].code); };

        for (int year = 2012; year <= 2021; ++year) {
            const int i = year - 2012;
            const std::string y = std::to_string(year);
            const std::string cannes = "cannes-" + y;
            const std::string berlinale = "berlinale-" + y;
            const std::string tokyo = "tokyo-" + y;

            add("Voyage " + y, year - 1, cannes, "cannes", year, "FR", {code(i)}, "fr",
                "drama;comedy");
            add("Echo " + y, year - 1, cannes, "cannes", year, "FR", {code(i + 1), code(i + 2)},
                "en;fr", "drama");
            add("Mirror " + y, year - 1, cannes, "cannes", year, "FR", {code(i + 3)}, "en",
                "doc;drama");
            add("Traveler " + y, year - 1, cannes, "cannes", year, "FR", {code(i + 4)}, "de",
                "horror;comedy");

            add("Traveler " + y, year - 1, berlinale, "berlinale", year, "DE", {code(i + 4)}, "de",
                "horror;comedy");
            add("Quiet " + y, year - 2, berlinale, "berlinale", year, "DE", {code(i + 5)}, "es",
                "comedy");
            add("Garden " + y, year - 1, berlinale, "berlinale", year, "DE",
                {code(i + 6), code(i + 7)}, "de;es", "doc");

            add("Island " + y, year - 1, tokyo, "tokyo", year, "JP", {"JP"}, "ja", "drama");
            add("Harbor " + y, year - 1, tokyo, "tokyo", year, "JP", {code(i * 3)}, "en",
                "comedy;doc");
        }
        add("Old One", 2009, "cannes-2010", "cannes", 2010, "FR", {"FR"}, "fr", "drama");
        add("Old Two", 2009, "cannes-2010", "cannes", 2010, "FR", {"DE"}, "de", "comedy");

        std::string world_bank = "country_name,indicator,year,value\n";
        for (const auto& c : kCountries) {
            for (int year : {2012, 2021}) {
                world_bank += std::string(c.name) + ",SP.POP.TOTL," + std::to_string(year) + "," +
                              csv::fixed6(c.population) + "\n";
                world_bank += std::string(c.name) + ",NY.GDP.MKTP.CD," + std::to_string(year) +
                              "," + csv::fixed6(c.population * c.gdp_per_capita) + "\n";
            }
            world_bank += std::string(c.name) + ",SP.URB.TOTL,2015,1\n"; // ignored indicator
        }

        std::string aliases = "raw_name,canonical_code\n";
        for (const auto& c : kCountries) {
            aliases += std::string(c.code) + "," + c.code + "\n";
            aliases += std::string(c.name) + "," + c.code + "\n";
        }

        std::string capitals = "code,capital,lat,lon\n";
        std::string regions = "code,region\n";
        std::string uis = "country_name,year,feature_films_produced\n";
        for (const auto& c : kCountries) {
            capitals += std::string(c.code) + "," + c.capital + "," + csv::fixed6(c.lat) + "," +
                        csv::fixed6(c.lon) + "\n";
            regions += std::string(c.code) + "," + c.region + "\n";
            uis += std::string(c.name) + ",2013," + csv::fixed6(c.films_produced) + "\n";
            uis += std::string(c.name) + ",2016," + csv::fixed6(c.films_produced * 0.9) + "\n";
        }
        uis += "France,2014,\n"; // empty count, skipped

        config.entries_path = dir.write("entries.csv", entries);
        config.world_bank_path = dir.write("world_bank.csv", world_bank);
        config.uis_path = dir.write("uis.csv", uis);
        config.capitals_path = dir.write("capitals.csv", capitals);
        config.aliases_path = dir.write("aliases.csv", aliases);
        config.accreditation_path = dir.write("accreditation.csv",
                                              "festival_series_id,accreditation\n"
                                              "cannes,A\n"
                                              "berlinale,A\n");
        config.language_vectors_path = dir.write("language_vectors.csv",
                                                 "language_id,v1,v2\n"
                                                 "en,0,0\n"
                                                 "fr,1,0\n"
                                                 "de,0,1\n"
                                                 "es,1,1\n");
        config.regions_path = dir.write("regions.csv", regions);
        config.repeats = 10;
        config.population_thresholds = {5e7};
        config.gdppc_thresholds = {3e4};
        config.out_dir = dir.path() / "out";
    }
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("validation reports the dataset counts") {
    Fixture fx;
    std::ostringstream log;
    CHECK(pipeline::cmd_validate(fx.config, log) == 0);

    const auto report = nlohmann::json::parse(slurp(fx.config.out_dir / "validation.json"));
    CHECK(report.at("source_rows") == fx.source_rows);
    CHECK(report.at("records_total") == fx.records);
    CHECK(report.at("records_in_period") == fx.records_in_period);
    CHECK(report.at("films") == fx.films_in_period.size());
    CHECK(report.at("festivals") == 30);        // three series, ten years each
    CHECK(report.at("festival_series") == 3);
    CHECK(report.at("producer_countries") == kCountries.size());
    CHECK(report.at("host_countries") == 3);
    CHECK(report.at("countries_with_covariates") == kCountries.size());
    CHECK(report.at("missing_covariates").empty());
    CHECK(!report.contains("error"));
}

TEST_CASE("unresolvable country names fail validation with the offender list") {
    Fixture fx;
    std::ofstream append(fx.config.entries_path, std::ios::app);
    append << "Lost Film,2014,cannes-2015,cannes,2015,FR,Atlantis,fr,drama\n";
    append.close();

    std::ostringstream log;
    CHECK(pipeline::cmd_validate(fx.config, log) == 1);
    const auto report = nlohmann::json::parse(slurp(fx.config.out_dir / "validation.json"));
    REQUIRE(report.at("unmapped_names").size() == 1);
    CHECK(report.at("unmapped_names")[0] == "Atlantis");
    CHECK(report.contains("error"));
}

TEST_CASE("a full run produces every output file with stable bytes") {
    Fixture fx;
    const std::set<std::string> analyses = {"balance", "fit", "flows", "diversity"};

    std::ostringstream log1;
    pipeline::cmd_run(fx.config, analyses, log1);

    RunConfig again = fx.config;
    again.out_dir = fx.dir.path() / "out2";
    std::ostringstream log2;
    pipeline::cmd_run(again, analyses, log2);

    const std::vector<std::string> expected = {
        "balance.csv", "balance_trajectories.csv", "country_aggregates.csv",
        "regression_table.csv", "residual_ranking.csv", "diagnostics.json",
        "uis_correlation.csv", "flow_matrix.csv", "flow_shares.csv", "trade_balance.csv",
        "star_networks.json", "diversity_sweep.csv", "manifest.json"};
    for (const auto& name : expected) {
        CHECK_MESSAGE(std::filesystem::exists(fx.config.out_dir / name), name);
    }

    // Same configuration, different output directory: byte-identical files.
    std::size_t compared = 0;
    for (const auto& entry : std::filesystem::directory_iterator(fx.config.out_dir)) {
        const auto name = entry.path().filename();
        CHECK_MESSAGE(slurp(entry.path()) == slurp(again.out_dir / name), name.string());
        ++compared;
    }
    CHECK(compared >= expected.size());
    std::size_t second_count = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(again.out_dir)) {
        ++second_count;
    }
    CHECK(second_count == compared);
}

TEST_CASE("run outputs carry the expected shapes") {
    Fixture fx;
    std::ostringstream log;
    pipeline::cmd_run(fx.config, {"balance", "fit", "flows", "diversity"}, log);

    const auto table = lines_of(slurp(fx.config.out_dir / "regression_table.csv"));
    REQUIRE(table.size() == 7); // header plus six terms
    CHECK(table[0] == "term,beta,se,t,p");
    CHECK(table[1].rfind("intercept,", 0) == 0);

    const auto ranking = lines_of(slurp(fx.config.out_dir / "residual_ranking.csv"));
    CHECK(ranking.size() == 1 + kCountries.size());

    const auto balances = lines_of(slurp(fx.config.out_dir / "trade_balance.csv"));
    REQUIRE(balances.size() == 4); // header plus the three hosting countries
    std::set<std::string> balance_countries;
    for (std::size_t i = 1; i < balances.size(); ++i) {
        balance_countries.insert(balances[i].substr(0, balances[i].find(',')));
    }
    CHECK(balance_countries == std::set<std::string>{"DE", "FR", "JP"});

    // Flow matrix conserves the record count.
    const auto matrix_lines = lines_of(slurp(fx.config.out_dir / "flow_matrix.csv"));
    double total = 0.0;
    for (std::size_t i = 1; i < matrix_lines.size(); ++i) {
        std::istringstream row(matrix_lines[i]);
        std::string field;
        std::getline(row, field, ','); // producer code
        while (std::getline(row, field, ',')) total += std::stod(field);
    }
    CHECK(total == doctest::Approx(static_cast<double>(fx.records_in_period)).epsilon(1e-9));

    const auto diag = nlohmann::json::parse(slurp(fx.config.out_dir / "diagnostics.json"));
    CHECK(diag.at("n") == kCountries.size());
    CHECK(diag.at("df_residual") == static_cast<int>(kCountries.size()) - 6);
    CHECK(diag.at("vif").size() == 5);
    REQUIRE(diag.contains("uis"));
    CHECK(diag.at("uis").at("n") == kCountries.size());

    // Two scenarios, each a baseline plus one threshold in both directions,
    // four metric rows per estimate.
    const auto sweep = lines_of(slurp(fx.config.out_dir / "diversity_sweep.csv"));
    CHECK(sweep.size() == 1 + 2 * 3 * 4);
    CHECK(sweep[0] == "attribute,op,threshold,metric,mean,ci_low,ci_high,repeats,seed,skipped_records");

    const auto manifest = nlohmann::json::parse(slurp(fx.config.out_dir / "manifest.json"));
    CHECK(manifest.at("schema_version") == "1.0.0");
    CHECK(manifest.at("seed") == 42);
    CHECK(manifest.at("analyses").size() == 4);
    CHECK(!manifest.at("config_hash").get<std::string>().empty());
    CHECK(manifest.at("input_digests").contains("entries.csv"));
    CHECK(manifest.at("input_digests").contains("world_bank.csv"));
    CHECK(manifest.at("exclusions").contains("covariates"));
}

TEST_CASE("balance report groups cover accreditation and regions") {
    Fixture fx;
    std::ostringstream log;
    pipeline::cmd_run(fx.config, {"balance"}, log);

    const auto lines = lines_of(slurp(fx.config.out_dir / "balance.csv"));
    CHECK(lines[0] == "split_kind,split,attribute,observed_log_mean,uniform,proportional,n_entries");
    std::set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto first_comma = lines[i].find(',');
        const auto second_comma = lines[i].find(',', first_comma + 1);
        seen.insert(lines[i].substr(0, second_comma));
    }
    // Tokyo is not on the accreditation file, so its entries fall to B-list;
    // hosts span two regions.
    CHECK(seen.count("all,all") == 1);
    CHECK(seen.count("accreditation,A-list") == 1);
    CHECK(seen.count("accreditation,B-list") == 1);
    CHECK(seen.count("region,Europe") == 1);
    CHECK(seen.count("region,Asia") == 1);

    CHECK(std::filesystem::exists(fx.config.out_dir / "balance_values_population_all.csv"));
    CHECK(std::filesystem::exists(fx.config.out_dir / "balance_values_gdp_per_capita_a_list.csv"));
    const auto traj = lines_of(slurp(fx.config.out_dir / "balance_trajectories.csv"));
    // Two attributes, three series, ten years each.
    CHECK(traj.size() == 1 + 2 * 3 * 10);
}

TEST_CASE("repeat bootstrap runs are identical at one repeat as well") {
    Fixture fx;
    fx.config.repeats = 1;
    std::ostringstream log;
    pipeline::cmd_run(fx.config, {"diversity"}, log);
    const auto first = slurp(fx.config.out_dir / "diversity_sweep.csv");

    RunConfig again = fx.config;
    again.out_dir = fx.dir.path() / "out2";
    pipeline::cmd_run(again, {"diversity"}, log);
    CHECK(first == slurp(again.out_dir / "diversity_sweep.csv"));
}

TEST_CASE("worker threads do not change diversity output bytes") {
    Fixture fx;
    std::ostringstream log;
    pipeline::cmd_run(fx.config, {"diversity"}, log);

    RunConfig threaded = fx.config;
    threaded.workers = 2;
    threaded.out_dir = fx.dir.path() / "out_threaded";
    pipeline::cmd_run(threaded, {"diversity"}, log);

    CHECK(slurp(fx.config.out_dir / "diversity_sweep.csv") ==
          slurp(threaded.out_dir / "diversity_sweep.csv"));
}

TEST_CASE("unknown analysis names are rejected") {
    Fixture fx;
    std::ostringstream log;
    CHECK_THROWS_WITH_AS(pipeline::cmd_run(fx.config, {"everything"}, log),
                         doctest::Contains("unknown analysis"), std::invalid_argument);
}

TEST_CASE("period attribute averages weight years by appearances") {
    std::vector<ScreeningRecord> records;
    ScreeningRecord rec;
    rec.film_key = "k1";
    rec.festival_id = "f1";
    rec.festival_series_id = "s1";
    rec.event_year = 2012;
    rec.host_country = "FR";
    rec.producer_countries = {"AA"};
    records.push_back(rec);
    rec.film_key = "k2";
    rec.festival_id = "f2";
    rec.event_year = 2014;
    records.push_back(rec);
    records.push_back(rec); // 2014 weighs twice

    std::map<std::string, socio::YearSeries> series;
    series["AA"] = {{2012, 100.0}, {2014, 400.0}};
    series["ZZ"] = {{2012, 5.0}}; // never appears, left out

    const auto attr = pipeline::country_period_attribute(records, series, 2012, 2021);
    REQUIRE(attr.size() == 1);
    CHECK(attr.at("AA") == doctest::Approx((100.0 + 2 * 400.0) / 3.0).epsilon(1e-12));
}

} // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("defaults point at the bundled reference tables") {
    const auto config = load_config(std::nullopt, std::nullopt, {});
    CHECK(config.period_start == 2012);
    CHECK(config.period_end == 2021);
    CHECK(config.seed == 42);
    CHECK(config.repeats == 100);
    CHECK(config.capitals_path.filename() == "capitals.csv");
    CHECK(std::filesystem::exists(config.capitals_path));
    CHECK(std::filesystem::exists(config.regions_path));
}

TEST_CASE("a config file overrides defaults and resolves relative paths") {
    testutil::TempDir dir;
    dir.write("entries.csv", "x\n");
    const auto cfg = dir.write("config.json", R"({
        "entries": "entries.csv",
        "seed": 7,
        "repeats": 3,
        "period_start": 2015,
        "period_end": 2018,
        "population_thresholds": [1000.0]
    })");
    const auto config = load_config(cfg, std::nullopt, {});
    CHECK(config.entries_path == dir.path() / "entries.csv");
    CHECK(config.seed == 7);
    CHECK(config.repeats == 3);
    CHECK(config.period_start == 2015);
    CHECK(config.period_end == 2018);
    CHECK(config.population_thresholds == std::vector<double>{1000.0});
}

TEST_CASE("flag overrides beat the config file") {
    testutil::TempDir dir;
    const auto cfg = dir.write("config.json", R"({"seed": 7, "period_start": 2013})");
    ConfigOverrides overrides;
    overrides.seed = 99;
    overrides.period_start = 2014;
    overrides.out_dir = dir.path() / "elsewhere";
    const auto config = load_config(cfg, std::nullopt, overrides);
    CHECK(config.seed == 99);
    CHECK(config.period_start == 2014);
    CHECK(config.out_dir == dir.path() / "elsewhere");
}

TEST_CASE("a dataset root supplies conventional filenames") {
    testutil::TempDir dir;
    dir.write("entries.csv", "x\n");
    dir.write("world_bank.csv", "x\n");
    dir.write("aliases.csv", "x\n");
    const auto config = load_config(std::nullopt, dir.path(), {});
    CHECK(config.entries_path == dir.path() / "entries.csv");
    CHECK(config.world_bank_path == dir.path() / "world_bank.csv");
    CHECK(config.aliases_path == dir.path() / "aliases.csv");
    CHECK(config.uis_path.empty());           // not present in the root
    CHECK(config.capitals_path.filename() == "capitals.csv"); // bundled fallback
}

TEST_CASE("nonsense configurations are rejected") {
    testutil::TempDir dir;
    CHECK_THROWS_AS(load_config(dir.path() / "missing.json", std::nullopt, {}),
                    std::runtime_error);
    const auto bad_json = dir.write("bad.json", "{nope");
    CHECK_THROWS_WITH_AS(load_config(bad_json, std::nullopt, {}),
                         doctest::Contains("not valid JSON"), std::runtime_error);

    ConfigOverrides reversed;
    reversed.period_start = 2020;
    reversed.period_end = 2012;
    CHECK_THROWS_WITH_AS(load_config(std::nullopt, std::nullopt, reversed),
                         doctest::Contains("period"), std::runtime_error);
}

TEST_CASE("the config hash tracks analysis-relevant settings only") {
    RunConfig a;
    RunConfig b;
    CHECK(a.hash() == b.hash());
    b.out_dir = "somewhere/else";
    CHECK(a.hash() == b.hash()); // output location does not change results
    b.seed = 43;
    CHECK(a.hash() != b.hash());
}

} // TEST_SUITE

#ifdef FESTCIRCUIT_CLI_PATH

namespace {

int run_cli(const std::string& args, const std::filesystem::path& log) {
    const std::string command =
        std::string(FESTCIRCUIT_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("the executable runs every analysis from a config file") {
    Fixture fx;
    nlohmann::json cfg;
    cfg["entries"] = fx.config.entries_path.string();
    cfg["world_bank"] = fx.config.world_bank_path.string();
    cfg["uis"] = fx.config.uis_path.string();
    cfg["capitals"] = fx.config.capitals_path.string();
    cfg["aliases"] = fx.config.aliases_path.string();
    cfg["accreditation"] = fx.config.accreditation_path.string();
    cfg["language_vectors"] = fx.config.language_vectors_path.string();
    cfg["regions"] = fx.config.regions_path.string();
    cfg["repeats"] = 5;
    cfg["population_thresholds"] = {5e7};
    cfg["gdppc_thresholds"] = {3e4};
    const auto cfg_path = fx.dir.write("config.json", cfg.dump(2));
    const auto out_dir = fx.dir.path() / "cli_out";

    const int code = run_cli("all --config " + cfg_path.string() + " --out-dir " +
                                 out_dir.string(),
                             fx.dir.path() / "cli.log");
    CHECK_MESSAGE(code == 0, slurp(fx.dir.path() / "cli.log"));
    CHECK(std::filesystem::exists(out_dir / "manifest.json"));
    CHECK(std::filesystem::exists(out_dir / "diversity_sweep.csv"));

    const int validate_code = run_cli("validate --config " + cfg_path.string() + " --out-dir " +
                                          out_dir.string(),
                                      fx.dir.path() / "cli_validate.log");
    CHECK(validate_code == 0);
    CHECK(std::filesystem::exists(out_dir / "validation.json"));
}

TEST_CASE("the executable signals failures through its exit code") {
    testutil::TempDir dir;
    const auto cfg_path = dir.write("config.json", R"({"entries": "absent.csv"})");
    const int code = run_cli("fit --config " + cfg_path.string() + " --out-dir " +
                                 (dir.path() / "out").string(),
                             dir.path() / "cli.log");
    CHECK(code == 1);

    const int no_sub = run_cli("--seed 5", dir.path() / "cli2.log");
    CHECK(no_sub != 0);
}

} // TEST_SUITE

#endif // FESTCIRCUIT_CLI_PATH
