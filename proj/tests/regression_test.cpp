#include <doctest.h>

#include <cmath>
#include <random>

#include "festcircuit/regression.hpp"

using namespace festcircuit;

namespace {

const linalg::Vector kPublishedBetas = {2.05, 0.72, 0.84, 0.29, -0.05, 0.19};

socio::CountryProfile profile(std::string code, double population, double gdp_per_capita,
                              int events, double distance_km, double appearances) {
    socio::CountryProfile p;
    p.country = std::move(code);
    p.population = population;
    p.gdp_per_capita = gdp_per_capita;
    p.events_hosted = events;
    p.distance_km = distance_km;
    p.appearances = appearances;
    return p;
}

/// Deterministic spread of covariates wide enough to keep the design full
/// rank, appearances generated from the published coefficients.
std::vector<socio::CountryProfile> synthetic_profiles(std::size_t n, double log_noise_amplitude,
                                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() % 1000000) / 999999.0; };
    std::vector<socio::CountryProfile> profiles;
    for (std::size_t i = 0; i < n; ++i) {
        const double population = std::pow(10.0, 6.3 + 2.4 * uniform());
        const double gdp_per_capita = std::pow(10.0, 3.1 + 1.6 * uniform());
        const int events = static_cast<int>(rng() % 13);
        const double distance = 9000.0 * uniform();
        double appearances = regression::predict_appearances(kPublishedBetas, population,
                                                             gdp_per_capita, events, distance);
        appearances *= std::pow(10.0, log_noise_amplitude * (2.0 * uniform() - 1.0));
        profiles.push_back(profile("c" + std::to_string(i), population, gdp_per_capita, events,
                                   distance, appearances));
    }
    return profiles;
}

} // namespace

TEST_SUITE("regression") {

TEST_CASE("design row is zero at the centering anchors") {
    const auto centered = regression::design_row(1e7, 1e4, 0, 0.0);
    REQUIRE(centered.size() == regression::kTermNames.size());
    CHECK(centered[0] == 1.0);
    for (std::size_t j = 1; j < centered.size(); ++j) {
        CHECK(centered[j] == doctest::Approx(0.0).epsilon(1e-15));
    }

    const auto shifted = regression::design_row(1e8, 1e5, 9, 2500.0);
    CHECK(shifted[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shifted[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shifted[3] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shifted[4] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(shifted[5] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(regression::design_row(0.0, 1e4, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(regression::design_row(1e7, -5.0, 0, 0.0), std::invalid_argument);
}

TEST_CASE("countries without appearances are dropped with a warning") {
    std::vector<socio::CountryProfile> profiles = {
        profile("AA", 1e7, 1e4, 2, 100.0, 12.0),
        profile("BB", 2e7, 2e4, 0, 500.0, 0.0),
    };
    const auto design = regression::build_design(profiles);
    CHECK(design.x.rows() == 1);
    CHECK(design.countries == std::vector<std::string>{"AA"});
    REQUIRE(design.warnings.size() == 1);
    CHECK_MESSAGE(design.warnings[0].find("BB") != std::string::npos, design.warnings[0]);
}

TEST_CASE("prediction anchors on the published coefficients") {
    const double base = regression::predict_appearances(kPublishedBetas, 1e7, 1e4, 0, 0.0);
    CHECK(base == doctest::Approx(112.2018454301963).epsilon(1e-12));

    const double nudged = regression::predict_appearances(kPublishedBetas, 1.01e7, 1e4, 0, 0.0);
    CHECK(nudged == doctest::Approx(113.00857252094205).epsilon(1e-12));
    CHECK(nudged - base == doctest::Approx(0.80672709).epsilon(1e-6));

    const double far = regression::predict_appearances(kPublishedBetas, 1e7, 1e4, 0, 1000.0);
    CHECK(far / base == doctest::Approx(0.8912509381337456).epsilon(1e-12));
}

TEST_CASE("population scaling acts as a pure power law at the GDP anchor") {
    // With GDP per capita at the centering point the interaction term stays
    // zero, so scaling population by k must scale predictions by k^0.72.
    const double base =
        regression::predict_appearances(kPublishedBetas, 3.7e7, 1e4, 4, 1234.0);
    for (double k : {0.1, 2.0, 10.0}) {
        const double scaled =
            regression::predict_appearances(kPublishedBetas, k * 3.7e7, 1e4, 4, 1234.0);
        CHECK(scaled / base == doctest::Approx(std::pow(k, 0.72)).epsilon(1e-9));
    }
}

TEST_CASE("noiseless synthetic data returns the generating coefficients") {
    const auto profiles = synthetic_profiles(24, 0.0, 99);
    const auto design = regression::build_design(profiles);
    const auto fit = regression::ols_fit(design);
    REQUIRE(fit.coefficients.size() == kPublishedBetas.size());
    for (std::size_t j = 0; j < kPublishedBetas.size(); ++j) {
        CHECK(fit.coefficients[j] == doctest::Approx(kPublishedBetas[j]).epsilon(1e-9));
    }
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    for (double r : fit.residuals) CHECK(std::abs(r) < 1e-10);
}

TEST_CASE("fitted residuals are orthogonal to every design column") {
    const auto profiles = synthetic_profiles(40, 0.08, 123);
    const auto design = regression::build_design(profiles);
    const auto fit = regression::ols_fit(design);

    for (std::size_t j = 0; j < design.x.cols(); ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < design.x.rows(); ++i) {
            dot += design.x.at(i, j) * fit.residuals[i];
        }
        CHECK(std::abs(dot) < 1e-8);
    }
    // Fitted plus residual reconstructs the response.
    for (std::size_t i = 0; i < design.y.size(); ++i) {
        CHECK(fit.fitted[i] + fit.residuals[i] == doctest::Approx(design.y[i]).epsilon(1e-12));
    }
}

TEST_CASE("inference columns are internally consistent") {
    const auto profiles = synthetic_profiles(40, 0.08, 123);
    const auto design = regression::build_design(profiles);
    const auto fit = regression::ols_fit(design);

    CHECK(fit.df_model == 5);
    CHECK(fit.df_residual == 34);
    for (std::size_t j = 0; j < fit.coefficients.size(); ++j) {
        CHECK(fit.standard_errors[j] > 0.0);
        CHECK(fit.t_stats[j] ==
              doctest::Approx(fit.coefficients[j] / fit.standard_errors[j]).epsilon(1e-12));
        CHECK(fit.p_values[j] ==
              doctest::Approx(linalg::student_t_two_sided_p(fit.t_stats[j], fit.df_residual))
                  .epsilon(1e-12));
    }
    const double f_check = (fit.r_squared / fit.df_model) / ((1.0 - fit.r_squared) / fit.df_residual);
    CHECK(fit.f_statistic == doctest::Approx(f_check).epsilon(1e-12));
    CHECK(fit.adj_r_squared < fit.r_squared);
}

TEST_CASE("scaling every count by a constant only moves the intercept") {
    auto profiles = synthetic_profiles(30, 0.05, 7);
    const auto fit_before = regression::ols_fit(regression::build_design(profiles));
    for (auto& p : profiles) p.appearances *= 100.0;
    const auto fit_after = regression::ols_fit(regression::build_design(profiles));

    CHECK(fit_after.coefficients[0] ==
          doctest::Approx(fit_before.coefficients[0] + 2.0).epsilon(1e-9));
    for (std::size_t j = 1; j < fit_before.coefficients.size(); ++j) {
        CHECK(fit_after.coefficients[j] ==
              doctest::Approx(fit_before.coefficients[j]).epsilon(1e-9));
    }
}

TEST_CASE("too few rows for the model is an error") {
    const auto profiles = synthetic_profiles(6, 0.0, 1);
    CHECK_THROWS_AS(regression::ols_fit(regression::build_design(profiles)), std::runtime_error);
}

TEST_CASE("residual ranking sorts descending and breaks ties by country") {
    regression::Fit fit;
    fit.countries = {"bb", "aa", "cc"};
    fit.residuals = {0.5, 0.5, -0.2};
    fit.fitted = {1.0, 2.0, 1.5};

    const auto ranking = regression::residual_ranking(fit);
    REQUIRE(ranking.size() == 3);
    CHECK(ranking[0].country == "aa");
    CHECK(ranking[1].country == "bb");
    CHECK(ranking[2].country == "cc");
    for (const auto& entry : ranking) {
        CHECK(entry.observed ==
              doctest::Approx(entry.predicted * std::pow(10.0, entry.residual)).epsilon(1e-12));
    }
    CHECK(ranking[0].predicted == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(ranking[0].observed == doctest::Approx(std::pow(10.0, 2.5)).epsilon(1e-12));
}

TEST_CASE("orthogonal regressors have unit variance inflation") {
    regression::Design design;
    design.x = linalg::Matrix(8, 3);
    const double col1[] = {1, 1, -1, -1, 1, 1, -1, -1};
    const double col2[] = {1, -1, 1, -1, 1, -1, 1, -1};
    design.y = {2.0, 0.5, 1.0, -0.5, 2.2, 0.4, 0.9, -0.6};
    for (std::size_t i = 0; i < 8; ++i) {
        design.x.at(i, 0) = 1.0;
        design.x.at(i, 1) = col1[i];
        design.x.at(i, 2) = col2[i];
        design.countries.push_back("c" + std::to_string(i));
    }
    const auto fit = regression::ols_fit(design);
    const auto report = regression::diagnostics(fit, design);
    CHECK(report.vif.at(regression::kTermNames[1]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(report.vif.at(regression::kTermNames[2]) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(report.high_vif_terms.empty());
    CHECK(report.residual_vs_fitted.size() == 8);
}

TEST_CASE("two-regressor variance inflation matches the correlation formula") {
    // For an intercept plus two regressors, VIF = 1 / (1 - r^2) with r the
    // sample correlation of the regressors.
    std::mt19937_64 rng(31);
    auto uniform = [&rng]() { return (rng() % 1000000) / 999999.0; };
    const std::size_t n = 25;
    regression::Design design;
    design.x = linalg::Matrix(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = uniform();
        const double b = 0.7 * a + 0.3 * uniform();
        design.x.at(i, 0) = 1.0;
        design.x.at(i, 1) = a;
        design.x.at(i, 2) = b;
        design.y.push_back(a - b + 0.1 * uniform());
        design.countries.push_back("c" + std::to_string(i));
    }

    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += design.x.at(i, 1);
        sb += design.x.at(i, 2);
    }
    sa /= n;
    sb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = design.x.at(i, 1) - sa;
        const double db = design.x.at(i, 2) - sb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    const double r2 = (sab * sab) / (saa * sbb);
    const double expected_vif = 1.0 / (1.0 - r2);

    const auto fit = regression::ols_fit(design);
    const auto report = regression::diagnostics(fit, design);
    CHECK(report.vif.at(regression::kTermNames[1]) ==
          doctest::Approx(expected_vif).epsilon(1e-9));
    CHECK(report.vif.at(regression::kTermNames[2]) ==
          doctest::Approx(expected_vif).epsilon(1e-9));
}

TEST_CASE("duplicated regressors are flagged as high variance inflation") {
    // A column plus a tiny perturbation of itself yields extreme collinearity.
    std::mt19937_64 rng(8);
    auto uniform = [&rng]() { return (rng() % 1000000) / 999999.0; };
    const std::size_t n = 20;
    regression::Design design;
    design.x = linalg::Matrix(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = uniform();
        design.x.at(i, 0) = 1.0;
        design.x.at(i, 1) = a;
        design.x.at(i, 2) = a + 1e-4 * uniform();
        design.y.push_back(2.0 * a + 0.05 * uniform());
        design.countries.push_back("c" + std::to_string(i));
    }
    const auto fit = regression::ols_fit(design);
    const auto report = regression::diagnostics(fit, design);
    CHECK(report.vif.at(regression::kTermNames[1]) > 10.0);
    CHECK(!report.high_vif_terms.empty());
}

TEST_CASE("production-volume correlation recovers an exact linear law") {
    std::map<std::string, double> films = {{"aa", 100.0}, {"bb", 1000.0}, {"cc", 10000.0},
                                           {"dd", 400.0}};
    std::map<std::string, double> appearances;
    for (const auto& [country, f] : films) {
        appearances[country] = std::pow(10.0, 0.3) * std::pow(f, 0.5);
    }
    // Countries below one count on either side are ignored.
    films["ee"] = 0.5;
    appearances["ee"] = 40.0;
    appearances["ff"] = 9.0; // no production data

    const auto fit = regression::uis_correlation(appearances, films);
    CHECK(fit.n == 4);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.intercept == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& [country, residual] : fit.residuals) CHECK(std::abs(residual) < 1e-10);
    CHECK(fit.residuals.count("ee") == 0);
}

TEST_CASE("production-volume correlation rejects degenerate inputs") {
    CHECK_THROWS_AS(regression::uis_correlation({{"aa", 5.0}}, {{"bb", 5.0}}),
                    std::runtime_error);
    CHECK_THROWS_AS(
        regression::uis_correlation({{"aa", 5.0}, {"bb", 6.0}}, {{"aa", 5.0}, {"bb", 6.0}}),
        std::runtime_error);
}

} // TEST_SUITE
