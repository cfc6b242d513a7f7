#include "festcircuit/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace festcircuit::regression {

linalg::Vector design_row(double population, double gdp_per_capita, int events_hosted,
                          double distance_km) {
    if (population <= 0.0 || gdp_per_capita <= 0.0) {
        throw std::invalid_argument("regression: population and GDP per capita must be positive");
    }
    const double pop_c = std::log10(population / 1e7);
    const double gdppc_c = std::log10(gdp_per_capita / 1e4);
    const double events_s = std::log10(events_hosted + 1.0);
    const double dist = distance_km / 1000.0;
    return {1.0, pop_c, gdppc_c, events_s, dist, pop_c * gdppc_c};
}

Design build_design(const std::vector<socio::CountryProfile>& profiles) {
    Design design;
    std::vector<linalg::Vector> rows;
    for (const auto& profile : profiles) {
        if (profile.appearances < 1.0) {
            design.warnings.push_back("regression: " + profile.country +
                                      " excluded, no appearances to take the log of");
            continue;
        }
        rows.push_back(design_row(profile.population, profile.gdp_per_capita,
                                  profile.events_hosted, profile.distance_km));
        design.y.push_back(std::log10(profile.appearances));
        design.countries.push_back(profile.country);
    }
    design.x = linalg::Matrix(rows.size(), kTermNames.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < kTermNames.size(); ++j) design.x.at(i, j) = rows[i][j];
    }
    return design;
}

namespace {

double mean(const linalg::Vector& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

struct CoreFit {
    linalg::Vector coefficients;
    linalg::Vector fitted;
    linalg::Vector residuals;
    double rss = 0.0;
    double tss = 0.0;
    linalg::Matrix r;
};

CoreFit core_least_squares(const linalg::Matrix& x, const linalg::Vector& y) {
    CoreFit core;
    auto solved = linalg::least_squares(x, y);
    core.coefficients = std::move(solved.coefficients);
    core.r = std::move(solved.r);

    const std::size_t n = x.rows();
    core.fitted.resize(n);
    core.residuals.resize(n);
    const double y_mean = mean(y);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) fit += x.at(i, j) * core.coefficients[j];
        core.fitted[i] = fit;
        core.residuals[i] = y[i] - fit;
        core.rss += core.residuals[i] * core.residuals[i];
        core.tss += (y[i] - y_mean) * (y[i] - y_mean);
    }
    return core;
}

} // namespace

Fit ols_fit(const Design& design) {
    const std::size_t n = design.x.rows();
    const std::size_t p = design.x.cols(); // including intercept
    if (n <= p) throw std::runtime_error("regression: not enough rows to fit the model");

    CoreFit core = core_least_squares(design.x, design.y);

    Fit fit;
    fit.terms = kTermNames;
    fit.coefficients = std::move(core.coefficients);
    fit.fitted = std::move(core.fitted);
    fit.residuals = std::move(core.residuals);
    fit.countries = design.countries;
    fit.df_model = static_cast<int>(p - 1);
    fit.df_residual = static_cast<int>(n - p);

    const double sigma2 = core.rss / fit.df_residual;
    const auto inv_diag = linalg::normal_matrix_inverse_diagonal(core.r);
    fit.standard_errors.resize(p);
    fit.t_stats.resize(p);
    fit.p_values.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        fit.standard_errors[j] = std::sqrt(sigma2 * inv_diag[j]);
        fit.t_stats[j] = fit.coefficients[j] / fit.standard_errors[j];
        fit.p_values[j] = linalg::student_t_two_sided_p(fit.t_stats[j], fit.df_residual);
    }

    fit.r_squared = core.tss == 0.0 ? 1.0 : 1.0 - core.rss / core.tss;
    fit.adj_r_squared =
        1.0 - (1.0 - fit.r_squared) * (static_cast<double>(n) - 1.0) / fit.df_residual;
    fit.f_statistic = (fit.r_squared / fit.df_model) / ((1.0 - fit.r_squared) / fit.df_residual);
    return fit;
}

double predict_appearances(const linalg::Vector& coefficients, double population,
                           double gdp_per_capita, int events_hosted, double distance_km) {
    const auto row = design_row(population, gdp_per_capita, events_hosted, distance_km);
    if (coefficients.size() != row.size()) {
        throw std::invalid_argument("regression: coefficient vector has wrong length");
    }
    double log_pred = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) log_pred += coefficients[j] * row[j];
    return std::pow(10.0, log_pred);
}

std::vector<ResidualEntry> residual_ranking(const Fit& fit) {
    std::vector<ResidualEntry> ranking;
    ranking.reserve(fit.countries.size());
    for (std::size_t i = 0; i < fit.countries.size(); ++i) {
        ResidualEntry entry;
        entry.country = fit.countries[i];
        entry.residual = fit.residuals[i];
        entry.predicted = std::pow(10.0, fit.fitted[i]);
        entry.observed = std::pow(10.0, fit.fitted[i] + fit.residuals[i]);
        ranking.push_back(std::move(entry));
    }
    std::sort(ranking.begin(), ranking.end(), [](const ResidualEntry& a, const ResidualEntry& b) {
        if (a.residual != b.residual) return a.residual > b.residual;
        return a.country < b.country;
    });
    return ranking;
}

Diagnostics diagnostics(const Fit& fit, const Design& design) {
    Diagnostics report;
    const std::size_t n = design.x.rows();
    const std::size_t p = design.x.cols();

    // VIF per non-intercept term: regress the column on all other columns
    // (intercept included) and invert 1 - R^2.
    for (std::size_t j = 1; j < p; ++j) {
        linalg::Matrix aux(n, p - 1);
        linalg::Vector target(n);
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = design.x.at(i, j);
            std::size_t col = 0;
            for (std::size_t k = 0; k < p; ++k) {
                if (k == j) continue;
                aux.at(i, col++) = design.x.at(i, k);
            }
        }
        CoreFit core = core_least_squares(aux, target);
        const double r2 = core.tss == 0.0 ? 1.0 : 1.0 - core.rss / core.tss;
        const double vif = r2 >= 1.0 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - r2);
        report.vif[kTermNames[j]] = vif;
        if (vif > 10.0) report.high_vif_terms.push_back(kTermNames[j]);
    }

    report.residual_vs_fitted.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        report.residual_vs_fitted.emplace_back(fit.fitted[i], fit.residuals[i]);
    }

    const double m = mean(fit.residuals);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double r : fit.residuals) {
        const double d = r - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    report.residual_skewness = m2 == 0.0 ? 0.0 : m3 / std::pow(m2, 1.5);
    report.residual_excess_kurtosis = m2 == 0.0 ? 0.0 : m4 / (m2 * m2) - 3.0;
    return report;
}

UisFit uis_correlation(const std::map<std::string, double>& appearance_counts,
                       const std::map<std::string, double>& films_produced) {
    std::vector<std::string> countries;
    for (const auto& [country, appearances] : appearance_counts) {
        auto it = films_produced.find(country);
        if (it == films_produced.end()) continue;
        if (appearances < 1.0 || it->second < 1.0) continue;
        countries.push_back(country);
    }
    if (countries.empty()) {
        throw std::runtime_error("regression: no countries shared between the two count sets");
    }
    const std::size_t n = countries.size();
    if (n < 3) throw std::runtime_error("regression: too few shared countries for a fit");

    linalg::Matrix x(n, 2);
    linalg::Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x.at(i, 0) = 1.0;
        x.at(i, 1) = std::log10(films_produced.at(countries[i]));
        y[i] = std::log10(appearance_counts.at(countries[i]));
    }
    CoreFit core = core_least_squares(x, y);

    UisFit fit;
    fit.intercept = core.coefficients[0];
    fit.slope = core.coefficients[1];
    fit.n = n;
    fit.r_squared = core.tss == 0.0 ? 1.0 : 1.0 - core.rss / core.tss;
    fit.adj_r_squared =
        1.0 - (1.0 - fit.r_squared) * (static_cast<double>(n) - 1.0) / (static_cast<double>(n) - 2.0);
    for (std::size_t i = 0; i < n; ++i) fit.residuals[countries[i]] = core.residuals[i];
    return fit;
}

} // namespace festcircuit::regression
