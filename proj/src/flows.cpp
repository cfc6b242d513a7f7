#include "festcircuit/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace festcircuit::flows {

namespace {

std::vector<std::string> ordered_by_total(const std::map<std::string, double>& totals) {
    std::vector<std::string> order;
    order.reserve(totals.size());
    for (const auto& [country, total] : totals) order.push_back(country);
    std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
        const double ta = totals.at(a), tb = totals.at(b);
        if (ta != tb) return ta > tb;
        return a < b;
    });
    return order;
}

} // namespace

FlowMatrix FlowMatrix::build(const std::vector<ScreeningRecord>& records) {
    FlowMatrix matrix;
    std::map<std::string, std::map<std::string, ingest::FractionTally>> tallies;
    for (const auto& rec : records) {
        if (rec.host_country.empty()) throw std::runtime_error("flows: record without host country");
        const int n = rec.producer_count();
        for (const auto& producer : rec.producer_countries) {
            tallies[producer][rec.host_country].add_unit_fraction(n);
        }
    }
    for (const auto& [producer, hosts] : tallies) {
        for (const auto& [host, tally] : hosts) {
            const double weight = tally.value();
            matrix.cells_[{producer, host}] = weight;
            matrix.production_totals_[producer] += weight;
            matrix.hosted_totals_[host] += weight;
        }
    }
    matrix.producers_ = ordered_by_total(matrix.production_totals_);
    matrix.hosts_ = ordered_by_total(matrix.hosted_totals_);
    return matrix;
}

double FlowMatrix::cell(const std::string& producer, const std::string& host) const {
    auto it = cells_.find({producer, host});
    return it == cells_.end() ? 0.0 : it->second;
}

double FlowMatrix::production_total(const std::string& producer) const {
    auto it = production_totals_.find(producer);
    return it == production_totals_.end() ? 0.0 : it->second;
}

double FlowMatrix::hosted_total(const std::string& host) const {
    auto it = hosted_totals_.find(host);
    return it == hosted_totals_.end() ? 0.0 : it->second;
}

double FlowMatrix::total() const {
    double sum = 0.0;
    for (const auto& [key, weight] : cells_) sum += weight;
    return sum;
}

bool FlowMatrix::has_producer(const std::string& country) const {
    return production_totals_.count(country) > 0;
}

bool FlowMatrix::has_host(const std::string& country) const {
    return hosted_totals_.count(country) > 0;
}

ShareMatrix row_normalize(const FlowMatrix& matrix) {
    ShareMatrix shares;
    shares.hosts = matrix.hosts();
    for (const auto& producer : matrix.producers()) {
        const double total = matrix.production_total(producer);
        if (total <= 0.0) continue;
        shares.producers.push_back(producer);
        shares.row_totals.push_back(total);
        std::vector<double> row;
        row.reserve(shares.hosts.size());
        for (const auto& host : shares.hosts) row.push_back(matrix.cell(producer, host) / total);
        shares.shares.push_back(std::move(row));
    }
    return shares;
}

std::vector<TradeBalance> trade_balances(const FlowMatrix& matrix,
                                         const std::map<std::string, int>& hosted_events,
                                         int min_hosted_events) {
    // Host-only countries still get a row (flagged, not dropped), after the
    // producers and in name order like any other zero-production tie.
    std::vector<std::string> countries = matrix.producers();
    for (const auto& host : matrix.hosts()) {
        if (!matrix.has_producer(host)) countries.push_back(host);
    }
    std::sort(countries.begin(), countries.end(),
              [&](const std::string& a, const std::string& b) {
                  const double ta = matrix.production_total(a), tb = matrix.production_total(b);
                  if (ta != tb) return ta > tb;
                  return a < b;
              });

    std::vector<TradeBalance> balances;
    for (const auto& country : countries) {
        auto hosted_it = hosted_events.find(country);
        const int hosted = hosted_it == hosted_events.end() ? 0 : hosted_it->second;
        if (hosted < min_hosted_events) continue;

        TradeBalance tb;
        tb.country = country;
        tb.domestic = matrix.cell(country, country);
        tb.exports = matrix.production_total(country) - tb.domestic;
        tb.imports = matrix.hosted_total(country) - tb.domestic;
        const double produced = tb.domestic + tb.exports;
        tb.domestic_share = produced > 0.0 ? tb.domestic / produced : 0.0;
        if (tb.imports > 0.0 && tb.exports > 0.0) {
            tb.balance = std::log2(tb.imports / tb.exports);
            tb.flag = "ok";
        } else if (tb.imports > 0.0) {
            tb.flag = "no-exports";
        } else if (tb.exports > 0.0) {
            tb.flag = "no-imports";
        } else {
            tb.flag = "no-trade";
        }
        balances.push_back(std::move(tb));
    }
    return balances;
}

StarNetwork star_network(const FlowMatrix& matrix, const std::string& country, double coverage) {
    if (!matrix.has_producer(country) && !matrix.has_host(country)) {
        throw std::invalid_argument("flows: unknown country " + country);
    }
    if (coverage < 0.0 || coverage > 1.0) {
        throw std::invalid_argument("flows: coverage must lie in [0, 1]");
    }

    StarNetwork star;
    star.center = country;
    star.coverage = coverage;
    star.domestic = matrix.cell(country, country);

    std::map<std::string, StarPartner> partner_map;
    for (const auto& host : matrix.hosts()) {
        if (host == country) continue;
        const double weight = matrix.cell(country, host);
        if (weight > 0.0) {
            partner_map[host].country = host;
            partner_map[host].exports = weight;
        }
    }
    for (const auto& producer : matrix.producers()) {
        if (producer == country) continue;
        const double weight = matrix.cell(producer, country);
        if (weight > 0.0) {
            partner_map[producer].country = producer;
            partner_map[producer].imports = weight;
        }
    }

    std::vector<StarPartner> partners;
    partners.reserve(partner_map.size());
    double total = 0.0;
    for (auto& [name, partner] : partner_map) {
        total += partner.imports + partner.exports;
        partners.push_back(std::move(partner));
    }
    std::sort(partners.begin(), partners.end(), [](const StarPartner& a, const StarPartner& b) {
        const double wa = a.imports + a.exports, wb = b.imports + b.exports;
        if (wa != wb) return wa > wb;
        return a.country < b.country;
    });

    star.others.country = "Others";
    const double target = coverage * total;
    double covered = 0.0;
    for (auto& partner : partners) {
        if (covered >= target) {
            star.others.imports += partner.imports;
            star.others.exports += partner.exports;
        } else {
            covered += partner.imports + partner.exports;
            star.partners.push_back(std::move(partner));
        }
    }
    return star;
}

} // namespace festcircuit::flows
