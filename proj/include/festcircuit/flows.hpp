#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "festcircuit/ingest.hpp"

namespace festcircuit::flows {

/// Weighted producer x host matrix. Every record spreads one unit of weight
/// across its producers (1/n each) toward its host, so the matrix total
/// equals the record count.
class FlowMatrix {
public:
    static FlowMatrix build(const std::vector<ScreeningRecord>& records);

    const std::vector<std::string>& producers() const { return producers_; }
    const std::vector<std::string>& hosts() const { return hosts_; }
    double cell(const std::string& producer, const std::string& host) const;
    double production_total(const std::string& producer) const;
    double hosted_total(const std::string& host) const;
    double total() const;
    bool has_producer(const std::string& country) const;
    bool has_host(const std::string& country) const;

private:
    std::vector<std::string> producers_; // descending weighted production
    std::vector<std::string> hosts_;     // descending weighted hosting
    std::map<std::pair<std::string, std::string>, double> cells_;
    std::map<std::string, double> production_totals_;
    std::map<std::string, double> hosted_totals_;
};

struct ShareMatrix {
    std::vector<std::string> producers; // producers with positive totals
    std::vector<std::string> hosts;
    std::vector<std::vector<double>> shares; // rows sum to 1
    std::vector<double> row_totals;          // pre-normalization weighted totals
};

/// Rows rescaled to sum to 1; the (country, country) cell is the producer's
/// domestic share. Zero-total producers are left out.
ShareMatrix row_normalize(const FlowMatrix& matrix);

struct TradeBalance {
    std::string country;
    double imports = 0.0;  // foreign films hosted
    double exports = 0.0;  // own films hosted abroad
    double domestic = 0.0; // own films at own festivals
    std::optional<double> balance; // log2(imports / exports) when both positive
    double domestic_share = 0.0;   // domestic / (domestic + exports)
    std::string flag;              // "ok", "no-imports", "no-exports", "no-trade"
};

/// Balances for countries hosting at least min_hosted_events editions,
/// ordered by descending production total.
std::vector<TradeBalance> trade_balances(const FlowMatrix& matrix,
                                         const std::map<std::string, int>& hosted_events,
                                         int min_hosted_events = 5);

struct StarPartner {
    std::string country;
    double imports = 0.0; // partner's films at the center's festivals
    double exports = 0.0; // center's films at the partner's festivals
};

struct StarNetwork {
    std::string center;
    std::vector<StarPartner> partners; // descending combined weight
    StarPartner others;                // aggregate of the truncated tail
    double domestic = 0.0;             // self-loop, reported separately
    double coverage = 0.0;             // requested fraction
};

/// Smallest partner prefix (by combined in+out weight) reaching
/// coverage x total non-domestic traffic; the rest collapses into Others.
StarNetwork star_network(const FlowMatrix& matrix, const std::string& country, double coverage);

} // namespace festcircuit::flows
