#pragma once

#include <iosfwd>
#include <string>

#include "sja/auction.hpp"
#include "sja/rational.hpp"

namespace sja {

// Everything the price pipeline produces for one n: solved schedule, expected
// revenue, criticality audit, and the partition-of-unity check.
struct PriceReport {
  PriceSchedule schedule;
  Rational expected_revenue;
  AuditReport audit;
  PartitionReport partition;
};

PriceReport build_price_report(int n, const Rational& tol, int desk_limit = 8,
                               int threads = 1);

// JSON rendering:
//   {"n": int, "tol": string, "prices": [string-decimal...],
//    "enclosures": [[lo, hi]...], "sold": [bool...], "gap": int,
//    "degenerate": bool, "revenue": string-decimal,
//    "residuals": [string...], "partition_residual": string}
// Prices, revenue and residuals are decimal strings (round half to even);
// enclosure endpoints and tol are exact fraction strings.
std::string price_report_json(const PriceReport& r, int digits = 15);

// One price-table CSV row: "n, p_1, p_2, ..., p_n" with p_1 rendered as an
// exact fraction, later prices as decimals, and "--" for unsold layers.
std::string prices_csv_row(const PriceReport& r, int digits = 3);

// One revenue-table CSV row: "n, revenue".
std::string revenue_csv_row(const PriceReport& r, int digits = 3);

// Human-oriented multi-line rendering of the full report.
std::string price_report_text(const PriceReport& r, int digits = 6);

// Parses a price-schedule JSON file into a general (bundle-indexed)
// schedule. Accepts either the report schema above (symmetric prices by
// cardinality) or an explicit map
//   {"n": int, "prices": {"1": "2/3", "2": "1/2", "1,2": "5/6"}}
// with bundles written as comma-separated item lists and every nonempty
// bundle present.
GeneralPriceSchedule parse_price_file(const std::string& text);

}  // namespace sja
