#include "sja/reports.hpp"

#include <bit>
#include <sstream>

#include <json.hpp>

namespace sja {

PriceReport build_price_report(int n, const Rational& tol, int desk_limit,
                               int threads) {
  PriceReport r;
  r.schedule = solve_prices(n, tol, desk_limit, threads);
  r.expected_revenue = revenue(r.schedule, desk_limit, threads);
  r.audit = criticality_audit(r.schedule, Rational(1, 1000000000), desk_limit,
                              threads);
  r.partition = partition_check(r.schedule, desk_limit, threads);
  return r;
}

std::string price_report_json(const PriceReport& r, int digits) {
  nlohmann::ordered_json j;
  const PriceSchedule& ps = r.schedule;
  j["n"] = ps.n;
  j["tol"] = fraction_string(ps.tol);
  nlohmann::ordered_json prices = nlohmann::ordered_json::array();
  nlohmann::ordered_json enclosures = nlohmann::ordered_json::array();
  nlohmann::ordered_json sold = nlohmann::ordered_json::array();
  for (int k = 1; k <= ps.n; ++k) {
    prices.push_back(decimal_string(ps.price_mid(k), digits));
    enclosures.push_back({fraction_string(ps.price(k).lo),
                          fraction_string(ps.price(k).hi)});
    sold.push_back(static_cast<bool>(ps.sold[k - 1]));
  }
  j["prices"] = std::move(prices);
  j["enclosures"] = std::move(enclosures);
  j["sold"] = std::move(sold);
  j["gap"] = ps.gap;
  j["degenerate"] = r.audit.degenerate;
  j["revenue"] = decimal_string(r.expected_revenue, digits);
  nlohmann::ordered_json residuals = nlohmann::ordered_json::array();
  for (const LayerAudit& la : r.audit.layers)
    residuals.push_back(decimal_string(la.residual.mid(), digits));
  j["residuals"] = std::move(residuals);
  j["partition_residual"] =
      decimal_string(r.partition.residual.mid(), digits);
  return j.dump(2);
}

std::string prices_csv_row(const PriceReport& r, int digits) {
  const PriceSchedule& ps = r.schedule;
  std::ostringstream os;
  os << ps.n;
  for (int k = 1; k <= ps.n; ++k) {
    os << ", ";
    if (!ps.sold[k - 1])
      os << "--";
    else if (k == 1)
      os << fraction_string(ps.price_mid(1));
    else
      os << decimal_string(ps.price_mid(k), digits);
  }
  return os.str();
}

std::string revenue_csv_row(const PriceReport& r, int digits) {
  std::ostringstream os;
  os << r.schedule.n << ", " << decimal_string(r.expected_revenue, digits);
  return os.str();
}

std::string price_report_text(const PriceReport& r, int digits) {
  const PriceSchedule& ps = r.schedule;
  std::ostringstream os;
  os << "n = " << ps.n << "  tol = " << fraction_string(ps.tol)
     << (ps.certified ? "  (certified enclosures)"
                      : "  (midpoint propagation beyond the symbolic desk)")
     << "\n";
  for (int k = 1; k <= ps.n; ++k) {
    os << "  p_" << k << " = " << decimal_string(ps.price_mid(k), digits);
    if (ps.price(k).exact())
      os << " (exact " << fraction_string(ps.price_mid(k)) << ")";
    os << (ps.sold[k - 1] ? "  sold" : "  unsold");
    os << "\n";
  }
  os << "gap = " << ps.gap << "  degenerate = "
     << (r.audit.degenerate ? "yes" : "no") << "\n";
  os << "revenue = " << decimal_string(r.expected_revenue, digits) << "\n";
  os << "residuals:";
  for (const LayerAudit& la : r.audit.layers)
    os << " r_" << la.layer << " = "
       << decimal_string(la.residual.mid(), digits);
  os << "\n";
  os << "partition residual = "
     << decimal_string(r.partition.residual.mid(), digits)
     << "  (width " << decimal_string(r.partition.residual.width(), digits)
     << ")\n";
  os << "vol D_empty - 1/(n+1) = "
     << decimal_string(r.partition.d_empty_residual.mid(), digits) << "\n";
  os << "criticality audit: " << (r.audit.pass ? "pass" : "FAIL") << "\n";
  return os.str();
}

namespace {

std::uint32_t parse_bundle_key(const std::string& key, int n) {
  std::uint32_t mask = 0;
  std::istringstream is(key);
  std::string part;
  while (std::getline(is, part, ',')) {
    std::size_t pos = 0;
    int item = std::stoi(part, &pos);
    if (pos != part.size() || item < 1 || item > n)
      throw std::invalid_argument("bad bundle key \"" + key + "\"");
    std::uint32_t bit = 1u << (item - 1);
    if (mask & bit)
      throw std::invalid_argument("repeated item in bundle \"" + key + "\"");
    mask |= bit;
  }
  if (mask == 0) throw std::invalid_argument("empty bundle key");
  return mask;
}

}  // namespace

GeneralPriceSchedule parse_price_file(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("price file: ") + e.what());
  }
  if (!j.contains("n") || !j["n"].is_number_integer())
    throw std::invalid_argument("price file: missing item count \"n\"");
  const int n = j["n"].get<int>();
  if (n < 1 || n > 20)
    throw std::invalid_argument("price file: item count out of range");
  if (!j.contains("prices"))
    throw std::invalid_argument("price file: missing \"prices\"");
  GeneralPriceSchedule g(n);

  try {
    const auto& prices = j["prices"];
    if (prices.is_array()) {
      if (static_cast<int>(prices.size()) != n)
        throw std::invalid_argument(
            "price file: symmetric price list must have n entries");
      std::vector<Rational> by_size;
      for (const auto& v : prices)
        by_size.push_back(parse_rational(v.get<std::string>()));
      for (std::uint32_t mask = 1; mask < (1u << n); ++mask)
        g.set_price(mask, by_size[std::popcount(mask) - 1]);
      return g;
    }
    if (!prices.is_object())
      throw std::invalid_argument(
          "price file: \"prices\" must be a list or map");
    std::vector<bool> seen(std::size_t(1) << n, false);
    for (const auto& [key, value] : prices.items()) {
      std::uint32_t mask = parse_bundle_key(key, n);
      if (seen[mask])
        throw std::invalid_argument("price file: bundle \"" + key +
                                    "\" listed twice");
      seen[mask] = true;
      g.set_price(mask, parse_rational(value.get<std::string>()));
    }
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask)
      if (!seen[mask])
        throw std::invalid_argument("price file: bundle map is incomplete");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("price file: ") + e.what());
  }
  return g;
}

}  // namespace sja
