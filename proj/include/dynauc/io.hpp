#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "dynauc/model.hpp"
#include "json.hpp"

namespace dynauc::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline Rational rational_at(const Json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ParseError(path + ": expected a rational string");
}

inline Price price_at(const Json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "inf") return Price::no_sale();
  Rational r = rational_at(j, path);
  if (r.sign() < 0) throw ParseError(path + ": negative price " + r.str());
  return Price(r);
}

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(path + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline Distribution dist_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path + ": expected a non-empty list of [value, prob] pairs");
  std::vector<Distribution::Atom> atoms;
  for (size_t k = 0; k < j.size(); ++k) {
    std::string p = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 2) throw ParseError(p + ": expected [value, prob]");
    Rational v = rational_at(j[k][0], p + ".value");
    Rational pr = rational_at(j[k][1], p + ".prob");
    if (v.sign() < 0) throw ParseError(p + ".value: negative value " + v.str());
    if (pr.sign() < 0) throw ParseError(p + ".prob: negative probability " + pr.str());
    if (pr.is_zero()) throw ParseError(p + ".prob: zero-probability atom at " + v.str());
    atoms.emplace_back(v, pr);
  }
  try {
    return Distribution(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Lottery lottery_at(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path + ": expected a non-empty list of [price, prob] pairs");
  Lottery l;
  Rational total = 0;
  for (size_t k = 0; k < j.size(); ++k) {
    std::string p = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 2) throw ParseError(p + ": expected [price, prob]");
    Price pr = price_at(j[k][0], p + ".price");
    Rational m = rational_at(j[k][1], p + ".prob");
    if (m.sign() < 0) throw ParseError(p + ".prob: negative probability");
    total += m;
    l.emplace_back(pr, m);
  }
  if (total != 1) throw ParseError(path + ": probability mass " + total.str() + " ≠ 1");
  return l;
}

inline std::string history_key(const std::vector<Rational>& h) {
  std::string s;
  for (size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + h[i].str();
  return s;
}

inline std::vector<Rational> history_from_key(const std::string& key, const std::string& path) {
  std::vector<Rational> h;
  if (key.empty()) return h;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      h.push_back(Rational::parse(part));
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  return h;
}

}  // namespace detail

inline Json to_json(const Distribution& d) {
  Json a = Json::array();
  for (auto& [v, p] : d.atoms()) a.push_back({v.str(), p.str()});
  return a;
}

inline Json to_json(const Lottery& l) {
  Json a = Json::array();
  for (auto& [v, p] : l) a.push_back({v.str(), p.str()});
  return a;
}

inline TwoDayInstance parse_two_day(const Json& j) {
  using namespace detail;
  const Json& types = field(j, "types", "instance");
  if (!types.is_array()) throw ParseError("instance.types: expected a list");
  TwoDayInstance inst;
  Rational total = 0;
  std::set<Rational> seen;
  for (size_t i = 0; i < types.size(); ++i) {
    std::string p = "types[" + std::to_string(i) + "]";
    BuyerType t;
    t.prob = rational_at(field(types[i], "prob", p), p + ".prob");
    t.v1 = rational_at(field(types[i], "v1", p), p + ".v1");
    if (t.prob.sign() <= 0) throw ParseError(p + ".prob: must be positive");
    if (t.v1.sign() < 0) throw ParseError(p + ".v1: negative value " + t.v1.str());
    if (!seen.insert(t.v1).second) throw ParseError(p + ".v1: duplicate v1 value " + t.v1.str());
    t.day2 = dist_at(field(types[i], "day2", p), p + ".day2");
    total += t.prob;
    inst.types.push_back(std::move(t));
  }
  if (inst.types.empty()) throw ParseError("instance.types: empty");
  if (total != 1) throw ParseError("types[*].prob: probability mass " + total.str() + " ≠ 1");
  return inst;
}

inline MultiDayInstance parse_multi_day(const Json& j) {
  using namespace detail;
  MultiDayInstance m;
  const Json& days = field(j, "days", "instance");
  if (!days.is_number_integer() || days.get<int>() < 1) throw ParseError("instance.days: expected a positive integer");
  m.days = days.get<int>();
  const Json& bidders = field(j, "bidders", "instance");
  if (!bidders.is_array() || bidders.empty()) throw ParseError("instance.bidders: expected a non-empty list");
  for (size_t b = 0; b < bidders.size(); ++b) {
    std::string p = "bidders[" + std::to_string(b) + "]";
    MultiDayBidder bd;
    const Json& sup = field(bidders[b], "supports", p);
    if (!sup.is_array()) throw ParseError(p + ".supports: expected a list per day");
    for (size_t d = 0; d < sup.size(); ++d) {
      std::vector<Rational> vals;
      for (size_t k = 0; k < sup[d].size(); ++k)
        vals.push_back(rational_at(sup[d][k], p + ".supports[" + std::to_string(d) + "][" + std::to_string(k) + "]"));
      std::sort(vals.begin(), vals.end());
      bd.supports.push_back(std::move(vals));
    }
    const Json& cond = field(bidders[b], "conditionals", p);
    if (!cond.is_object()) throw ParseError(p + ".conditionals: expected an object keyed by history");
    for (auto& [key, val] : cond.items()) {
      std::string cp = p + ".conditionals[\"" + key + "\"]";
      bd.conditionals.emplace(history_from_key(key, cp), dist_at(val, cp));
    }
    m.bidders.push_back(std::move(bd));
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("instance: ") + e.what());
  }
  return m;
}

using AnyInstance = std::variant<TwoDayInstance, MultiDayInstance>;

inline AnyInstance parse_instance(const Json& j) {
  if (j.is_object() && j.contains("bidders")) return parse_multi_day(j);
  if (j.is_object() && j.contains("days") && !(j["days"].is_number_integer() && j["days"].get<int>() == 2))
    throw ParseError("instance.days: two-day schema requires days = 2");
  return parse_two_day(j);
}

inline Json to_json(const TwoDayInstance& inst) {
  Json types = Json::array();
  for (auto& t : inst.types) {
    Json o;
    o["prob"] = t.prob.str();
    o["v1"] = t.v1.str();
    o["day2"] = to_json(t.day2);
    types.push_back(std::move(o));
  }
  Json j;
  j["days"] = 2;
  j["types"] = std::move(types);
  return j;
}

inline Json to_json(const MultiDayInstance& m) {
  Json bidders = Json::array();
  for (auto& b : m.bidders) {
    Json sup = Json::array();
    for (auto& day : b.supports) {
      Json a = Json::array();
      for (auto& v : day) a.push_back(v.str());
      sup.push_back(std::move(a));
    }
    Json cond = Json::object();
    for (auto& [h, d] : b.conditionals) cond[detail::history_key(h)] = to_json(d);
    Json o;
    o["supports"] = std::move(sup);
    o["conditionals"] = std::move(cond);
    bidders.push_back(std::move(o));
  }
  Json j;
  j["days"] = m.days;
  j["bidders"] = std::move(bidders);
  return j;
}

using AnyMechanism = std::variant<DeterministicMechanism, RandomizedMechanism>;

// Entries are matched to instance types through v1.
inline AnyMechanism parse_mechanism(const Json& j, const TwoDayInstance& inst) {
  using namespace detail;
  const Json& kind = field(j, "kind", "mechanism");
  std::string k = kind.is_string() ? kind.get<std::string>() : "";
  auto locate = [&](const Json& entry, const std::string& p, std::vector<bool>& seen) {
    Rational v1 = rational_at(field(entry, "v1", p), p + ".v1");
    int idx = inst.index_of(v1);
    if (idx < 0) throw ParseError(p + ".v1: no type with v1 = " + v1.str());
    if (seen[idx]) throw ParseError(p + ".v1: duplicate entry for v1 = " + v1.str());
    seen[idx] = true;
    return static_cast<size_t>(idx);
  };
  std::vector<bool> seen(inst.size(), false);
  auto require_all = [&](const char* what) {
    for (size_t i = 0; i < inst.size(); ++i)
      if (!seen[i]) throw ParseError(std::string("mechanism.") + what + ": missing entry for v1 = " + inst.types[i].v1.str());
  };
  if (k == "deterministic") {
    const Json& prices = field(j, "prices", "mechanism");
    DeterministicMechanism m;
    m.prices.resize(inst.size());
    for (size_t e = 0; e < prices.size(); ++e) {
      std::string p = "prices[" + std::to_string(e) + "]";
      size_t idx = locate(prices[e], p, seen);
      m.prices[idx].p = price_at(field(prices[e], "p", p), p + ".p");
      m.prices[idx].q = price_at(field(prices[e], "q", p), p + ".q");
    }
    require_all("prices");
    return m;
  }
  if (k == "randomized") {
    const Json& lots = field(j, "lotteries", "mechanism");
    RandomizedMechanism m;
    m.lotteries.resize(inst.size());
    for (size_t e = 0; e < lots.size(); ++e) {
      std::string p = "lotteries[" + std::to_string(e) + "]";
      size_t idx = locate(lots[e], p, seen);
      m.lotteries[idx].day1 = lottery_at(field(lots[e], "day1", p), p + ".day1");
      m.lotteries[idx].day2 = lottery_at(field(lots[e], "day2", p), p + ".day2");
    }
    require_all("lotteries");
    return m;
  }
  throw ParseError("mechanism.kind: expected \"deterministic\" or \"randomized\"");
}

inline Json to_json(const DeterministicMechanism& m, const TwoDayInstance& inst) {
  Json prices = Json::array();
  for (size_t i = 0; i < m.prices.size(); ++i) {
    Json o;
    o["v1"] = inst.types[i].v1.str();
    o["p"] = m.prices[i].p.str();
    o["q"] = m.prices[i].q.str();
    prices.push_back(std::move(o));
  }
  Json j;
  j["kind"] = "deterministic";
  j["prices"] = std::move(prices);
  return j;
}

inline Json to_json(const RandomizedMechanism& m, const TwoDayInstance& inst) {
  Json lots = Json::array();
  for (size_t i = 0; i < m.lotteries.size(); ++i) {
    Json o;
    o["v1"] = inst.types[i].v1.str();
    o["day1"] = to_json(m.lotteries[i].day1);
    o["day2"] = to_json(m.lotteries[i].day2);
    lots.push_back(std::move(o));
  }
  Json j;
  j["kind"] = "randomized";
  j["lotteries"] = std::move(lots);
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": invalid JSON (" + e.what() + ")");
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace dynauc::io
