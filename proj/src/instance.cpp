#include "scd/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace scd {

using nlohmann::json;

std::int64_t ScdInstance::total_demand() const {
  std::int64_t s = 0;
  for (const auto& c : consumers) s += c.demand;
  return s;
}

std::int64_t ScdInstance::total_capacity() const {
  std::int64_t s = 0;
  for (const auto& f : facilities) s += f.capacity;
  return s;
}

std::vector<Scenario> enumerate_scenarios(const std::vector<FacilityParams>& facilities) {
  const int L = static_cast<int>(facilities.size());
  if (L < 1) throw std::invalid_argument("enumerate_scenarios: no facilities");
  if (L > kFacilityHardCap)
    throw std::invalid_argument("enumerate_scenarios: " + std::to_string(L) +
                                " facilities exceed the enumeration cap of " +
                                std::to_string(kFacilityHardCap));
  const std::uint32_t S = 1u << L;
  std::vector<Scenario> out(S);
  for (std::uint32_t mask = 0; mask < S; ++mask) {
    Scenario& sc = out[mask];
    sc.failed_mask = mask;
    sc.q_eff.assign(L, 0.0);
    sc.r_eff.assign(L, 0.0);
    double rho = 1.0;
    for (int l = 0; l < L; ++l) {
      if ((mask >> l) & 1u) {
        rho *= 1.0 - facilities[l].reliability;
        sc.q_eff[l] = facilities[l].taint_rate;
        sc.r_eff[l] = facilities[l].residual_taint_rate;
      } else {
        rho *= facilities[l].reliability;
      }
    }
    sc.probability = rho;
  }
  return out;
}

namespace {

// Ranks by ascending key with index tie-break, then hands out the sorted
// values so that value rank matches key rank facility by facility.
template <typename Key>
std::vector<std::int64_t> assign_by_rank(const std::vector<Key>& keys,
                                         std::vector<std::int64_t> values) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  std::sort(values.begin(), values.end());
  std::vector<std::int64_t> out(n);
  for (int i = 0; i < n; ++i) out[order[i]] = values[i];
  return out;
}

// Integer split of `total` proportional to `weights` via largest-remainder
// rounding; every share is kept >= 1.
std::vector<std::int64_t> proportional_split(std::int64_t total,
                                             const std::vector<double>& weights) {
  const int n = static_cast<int>(weights.size());
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::int64_t> out(n);
  std::vector<std::pair<double, int>> frac(n);
  std::int64_t assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double share = static_cast<double>(total) * weights[i] / wsum;
    out[i] = static_cast<std::int64_t>(std::floor(share));
    frac[i] = {share - std::floor(share), i};
    assigned += out[i];
  }
  std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::int64_t k = 0; k < total - assigned; ++k) out[frac[k % n].second]++;
  for (int i = 0; i < n; ++i) {
    while (out[i] < 1) {
      int big = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
      out[big]--;
      out[i]++;
    }
  }
  return out;
}

}  // namespace

ScdInstance generate_instance(const GenConfig& cfg) {
  const int L = cfg.num_facilities;
  const int C = cfg.num_consumers;
  if (L < 1 || C < 1) throw std::invalid_argument("generate_instance: sizes must be >= 1");
  if (L > kFacilityGuard && !cfg.allow_large)
    throw std::invalid_argument(
        "generate_instance: " + std::to_string(L) + " facilities imply 2^" +
        std::to_string(L) + " = " + std::to_string(1ull << L) +
        " scenarios; pass allow_large to override (hard cap " +
        std::to_string(kFacilityHardCap) + ")");
  if (L > kFacilityHardCap)
    throw std::invalid_argument("generate_instance: hard cap is " +
                                std::to_string(kFacilityHardCap) + " facilities");
  if (cfg.residual_max >= cfg.taint_min)
    throw std::invalid_argument("generate_instance: residual range must stay below taint range");

  std::mt19937_64 rng(cfg.seed);
  auto draw_int = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  auto draw_real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  ScdInstance inst;
  inst.seed = cfg.seed;
  inst.consumers.resize(C);
  inst.facilities.resize(L);

  // Draw order is part of the reproducibility contract: demands, capacity
  // weights, fixed costs, reliabilities, taint rates, residual rates,
  // inspection costs, then the two cost matrices row-major.
  std::int64_t total_demand = 0;
  for (int c = 0; c < C; ++c) {
    inst.consumers[c].id = c;
    inst.consumers[c].demand = draw_int(cfg.demand_min, cfg.demand_max);
    total_demand += inst.consumers[c].demand;
  }

  std::vector<double> weights(L);
  for (int l = 0; l < L; ++l) weights[l] = draw_real(cfg.weight_min, cfg.weight_max);
  // round(ratio * demand) in exact integer arithmetic for the default 1.3.
  const std::int64_t cap_target =
      static_cast<std::int64_t>(std::llround(cfg.capacity_ratio * static_cast<double>(total_demand)));
  const std::vector<std::int64_t> caps = proportional_split(cap_target, weights);

  std::vector<std::int64_t> fixed_pool(L);
  for (int l = 0; l < L; ++l) fixed_pool[l] = draw_int(cfg.fixed_cost_min, cfg.fixed_cost_max);
  // Costlier facilities are the bigger ones: fixed-cost rank follows capacity rank.
  const std::vector<std::int64_t> fixed = assign_by_rank(caps, fixed_pool);

  for (int l = 0; l < L; ++l) {
    inst.facilities[l].id = l;
    inst.facilities[l].capacity = caps[l];
    inst.facilities[l].fixed_cost = fixed[l];
  }
  for (int l = 0; l < L; ++l)
    inst.facilities[l].reliability = draw_real(cfg.reliability_min, cfg.reliability_max);
  for (int l = 0; l < L; ++l)
    inst.facilities[l].taint_rate = draw_real(cfg.taint_min, cfg.taint_max);
  for (int l = 0; l < L; ++l)
    inst.facilities[l].residual_taint_rate = draw_real(cfg.residual_min, cfg.residual_max);

  std::vector<std::int64_t> inspect_pool(L);
  for (int l = 0; l < L; ++l) inspect_pool[l] = draw_int(cfg.inspection_min, cfg.inspection_max);
  // Inspection price follows how much taint the inspection removes (q - r).
  std::vector<double> improvement(L);
  for (int l = 0; l < L; ++l)
    improvement[l] = inst.facilities[l].taint_rate - inst.facilities[l].residual_taint_rate;
  const std::vector<std::int64_t> inspect = assign_by_rank(improvement, inspect_pool);
  for (int l = 0; l < L; ++l) inst.facilities[l].inspection_cost = inspect[l];

  inst.costs.ship_clean = Matrix(L, C);
  inst.costs.ship_tainted = Matrix(L, C);
  inst.costs.discard = Matrix(L, C);
  for (int l = 0; l < L; ++l)
    for (int c = 0; c < C; ++c)
      inst.costs.ship_clean(l, c) = static_cast<double>(
          draw_int(static_cast<std::int64_t>(cfg.ship_clean_min),
                   static_cast<std::int64_t>(cfg.ship_clean_max)));
  for (int l = 0; l < L; ++l)
    for (int c = 0; c < C; ++c)
      inst.costs.ship_tainted(l, c) = static_cast<double>(
          draw_int(static_cast<std::int64_t>(cfg.ship_tainted_min),
                   static_cast<std::int64_t>(cfg.ship_tainted_max)));
  for (int l = 0; l < L; ++l)
    for (int c = 0; c < C; ++c)
      inst.costs.discard(l, c) = cfg.discard_fraction * inst.costs.ship_clean(l, c);

  inst.scenarios = enumerate_scenarios(inst.facilities);
  return inst;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

std::string at(const std::string& field, int idx) {
  return field + "[" + std::to_string(idx) + "]";
}

}  // namespace

void validate_instance(const ScdInstance& inst) {
  const GenConfig d;  // default ranges are the validation contract
  const int L = inst.num_facilities();
  const int C = inst.num_consumers();
  require(L >= 1, "facilities: empty");
  require(C >= 1, "consumers: empty");
  require(L <= kFacilityHardCap, "facilities: more than " + std::to_string(kFacilityHardCap));

  for (int l = 0; l < L; ++l) {
    const auto& f = inst.facilities[l];
    require(f.id == l, at("facilities", l) + ".id: expected " + std::to_string(l));
    require(f.fixed_cost >= d.fixed_cost_min && f.fixed_cost <= d.fixed_cost_max,
            at("facilities", l) + ".fixed_cost: " + std::to_string(f.fixed_cost) +
                " out of [1000000, 2000000]");
    require(f.capacity > 0, at("facilities", l) + ".capacity: must be positive");
    require(f.inspection_cost >= d.inspection_min && f.inspection_cost <= d.inspection_max,
            at("facilities", l) + ".inspection_cost: " + std::to_string(f.inspection_cost) +
                " out of [50000, 100000]");
    require(f.reliability >= d.reliability_min && f.reliability <= d.reliability_max,
            at("facilities", l) + ".reliability: " + std::to_string(f.reliability) +
                " out of [0.50, 0.95]");
    require(f.taint_rate >= d.taint_min && f.taint_rate <= d.taint_max,
            at("facilities", l) + ".taint_rate: " + std::to_string(f.taint_rate) +
                " out of [0.10, 0.30]");
    require(f.residual_taint_rate >= d.residual_min && f.residual_taint_rate <= d.residual_max,
            at("facilities", l) + ".residual_taint_rate: " +
                std::to_string(f.residual_taint_rate) + " out of [0.01, 0.09]");
    require(f.residual_taint_rate < f.taint_rate,
            at("facilities", l) + ".residual_taint_rate: not below taint_rate");
  }
  for (int c = 0; c < C; ++c) {
    const auto& u = inst.consumers[c];
    require(u.id == c, at("consumers", c) + ".id: expected " + std::to_string(c));
    require(u.demand >= d.demand_min && u.demand <= d.demand_max,
            at("consumers", c) + ".demand: " + std::to_string(u.demand) +
                " out of [100, 300]");
  }

  auto check_dims = [&](const Matrix& m, const std::string& name) {
    require(m.rows() == L && m.cols() == C,
            "costs." + name + ": expected " + std::to_string(L) + "x" + std::to_string(C));
  };
  check_dims(inst.costs.ship_clean, "ship_clean");
  check_dims(inst.costs.ship_tainted, "ship_tainted");
  check_dims(inst.costs.discard, "discard");
  for (int l = 0; l < L; ++l)
    for (int c = 0; c < C; ++c) {
      const double lam = inst.costs.ship_clean(l, c);
      const double o = inst.costs.ship_tainted(l, c);
      require(lam >= d.ship_clean_min && lam <= d.ship_clean_max,
              "costs.ship_clean[" + std::to_string(l) + "][" + std::to_string(c) +
                  "]: out of [100, 1000]");
      require(o >= d.ship_tainted_min && o <= d.ship_tainted_max,
              "costs.ship_tainted[" + std::to_string(l) + "][" + std::to_string(c) +
                  "]: out of [10000, 25000]");
      require(inst.costs.discard(l, c) == 0.25 * lam,
              "costs.discard[" + std::to_string(l) + "][" + std::to_string(c) +
                  "]: not exactly 0.25 * ship_clean");
    }

  require(static_cast<int>(inst.scenarios.size()) == (1 << L),
          "scenarios: expected " + std::to_string(1 << L));
  long double rho_sum = 0.0L;
  for (const auto& sc : inst.scenarios) rho_sum += sc.probability;
  require(std::abs(static_cast<double>(rho_sum - 1.0L)) <= 1e-12,
          "scenarios: probabilities sum to " + std::to_string(static_cast<double>(rho_sum)));
}

// ---------- JSON ----------

std::string instance_to_json(const ScdInstance& inst) {
  json j;
  j["facilities"] = json::array();
  for (const auto& f : inst.facilities)
    j["facilities"].push_back({{"id", f.id},
                               {"fixed_cost", f.fixed_cost},
                               {"capacity", f.capacity},
                               {"inspection_cost", f.inspection_cost},
                               {"reliability", f.reliability},
                               {"taint_rate", f.taint_rate},
                               {"residual_taint_rate", f.residual_taint_rate}});
  j["consumers"] = json::array();
  for (const auto& c : inst.consumers)
    j["consumers"].push_back({{"id", c.id}, {"demand", c.demand}});

  auto mat = [&](const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["costs"] = {{"ship_clean", mat(inst.costs.ship_clean)},
                {"ship_tainted", mat(inst.costs.ship_tainted)},
                {"discard", mat(inst.costs.discard)}};
  j["meta"] = {{"seed", inst.seed}, {"generator_version", 1}};
  return j.dump(2) + "\n";
}

namespace {

const json& field(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing field " + path + key);
  return *it;
}

Matrix matrix_from_json(const json& rows, const std::string& path) {
  if (!rows.is_array() || rows.empty()) throw ParseError(path + ": expected non-empty array");
  const int R = static_cast<int>(rows.size());
  const int C = static_cast<int>(rows[0].size());
  Matrix m(R, C);
  for (int r = 0; r < R; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != C)
      throw ParseError(path + ": ragged rows");
    for (int c = 0; c < C; ++c) {
      if (!rows[r][c].is_number()) throw ParseError(path + ": non-numeric entry");
      m(r, c) = rows[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace

ScdInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }

  ScdInstance inst;
  try {
    for (const auto& fj : field(j, "", "facilities")) {
      FacilityParams f;
      f.id = field(fj, "facilities[].", "id").get<int>();
      f.fixed_cost = field(fj, "facilities[].", "fixed_cost").get<std::int64_t>();
      f.capacity = field(fj, "facilities[].", "capacity").get<std::int64_t>();
      f.inspection_cost = field(fj, "facilities[].", "inspection_cost").get<std::int64_t>();
      f.reliability = field(fj, "facilities[].", "reliability").get<double>();
      f.taint_rate = field(fj, "facilities[].", "taint_rate").get<double>();
      f.residual_taint_rate = field(fj, "facilities[].", "residual_taint_rate").get<double>();
      inst.facilities.push_back(f);
    }
    for (const auto& cj : field(j, "", "consumers")) {
      ConsumerParams c;
      c.id = field(cj, "consumers[].", "id").get<int>();
      c.demand = field(cj, "consumers[].", "demand").get<std::int64_t>();
      inst.consumers.push_back(c);
    }
    const json& costs = field(j, "", "costs");
    inst.costs.ship_clean = matrix_from_json(field(costs, "costs.", "ship_clean"), "costs.ship_clean");
    inst.costs.ship_tainted =
        matrix_from_json(field(costs, "costs.", "ship_tainted"), "costs.ship_tainted");
    inst.costs.discard = matrix_from_json(field(costs, "costs.", "discard"), "costs.discard");
    if (j.contains("meta") && j["meta"].contains("seed"))
      inst.seed = j["meta"]["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("ill-typed field: ") + e.what());
  }

  // Scenarios are derived data and are never stored in the file.
  inst.scenarios = enumerate_scenarios(inst.facilities);
  validate_instance(inst);
  return inst;
}

void save_instance(const ScdInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(inst);
}

ScdInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace scd
