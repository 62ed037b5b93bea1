#include "splitsim/fuzz.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace splitsim {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Modulo draws keep generated scenarios identical across standard libraries.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  int between(int lo, int hi) { return hi <= lo ? lo : lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool chance(int num, int den) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(den)) < num; }
  std::uint64_t raw() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

std::string random_bits(Draw& draw, int len) {
  std::string out;
  for (int i = 0; i < len; ++i) out += draw.chance(1, 4) ? '1' : '0';
  return out;
}

bool compatible_strings(const std::string& a, const std::string& b) {
  const std::size_t n = std::min(a.size(), b.size());
  return a.compare(0, n, b, 0, n) == 0;
}

Json random_pairs(Draw& draw, int count, int below, int last_stage, std::set<int>& used) {
  Json out = Json::array();
  for (int i = 0; i < count; ++i) {
    const int x = draw.between(0, below - 1);
    if (!used.insert(x).second) continue;
    out.push_back(Json::array({draw.between(0, last_stage), x}));
  }
  return out;
}

}  // namespace

Scenario generate_scenario(std::uint64_t seed, std::uint64_t index, const FuzzParams& params) {
  Draw draw(mix(seed, index));
  const bool robinson = params.construction == ConstructionKind::Robinson;
  const int H = draw.between(4, std::clamp(params.max_horizon, 4, 1024));
  const int active = draw.chance(1, 2) ? H / 2 : H;  // half the scenarios fall quiet midway
  const int small = std::min(8, H);

  Json doc;
  doc["horizon"] = H;
  doc["construction"] = robinson ? "robinson" : "sacks";
  doc["seed"] = draw.raw();

  std::vector<int> pool(H);
  for (int i = 0; i < H; ++i) pool[i] = i;
  Json b = Json::array();
  for (int s = 1; s <= H && !pool.empty(); s += 2) {
    if (s > active && !draw.chance(1, 8)) continue;
    if (!draw.chance(3, 5)) continue;
    const int pick = draw.between(0, static_cast<int>(pool.size()) - 1);
    b.push_back(Json::array({s, pool[pick]}));
    pool[pick] = pool.back();
    pool.pop_back();
  }
  doc["b"] = std::move(b);

  if (robinson) {
    if (draw.chance(1, 2)) {
      doc["c"] = {{"policy", "churn-C"}, {"params", {{"count", draw.between(0, std::min(6, H))}, {"below", draw.between(1, small)}}}};
    } else {
      std::set<int> used;
      doc["c"] = random_pairs(draw, draw.between(0, 6), small, active, used);
    }
    doc["p_policy"] = {{"type", "truthful_delay"}, {"d", draw.between(0, 3)}};
  }

  if (draw.chance(1, 2)) {
    Json params_d = Json::object();
    if (draw.chance(1, 2)) params_d["limit"] = draw.between(1, 4);
    doc["d"] = {{"policy", "anti-delta"}, {"params", std::move(params_d)}};
  } else {
    std::set<int> used;
    doc["d"] = random_pairs(draw, draw.between(0, 4), small, active, used);
  }

  Json functionals = Json::array();
  std::set<std::pair<int, int>> ids;
  const int nf = draw.between(0, std::clamp(params.max_functionals, 0, 8));
  for (int f = 0; f < nf; ++f) {
    const int side = draw.between(0, 1);
    const int e = draw.between(0, std::min(7, H));
    if (!ids.emplace(side, e).second) continue;
    struct Raw {
      std::string theta, sigma;
      int x, k;
    };
    std::vector<Raw> kept;
    Json axioms = Json::array();
    const int na = draw.between(0, std::clamp(params.max_axioms, 0, 64));
    for (int a = 0; a < na; ++a) {
      Raw raw{random_bits(draw, draw.between(0, 3)), robinson ? random_bits(draw, draw.between(0, 3)) : "",
              draw.between(0, std::min(6, H - 1)), draw.chance(1, 4) ? 1 : 0};
      const int use = static_cast<int>(std::max(raw.theta.size(), raw.sigma.size()));
      const int stage = draw.between(use, std::max(use, active));
      const bool conflict = std::any_of(kept.begin(), kept.end(), [&](const Raw& o) {
        return o.x == raw.x && o.k != raw.k && compatible_strings(o.theta, raw.theta) &&
               compatible_strings(o.sigma, raw.sigma);
      });
      if (conflict) continue;
      Json ax = {{"theta", raw.theta}, {"x", raw.x}, {"k", raw.k}, {"stage", stage}};
      if (robinson) ax["sigma"] = raw.sigma;
      axioms.push_back(std::move(ax));
      kept.push_back(std::move(raw));
    }
    functionals.push_back({{"side", side}, {"e", e}, {"axioms", std::move(axioms)}});
  }
  doc["functionals"] = std::move(functionals);
  return load_scenario(doc);
}

std::vector<Scenario> fuzz(std::uint64_t seed, std::uint64_t count, const FuzzParams& params) {
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(generate_scenario(seed, i, params));
  return out;
}

FuzzRow summarize(std::uint64_t index, const Scenario& sc, const RunResult& result, const VerificationReport& report) {
  FuzzRow row;
  row.index = index;
  row.horizon = sc.horizon;
  row.passed = report.passed();
  row.settled = report.settled();
  for (const auto& [id, block] : result.final.blocks) {
    row.max_restraint = std::max(row.max_restraint, block.max_restraint);
    row.max_initializations = std::max(row.max_initializations, block.initializations);
  }
  for (const auto& ev : result.trace)
    if (ev.kind == event_kind::kInjury) ++row.injuries;
  for (const auto& c : report.checks)
    if (c.status == CheckStatus::Fail) row.failed_checks.push_back(c.id);
  if (result.final.failure) row.failed_checks.push_back("aborted");
  return row;
}

FuzzSummary run_fuzz(std::uint64_t seed, std::uint64_t count, const FuzzParams& params) {
  FuzzSummary summary;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Scenario sc = generate_scenario(seed, i, params);
    const RunResult result = run(sc);
    const VerificationReport report = verify(sc, result.trace, &result.final);
    FuzzRow row = summarize(i, sc, result, report);
    if (row.passed) {
      ++summary.passed;
    } else {
      ++summary.failed;
      if (!summary.first_failure) summary.first_failure = i;
    }
    if (!row.settled) ++summary.unsettled;
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

}  // namespace splitsim
