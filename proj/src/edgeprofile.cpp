#include "magstep/edgeprofile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "magstep/fiber1d.hpp"
#include "magstep/memo.hpp"
#include "magstep/sweep.hpp"

namespace magstep {

void EdgeGeometry::validate() const {
  if (samples.empty()) throw RangeError("edge geometry has no samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& e = samples[i];
    if (i > 0 && !(e.s > samples[i - 1].s)) throw RangeError("edge arclengths must be strictly increasing");
    StepFieldParams{e.alpha, e.gamma, -1.0}.validate();
  }
}

EdgeGeometry EdgeGeometry::from_csv(const std::string& text) {
  EdgeGeometry g;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    EdgeSample e;
    if (!(ls >> e.s >> e.alpha >> e.gamma)) {
      if (g.samples.empty() && lineno == 1) continue;  // header
      throw RangeError("cannot parse edge sample on line " + std::to_string(lineno));
    }
    g.samples.push_back(e);
  }
  g.validate();
  return g;
}

EdgeGeometry EdgeGeometry::from_json(const std::string& text) {
  EdgeGeometry g;
  try {
    auto j = nlohmann::json::parse(text);
    g.closed = j.value("closed", false);
    for (const auto& s : j.at("samples")) g.samples.push_back({s.at("s"), s.at("alpha"), s.at("gamma")});
  } catch (const nlohmann::json::exception& e) {
    throw RangeError(std::string("invalid geometry JSON: ") + e.what());
  }
  g.validate();
  return g;
}

EdgeGeometry EdgeGeometry::ball_cut(int n) {
  if (n < 1) throw RangeError("ball_cut needs at least one sample");
  EdgeGeometry g;
  g.closed = true;
  for (int k = 0; k < n; ++k) {
    double s = 2 * std::numbers::pi * k / n;
    double gam = std::acos(std::min(1.0, std::abs(std::cos(s))));
    if (gam < 1e-12) gam = 0.0;
    g.samples.push_back({s, std::numbers::pi / 2, gam});
  }
  return g;
}

namespace {

using Key = std::tuple<long long, long long, long long, double, double, int>;

Key lambda_key(const StepFieldParams& p, const Resolution& res, int band_samples) {
  auto q = [](double x) { return std::llround(x * 1e9); };
  return {q(p.alpha), q(p.gamma), q(p.a), res.h2d, res.h1d, band_samples};
}

Memo<Key, BandProfile>& lambda_memo() {
  static Memo<Key, BandProfile> memo;
  return memo;
}

}  // namespace

LocalizationReport profile(const EdgeGeometry& geometry, double a, const Resolution& res, int threads,
                           int band_samples) {
  geometry.validate();
  StepFieldParams{std::numbers::pi / 2, 0.0, a}.validate();
  LocalizationReport rep;
  rep.a = a;
  rep.threshold = std::abs(a) * theta0(res).value;

  // one band profile per distinct (alpha, gamma)
  std::map<Key, StepFieldParams> distinct;
  for (const auto& e : geometry.samples) {
    StepFieldParams p{e.alpha, e.gamma, a};
    distinct.emplace(lambda_key(p, res, band_samples), p);
  }
  std::vector<std::pair<Key, StepFieldParams>> work(distinct.begin(), distinct.end());
  auto profiles = parallel_map(
      work.size(),
      [&](std::size_t i) {
        return lambda_memo().get(work[i].first, [&] { return band_profile(work[i].second, std::nullopt, band_samples, res, 1); });
      },
      threads);
  std::map<Key, BandProfile> by_key;
  for (std::size_t i = 0; i < work.size(); ++i) by_key.emplace(work[i].first, profiles[i]);

  rep.lambda_min = INFINITY;
  for (const auto& e : geometry.samples) {
    const BandProfile& bp = by_key.at(lambda_key({e.alpha, e.gamma, a}, res, band_samples));
    EdgePoint pt;
    pt.sample = e;
    pt.lambda = bp.lambda;
    pt.margin = bp.margin;
    pt.verdict = bp.verdict;
    pt.in_D = bp.verdict == Verdict::EigenvalueCertified && bp.lambda < rep.threshold - bp.margin;
    if (pt.lambda < rep.lambda_min) {
      rep.lambda_min = pt.lambda;
      rep.s_min = e.s;
    }
    rep.lambda_profile.push_back(pt);
  }
  for (std::size_t i = 0; i < rep.lambda_profile.size();) {
    if (!rep.lambda_profile[i].in_D) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < rep.lambda_profile.size() && rep.lambda_profile[j + 1].in_D) ++j;
    rep.D_set.emplace_back(rep.lambda_profile[i].sample.s, rep.lambda_profile[j].sample.s);
    i = j + 1;
  }
  rep.assumption_holds = !rep.D_set.empty();
  return rep;
}

double ground_energy_prediction(const LocalizationReport& report, double b) {
  if (!report.assumption_holds)
    throw AssumptionFails("no edge point has a certified model energy below |a| Theta0; the prediction does not apply");
  if (!(b > 0) || !std::isfinite(b)) throw RangeError("field strength b must be positive");
  return report.leading_energy(b);
}

std::string report_json(const LocalizationReport& r) {
  nlohmann::ordered_json j;
  j["a"] = r.a;
  j["threshold"] = r.threshold;
  j["lambda_min"] = r.lambda_min;
  j["s_min"] = r.s_min;
  j["assumption_holds"] = r.assumption_holds;
  j["D_set"] = nlohmann::json::array();
  for (auto [lo, hi] : r.D_set) j["D_set"].push_back({lo, hi});
  j["profile"] = nlohmann::json::array();
  for (const auto& p : r.lambda_profile)
    j["profile"].push_back({{"s", p.sample.s},
                            {"alpha", p.sample.alpha},
                            {"gamma", p.sample.gamma},
                            {"lambda", p.lambda},
                            {"margin", p.margin},
                            {"verdict", to_string(p.verdict)},
                            {"in_D", p.in_D}});
  return j.dump(2);
}

}  // namespace magstep
