#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmc/mmc.hpp"

namespace {

using nlohmann::json;

std::uint64_t pick_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MMC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw mmc::BadSpec("MMC_SEED is not an unsigned integer");
    }
  }
  return 0;
}

void emit(const json& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload.dump(2) << "\n";
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw mmc::BadSpec("cannot open output file " + out_path);
  os << payload.dump(2) << "\n";
}

mmc::ScalarFamily named_family(const mmc::FiniteMMSpace& X, const std::string& name,
                               std::size_t count, std::uint64_t seed) {
  if (name == "distance" || name == "distance_fields") return mmc::fields_distance(X);
  if (name == "halfmass" || name == "halfmass_distance_fields") return mmc::fields_halfmass(X);
  if (name == "envelope" || name == "random_envelope")
    return mmc::fields_random_envelope(X, count, seed);
  if (name == "exact_small") return mmc::exact_small_family(X);
  throw mmc::BadSpec("unknown scalar family: " + name);
}

std::vector<mmc::ScreenMap> named_maps(const mmc::FiniteMMSpace& X, const mmc::Screen& screen,
                                       const std::string& name, std::size_t count,
                                       std::uint64_t seed) {
  if (name == "multi_distance" || name == "multi_distance_embedding") {
    const auto* e = std::get_if<mmc::EuclideanScreen>(&screen);
    if (!e) throw mmc::BadSpec("multi_distance maps need a euclid screen");
    return mmc::maps_multi_distance(X, e->dim, count, seed).maps;
  }
  auto sp = std::make_shared<mmc::Screen>(screen);
  if (name == "geodesic" || name == "geodesic_embedding") {
    mmc::ScalarFamily fields = mmc::fields_distance(X);
    if (fields.fields.size() > count) fields.fields.resize(count);
    return mmc::maps_geodesic(X, sp, fields.fields).maps;
  }
  if (name == "repaired" || name == "repaired_assignment")
    return mmc::maps_repaired(X, sp, count, seed).maps;
  throw mmc::BadSpec("unknown map family: " + name);
}

mmc::PdMode parse_pd_mode(const std::string& mode) {
  if (mode == "auto" || mode.empty()) return mmc::PdMode::Auto;
  if (mode == "exact_1d") return mmc::PdMode::Exact1D;
  if (mode == "enumerate") return mmc::PdMode::Enumerate;
  if (mode == "ball_estimate") return mmc::PdMode::BallEstimate;
  throw mmc::BadSpec("unknown partial-diameter mode: " + mode);
}

json report_json(const mmc::Report& r) { return r.to_json(); }

struct AnalyzeArgs {
  std::string space;
  std::string screen = "euclid:1";
  std::string functional;
  std::string family = "distance";
  std::string mode = "auto";
  std::vector<double> kappa;
  double p = 2.0;
  double r = 0.0;
  double s = 1.0;
  double t = 2.0;
  std::size_t count = 8;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const std::uint64_t seed = pick_seed(a.seed);
  const mmc::FiniteMMSpace X = mmc::load_or_generate_space(a.space, seed);
  const double m = X.total_mass();
  const double kappa = a.kappa.empty() ? 0.1 * m : a.kappa[0];

  mmc::Report rep;
  rep.seed = seed;
  rep.name = a.functional;
  rep.params = json{{"space", a.space}, {"kappa", kappa}, {"p", a.p}, {"r", a.r}};
  rep.mode = "exact";

  if (X.support().empty()) throw mmc::EmptyMeasure("space carries no mass");

  if (a.functional == "alpha") {
    if (X.support().size() <= mmc::kAlphaExactLimit && a.mode != "estimate") {
      rep.value = mmc::concentration_exact(X, a.r);
    } else {
      rep.value = mmc::concentration_estimate(X, a.r, seed);
      rep.mode = "lower_estimate";
    }
  } else if (a.functional == "sep") {
    std::vector<double> ks = a.kappa;
    if (ks.size() < 2) throw mmc::BadSpec("sep needs at least two --kappa values");
    if (ks.size() == 2 && X.support().size() <= mmc::kSeparationExactLimit &&
        a.mode != "estimate") {
      rep.value = mmc::separation_exact(X, ks[0], ks[1]);
    } else {
      rep.value = mmc::separation_estimate(X, ks);
      rep.mode = "lower_estimate";
    }
  } else if (a.functional == "levy_mean") {
    mmc::ScalarFamily fam = named_family(X, a.family, a.count, seed);
    if (fam.fields.empty()) throw mmc::BadSpec("family is empty");
    const auto lm = mmc::levy_mean(X, fam.fields[0]);
    rep.value = lm.mid;
    rep.params["a"] = lm.a;
    rep.params["b"] = lm.b;
    rep.family = fam.description;
  } else if (a.functional == "levy_radius") {
    mmc::ScalarFamily fam = named_family(X, a.family, a.count, seed);
    rep.value = mmc::levy_radius(X, kappa, fam.fields);
    rep.mode = "lower_estimate";
    rep.family = fam.description;
  } else if (a.functional == "obs_diameter" || a.functional == "pd" ||
             a.functional == "obs_variation" || a.functional == "obs_central_radius") {
    const mmc::Screen screen = mmc::parse_screen(a.screen);
    const auto maps = named_maps(X, screen, a.family == "distance" ? "multi_distance" : a.family,
                                 a.count, seed);
    if (a.functional == "pd") {
      const mmc::PushforwardMeasure nu = mmc::pushforward(X, maps[0]);
      const mmc::PdMode mode = mmc::resolve_pd_mode(nu, parse_pd_mode(a.mode));
      rep.value = mmc::partial_diameter(nu, m - kappa, mode);
      rep.mode = mode == mmc::PdMode::BallEstimate ? "upper_estimate" : "exact";
      rep.params["pd_mode"] = mmc::pd_mode_name(mode);
    } else if (a.functional == "obs_diameter") {
      rep.value = mmc::obs_diameter(X, kappa, maps, parse_pd_mode(a.mode)).value;
      rep.mode = "lower_estimate";
    } else if (a.functional == "obs_variation") {
      rep.value = mmc::obs_lp_variation(X, a.p, maps).value;
      rep.mode = "lower_estimate";
    } else {
      rep.value = mmc::obs_central_radius(X, kappa, maps).value;
      rep.mode = "lower_estimate";
    }
  } else if (a.functional == "variation") {
    mmc::ScalarFamily fam = named_family(X, a.family, a.count, seed);
    if (fam.fields.empty()) throw mmc::BadSpec("family is empty");
    rep.value = mmc::lp_variation(X, fam.fields[0], a.p);
  } else if (a.functional == "barycenter" || a.functional == "tmean" ||
             a.functional == "iset" || a.functional == "variance") {
    const mmc::Screen screen = mmc::parse_screen(a.screen);
    const auto maps = named_maps(X, screen, a.family == "distance" ? "multi_distance" : a.family,
                                 a.count, seed);
    const mmc::PushforwardMeasure nu = mmc::pushforward(X, maps[0]);
    if (a.functional == "barycenter") {
      const auto b = mmc::barycenter(nu);
      rep.value = b.residual;
      rep.params["point"] = mmc::screen_point_json(b.point);
      rep.params["iterations"] = b.iterations;
    } else if (a.functional == "tmean") {
      mmc::TMeanOptions opt;
      opt.seed = seed;
      const auto tm = mmc::t_mean(nu, a.t, opt);
      rep.value = tm.objective;
      rep.params["point"] = mmc::screen_point_json(tm.point);
      rep.params["flat_region"] = tm.flat_region;
    } else if (a.functional == "iset") {
      mmc::TMeanOptions opt;
      opt.seed = seed;
      const auto is = mmc::minimizer_set(nu, a.s, a.t, 33, opt);
      rep.value = is.diameter;
      rep.params["any_flat"] = is.any_flat;
      rep.mode = "lower_estimate";
    } else {
      const auto v = mmc::variance_cat0(nu);
      rep.value = v.rhs - v.lhs;
      rep.params["lhs"] = v.lhs;
      rep.params["rhs"] = v.rhs;
    }
  } else if (a.functional == "tree_split") {
    const mmc::Screen screen = mmc::parse_screen(a.screen);
    if (!mmc::is_tree_screen(screen)) throw mmc::BadSpec("tree_split needs a tree screen");
    const auto maps = named_maps(X, screen, "geodesic", a.count, seed);
    const mmc::PushforwardMeasure nu = mmc::pushforward(X, maps[0]);
    const auto split = mmc::pre_levy_mean_tree(nu);
    rep.value = std::min(split.mass_a, split.mass_b);
    rep.params["mass_a"] = split.mass_a;
    rep.params["mass_b"] = split.mass_b;
  } else {
    throw mmc::BadSpec("unknown functional: " + a.functional);
  }
  emit(report_json(rep), a.out);
  return 0;
}

struct VerifyArgs {
  std::vector<std::string> spaces;
  std::optional<std::uint64_t> seed;
  double tol = mmc::tol::kInvariant;
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  const std::uint64_t seed = pick_seed(a.seed);
  std::vector<std::string> sources = a.spaces;
  if (sources.empty()) sources = {"two_point", "cloud:d=2,N=10,seed=1"};
  json spaces_out = json::array();
  bool all = true;
  for (const std::string& src : sources) {
    const mmc::FiniteMMSpace X = mmc::load_or_generate_space(src, seed);
    mmc::VerifySuite suite = mmc::run_verify_battery(X, seed);
    if (a.tol != mmc::tol::kInvariant) {
      for (auto& c : suite.checks) {
        c.tolerance = a.tol;
        c.pass = c.margin >= -a.tol;
      }
    }
    all = all && suite.all_pass();
    json j = suite.to_json();
    j["space"] = src;
    spaces_out.push_back(std::move(j));
  }
  emit(json{{"spaces", spaces_out}, {"all_pass", all}, {"seed", seed}}, a.out);
  return all ? 0 : 1;
}

struct SweepArgs {
  std::vector<std::string> spaces;
  std::vector<std::string> screens;
  double kappa = 0.1;
  double p = 2.0;
  std::size_t count = 8;
  std::optional<std::uint64_t> seed;
  std::string trend = "none";
  bool no_iset = false;
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  mmc::SweepConfig cfg;
  for (const std::string& s : a.spaces) cfg.specs.push_back(mmc::parse_space_spec(s));
  cfg.screens = a.screens;
  cfg.kappa = a.kappa;
  cfg.p = a.p;
  cfg.map_count = a.count;
  cfg.seed = pick_seed(a.seed);
  cfg.iset = !a.no_iset;
  const mmc::SweepTable table = mmc::run_sweep(cfg);
  if (a.out.empty()) {
    table.write_csv(std::cout);
  } else {
    std::ofstream os(a.out);
    if (!os) throw mmc::BadSpec("cannot open output file " + a.out);
    table.write_csv(os);
  }
  return mmc::check_trend(table, cfg.screens, mmc::parse_trend(a.trend)) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"concentration-of-measure observables for finite metric measure spaces"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "compute one functional and print a report");
  analyze->add_option("--space", an.space, "space source: generator spec or .json path")
      ->required();
  analyze->add_option("--screen", an.screen, "screen spec: euclid:k | hyperbolic:n:kappa1 | tree:path");
  analyze->add_option("--functional", an.functional,
                      "alpha|sep|levy_mean|levy_radius|pd|obs_diameter|obs_variation|"
                      "obs_central_radius|variation|barycenter|tmean|iset|variance|tree_split")
      ->required();
  analyze->add_option("--family", an.family, "field/map family name");
  analyze->add_option("--mode", an.mode, "auto|exact_1d|enumerate|ball_estimate|estimate");
  analyze->add_option("--kappa", an.kappa, "mass defect(s)");
  analyze->add_option("--p", an.p, "variation exponent (inf allowed)");
  analyze->add_option("--r", an.r, "radius argument");
  analyze->add_option("--s", an.s, "lower exponent for iset");
  analyze->add_option("--t", an.t, "exponent for tmean / upper exponent for iset");
  analyze->add_option("--count", an.count, "family size");
  analyze->add_option("--seed", an.seed, "RNG seed (overrides MMC_SEED)");
  analyze->add_option("--out", an.out, "write the JSON payload to a file");

  VerifyArgs ve;
  auto* verify = app.add_subcommand("verify", "run the inequality battery");
  verify->add_option("--space", ve.spaces, "space source(s); default two_point and a seeded cloud");
  verify->add_option("--seed", ve.seed, "RNG seed (overrides MMC_SEED)");
  verify->add_option("--tol", ve.tol, "margin tolerance for every check");
  verify->add_option("--out", ve.out, "write the JSON payload to a file");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "tabulate observables across spaces and screens");
  sweep->add_option("--space", sw.spaces, "space specs, one per row group")->required();
  sweep->add_option("--screen", sw.screens, "screen specs, one per column group")->required();
  sweep->add_option("--kappa", sw.kappa, "mass defect");
  sweep->add_option("--p", sw.p, "variation exponent");
  sweep->add_option("--count", sw.count, "maps per family");
  sweep->add_option("--seed", sw.seed, "RNG seed (overrides MMC_SEED)");
  sweep->add_option("--trend", sw.trend, "none|decreasing|half: assert the obs_diameter columns");
  sweep->add_flag("--no-iset", sw.no_iset, "skip the minimizer-set column");
  sweep->add_option("--out", sw.out, "write the CSV to a file");

  try {
    app.parse(argc, argv);
    if (*analyze) return cmd_analyze(an);
    if (*verify) return cmd_verify(ve);
    return cmd_sweep(sw);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const mmc::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const mmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
