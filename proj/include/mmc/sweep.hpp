#pragma once

#include <chrono>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mmc/barycenter.hpp"
#include "mmc/generators.hpp"
#include "mmc/io.hpp"
#include "mmc/observables.hpp"

namespace mmc {

struct SweepConfig {
  std::vector<SpaceSpec> specs;
  std::vector<std::string> screens;
  double kappa = 0.1;
  double p = 2.0;
  std::size_t map_count = 8;
  std::uint64_t seed = 0;
  bool iset = true;
  double iset_s = 1.0;
  double iset_t = 2.0;
  int iset_grid = 5;
  std::size_t iset_maps = 4;  // minimizer-set diameters averaged over this many maps
};

struct SweepRow {
  long n = 0;
  std::string space;
  std::string screen;
  double kappa = 0.0;
  double p = 0.0;
  double obs_diameter = 0.0;
  std::string pd_mode;
  double obs_variation = 0.0;
  double iset_diameter = -1.0;  // negative when the column is disabled
  long ms = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  // The ms column is a timing and is excluded from reproducibility claims.
  // Text fields are quoted because space specs contain commas.
  void write_csv(std::ostream& os) const {
    os << "n,space,screen,kappa,p,obs_diameter,pd_mode,obs_variation_p,iset_diameter,ms\n";
    for (const SweepRow& r : rows) {
      std::ostringstream line;
      line.precision(12);
      line << r.n << ",\"" << r.space << "\",\"" << r.screen << "\"," << r.kappa << ',' << r.p
           << ',' << r.obs_diameter << ',' << r.pd_mode << ',' << r.obs_variation << ',';
      if (r.iset_diameter >= 0.0) line << r.iset_diameter;
      line << ',' << r.ms << '\n';
      os << line.str();
    }
  }

  // Column values for one screen, in row order (rows are sorted by n).
  std::vector<double> column(const std::string& screen, double SweepRow::*field) const {
    std::vector<double> vals;
    for (const SweepRow& r : rows)
      if (r.screen == screen) vals.push_back(r.*field);
    return vals;
  }
};

namespace detail {

inline std::vector<ScalarField> seeded_distance_fields(const FiniteMMSpace& X,
                                                       std::size_t count, std::uint64_t seed) {
  Rng rng(seed ^ 0x73647366u);
  const auto& sup = X.support();
  std::vector<ScalarField> fields;
  for (std::size_t c = 0; c < count; ++c) {
    ScalarField f;
    f.values = X.row(sup[rng.index(sup.size())]);
    f.name = "d:" + std::to_string(c);
    fields.push_back(std::move(f));
  }
  return fields;
}

inline std::vector<ScreenMap> sweep_family(const FiniteMMSpace& X, const Screen& screen,
                                           std::size_t count, std::uint64_t seed) {
  if (const auto* e = std::get_if<EuclideanScreen>(&screen))
    return maps_multi_distance(X, e->dim, count, seed).maps;
  auto sp = std::make_shared<Screen>(screen);
  return maps_geodesic(X, sp, seeded_distance_fields(X, count, seed)).maps;
}

}  // namespace detail

// One row per (space spec, screen): family observable-diameter and
// p-variation estimates plus an averaged minimizer-set diameter over the
// leading maps. Deterministic for a fixed seed except the ms column.
inline SweepTable run_sweep(const SweepConfig& cfg) {
  if (cfg.specs.empty()) throw BadSpec("sweep needs at least one space spec");
  if (cfg.screens.empty()) throw BadSpec("sweep needs at least one screen");
  SweepTable table;
  std::vector<std::pair<long, std::size_t>> order;
  for (std::size_t i = 0; i < cfg.specs.size(); ++i) {
    long n = static_cast<long>(i);
    auto it = cfg.specs[i].params.find("n");
    if (it != cfg.specs[i].params.end()) n = std::lround(it->second);
    order.push_back({n, i});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  for (const auto& [n, si] : order) {
    const FiniteMMSpace X = gen_space(cfg.specs[si], cfg.seed);
    for (std::size_t sc = 0; sc < cfg.screens.size(); ++sc) {
      const auto t0 = std::chrono::steady_clock::now();
      const Screen screen = parse_screen(cfg.screens[sc]);
      const std::uint64_t cell_seed =
          cfg.seed ^ (0x9e3779b97f4a7c15ull * (si * 64 + sc + 1));
      const auto family = detail::sweep_family(X, screen, cfg.map_count, cell_seed);

      SweepRow row;
      row.n = n;
      row.space = format_space_spec(cfg.specs[si]);
      row.screen = cfg.screens[sc];
      row.kappa = cfg.kappa;
      row.p = cfg.p;
      const FamilySup od = obs_diameter(X, cfg.kappa, family);
      row.obs_diameter = od.value;
      {
        const PushforwardMeasure nu0 = pushforward(X, family[0]);
        row.pd_mode =
            pd_mode_name(nu0.size() == 0 ? PdMode::BallEstimate : resolve_pd_mode(nu0, PdMode::Auto));
      }
      row.obs_variation = obs_lp_variation(X, cfg.p, family).value;
      if (cfg.iset) {
        TMeanOptions opt;
        opt.max_atom_starts = 8;
        opt.random_starts = 4;
        opt.max_iters = 150;
        opt.seed = cell_seed;
        // Any single map can have a nearly symmetric image measure whose
        // r-means all coincide by accident, so the column averages over maps.
        const std::size_t take = std::min(cfg.iset_maps, family.size());
        double acc = 0.0;
        for (std::size_t f = 0; f < take; ++f) {
          const PushforwardMeasure nu = pushforward(X, family[f]);
          acc += minimizer_set(nu, cfg.iset_s, cfg.iset_t, cfg.iset_grid, opt).diameter;
        }
        row.iset_diameter = (take > 0) ? acc / static_cast<double>(take) : 0.0;
      }
      row.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

enum class Trend { None, Decreasing, Half };

inline Trend parse_trend(const std::string& s) {
  if (s == "none" || s.empty()) return Trend::None;
  if (s == "decreasing") return Trend::Decreasing;
  if (s == "half") return Trend::Half;
  throw BadSpec("unknown trend assertion: " + s);
}

// Trend over the obs_diameter column of every screen: strictly decreasing
// in n, or additionally last < half of first.
inline bool check_trend(const SweepTable& table, const std::vector<std::string>& screens,
                        Trend trend) {
  if (trend == Trend::None) return true;
  for (const std::string& s : screens) {
    const auto col = table.column(s, &SweepRow::obs_diameter);
    if (col.size() < 2) continue;
    for (std::size_t i = 1; i < col.size(); ++i)
      if (!(col[i] < col[i - 1])) return false;
    if (trend == Trend::Half && !(col.back() < 0.5 * col.front())) return false;
  }
  return true;
}

}  // namespace mmc
