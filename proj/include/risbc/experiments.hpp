#pragma once
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "risbc/channel.hpp"
#include "risbc/region.hpp"

namespace risbc {

enum class ExperimentKind { MaxminVsPower, GainVsEpsilon, GainVsBlocklength, VsElements };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::MaxminVsPower: return "maxmin_vs_power";
    case ExperimentKind::GainVsEpsilon: return "gain_vs_epsilon";
    case ExperimentKind::GainVsBlocklength: return "gain_vs_blocklength";
    case ExperimentKind::VsElements: return "vs_elements";
  }
  return "?";
}

inline std::string sweep_var_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::MaxminVsPower: return "power_db";
    case ExperimentKind::GainVsEpsilon: return "error_prob";
    case ExperimentKind::GainVsBlocklength: return "block_length";
    case ExperimentKind::VsElements: return "ris_elements";
  }
  return "?";
}

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::MaxminVsPower;
  SystemConfig base;
  std::vector<double> grid;
  std::vector<RisArchitecture> architectures{
      RisArchitecture::None, RisArchitecture::RandomDiagonal, RisArchitecture::LpDiagonal,
      RisArchitecture::GpDiagonal, RisArchitecture::GpBeyondDiagonal};
  int trials = 20;
  std::uint64_t base_seed = 1;
  OptimizerConfig optimizer;
  std::string label = "experiment";
  int workers = 0;  // 0 = hardware concurrency

  void validate() const {
    base.validate();
    if (grid.empty()) throw std::invalid_argument("ExperimentSpec: empty sweep grid");
    for (size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw std::invalid_argument("ExperimentSpec: sweep grid must be strictly increasing");
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    if (architectures.empty()) throw std::invalid_argument("ExperimentSpec: no architectures");
    const bool needs_baseline = kind == ExperimentKind::GainVsEpsilon ||
                                kind == ExperimentKind::GainVsBlocklength;
    if (needs_baseline) {
      bool has_none = false;
      for (auto a : architectures) has_none = has_none || a == RisArchitecture::None;
      if (!has_none)
        throw std::invalid_argument("ExperimentSpec: gain experiments require the No-RIS baseline");
    }
  }
};

/// FNV-1a over the canonical spec serialization; embedded in every artifact.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string canonical_string(const SystemConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "N=" << c.num_tx_antennas << ";M=" << c.num_ris_elements << ";K=" << c.num_users
     << ";p=" << c.power_budget << ";noise=" << c.noise_power << ";n=" << c.block_length
     << ";eps=" << c.error_prob << ";kappa=" << c.rician_factor
     << ";geom=" << c.geometry.bs_height << ',' << c.geometry.ris_height << ','
     << c.geometry.bs_ris_ground_distance << ',' << c.geometry.user_area_center_distance << ','
     << c.geometry.user_area_side << ',' << c.geometry.user_height
     << ";pl=" << static_cast<int>(c.path_loss.model) << ',' << c.path_loss.ref_gain_db << ','
     << c.path_loss.exponent_bs_ris << ',' << c.path_loss.exponent_ris_user << ','
     << c.path_loss.exponent_direct << ',' << c.path_loss.direct_extra_loss_db
     << ";seed=" << c.rng_seed;
  return os.str();
}

inline std::string canonical_string(const ExperimentSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "kind=" << to_string(s.kind) << ";base{" << canonical_string(s.base) << "};grid=";
  for (double g : s.grid) os << g << ',';
  os << ";archs=";
  for (auto a : s.architectures) os << to_string(a) << ',';
  os << ";trials=" << s.trials << ";seed=" << s.base_seed;
  return os.str();
}

struct ExperimentRow {
  std::string experiment;
  std::string architecture;
  std::string sweep_var;
  double sweep_value = 0.0;
  int trials = 0;
  int failures = 0;
  double mean_maxmin_rate = 0.0;  // nats
  double stderr_mean = 0.0;
  double mean_gain_pct = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::uint64_t config_hash = 0;
  std::vector<ExperimentRow> rows;
  // raw max-min rates: raw[arch](grid_index, trial); NaN for dropped trials
  std::map<RisArchitecture, RMat> raw;
  std::vector<int> dropped_trials;
};

/// Ratio-of-means gain with a delta-method standard error over paired trials.
struct GainStats {
  double gain_pct = std::numeric_limits<double>::quiet_NaN();
  double se_pct = std::numeric_limits<double>::quiet_NaN();
};

inline GainStats paired_gain(const RVec& numer, const RVec& denom) {
  const int t = static_cast<int>(numer.size());
  if (t == 0 || denom.size() != t) return {};
  const double a = numer.mean(), b = denom.mean();
  if (!(std::abs(b) > 0.0)) return {};
  GainStats g;
  g.gain_pct = 100.0 * a / b;
  if (t > 1) {
    double va = 0, vb = 0, cab = 0;
    for (int i = 0; i < t; ++i) {
      va += (numer(i) - a) * (numer(i) - a);
      vb += (denom(i) - b) * (denom(i) - b);
      cab += (numer(i) - a) * (denom(i) - b);
    }
    va /= t - 1;
    vb /= t - 1;
    cab /= t - 1;
    const double ratio = a / b;
    const double var_ratio =
        (va + ratio * ratio * vb - 2.0 * ratio * cab) / (b * b * t);
    g.se_pct = 100.0 * std::sqrt(std::max(0.0, var_ratio));
  }
  return g;
}

namespace detail_exp {

struct TrialOutcome {
  // rate(grid, arch_index); NaN marks a failure
  RMat rates;
  bool failed = false;
};

inline SystemConfig config_at(const ExperimentSpec& spec, double sweep_value) {
  SystemConfig c = spec.base;
  switch (spec.kind) {
    case ExperimentKind::MaxminVsPower: c.power_budget = db_to_linear(sweep_value); break;
    case ExperimentKind::GainVsEpsilon: c.error_prob = sweep_value; break;
    case ExperimentKind::GainVsBlocklength: c.block_length = static_cast<int>(sweep_value); break;
    case ExperimentKind::VsElements: c.num_ris_elements = static_cast<int>(sweep_value); break;
  }
  return c;
}

inline bool channels_depend_on_grid(ExperimentKind k) { return k == ExperimentKind::VsElements; }

/// Solves every architecture on one realization, chaining warm starts
/// Rand -> LP -> GP-D -> GP-BD so the per-trial ordering is mechanical.
inline void solve_paired(const ExperimentSpec& spec, const SystemConfig& cfg,
                         const ChannelSet& channels, std::uint64_t init_seed,
                         std::vector<double>& out_rates) {
  const auto params = FblParams::make(cfg.block_length, cfg.error_prob);
  Instance inst{channels, cfg.noise_power, cfg.power_budget, params.threshold};
  out_rates.assign(spec.architectures.size(), std::numeric_limits<double>::quiet_NaN());

  std::optional<StartPoint> chain;
  for (size_t ai = 0; ai < spec.architectures.size(); ++ai) {
    const RisArchitecture arch = spec.architectures[ai];
    const bool chainable = arch == RisArchitecture::LpDiagonal ||
                           arch == RisArchitecture::GpDiagonal ||
                           arch == RisArchitecture::GpBeyondDiagonal;
    const StartPoint* warm = (chainable && chain) ? &*chain : nullptr;
    const SolveResult res = solve_max_min(inst, arch, spec.optimizer, init_seed, warm);
    if (!res.feasible) continue;  // NaN stays; trial dropped later
    out_rates[ai] = std::max(0.0, fbl_rate(res.min_sinr, params));
    if (chainable || arch == RisArchitecture::RandomDiagonal)
      chain = StartPoint{res.beams, res.ris};
  }
}

inline TrialOutcome run_trial(const ExperimentSpec& spec, int trial) {
  TrialOutcome out;
  const int g = static_cast<int>(spec.grid.size());
  const int a = static_cast<int>(spec.architectures.size());
  out.rates.setConstant(g, a, std::numeric_limits<double>::quiet_NaN());

  ChannelSet shared_channels;
  if (!channels_depend_on_grid(spec.kind)) {
    Rng rng = Rng::stream(spec.base_seed, static_cast<std::uint64_t>(trial));
    // channel statistics do not depend on the sweep variable here
    auto [scenario, ch] = generate_instance(config_at(spec, spec.grid.front()), rng);
    (void)scenario;
    shared_channels = std::move(ch);
  }

  for (int gi = 0; gi < g; ++gi) {
    const SystemConfig cfg = config_at(spec, spec.grid[gi]);
    const ChannelSet* channels = &shared_channels;
    ChannelSet local;
    if (channels_depend_on_grid(spec.kind)) {
      Rng rng = Rng::stream(spec.base_seed, static_cast<std::uint64_t>(trial) * 997 + gi);
      auto [scenario, ch] = generate_instance(cfg, rng);
      (void)scenario;
      local = std::move(ch);
      channels = &local;
    }
    std::vector<double> rates;
    try {
      solve_paired(spec, cfg, *channels, spec.base_seed + 7919 * trial, rates);
    } catch (const std::exception&) {
      out.failed = true;
      return out;
    }
    for (int ai = 0; ai < a; ++ai) {
      out.rates(gi, ai) = rates[ai];
      if (std::isnan(rates[ai])) out.failed = true;
    }
    if (out.failed) return out;
  }
  return out;
}

}  // namespace detail_exp

/// Runs the paired Monte Carlo study described by the spec. Trials fan out
/// to a worker pool; each trial owns its seeded stream; aggregation is a
/// deterministic single-threaded reduction.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;
  result.config_hash = fnv1a(canonical_string(spec));

  std::vector<detail_exp::TrialOutcome> outcomes(spec.trials);
  {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = spec.workers > 0 ? spec.workers
                                         : static_cast<int>(std::min<unsigned>(hw, spec.trials));
    std::atomic<int> next{0};
    auto work = [&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= spec.trials) break;
        outcomes[t] = detail_exp::run_trial(spec, t);
      }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }

  for (int t = 0; t < spec.trials; ++t)
    if (outcomes[t].failed) result.dropped_trials.push_back(t);
  const int kept = spec.trials - static_cast<int>(result.dropped_trials.size());

  const int g = static_cast<int>(spec.grid.size());
  for (size_t ai = 0; ai < spec.architectures.size(); ++ai) {
    RMat raw(g, spec.trials);
    raw.setConstant(std::numeric_limits<double>::quiet_NaN());
    for (int t = 0; t < spec.trials; ++t)
      if (!outcomes[t].failed)
        for (int gi = 0; gi < g; ++gi) raw(gi, t) = outcomes[t].rates(gi, ai);
    result.raw[spec.architectures[ai]] = std::move(raw);
  }

  // baseline rates for gain columns
  const RMat* baseline = nullptr;
  if (auto it = result.raw.find(RisArchitecture::None); it != result.raw.end())
    baseline = &it->second;

  auto kept_values = [&](const RMat& raw, int gi) {
    RVec v(kept);
    int j = 0;
    for (int t = 0; t < spec.trials; ++t)
      if (!outcomes[t].failed) v(j++) = raw(gi, t);
    return v;
  };

  for (size_t ai = 0; ai < spec.architectures.size(); ++ai) {
    const RisArchitecture arch = spec.architectures[ai];
    const RMat& raw = result.raw[arch];
    for (int gi = 0; gi < g; ++gi) {
      ExperimentRow row;
      row.experiment = to_string(spec.kind);
      row.architecture = to_string(arch);
      row.sweep_var = sweep_var_name(spec.kind);
      row.sweep_value = spec.grid[gi];
      row.trials = kept;
      row.failures = static_cast<int>(result.dropped_trials.size());
      if (kept > 0) {
        const RVec v = kept_values(raw, gi);
        row.mean_maxmin_rate = v.mean();
        if (kept > 1) {
          double var = 0;
          for (int i = 0; i < kept; ++i)
            var += (v(i) - row.mean_maxmin_rate) * (v(i) - row.mean_maxmin_rate);
          row.stderr_mean = std::sqrt(var / (kept - 1) / kept);
        }
        if (baseline != nullptr) {
          const RVec b = kept_values(*baseline, gi);
          row.mean_gain_pct = paired_gain(v, b).gain_pct;
        }
      }
      result.rows.push_back(std::move(row));
    }
  }

  // BD-over-D relative improvement series for the element sweep
  if (spec.kind == ExperimentKind::VsElements && kept > 0) {
    auto bd = result.raw.find(RisArchitecture::GpBeyondDiagonal);
    auto d = result.raw.find(RisArchitecture::GpDiagonal);
    if (bd != result.raw.end() && d != result.raw.end()) {
      for (int gi = 0; gi < g; ++gi) {
        ExperimentRow row;
        row.experiment = to_string(spec.kind);
        row.architecture = "gp-bd-over-gp-d";
        row.sweep_var = sweep_var_name(spec.kind);
        row.sweep_value = spec.grid[gi];
        row.trials = kept;
        row.failures = static_cast<int>(result.dropped_trials.size());
        row.mean_maxmin_rate = std::numeric_limits<double>::quiet_NaN();
        row.mean_gain_pct =
            paired_gain(kept_values(bd->second, gi), kept_values(d->second, gi)).gain_pct;
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

inline std::string result_to_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os.precision(17);
  os << "experiment,architecture,sweep_var,sweep_value,trials,failures,"
        "mean_maxmin_rate_nats,stderr,mean_gain_pct,config_hash,seed\n";
  for (const auto& r : result.rows)
    os << r.experiment << ',' << r.architecture << ',' << r.sweep_var << ',' << r.sweep_value
       << ',' << r.trials << ',' << r.failures << ',' << r.mean_maxmin_rate << ','
       << r.stderr_mean << ',' << r.mean_gain_pct << ',' << result.config_hash << ','
       << result.spec.base_seed << '\n';
  return os.str();
}

/// Minimal parser for the experiment CSV (round-trip checks and tooling).
inline std::vector<ExperimentRow> parse_result_csv(const std::string& csv) {
  std::vector<ExperimentRow> rows;
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    ExperimentRow r;
    std::getline(ls, r.experiment, ',');
    std::getline(ls, r.architecture, ',');
    std::getline(ls, r.sweep_var, ',');
    std::getline(ls, field, ',');
    r.sweep_value = std::stod(field);
    std::getline(ls, field, ',');
    r.trials = std::stoi(field);
    std::getline(ls, field, ',');
    r.failures = std::stoi(field);
    std::getline(ls, field, ',');
    r.mean_maxmin_rate = std::stod(field);
    std::getline(ls, field, ',');
    r.stderr_mean = std::stod(field);
    std::getline(ls, field, ',');
    r.mean_gain_pct = std::stod(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string result_to_svg(const ExperimentResult& result) {
  std::vector<SvgSeries> series;
  for (auto arch : result.spec.architectures) {
    SvgSeries s;
    s.label = to_string(arch);
    for (const auto& r : result.rows) {
      if (r.architecture != to_string(arch)) continue;
      s.x.push_back(r.sweep_value);
      s.y.push_back(r.mean_maxmin_rate);
      s.yerr.push_back(r.stderr_mean);
    }
    series.push_back(std::move(s));
  }
  return svg_line_plot(to_string(result.spec.kind), sweep_var_name(result.spec.kind),
                       "mean max-min rate (nats)", series);
}

/// Writes {label}.csv and optionally {label}.svg under out_dir. Content is a
/// pure function of the result, so identical runs produce identical bytes.
inline void aggregate_and_emit(const ExperimentResult& result, const std::string& out_dir,
                               bool emit_svg) {
  std::filesystem::create_directories(out_dir);
  const auto base = std::filesystem::path(out_dir) / result.spec.label;
  {
    std::ofstream f(base.string() + ".csv", std::ios::binary);
    if (!f) throw std::runtime_error("aggregate_and_emit: cannot write " + base.string() + ".csv");
    f << result_to_csv(result);
  }
  if (emit_svg) {
    std::ofstream f(base.string() + ".svg", std::ios::binary);
    if (!f) throw std::runtime_error("aggregate_and_emit: cannot write " + base.string() + ".svg");
    f << result_to_svg(result);
  }
}

}  // namespace risbc
