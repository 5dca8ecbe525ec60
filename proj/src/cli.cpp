#include "mkews/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "mkews/config.hpp"
#include "mkews/csv_io.hpp"
#include "mkews/experiment.hpp"
#include "mkews/surrogate.hpp"

namespace mkews {

namespace fs = std::filesystem;

namespace {

struct KeyDef {
  std::string name;
  std::string default_value;
  std::string help;
};

using Runner = std::function<void(const Settings&, const fs::path&, std::ostream&)>;

struct Command {
  std::string name;
  std::string description;
  std::vector<KeyDef> keys;
  Runner run;
};

// --- value parsing -------------------------------------------------------

const std::string& get(const Settings& s, const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end()) throw ConfigError("missing setting '" + key + "'");
  return it->second;
}

double get_double(const Settings& s, const std::string& key) {
  const std::string& text = get(s, key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("setting '" + key + "': expected a number, got '" + text + "'");
}

std::int64_t get_int(const Settings& s, const std::string& key) {
  const std::string& text = get(s, key);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("setting '" + key + "': expected an integer, got '" + text + "'");
}

std::uint64_t get_seed(const Settings& s, const std::string& key) {
  const std::string& text = get(s, key);
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] != '-') {
      const unsigned long long v = std::stoull(text, &used);
      if (used == text.size()) return v;
    }
  } catch (const std::logic_error&) {
  }
  throw ConfigError("setting '" + key + "': expected a nonnegative integer, got '" + text + "'");
}

bool get_bool(const Settings& s, const std::string& key) {
  const std::string& text = get(s, key);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("setting '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<std::string> get_list(const Settings& s, const std::string& key) {
  std::vector<std::string> items;
  std::stringstream ss(get(s, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    items.push_back(item.substr(first, last - first + 1));
  }
  if (items.empty()) throw ConfigError("setting '" + key + "': empty list");
  return items;
}

std::optional<double> get_auto_double(const Settings& s, const std::string& key, const char* auto_word) {
  if (get(s, key) == auto_word) return std::nullopt;
  return get_double(s, key);
}

int get_workers(const Settings& s) {
  const auto w = get_int(s, "workers");
  if (w < 1 || w > 1024) throw ConfigError("workers must lie in [1, 1024]");
  return static_cast<int>(w);
}

Detrend get_detrend(const Settings& s) {
  const std::string& kind = get(s, "detrend");
  if (kind == "none") return Detrend::none();
  if (kind == "gaussian") {
    const double bw = get_double(s, "bandwidth");
    if (!(bw > 0.0 && bw < 1.0)) throw ConfigError("bandwidth must lie in (0, 1)");
    return Detrend::gaussian(bw);
  }
  throw ConfigError("unknown detrend '" + kind + "' (none, gaussian)");
}

NormalForm get_form(const Settings& s) {
  NormalForm form{parse_bifurcation(get(s, "form")), 0.0};
  if (form.kind == BifurcationKind::pitchfork) form.mu = get_double(s, "mu");
  return form;
}

Index positive_index(const Settings& s, const std::string& key) {
  const auto v = get_int(s, key);
  if (v < 1) throw ConfigError("setting '" + key + "' must be positive");
  return static_cast<Index>(v);
}

SimConfig sim_config_from(const Settings& s) {
  SimConfig c;
  c.form = get_form(s);
  c.noise = {parse_noise_mode(get(s, "noise")), get_double(s, "sigma")};
  c.r = get_double(s, "r");
  if (s.count("x0")) c.x0 = get_auto_double(s, "x0", "equilibrium");  // experiments always start at x*
  c.h = get_double(s, "h");
  c.burn_in = get_double(s, "burn_in");
  c.sample_dt = get_double(s, "sample_dt");
  c.n_samples = positive_index(s, "n");
  c.escape_radius = get_auto_double(s, "escape_radius", "auto");
  c.seed = get_seed(s, "seed");
  return c;
}

EwsPipeline pipeline_from(const Settings& s) {
  EwsPipeline p;
  p.detrend = get_detrend(s);
  p.indicator = parse_indicator(get(s, "indicator"));
  p.window.alpha = get_double(s, "alpha");
  p.window.stride = Stride::parse(get(s, "stride"));
  return p;
}

ExperimentSpec experiment_from(const Settings& s) {
  ExperimentSpec e;
  const SimConfig sim = sim_config_from(s);
  e.form = sim.form;
  e.noise = sim.noise;
  e.r = sim.r;
  e.length = sim.n_samples;
  e.h = sim.h;
  e.burn_in = sim.burn_in;
  e.sample_dt = sim.sample_dt;
  e.escape_radius = sim.escape_radius;
  e.seed = sim.seed;
  e.indicator = parse_indicator(get(s, "indicator"));
  e.detrend = get_detrend(s);
  e.alpha_grid.clear();
  for (const auto& a : get_list(s, "alphas")) {
    Settings one{{"alpha", a}};
    e.alpha_grid.push_back(get_double(one, "alpha"));
  }
  e.stride_grid.clear();
  for (const auto& st : get_list(s, "strides")) e.stride_grid.push_back(Stride::parse(st));
  e.methods.clear();
  for (const auto& m : get_list(s, "methods")) e.methods.push_back(parse_test_method(m));
  e.yue_wang_lags = LagPolicy::parse(get(s, "yue_wang_lags"));
  e.hamed_rao_lags = LagPolicy::parse(get(s, "hamed_rao_lags"));
  e.level = get_double(s, "level");
  e.replicates = positive_index(s, "replicates");
  e.surrogate_count = positive_index(s, "surrogates");
  e.bins = positive_index(s, "bins");
  e.hist_min = get_double(s, "hist_min");
  e.hist_max = get_double(s, "hist_max");
  e.workers = get_workers(s);
  return e;
}

void write_file(const fs::path& path, const std::string& content, std::ostream& log) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw Error("failed writing '" + path.string() + "'");
  log << "wrote " << path.string() << '\n';
}

template <typename Fn>
void write_with(const fs::path& path, std::ostream& log, Fn&& fn) {
  std::ostringstream buffer;
  fn(buffer);
  write_file(path, buffer.str(), log);
}

// --- key tables ------------------------------------------------------------

std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : std::string("out");
}

std::vector<KeyDef> common_keys() {
  return {{"out", default_output_dir(), "output directory (default from $MKEWS_OUTPUT_DIR)"},
          {"workers", "1", "worker threads; results do not depend on it"}};
}

std::vector<KeyDef> sim_keys(const std::string& n_default) {
  return {{"form", "fold", "normal form: fold, transcritical, pitchfork"},
          {"mu", "-1", "pitchfork cubic coefficient (>0 subcritical, <0 supercritical)"},
          {"noise", "additive", "noise mode: additive, multiplicative"},
          {"sigma", "0.1", "noise intensity"},
          {"r", "-1", "fixed bifurcation parameter (stable branch, r < 0)"},
          {"n", n_default, "samples per series (N)"},
          {"h", "0.01", "Euler-Maruyama step"},
          {"burn_in", "100", "discarded transient time"},
          {"sample_dt", "1", "sampling interval"},
          {"escape_radius", "auto", "restart threshold on |x - x*|, or auto"},
          {"seed", "42", "master seed"}};
}

std::vector<KeyDef> pipeline_keys() {
  return {{"detrend", "gaussian", "detrending: none, gaussian"},
          {"bandwidth", "0.1", "gaussian bandwidth as a fraction of N"},
          {"indicator", "lag1_ac", "indicator: lag1_ac, variance"}};
}

std::vector<KeyDef> experiment_keys(const std::string& replicates, const std::string& methods,
                                    const std::string& strides) {
  auto keys = sim_keys("100");
  for (auto& k : pipeline_keys()) keys.push_back(k);
  std::vector<KeyDef> more = {
      {"alphas", "0.05,0.1,0.2,0.3,0.4,0.5", "relative window sizes"},
      {"strides", strides, "strides: points (5), fractions (0.02) or percentages (2%)"},
      {"methods", methods, "tests: original, yue_wang, hamed_rao, surrogate"},
      {"yue_wang_lags", "1", "Yue-Wang lag policy: k or significant[:level]"},
      {"hamed_rao_lags", "3", "Hamed-Rao lag policy: k or significant[:level]"},
      {"level", "0.05", "significance level"},
      {"replicates", replicates, "Monte Carlo replicates"},
      {"surrogates", "200", "surrogates per surrogate test"},
      {"bins", "121", "histogram bins"},
      {"hist_min", "-12", "histogram lower edge"},
      {"hist_max", "12", "histogram upper edge"}};
  keys.insert(keys.end(), more.begin(), more.end());
  return keys;
}

std::vector<Command> commands() {
  std::vector<Command> cmds;

  {
    auto keys = sim_keys("1000");
    keys.push_back({"x0", "equilibrium", "initial state, or equilibrium"});
    cmds.push_back({"simulate", "simulate one steady-state null trajectory", keys,
                    [](const Settings& s, const fs::path& dir, std::ostream& log) {
                      const SimConfig c = sim_config_from(s);
                      const Trajectory t = simulate(c);
                      write_with(dir / "trajectory.csv", log,
                                 [&](std::ostream& o) { write_trajectory_csv(o, t, c); });
                    }});
  }
  {
    auto keys = pipeline_keys();
    keys.push_back({"input", "", "input series CSV (index,value)"});
    keys.push_back({"alpha", "0.5", "relative window size"});
    keys.push_back({"stride", "1", "window stride"});
    cmds.push_back({"ews", "rolling-window indicator of a series", keys,
                    [](const Settings& s, const fs::path& dir, std::ostream& log) {
                      const Series x = read_series_csv(get(s, "input"));
                      const auto p = pipeline_from(s);
                      const auto ind = compute_ews(x.values, p);
                      write_with(dir / "indicator.csv", log, [&](std::ostream& o) {
                        write_indicator_csv(o, ind, {{"detrend", p.detrend.to_string()}});
                      });
                    }});
  }
  cmds.push_back({"mk", "Mann-Kendall trend test of a series",
                  {{"input", "", "input series CSV (index,value)"},
                   {"method", "original", "original, yue_wang, hamed_rao"},
                   {"lags", "auto", "lag policy: k, significant[:level], or auto"},
                   {"level", "0.05", "significance level"}},
                  [](const Settings& s, const fs::path& dir, std::ostream& log) {
                    const Series x = read_series_csv(get(s, "input"));
                    const Method m = parse_method(get(s, "method"));
                    const LagPolicy policy =
                        get(s, "lags") == "auto" ? default_lag_policy(m) : LagPolicy::parse(get(s, "lags"));
                    const double level = get_double(s, "level");
                    if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
                    const MKOutcome o = mk_test(x.values, m, policy, level);
                    write_with(dir / "mk.csv", log, [&](std::ostream& out) { write_outcome_csv(out, o); });
                  }});
  {
    auto keys = pipeline_keys();
    keys.push_back({"input", "", "input series CSV (index,value)"});
    keys.push_back({"alpha", "0.5", "relative window size"});
    keys.push_back({"stride", "1", "window stride"});
    keys.push_back({"surrogates", "200", "number of AR(1) surrogates"});
    keys.push_back({"seed", "42", "surrogate seed"});
    keys.push_back({"dump_taus", "false", "also write every surrogate tau"});
    cmds.push_back({"surrogate", "AR(1) surrogate significance test of an indicator trend", keys,
                    [](const Settings& s, const fs::path& dir, std::ostream& log) {
                      const Series x = read_series_csv(get(s, "input"));
                      const auto count = positive_index(s, "surrogates");
                      if (count < kMinSurrogates) {
                        throw ConfigError("surrogates must be at least " + std::to_string(kMinSurrogates));
                      }
                      const auto r = surrogate_test(x.values, pipeline_from(s), count, get_seed(s, "seed"));
                      write_with(dir / "surrogate.csv", log, [&](std::ostream& o) { write_surrogate_csv(o, r); });
                      if (get_bool(s, "dump_taus")) {
                        write_with(dir / "surrogate_taus.csv", log,
                                   [&](std::ostream& o) { write_surrogate_taus_csv(o, r); });
                      }
                    }});
  }
  {
    auto keys = experiment_keys("10000", "original,yue_wang,hamed_rao", "1");
    keys.push_back({"exact_n", "0", "also write the exact i.i.d. null pmf of S for this n (0 = off)"});
    cmds.push_back({"null-dist", "empirical null distributions of normalized tau and Z", keys,
                    [](const Settings& s, const fs::path& dir, std::ostream& log) {
                      const auto spec = experiment_from(s);
                      const auto exact_n = get_int(s, "exact_n");
                      if (exact_n != 0 && (exact_n < 2 || exact_n > 60)) {
                        throw ConfigError("exact_n must be 0 or lie in [2, 60]");
                      }
                      const auto tables = run_null_distribution(spec);
                      write_with(dir / "null_distribution.csv", log, [&](std::ostream& o) { tables.write_csv(o); });
                      if (exact_n != 0) {
                        const auto dist = exact_null_distribution(static_cast<Index>(exact_n));
                        write_with(dir / ("exact_null_n" + std::to_string(exact_n) + ".csv"), log,
                                   [&](std::ostream& o) { write_null_distribution_csv(o, dist); });
                      }
                    }});
  }
  cmds.push_back({"type1", "type I error rates per window size and test",
                  experiment_keys("2000", "original,yue_wang,hamed_rao", "1"),
                  [](const Settings& s, const fs::path& dir, std::ostream& log) {
                    const auto table = run_type1(experiment_from(s));
                    write_with(dir / "type1.csv", log, [&](std::ostream& o) { table.write_csv(o); });
                  }});
  cmds.push_back({"stride-sweep", "type I error rates crossed with window strides",
                  experiment_keys("2000", "hamed_rao", "1,2%,5%"),
                  [](const Settings& s, const fs::path& dir, std::ostream& log) {
                    const auto table = run_stride_sweep(experiment_from(s));
                    write_with(dir / "stride_sweep.csv", log, [&](std::ostream& o) { table.write_csv(o); });
                  }});
  {
    auto keys = experiment_keys("2000", "hamed_rao", "1");
    keys.push_back({"sweep", "sigma", "swept dimension: noise, sigma, n, r"});
    keys.push_back({"values", "0.05,0.1,0.2", "swept values (noise modes, sigmas, lengths, |r|)"});
    cmds.push_back({"sensitivity", "type I error rates across one swept model parameter", keys,
                    [](const Settings& s, const fs::path& dir, std::ostream& log) {
                      const auto dim = parse_sweep_dimension(get(s, "sweep"));
                      const auto runs = run_sensitivity(experiment_from(s), dim, get_list(s, "values"));
                      for (const auto& run : runs) {
                        const std::string name =
                            "sensitivity_" + std::string(to_string(dim)) + "_" + run.value + ".csv";
                        write_with(dir / name, log, [&](std::ostream& o) { run.table.write_csv(o); });
                      }
                    }});
  }

  for (auto& c : cmds) {
    for (auto& k : common_keys()) c.keys.push_back(k);
  }
  return cmds;
}

std::string option_names(const std::string& key) {
  std::string names = "--" + key;
  if (key.find('_') != std::string::npos) {
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    names += ",--" + dashed;
  }
  return names;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto cmds = commands();

  CLI::App app{"Mann-Kendall trend tests on early-warning-signal indicators", "mkews"};
  app.require_subcommand(1, 1);

  struct Bound {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::map<std::string, std::pair<CLI::Option*, std::string>> values;
  };
  std::vector<Bound> bound(cmds.size());

  for (std::size_t i = 0; i < cmds.size(); ++i) {
    auto& b = bound[i];
    b.sub = app.add_subcommand(cmds[i].name, cmds[i].description);
    b.sub->set_help_flag("--help", "print this help message and exit");  // -h is not free: h is the step size
    b.sub->add_option("--config", b.config_path, "key = value configuration file");
    for (const auto& key : cmds[i].keys) {
      auto& slot = b.values[key.name];
      std::string help = key.help;
      if (!key.default_value.empty()) help += " [" + key.default_value + "]";
      slot.first = b.sub->add_option(option_names(key.name), slot.second, help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    for (auto& b : bound) {
      if (b.sub->parsed()) err << '\n' << b.sub->help();
    }
    return 2;
  }

  std::size_t chosen = 0;
  while (chosen < bound.size() && !bound[chosen].sub->parsed()) ++chosen;
  const Command& cmd = cmds[chosen];
  const Bound& b = bound[chosen];

  try {
    Settings settings;
    for (const auto& key : cmd.keys) settings[key.name] = key.default_value;
    if (!b.config_path.empty()) {
      // a global key is skipped by subcommands that do not use it, but must be known to some subcommand
      const ConfigFile file = ConfigFile::load(b.config_path);
      const auto global = file.sections.find("");
      if (global != file.sections.end()) {
        for (const auto& [k, v] : global->second) {
          const bool known = std::any_of(cmds.begin(), cmds.end(), [&](const Command& c) {
            return std::any_of(c.keys.begin(), c.keys.end(), [&](const KeyDef& d) { return d.name == k; });
          });
          if (!known) throw ConfigError("unknown key '" + k + "' in config file");
        }
      }
      const auto own = file.sections.find(cmd.name);
      if (own != file.sections.end()) {
        for (const auto& [k, v] : own->second) {
          if (!settings.count(k)) throw ConfigError("unknown key '" + k + "' in [" + cmd.name + "]");
        }
      }
      for (const auto& [k, v] : file.resolve(cmd.name)) {
        if (settings.count(k)) settings[k] = v;
      }
      settings["config"] = b.config_path;
    }
    for (const auto& [k, slot] : b.values) {
      if (slot.first->count() > 0) settings[k] = slot.second;
    }
    for (const auto& key : cmd.keys) {
      if (key.name == "input" && settings[key.name].empty()) throw ConfigError("--input is required");
    }
    get_workers(settings);

    const fs::path dir = settings.at("out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());

    cmd.run(settings, dir, out);

    std::ostringstream resolved;
    resolved << "# resolved configuration for `mkews " << cmd.name << "`\n";
    write_config(resolved, cmd.name, settings);
    write_file(dir / (cmd.name + ".resolved.cfg"), resolved.str(), out);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NoStableBranch& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mkews
