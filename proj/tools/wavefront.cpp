// wavefront: command-line front end for the semi-wavefront library.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "wavefront/asymptotics.hpp"
#include "wavefront/charfun.hpp"
#include "wavefront/error.hpp"
#include "wavefront/io.hpp"
#include "wavefront/models.hpp"
#include "wavefront/verify.hpp"
#include "wavefront/wavesolver.hpp"

namespace fs = std::filesystem;
using namespace wavefront;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUndetermined = 2;
constexpr int kExitUsage = 64;

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level log_level() {
  const char* env = std::getenv("WAVEFRONT_LOG");
  if (!env) return Level::Warn;
  const std::string v = env;
  if (v == "error") return Level::Error;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

void log(Level lvl, const std::string& msg) {
  static const Level threshold = log_level();
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (lvl <= threshold) std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

struct Config {
  std::string model_path;
  std::string out_dir = ".";
  std::string grid = "-60,40,4096";
  double tol = 1e-10;
  int max_iter = 200000;
  double damping = 0.5;
  std::uint64_t seed = 0;
  std::optional<double> c;
  // scan
  double y_max = 50.0;
  int nx = 201;
  int ny = 2001;
  // verify
  double probe_tol = 1e-3;
  std::optional<double> delta;
};

Grid parse_grid(const std::string& s) {
  std::stringstream in(s);
  std::string a, b, n;
  if (!std::getline(in, a, ',') || !std::getline(in, b, ',') || !std::getline(in, n) ) {
    throw Error(ErrorCode::InvalidArgument, "--grid expects tmin,tmax,n");
  }
  try {
    return Grid::make(std::stod(a), std::stod(b), std::stoi(n));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "--grid expects tmin,tmax,n (got '" + s + "')");
  }
}

struct Session {
  Config cfg;
  std::string sub;
  json model_json;
  ModelSpec model{LocalDelayedRD{Nonlinearity::identity(), 0.0, 0.0}, 2.0, 1.0, std::nullopt};
  std::string hash;

  double speed() const {
    if (cfg.c) return *cfg.c;
    if (model.c) return *model.c;
    throw Error(ErrorCode::InvalidArgument, "no speed: set \"c\" in the model file or pass --c");
  }

  json stamp(json j) const {
    j["version"] = std::string(io::version());
    j["config_hash"] = hash;
    j["command"] = sub;
    return j;
  }

  void write_json(const std::string& name, const json& j) const {
    const auto path = fs::path(cfg.out_dir) / name;
    io::write_text(path, io::dump(stamp(j)));
    log(Level::Info, "wrote " + path.string());
  }
};

void load(Session& s) {
  s.model_json = io::read_json_file(s.cfg.model_path);
  s.model = io::model_from_json(s.model_json, fs::path(s.cfg.model_path).parent_path());
  json canon = {{"model", s.model_json},
                {"command", s.sub},
                {"grid", s.cfg.grid},
                {"tol", s.cfg.tol},
                {"max_iter", s.cfg.max_iter},
                {"damping", s.cfg.damping},
                {"seed", s.cfg.seed},
                {"c", s.cfg.c ? json(*s.cfg.c) : json(nullptr)},
                {"y_max", s.cfg.y_max},
                {"nx", s.cfg.nx},
                {"ny", s.cfg.ny},
                {"probe_tol", s.cfg.probe_tol},
                {"delta", s.cfg.delta ? json(*s.cfg.delta) : json(nullptr)}};
  s.hash = io::fnv1a_hex(io::dump(canon, 0));
}

SolveOptions solve_options(const Config& c) {
  SolveOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.damping = c.damping;
  return o;
}

const char* kNoRootsMessage = "no positive zero of χ: no semi-wavefront vanishing at −∞";

int cmd_analyze(Session& s) {
  const double c = s.speed();
  auto p = to_convolution_form(s.model, c);
  const auto cf = p.chi();
  SpectralData sd;
  try {
    sd = p.analyze();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoRoots) throw;
    std::cerr << kNoRootsMessage << "\n" << e.what() << "\n";
    s.write_json("spectral.json", {{"c", c}, {"no_roots", true}, {"message", kNoRootsMessage}});
    return kExitFail;
  }
  // chi trace over the real strip
  const double lo = std::max(cf.strip().sigma, -1.0);
  const double hi = std::isfinite(cf.strip().gamma) ? cf.strip().gamma : sd.lambda_rK + 2.0;
  const double right = std::isfinite(hi) ? hi : sd.lambda_l + 10.0;
  std::string csv = "x,chi\n";
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (right - lo) * (i + 0.5) / (n + 1);
    double v;
    try {
      v = cf(x);
    } catch (const Error&) {
      continue;
    }
    csv += io::format_double(x) + "," + io::format_double(v) + "\n";
  }
  io::write_text(fs::path(s.cfg.out_dir) / "chi_trace.csv", csv);
  json j = io::to_json(sd);
  j["c"] = c;
  j["family"] = s.model.family_name();
  j["beta_used"] = p.beta_used;
  s.write_json("spectral.json", j);
  std::cout << io::dump(s.stamp(j));
  return kExitOk;
}

int cmd_speed(Session& s) {
  const auto ms = model_min_speed(s.model);
  json j = io::to_json(ms);
  j["family"] = s.model.family_name();
  j["beta_used"] = model_beta(s.model);
  try {
    j["c_star_lipschitz"] = uniqueness_speed(s.model).c_star;
  } catch (const Error& e) {
    log(Level::Warn, std::string("lipschitz threshold: ") + e.what());
  }
  s.write_json("speed.json", j);
  std::cout << io::dump(s.stamp(j));
  return kExitOk;
}

int cmd_solve(Session& s) {
  const double c = s.speed();
  const Grid grid = parse_grid(s.cfg.grid);
  auto p = to_convolution_form(s.model, c);
  bool no_roots = false;
  try {
    p.analyze();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoRoots) throw;
    no_roots = true;
    log(Level::Warn, e.what());
  }
  Init init = Init::capped_exponential();
  if (no_roots) init = Init::capped_exponential(std::max(0.5, p.chi().strip().gamma * 0.5), 0.0);
  WaveProfile prof;
  int code = kExitOk;
  try {
    prof = solve_profile(p, grid, init, solve_options(s.cfg));
  } catch (const MaxIterError& e) {
    log(Level::Warn, e.what());
    prof = e.profile();
    code = kExitUndetermined;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoWave) throw;
    json j = {{"c", c}, {"no_wave", true}, {"message", e.what()}, {"no_roots", no_roots}};
    if (no_roots) {
      j["non_existence"] = true;
      std::cerr << kNoRootsMessage << "\n";
    }
    std::cerr << e.what() << "\n";
    s.write_json("profile.json", j);
    return kExitFail;
  }
  io::write_profile_csv(fs::path(s.cfg.out_dir) / "profile.csv", prof);
  json j = io::to_json(prof);
  j["family"] = s.model.family_name();
  try {
    j["decay_fit"] = io::to_json(fit_decay(prof));
  } catch (const Error& e) {
    j["decay_fit"] = nullptr;
    log(Level::Warn, e.what());
  }
  s.write_json("profile.json", j);
  std::cout << io::dump(s.stamp(j));
  return code;
}

int cmd_verify(Session& s) {
  const double c = s.speed();
  const Grid grid = parse_grid(s.cfg.grid);
  std::mt19937_64 rng(s.cfg.seed);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);

  std::vector<Init> inits;
  inits.push_back(Init::capped_exponential());
  Init shifted = Init::capped_exponential();
  shifted.shift = shift(rng);
  inits.push_back(shifted);

  ProbeOptions po;
  po.tol = s.cfg.probe_tol;
  po.solve = solve_options(s.cfg);
  std::vector<WaveProfile> profiles;
  VerifyReport rep = uniqueness_probe(s.model, c, grid, inits, po, &profiles);

  json extra = json::object();
  if (!rep.aborted && !profiles.empty()) {
    auto p = to_convolution_form(s.model, c);
    const auto sd = p.analyze();
    const auto audit = audit_hypotheses(p, s.model.bound, &sd);
    json audit_json = json::array();
    double alpha = 1.0;
    for (const auto& ch : audit.checks) {
      audit_json.push_back(io::to_json(ch));
      if (ch.name == "holder_at_zero" && ch.values.count("alpha")) alpha = std::min(alpha, ch.values.at("alpha"));
    }
    extra["audit"] = audit_json;
    const auto fit = fit_decay(profiles.front());
    extra["decay_fit"] = io::to_json(fit);
    extra["k_hat"] = fit.k_hat;
    extra["critical"] = sd.critical;
    extra["spectral"] = io::to_json(sd);
    extra["route"] = audit.route;
    const double delta = s.cfg.delta.value_or(default_delta(sd, alpha));
    try {
      extra["representation"] = io::to_json(check_representation(profiles.front(), sd, delta));
      rep.checks.push_back(representation_check(p, profiles.front(), sd, delta));
    } catch (const Error& e) {
      log(Level::Warn, e.what());
    }
  }
  json j = io::to_json(rep);
  j["c"] = c;
  j["family"] = s.model.family_name();
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  s.write_json("report.json", j);
  io::write_text(fs::path(s.cfg.out_dir) / "report.txt", rep.text());
  std::cout << rep.text();
  return rep.exit_code();
}

int cmd_scan(Session& s) {
  const double c = s.speed();
  auto p = to_convolution_form(s.model, c);
  SpectralData sd;
  try {
    sd = p.analyze();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoRoots) throw;
    std::cerr << kNoRootsMessage << "\n" << e.what() << "\n";
    return kExitFail;
  }
  ScanOptions so;
  so.y_max = s.cfg.y_max;
  so.nx = s.cfg.nx;
  so.ny = s.cfg.ny;
  const auto rep = strip_zero_scan(p.chi(), sd, so);
  json j = io::to_json(rep);
  j["c"] = c;
  j["family"] = s.model.family_name();
  s.write_json("scan.json", j);
  std::cout << io::dump(s.stamp(j));
  return rep.pass ? kExitOk : kExitFail;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Schema:
    case ErrorCode::Io:
    case ErrorCode::InvalidArgument:
      return kExitUsage;
    case ErrorCode::MaxIterExceeded:
      return kExitUndetermined;
    default:
      return kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-wavefront analysis for scalar convolution equations"};
  app.set_version_flag("--version", std::string(io::version()));
  app.require_subcommand(1);

  Session s;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", s.cfg.model_path, "Model JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", s.cfg.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--c", s.cfg.c, "Wave speed (overrides the model file)");
    sub->add_option("--seed", s.cfg.seed, "Seed for randomized inits")->capture_default_str();
  };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--grid", s.cfg.grid, "Grid as tmin,tmax,n")->capture_default_str();
    sub->add_option("--tol", s.cfg.tol, "Fixed-point tolerance (sup norm)")->capture_default_str();
    sub->add_option("--max-iter", s.cfg.max_iter, "Iteration cap")->capture_default_str();
    sub->add_option("--damping", s.cfg.damping, "Damping theta in (0, 1]")->capture_default_str();
  };

  auto* analyze = app.add_subcommand("analyze", "Zeros of the characteristic function");
  common(analyze);
  auto* speed = app.add_subcommand("speed", "Minimal wave speed c_*");
  common(speed);
  auto* solve = app.add_subcommand("solve", "Compute a profile");
  common(solve);
  solver(solve);
  auto* verify = app.add_subcommand("verify", "Hypothesis audit and uniqueness probe");
  common(verify);
  solver(verify);
  verify->add_option("--probe-tol", s.cfg.probe_tol, "Aligned sup-difference tolerance")->capture_default_str();
  verify->add_option("--delta", s.cfg.delta, "Representation exponent gap delta");
  auto* scan = app.add_subcommand("scan", "Zero-freeness scan of the open strip");
  common(scan);
  scan->add_option("--y-max", s.cfg.y_max, "Imaginary half-height")->capture_default_str();
  scan->add_option("--nx", s.cfg.nx, "Real grid points")->capture_default_str();
  scan->add_option("--ny", s.cfg.ny, "Imaginary grid points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    s.sub = app.get_subcommands().front()->get_name();
    load(s);
    if (s.sub == "analyze") return cmd_analyze(s);
    if (s.sub == "speed") return cmd_speed(s);
    if (s.sub == "solve") return cmd_solve(s);
    if (s.sub == "verify") return cmd_verify(s);
    return cmd_scan(s);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
