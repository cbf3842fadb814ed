#include "wavefront/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavefront/error.hpp"

#ifndef WAVEFRONT_VERSION
#define WAVEFRONT_VERSION "0.0.0"
#endif

namespace wavefront::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Schema, where + ": " + what);
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) schema(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema(where + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number()) schema(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, double dflt, const std::string& where) {
  if (!j.contains(key)) return dflt;
  return number(j, key, where);
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_array()) schema(where + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) schema(where + "." + key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string text(const json& j, const std::string& key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) schema(where + "." + key, "expected a string");
  return v.get<std::string>();
}

// Rethrows construction errors with the JSON location attached.
template <class F>
auto located(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw;
    schema(where, e.what());
  }
}

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json opt(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

void dump_into(std::ostringstream& out, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << "," << nl;
        first = false;
        out << pad << json(it.key()).dump() << sep;
        dump_into(out, it.value(), indent, depth + 1);
      }
      out << nl << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << "[" << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << "," << nl;
        out << pad;
        dump_into(out, j[i], indent, depth + 1);
      }
      out << nl << close << "]";
      return;
    }
    case json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

}  // namespace

std::string_view version() noexcept { return WAVEFRONT_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string dump(const json& j, int indent) {
  std::ostringstream out;
  dump_into(out, j, indent, 0);
  if (indent > 0) out << "\n";
  return out.str();
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Nonlinearity nonlinearity_from_json(const json& j, const std::string& where) {
  const std::string kind = text(j, "kind", where);
  return located(where, [&] {
    if (kind == "logistic") {
      return Nonlinearity::logistic(number(j, "rate", where), number_or(j, "capacity", 1.0, where));
    }
    if (kind == "mackey_glass") return Nonlinearity::mackey_glass(number(j, "p", where), number(j, "n", where));
    if (kind == "linear") return Nonlinearity::linear(number(j, "slope", where));
    if (kind == "tabulated") return Nonlinearity::tabulated(numbers(j, "u", where), numbers(j, "g", where));
    schema(where + ".kind", "unknown nonlinearity '" + kind + "' (logistic|mackey_glass|linear|tabulated)");
  });
}

KernelComponent kernel_from_json(const json& j, const std::string& where, const fs::path& base_dir) {
  const std::string kind = text(j, "kind", where);
  return located(where, [&] {
    if (kind == "gaussian") {
      return KernelComponent::gaussian(number(j, "variance", where), number_or(j, "mean", 0.0, where),
                                       number_or(j, "mass", 1.0, where));
    }
    if (kind == "exponential") {
      const std::string dir = j.contains("direction") ? text(j, "direction", where) : "right";
      if (dir != "right" && dir != "left") schema(where + ".direction", "expected \"right\" or \"left\"");
      std::optional<double> amp;
      if (j.contains("amplitude")) amp = number(j, "amplitude", where);
      return KernelComponent::exponential_onesided(number(j, "rate", where),
                                                   dir == "right" ? Direction::Right : Direction::Left,
                                                   number_or(j, "shift", 0.0, where), amp);
    }
    if (kind == "piecewise_green") {
      return KernelComponent::piecewise_green(number(j, "c", where), number(j, "q", where),
                                              number_or(j, "shift", 0.0, where));
    }
    if (kind == "dirac_comb") {
      return KernelComponent::dirac_comb(numbers(j, "offsets", where), numbers(j, "weights", where));
    }
    if (kind == "tabulated") {
      if (j.contains("file")) {
        fs::path p = text(j, "file", where);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return load_tabulated_csv(p);
      }
      return KernelComponent::tabulated(numbers(j, "s", where), numbers(j, "k", where));
    }
    if (kind == "convolved") {
      return KernelComponent::convolved(kernel_from_json(field(j, "first", where), where + ".first", base_dir),
                                        kernel_from_json(field(j, "second", where), where + ".second", base_dir));
    }
    schema(where + ".kind",
           "unknown kernel '" + kind + "' (gaussian|exponential|piecewise_green|dirac_comb|tabulated|convolved)");
  });
}

ModelSpec model_from_json(const json& j, const fs::path& base_dir) {
  const std::string w = "model";
  const std::string family = text(j, "family", w);
  ModelSpec m{LocalDelayedRD{Nonlinearity::identity(), 0.0, 0.0}, 2.0, 1.0, std::nullopt};
  if (family == "local_delayed_rd") {
    m.family = LocalDelayedRD{nonlinearity_from_json(field(j, "g", w), w + ".g"), number_or(j, "L", 0.0, w),
                              number_or(j, "h", 0.0, w)};
  } else if (family == "nonlocal_kpp") {
    m.family = NonlocalKPP{kernel_from_json(field(j, "J", w), w + ".J", base_dir),
                           nonlinearity_from_json(field(j, "g", w), w + ".g")};
  } else if (family == "nonlocal_lattice") {
    const auto g = nonlinearity_from_json(field(j, "g", w), w + ".g");
    const double D = number(j, "D", w), d = number(j, "d", w), r = number_or(j, "r", 0.0, w);
    const json& b = field(j, "beta", w);
    const std::string bw = w + ".beta";
    const std::string bk = text(b, "kind", bw);
    if (bk == "list") {
      auto k = numbers(b, "k", bw);
      auto wts = numbers(b, "weights", bw);
      if (k.size() != wts.size() || k.empty()) schema(bw, "k and weights must be nonempty and of equal length");
      for (double x : k) {
        if (x != std::round(x)) schema(bw + ".k", "lattice offsets must be integers");
      }
      m.family = NonlocalLattice{D, d, r, std::move(k), std::move(wts), std::nullopt, 0.0, g};
    } else if (bk == "geometric") {
      m.family = located(bw, [&] {
        return lattice_geometric(D, d, r, number(b, "rho", bw), text(b, "side", bw), g);
      });
    } else {
      schema(bw + ".kind", "unknown beta kind '" + bk + "' (list|geometric)");
    }
  } else if (family == "nonlocal_delayed_rd") {
    m.family = NonlocalDelayedRD{nonlinearity_from_json(field(j, "f", w), w + ".f"),
                                 nonlinearity_from_json(field(j, "g", w), w + ".g"),
                                 kernel_from_json(field(j, "k", w), w + ".k", base_dir), number(j, "h", w)};
  } else {
    schema(w + ".family",
           "unknown family '" + family +
               "' (local_delayed_rd|nonlocal_kpp|nonlocal_lattice|nonlocal_delayed_rd)");
  }
  if (j.contains("c")) m.c = number(j, "c", w);
  m.bound = number_or(j, "bound", 2.0, w);
  m.beta_margin = number_or(j, "beta_margin", 1.0, w);
  if (!(m.bound > 0.0)) schema(w + ".bound", "must be positive");
  if (!(m.beta_margin > 0.0)) schema(w + ".beta_margin", "must be positive");
  return m;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, path.string() + ": " + e.what());
  }
}

ModelSpec load_model(const fs::path& path) {
  const json j = read_json_file(path);
  try {
    return model_from_json(j, path.parent_path());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Schema) throw;
    throw Error(ErrorCode::Schema, path.string() + ": " + std::string(e.what()).substr(8));
  }
}

json to_json(const SpectralData& sd) {
  return {{"lambda_l", num(sd.lambda_l)},
          {"lambda_r", opt(sd.lambda_r)},
          {"lambda_rK", num(sd.lambda_rK)},
          {"gamma_K", num(sd.gamma_K)},
          {"sigma_K", num(sd.sigma_K)},
          {"gamma_phi", num(sd.gamma_phi)},
          {"critical", sd.critical},
          {"chi_prime_at_lambda_l", num(sd.chi_prime_at_ll)},
          {"argmax", num(sd.argmax)},
          {"chi_max", num(sd.chi_max)},
          {"gamma_K_limit", sd.gamma_limit}};
}

json to_json(const MinSpeed& ms) { return {{"c_star", num(ms.c_star)}, {"z_star", num(ms.z_star)}}; }

json to_json(const ScanReport& r) {
  return {{"min_abs_chi", num(r.min_abs_chi)},
          {"argmin", {num(r.argmin.real()), num(r.argmin.imag())}},
          {"boundary_min_abs_chi", num(r.boundary_min_abs_chi)},
          {"boundary_argmin", {num(r.boundary_argmin.real()), num(r.boundary_argmin.imag())}},
          {"boundary_lines", r.boundary_lines},
          {"grid", {{"x_min", num(r.x_min)}, {"x_max", num(r.x_max)}, {"y_max", num(r.y_max)}, {"nx", r.nx},
                    {"ny", r.ny}, {"eps", num(r.eps)}}},
          {"empty", r.empty},
          {"pass", r.pass}};
}

json to_json(const WaveProfile& p) {
  json j = {{"grid", {{"t_min", num(p.grid.t_min)}, {"t_max", num(p.grid.t_max)}, {"n", p.grid.n}}},
            {"c", num(p.c)},
            {"plateau", num(p.plateau)},
            {"phi_t_min", num(p.values.front())},
            {"phi_t_max", num(p.values.back())},
            {"convergence",
             {{"iterations", p.convergence.iterations},
              {"final_residual", num(p.convergence.final_residual)},
              {"damping_used", num(p.convergence.damping_used)},
              {"converged", p.convergence.converged}}}};
  if (p.closure.active()) {
    j["tail_closure"] = {{"lambda", num(p.closure.lambda)},
                         {"k", p.closure.k},
                         {"A", num(p.closure.A)},
                         {"a", num(p.closure.a)}};
  } else {
    j["tail_closure"] = nullptr;
  }
  return j;
}

json to_json(const DecayFit& f) {
  return {{"lambda_hat", num(f.lambda_hat)},       {"k_hat", f.k_hat},
          {"a", num(f.a)},                         {"m", num(f.m)},
          {"window", {num(f.window.t_a), num(f.window.t_b)}},
          {"residual_sup", num(f.residual_sup)},   {"residual_l2", num(f.residual_l2)},
          {"residual_l2_k0", num(f.residual_l2_k0)}, {"residual_l2_k1", num(f.residual_l2_k1)},
          {"points", f.points}};
}

json to_json(const RepresentationReport& r) {
  return {{"delta", num(r.delta)},
          {"lambda", num(r.lambda)},
          {"k", r.k},
          {"A", num(r.A)},
          {"a", num(r.a)},
          {"window", {num(r.window.t_a), num(r.window.t_b)}},
          {"slope", num(r.slope)},
          {"sup_r", num(r.sup_r)},
          {"l2", num(r.l2)},
          {"l2_ref", num(r.l2_ref)},
          {"stability_source", r.stability_source},
          {"bounded", r.bounded},
          {"stable", r.stable},
          {"pass", r.pass}};
}

json to_json(const Check& c) {
  json values = json::object();
  for (const auto& [k, v] : c.values) values[k] = num(v);
  return {{"name", c.name},
          {"verdict", std::string(to_string(c.verdict))},
          {"anchor", c.anchor},
          {"details", c.details},
          {"values", values}};
}

json to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"title", r.title},
          {"checks", checks},
          {"aborted", r.aborted},
          {"summary", std::string(to_string(r.summary()))},
          {"exit_code", r.exit_code()}};
}

json to_json(const Alignment& a) {
  return {{"shift", num(a.shift)},
          {"sup_diff", num(a.sup_diff)},
          {"t1", num(a.t1)},
          {"t2", num(a.t2)},
          {"fitted_shift", opt(a.fitted_shift)}};
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

void write_profile_csv(const fs::path& path, const WaveProfile& p) {
  std::string s = "t,phi\n";
  char buf[96];
  for (int i = 0; i < p.grid.n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.t(i), p.values[i]);
    s += buf;
  }
  write_text(path, s);
}

}  // namespace wavefront::io
