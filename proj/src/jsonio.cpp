#include "speccurve/jsonio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "speccurve/errors.hpp"

namespace speccurve {

namespace {

// Rejects keys outside the allowed set; the error names the offender and its
// location so config typos are caught instead of silently ignored.
void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object())
    fail(errc::bad_config, where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      fail(errc::bad_config, where + ": unknown field \"" + item.key() + "\"");
  }
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number())
    fail(errc::bad_config, where + ": expected a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& where) {
  if (!j.is_number_integer())
    fail(errc::bad_config, where + ": expected an integer");
  return j.get<int>();
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(errc::bad_config, where + ": expected a [re, im] pair");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

json to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (cplx z : v) out.push_back(to_json(z));
  return out;
}

std::vector<cplx> cvec_from_json(const json& j, const std::string& where) {
  if (!j.is_array())
    fail(errc::bad_config, where + ": expected an array of [re, im] pairs");
  std::vector<cplx> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(cplx_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json to_json(const UniformParams& p) {
  json j;
  j["d1"] = p.d1;
  j["d2"] = p.d2;
  j["tau"] = to_json(p.modulus.tau());
  j["u_inf"] = to_json(p.u_inf);
  j["gamma"] = to_json(p.gamma);
  j["gammat"] = to_json(p.gammat);
  j["xA"] = to_json(p.xA);
  j["yA"] = to_json(p.yA);
  return j;
}

UniformParams params_from_json(const json& j, const std::string& where) {
  require_keys(j, {"d1", "d2", "tau", "u_inf", "gamma", "gammat", "xA", "yA"},
               where);
  for (const char* k : {"d1", "d2", "tau", "u_inf", "gamma", "gammat", "xA",
                        "yA"}) {
    if (!j.contains(k))
      fail(errc::bad_config, where + ": missing field \"" + k + "\"");
  }
  const int d1 = int_at(j.at("d1"), where + ".d1");
  const int d2 = int_at(j.at("d2"), where + ".d2");
  Modulus mod(cplx_from_json(j.at("tau"), where + ".tau"));
  UniformParams p(d1, d2, mod, cplx_from_json(j.at("u_inf"), where + ".u_inf"),
                  cplx_from_json(j.at("gamma"), where + ".gamma"),
                  cplx_from_json(j.at("gammat"), where + ".gammat"),
                  cvec_from_json(j.at("xA"), where + ".xA"),
                  cvec_from_json(j.at("yA"), where + ".yA"));
  validate(p);
  return p;
}

json to_json(const ModelSpec& m) {
  json j;
  j["g"] = to_json(couplings(m.V1));
  j["gt"] = to_json(couplings(m.V2));
  j["epsilon"] = to_json(m.epsilon);
  return j;
}

ModelSpec model_from_json(const json& j, const std::string& where) {
  require_keys(j, {"g", "gt", "epsilon"}, where);
  for (const char* k : {"g", "gt", "epsilon"}) {
    if (!j.contains(k))
      fail(errc::bad_config, where + ": missing field \"" + k + "\"");
  }
  ModelSpec m{potential_from_couplings(cvec_from_json(j.at("g"), where + ".g")),
              potential_from_couplings(
                  cvec_from_json(j.at("gt"), where + ".gt")),
              cplx_from_json(j.at("epsilon"), where + ".epsilon")};
  validate(m);
  return m;
}

json to_json(const QuadratureSpec& q) {
  json j;
  j["circle_nodes"] = q.circle_nodes;
  j["cycle_nodes"] = q.cycle_nodes;
  j["refinement_factor"] = q.refinement_factor;
  j["tol"] = q.tol;
  j["max_nodes"] = q.max_nodes;
  return j;
}

QuadratureSpec quad_from_json(const json& j, const std::string& where) {
  require_keys(j, {"circle_nodes", "cycle_nodes", "refinement_factor", "tol",
                   "max_nodes"},
               where);
  QuadratureSpec q;
  if (j.contains("circle_nodes"))
    q.circle_nodes = int_at(j.at("circle_nodes"), where + ".circle_nodes");
  if (j.contains("cycle_nodes"))
    q.cycle_nodes = int_at(j.at("cycle_nodes"), where + ".cycle_nodes");
  if (j.contains("refinement_factor"))
    q.refinement_factor =
        int_at(j.at("refinement_factor"), where + ".refinement_factor");
  if (j.contains("tol")) q.tol = number_at(j.at("tol"), where + ".tol");
  if (j.contains("max_nodes"))
    q.max_nodes = int_at(j.at("max_nodes"), where + ".max_nodes");
  validate(q);
  return q;
}

const std::map<std::string, double> kToleranceDefaults = {
    {"solve_tol", 1e-11},
    {"fd_step", 1e-4},
};

std::map<std::string, double> effective_tolerances(const RunConfig& c) {
  std::map<std::string, double> t = kToleranceDefaults;
  for (const auto& [k, v] : c.tolerances) t[k] = v;
  return t;
}

RunConfig config_from_json(const json& j) {
  require_keys(j, {"version", "model", "seed", "continuation", "quadrature",
                   "tolerances", "output"},
               "config");
  if (j.contains("version")) {
    const int v = int_at(j.at("version"), "config.version");
    if (v != 1)
      fail(errc::bad_config,
           "config.version: unsupported value " + std::to_string(v));
  }
  if (!j.contains("model"))
    fail(errc::bad_config, "config: missing field \"model\"");

  RunConfig c{model_from_json(j.at("model"), "config.model"),
              std::nullopt,
              {},
              {},
              {},
              ""};
  if (j.contains("seed"))
    c.seed = params_from_json(j.at("seed"), "config.seed");
  if (j.contains("continuation")) {
    const json& path = j.at("continuation");
    if (!path.is_array())
      fail(errc::bad_config, "config.continuation: expected an array");
    for (size_t i = 0; i < path.size(); ++i)
      c.continuation.push_back(model_from_json(
          path[i], "config.continuation[" + std::to_string(i) + "]"));
  }
  if (j.contains("quadrature"))
    c.quadrature = quad_from_json(j.at("quadrature"), "config.quadrature");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object())
      fail(errc::bad_config, "config.tolerances: expected an object");
    for (const auto& item : t.items()) {
      if (!kToleranceDefaults.count(item.key()))
        fail(errc::bad_config,
             "config.tolerances: unknown name \"" + item.key() + "\"");
      const double v =
          number_at(item.value(), "config.tolerances." + item.key());
      if (!(v > 0.0))
        fail(errc::bad_config,
             "config.tolerances." + item.key() + ": must be positive");
      c.tolerances[item.key()] = v;
    }
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string())
      fail(errc::bad_config, "config.output: expected a string");
    c.output = j.at("output").get<std::string>();
  }
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(errc::bad_config, path + ": " + e.what());
  }
  return j;
}

RunConfig load_config(const std::string& path) {
  return config_from_json(read_json_file(path));
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

std::string content_hash(const json& j) {
  const std::string canon = j.dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canon)));
  return std::string(buf);
}

std::string cache_key(const json& config) {
  json stripped = config;
  stripped.erase("output");
  return content_hash(stripped);
}

void atomic_write(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec)
      fail(errc::io_error,
           "cannot create " + target.parent_path().string() + ": " +
               ec.message());
  }
  const fs::path tmp = target.string() + ".tmp." +
                       std::to_string(static_cast<unsigned>(fnv1a(path)) % 100000);
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot open " + tmp.string());
    out << text;
    out.flush();
    if (!out) fail(errc::io_error, "short write to " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    fail(errc::io_error, "cannot replace " + path + ": " + ec.message());
  }
}

void write_json_file(const std::string& path, const json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

void validate_report(const json& report) {
  auto need = [&](const char* key) {
    if (!report.contains(key))
      fail(errc::internal_check,
           std::string("report missing field \"") + key + "\"");
  };
  for (const char* key :
       {"command", "config_hash", "tool", "version", "quadrature",
        "tolerances"})
    need(key);
  if (!report.at("command").is_string() ||
      !report.at("config_hash").is_string() ||
      !report.at("version").is_number_integer() ||
      !report.at("tolerances").is_object())
    fail(errc::internal_check, "report envelope has a mistyped field");

  const std::string cmd = report.at("command").get<std::string>();
  std::vector<const char*> payload;
  if (cmd == "forward") {
    payload = {"g", "gt", "epsilon", "Gamma", "norm_residual",
               "norm_residual_mirror"};
  } else if (cmd == "solve") {
    payload = {"params", "endpoints", "residuals", "iterations", "gauge",
               "cache_hit"};
  } else if (cmd == "correction") {
    payload = {"params", "gamma1", "f1", "f1_scale_form", "df1_deps",
               "f1_gauge_residual", "validation"};
  } else if (cmd == "validate") {
    payload = {"suites", "all_pass", "checks_run", "checks_failed"};
  } else {
    fail(errc::internal_check, "report has unknown command \"" + cmd + "\"");
  }
  for (const char* key : payload) need(key);
}

}  // namespace speccurve
