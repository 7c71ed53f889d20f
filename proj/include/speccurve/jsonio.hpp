// JSON plumbing for the command-line front end: [re, im] complex encoding,
// strict schema-checked parsing of run configurations (unknown fields are
// rejected at every level), FNV-1a content hashing for report stamps and
// parameter caching, and atomic file writes (temp file + rename).
//
// Key order in emitted documents is alphabetical (the container sorts), so a
// report's bytes depend only on its values, and the content hash of a config
// is independent of the formatting and field order of the source file.

#ifndef SPECCURVE_JSONIO_HPP
#define SPECCURVE_JSONIO_HPP

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speccurve/modelmap.hpp"
#include "speccurve/quadrature.hpp"
#include "speccurve/torusmap.hpp"

namespace speccurve {

using json = nlohmann::json;

// Complex scalars travel as [re, im]; lists of them as arrays of pairs.
json to_json(cplx z);
cplx cplx_from_json(const json& j, const std::string& where);
json to_json(const std::vector<cplx>& v);
std::vector<cplx> cvec_from_json(const json& j, const std::string& where);

// UniformParams object: d1, d2, tau, u_inf, gamma, gammat, xA, yA.
json to_json(const UniformParams& p);
UniformParams params_from_json(const json& j, const std::string& where);

// ModelSpec object: g (couplings of V1, entries g_1..g_{d1+1}), gt, epsilon.
json to_json(const ModelSpec& m);
ModelSpec model_from_json(const json& j, const std::string& where);

json to_json(const QuadratureSpec& q);
// Every field optional with the library default; unknown fields rejected.
QuadratureSpec quad_from_json(const json& j, const std::string& where);

// A full run request. `continuation` lists intermediate models walked in
// order before the final `model`; `tolerances` may override the recognized
// named tolerances (see kToleranceDefaults); `output` names the report file
// and can be overridden on the command line.
struct RunConfig {
  ModelSpec model;
  std::optional<UniformParams> seed;
  std::vector<ModelSpec> continuation;
  QuadratureSpec quadrature;
  std::map<std::string, double> tolerances;
  std::string output;
};

// Recognized tolerance names and their defaults: solve_tol (Newton residual
// norm), fd_step (finite-difference probes in reports and checks).
extern const std::map<std::string, double> kToleranceDefaults;

// Defaults overlaid with the config's overrides.
std::map<std::string, double> effective_tolerances(const RunConfig& c);

// Accepted top-level fields: version (optional, must be 1), model
// (required), seed, continuation, quadrature, tolerances, output. Schema
// violations raise BadConfig with a field path in the message.
RunConfig config_from_json(const json& j);

// Reads and parses the file (IoError on filesystem trouble, BadConfig on
// malformed JSON), then config_from_json.
RunConfig load_config(const std::string& path);
json read_json_file(const std::string& path);

// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a(std::string_view bytes);

// 16-hex-digit FNV-1a of the canonical minified dump. config_hash stamps
// reports; cache_key additionally drops the "output" field, so moving the
// report path does not invalidate cached solve results.
std::string content_hash(const json& j);
std::string cache_key(const json& config);

// Writes text to path via a sibling temp file and rename, creating parent
// directories as needed. IoError on failure.
void atomic_write(const std::string& path, const std::string& text);

// Serializes with two-space indent and a trailing newline, atomically.
void write_json_file(const std::string& path, const json& j);

// Structural gate on an emitted report: the envelope fields (command,
// config_hash, tool, version, quadrature, tolerances) plus the payload
// fields required for the named command. InternalCheck on violation; used
// by the writers and by tests reading reports back.
void validate_report(const json& report);

}  // namespace speccurve

#endif
