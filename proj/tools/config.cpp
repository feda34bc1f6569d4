#include "config.hpp"

#include "fracheat/errors.hpp"

#include <cstdio>
#include <fstream>

namespace fracheat::cli {

namespace {

template <class T>
T get(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

Vec2 get_point(const json& doc, const std::string& key, const std::string& where) {
  const auto v = get<std::vector<double>>(doc, key, where);
  if (v.size() != 2) throw ValidationError(where + ": '" + key + "' must have two coordinates");
  return Vec2(v[0], v[1]);
}

SymmetryMode parse_symmetry(const json& doc) {
  const std::string mode = doc.value("symmetry", std::string("strict"));
  if (mode == "strict") return SymmetryMode::Strict;
  if (mode == "complete") return SymmetryMode::Complete;
  throw ValidationError("measure: symmetry must be 'strict' or 'complete'");
}

}  // namespace

double RunConfig::h() const { return get<double>(document, "h", "config"); }
int RunConfig::m() const { return get<int>(document.at("solver"), "m", "solver"); }
std::uint64_t RunConfig::seed() const { return get<std::uint64_t>(document, "seed", "config"); }
int RunConfig::threads() const { return get<int>(document.at("solver"), "threads", "solver"); }
std::string RunConfig::out() const { return get<std::string>(document, "out", "config"); }

MassType RunConfig::mass() const {
  return parse_mass_type(get<std::string>(document.at("solver"), "mass", "solver"));
}

AssemblyOptions RunConfig::assembly() const {
  const json& s = document.at("solver");
  AssemblyOptions a;
  a.mass = mass();
  a.threads = std::max(1, threads());
  a.quadrature.radial_order = get<int>(s, "radial_order", "solver");
  a.quadrature.angular_order = get<int>(s, "angular_order", "solver");
  a.quadrature.angular_panels = get<int>(s, "angular_panels", "solver");
  a.near_offsets = get<int>(s, "near_offsets", "solver");
  a.far_order = get<int>(s, "far_order", "solver");
  return a;
}

json RunConfig::param(const std::string& key, const json& fallback) const {
  const json& p = document.at("params");
  return p.contains(key) ? p.at(key) : fallback;
}

json default_config() {
  return json{
      {"measure", {{"kind", "fractional_laplacian"}, {"n", 1}, {"s", 0.5}}},
      {"domain", {{"shape", "interval"}, {"a", -1.0}, {"b", 1.0}}},
      {"h", 0.0078125},
      {"solver",
       {{"m", 60},
        {"mass", "consistent"},
        {"radial_order", 16},
        {"angular_order", 8},
        {"angular_panels", 32},
        {"near_offsets", 5},
        {"far_order", 4},
        {"threads", 1}}},
      {"params", json::object()},
      {"seed", 0},
      {"out", "artifacts"},
  };
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

RunConfig make_config(const json& doc, const Overrides& o) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  json d = default_config();
  for (const auto& [key, value] : doc.items()) {
    if (!d.contains(key)) throw ValidationError("unknown config field '" + key + "'");
    // Measure and domain documents are replaced whole; the rest merges.
    if ((key == "solver" || key == "params") && value.is_object())
      d[key].merge_patch(value);
    else
      d[key] = value;
  }
  if (o.s) d["measure"]["s"] = *o.s;
  if (o.n) d["measure"]["n"] = *o.n;
  if (o.h) d["h"] = *o.h;
  if (o.m) d["solver"]["m"] = *o.m;
  if (o.t0) d["params"]["t0"] = *o.t0;
  if (o.eps) d["params"]["eps"] = *o.eps;
  if (o.seed) d["seed"] = *o.seed;
  if (o.threads) d["solver"]["threads"] = *o.threads;
  if (o.out) d["out"] = *o.out;
  RunConfig c{d, config_hash(d)};
  if (!(c.h() > 0)) throw ValidationError("h must be positive");
  if (c.m() < 1) throw ValidationError("solver.m must be at least 1");
  return c;
}

std::string config_hash(const json& document) {
  json d = document;
  d.erase("out");
  if (d.contains("solver") && d["solver"].is_object()) d["solver"].erase("threads");
  const std::string text = d.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

SpectralMeasure parse_measure(const json& doc) {
  const std::string where = "measure";
  const auto kind = get<std::string>(doc, "kind", where);
  const double s = get<double>(doc, "s", where);
  if (kind == "fractional_laplacian") return SpectralMeasure::fractional_laplacian(get<int>(doc, "n", where), s);
  if (kind == "atoms") {
    if (doc.value("n", 1) != 1) throw ValidationError("measure: atoms require n = 1");
    return SpectralMeasure::one_dimensional(s, get<double>(doc, "a_plus", where), get<double>(doc, "a_minus", where),
                                            get<double>(doc, "lambda2", where), parse_symmetry(doc));
  }
  if (kind == "arcs") {
    if (doc.value("n", 2) != 2) throw ValidationError("measure: arcs require n = 2");
    std::vector<ArcSegment> segments;
    for (const auto& seg : get<json>(doc, "segments", where))
      segments.push_back({get<double>(seg, "from", "segment"), get<double>(seg, "to", "segment"),
                          get<double>(seg, "weight", "segment")});
    return SpectralMeasure::planar(s, segments, get<double>(doc, "lambda2", where), parse_symmetry(doc));
  }
  throw ValidationError("measure: kind must be fractional_laplacian, atoms or arcs");
}

Domain parse_domain(const json& doc) {
  const std::string where = "domain";
  const auto shape = get<std::string>(doc, "shape", where);
  if (shape == "interval") return Domain::interval(get<double>(doc, "a", where), get<double>(doc, "b", where));
  if (shape == "disk") return Domain::disk(get_point(doc, "center", where), get<double>(doc, "radius", where));
  if (shape == "rectangle") return Domain::rectangle(get_point(doc, "lower", where), get_point(doc, "upper", where));
  throw ValidationError("domain: shape must be interval, disk or rectangle");
}

}  // namespace fracheat::cli
