#include "detent/project_store.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "detent/error.hpp"

namespace detent {

std::string_view to_string(EditMode mode) {
  switch (mode) {
    case EditMode::create: return "create";
    case EditMode::import: return "import";
    case EditMode::symmetric: return "symmetric";
  }
  return "?";
}

std::optional<EditMode> parse_edit_mode(std::string_view text) {
  for (auto m : {EditMode::create, EditMode::import, EditMode::symmetric}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

bool Project::same_design(const Project& o) const {
  return id == o.id && name == o.name && mechanism == o.mechanism && edit_mode == o.edit_mode &&
         created_ms == o.created_ms && modified_ms == o.modified_ms;
}

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Gallery::Gallery() : clock_(now_ms) {}
Gallery::Gallery(Clock clock) : clock_(std::move(clock)) {}

const Project* Gallery::find(std::string_view id) const {
  for (const auto& p : projects_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const Project& Gallery::get(std::string_view id) const {
  if (const Project* p = find(id)) return *p;
  throw Error(ErrorCode::not_found, "no project with id '" + std::string(id) + "'");
}

Project& Gallery::get_mutable(std::string_view id) {
  return const_cast<Project&>(static_cast<const Gallery*>(this)->get(id));
}

std::string Gallery::fresh_id() {
  while (true) {
    std::string id = "p" + std::to_string(next_id_++);
    if (!find(id)) return id;
  }
}

const Project& Gallery::add(std::string name, Mechanism mechanism, EditMode mode) {
  mechanism.validate();
  Project p;
  p.id = fresh_id();
  p.name = std::move(name);
  p.mechanism = std::move(mechanism);
  p.edit_mode = mode;
  p.created_ms = p.modified_ms = clock_();
  projects_.push_back(std::move(p));
  return projects_.back();
}

const Project& Gallery::insert(Project project) {
  if (project.id.empty()) project.id = fresh_id();
  if (find(project.id)) {
    throw Error(ErrorCode::invalid_argument, "duplicate project id '" + project.id + "'");
  }
  projects_.push_back(std::move(project));
  return projects_.back();
}

const Project& Gallery::duplicate(std::string_view id) {
  Project copy = get(id);
  copy.id = fresh_id();
  copy.name += " (copy)";
  copy.created_ms = copy.modified_ms = clock_();
  projects_.push_back(std::move(copy));
  return projects_.back();
}

void Gallery::remove(std::string_view id) {
  auto it = std::find_if(projects_.begin(), projects_.end(),
                         [&](const Project& p) { return p.id == id; });
  if (it == projects_.end()) {
    throw Error(ErrorCode::not_found, "no project with id '" + std::string(id) + "'");
  }
  projects_.erase(it);
}

void Gallery::rename(std::string_view id, std::string name) {
  Project& p = get_mutable(id);
  p.name = std::move(name);
  p.modified_ms = clock_();
}

void Gallery::set_edit_mode(std::string_view id, EditMode mode) {
  Project& p = get_mutable(id);
  p.edit_mode = mode;
  p.modified_ms = clock_();
}

const Project& Gallery::update_mechanism(std::string_view id,
                                         const std::function<void(Mechanism&)>& edit) {
  Project& p = get_mutable(id);
  Mechanism next = p.mechanism;
  edit(next);
  next.validate();
  p.curve_stale = true;
  p.mechanism = std::move(next);
  p.modified_ms = clock_();
  return p;
}

void Gallery::set_cached_curve(std::string_view id, FDCurve curve) {
  Project& p = get_mutable(id);
  p.cached_curve = std::move(curve);
  p.curve_stale = false;
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::schema, path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing");
  return *it;
}

const Json* optional_field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "not finite");
  return v;
}

double number_field(const Json& j, const char* key, const std::string& path) {
  return number(field(j, key, path), path + "." + key);
}

double number_or(const Json& j, const char* key, const std::string& path, double fallback) {
  const Json* f = optional_field(j, key, path);
  return f ? number(*f, path + "." + key) : fallback;
}

std::int64_t integer_field(const Json& j, const char* key, const std::string& path) {
  const Json& f = field(j, key, path);
  if (!f.is_number_integer()) bad(path + "." + key, "expected an integer");
  return f.get<std::int64_t>();
}

std::string string_field(const Json& j, const char* key, const std::string& path) {
  const Json& f = field(j, key, path);
  if (!f.is_string()) bad(path + "." + key, "expected a string");
  return f.get<std::string>();
}

const Json& array_field(const Json& j, const char* key, const std::string& path) {
  const Json& f = field(j, key, path);
  if (!f.is_array()) bad(path + "." + key, "expected an array");
  return f;
}

Point2 point(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) bad(path, "expected [x, y]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

Side side_of(const std::string& s, const std::string& path) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  bad(path, "side must be left or right, got '" + s + "'");
}

std::string side_name(Side s) { return s == Side::left ? "left" : "right"; }

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

}  // namespace

Json to_json(const Profile& profile) {
  Json pts = Json::array();
  for (const auto& p : profile.contour().points()) pts.push_back(point_json(p));
  return {{"side", side_name(profile.side())},
          {"material", profile.material() == MaterialSide::positive_x ? "positive_x" : "negative_x"},
          {"points", std::move(pts)}};
}

Json to_json(const SideSpringSpec& s) {
  const auto& g = s.geometry;
  Json geometry = {{"ring_inner_radius", g.ring_inner_radius},
                   {"hub_radius", g.hub_radius},
                   {"hole_radius", g.hole_radius},
                   {"bridge_width", g.bridge_width},
                   {"arm_width", g.arm_width ? Json(*g.arm_width) : Json(nullptr)},
                   {"arm_reach", g.arm_reach},
                   {"tip_height", g.tip_height},
                   {"arm_overhang", g.arm_overhang},
                   {"circle_segments", g.circle_segments}};
  return {{"family", std::string(to_string(s.family))},
          {"ring_thickness", s.ring_thickness},
          {"coefficient_k", s.coefficient_k},
          {"side", side_name(s.side)},
          {"pivot", point_json(s.pivot)},
          {"rest_tip", s.rest_tip ? point_json(*s.rest_tip) : Json(nullptr)},
          {"max_deflection", s.max_deflection},
          {"tip_radius", s.tip_radius},
          {"geometry", std::move(geometry)}};
}

Json to_json(const BaseSpringSpec& b) {
  return {{"width", b.width},
          {"arm_thickness", b.arm_thickness},
          {"beam_length", b.beam_length},
          {"coefficient_kb", b.coefficient_kb},
          {"beam_count", b.beam_count},
          {"slot_height", b.slot_height},
          {"tab_height", b.tab_height}};
}

Json to_json(const Mechanism& m) {
  Json profiles = Json::array();
  for (const auto& p : m.profiles) profiles.push_back(to_json(p));
  Json springs = Json::array();
  for (const auto& s : m.side_springs) springs.push_back(to_json(s));
  return {{"travel", m.travel},
          {"friction_mu", m.friction_mu},
          {"profiles", std::move(profiles)},
          {"side_springs", std::move(springs)},
          {"base_spring", m.base_spring ? to_json(*m.base_spring) : Json(nullptr)}};
}

Json to_json(const FDSample& s) {
  return {{"s", s.displacement}, {"forward", s.forward}, {"reverse", s.reverse}};
}

Json to_json(const Warning& w) {
  return {{"kind", std::string(to_string(w.kind))}, {"from", w.from}, {"to", w.to}, {"detail", w.detail}};
}

Json to_json(const FDCurve& c) {
  Json samples = Json::array();
  for (const auto& s : c.samples) samples.push_back(Json::array({s.displacement, s.forward, s.reverse}));
  Json warnings = Json::array();
  for (const auto& w : c.warnings) warnings.push_back(to_json(w));
  return {{"step", c.step}, {"samples", std::move(samples)}, {"warnings", std::move(warnings)}};
}

Json to_json(const Project& p) {
  return {{"id", p.id},
          {"name", p.name},
          {"edit_mode", std::string(to_string(p.edit_mode))},
          {"created_ms", p.created_ms},
          {"modified_ms", p.modified_ms},
          {"mechanism", to_json(p.mechanism)},
          {"cached_curve", p.cached_curve ? to_json(*p.cached_curve) : Json(nullptr)}};
}

Profile profile_from_json(const Json& j, const std::string& path) {
  const Side side = side_of(string_field(j, "side", path), path + ".side");
  MaterialSide material = default_material(side);
  if (const Json* m = optional_field(j, "material", path)) {
    if (*m == "positive_x") material = MaterialSide::positive_x;
    else if (*m == "negative_x") material = MaterialSide::negative_x;
    else bad(path + ".material", "expected positive_x or negative_x");
  }
  const Json& pts = array_field(j, "points", path);
  std::vector<Point2> points;
  for (std::size_t i = 0; i < pts.size(); ++i) points.push_back(point(pts[i], idx(path + ".points", i)));
  try {
    return Profile(Polyline(std::move(points), false), side, material);
  } catch (const Error& e) {
    bad(path + ".points", e.what());
  }
}

SideSpringSpec side_spring_from_json(const Json& j, const std::string& path) {
  SideSpringSpec s;
  try {
    s.family = parse_family(string_field(j, "family", path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::schema) throw;
    bad(path + ".family", e.what());
  }
  s.ring_thickness = number_field(j, "ring_thickness", path);
  s.coefficient_k = number_field(j, "coefficient_k", path);
  s.side = side_of(string_field(j, "side", path), path + ".side");
  s.pivot = point(field(j, "pivot", path), path + ".pivot");
  if (const Json* t = optional_field(j, "rest_tip", path)) s.rest_tip = point(*t, path + ".rest_tip");
  s.max_deflection = number_or(j, "max_deflection", path, kMaxTipDeflection);
  s.tip_radius = number_or(j, "tip_radius", path, 0.0);
  s.geometry = SideSpringGeometry::for_family(s.family);
  if (const Json* g = optional_field(j, "geometry", path)) {
    const std::string gp = path + ".geometry";
    auto& geo = s.geometry;
    geo.ring_inner_radius = number_or(*g, "ring_inner_radius", gp, geo.ring_inner_radius);
    geo.hub_radius = number_or(*g, "hub_radius", gp, geo.hub_radius);
    geo.hole_radius = number_or(*g, "hole_radius", gp, geo.hole_radius);
    geo.bridge_width = number_or(*g, "bridge_width", gp, geo.bridge_width);
    if (const Json* w = optional_field(*g, "arm_width", gp)) geo.arm_width = number(*w, gp + ".arm_width");
    geo.arm_reach = number_or(*g, "arm_reach", gp, geo.arm_reach);
    geo.tip_height = number_or(*g, "tip_height", gp, geo.tip_height);
    geo.arm_overhang = number_or(*g, "arm_overhang", gp, geo.arm_overhang);
    if (const Json* n = optional_field(*g, "circle_segments", gp)) {
      if (!n->is_number_integer()) bad(gp + ".circle_segments", "expected an integer");
      geo.circle_segments = n->get<int>();
    }
  }
  if (!(s.coefficient_k > 0.0)) bad(path + ".coefficient_k", "must be positive");
  if (!(s.max_deflection > 0.0)) bad(path + ".max_deflection", "must be positive");
  if (s.tip_radius < 0.0) bad(path + ".tip_radius", "must be non-negative");
  return s;
}

BaseSpringSpec base_spring_from_json(const Json& j, const std::string& path) {
  BaseSpringSpec b;
  b.width = number_field(j, "width", path);
  b.arm_thickness = number_field(j, "arm_thickness", path);
  b.beam_length = number_or(j, "beam_length", path, b.beam_length);
  b.coefficient_kb = number_field(j, "coefficient_kb", path);
  if (const Json* n = optional_field(j, "beam_count", path)) {
    if (!n->is_number_integer()) bad(path + ".beam_count", "expected an integer");
    b.beam_count = n->get<int>();
  }
  b.slot_height = number_or(j, "slot_height", path, b.slot_height);
  b.tab_height = number_or(j, "tab_height", path, b.tab_height);
  if (b.coefficient_kb < 0.0) bad(path + ".coefficient_kb", "must be non-negative");
  return b;
}

Mechanism mechanism_from_json(const Json& j, const std::string& path, int version) {
  Mechanism m;
  m.travel = number_field(j, "travel", path);
  m.friction_mu = version >= 2 ? number_field(j, "friction_mu", path)
                               : number_or(j, "friction_mu", path, kDefaultFriction);
  const Json& profiles = array_field(j, "profiles", path);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    m.profiles.push_back(profile_from_json(profiles[i], idx(path + ".profiles", i)));
  }
  const Json& springs = array_field(j, "side_springs", path);
  for (std::size_t i = 0; i < springs.size(); ++i) {
    m.side_springs.push_back(side_spring_from_json(springs[i], idx(path + ".side_springs", i)));
  }
  if (const Json* b = optional_field(j, "base_spring", path)) {
    m.base_spring = base_spring_from_json(*b, path + ".base_spring");
  }
  try {
    m.validate();
  } catch (const Error& e) {
    bad(path, e.what());
  }
  return m;
}

FDCurve curve_from_json(const Json& j, const std::string& path) {
  FDCurve c;
  c.step = number_field(j, "step", path);
  const Json& samples = array_field(j, "samples", path);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string sp = idx(path + ".samples", i);
    const Json& s = samples[i];
    if (!s.is_array() || s.size() != 3) bad(sp, "expected [s, forward, reverse]");
    c.samples.push_back({number(s[0], sp + "[0]"), number(s[1], sp + "[1]"), number(s[2], sp + "[2]")});
  }
  if (const Json* ws = optional_field(j, "warnings", path)) {
    for (std::size_t i = 0; i < ws->size(); ++i) {
      const std::string wp = idx(path + ".warnings", i);
      const auto kind = parse_warning_kind(string_field((*ws)[i], "kind", wp));
      if (!kind) bad(wp + ".kind", "unknown warning kind");
      Warning w{*kind, number_field((*ws)[i], "from", wp), number_field((*ws)[i], "to", wp), {}};
      if (const Json* d = optional_field((*ws)[i], "detail", wp)) w.detail = d->get<std::string>();
      c.warnings.push_back(std::move(w));
    }
  }
  return c;
}

std::string save_archive(const Gallery& gallery) {
  Json projects = Json::array();
  for (const auto& p : gallery.projects()) projects.push_back(to_json(p));
  const Json doc = {{"format", std::string(kArchiveFormat)},
                    {"version", kArchiveVersion},
                    {"projects", std::move(projects)}};
  return doc.dump(1) + "\n";
}

Gallery load_archive(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::schema, std::string("archive: not valid JSON (") + e.what() + ")");
  }
  const std::string root = "archive";
  if (!doc.is_object()) bad(root, "expected an object");
  if (const Json* f = optional_field(doc, "format", root)) {
    if (*f != kArchiveFormat) bad(root + ".format", "not a gallery archive");
  }
  const std::int64_t version = integer_field(doc, "version", root);
  if (version < kOldestArchiveVersion || version > kArchiveVersion) {
    throw Error(ErrorCode::version_mismatch,
                "archive version " + std::to_string(version) + " is not supported (reader handles " +
                    std::to_string(kOldestArchiveVersion) + " to " +
                    std::to_string(kArchiveVersion) + ")");
  }
  const int v = static_cast<int>(version);
  Gallery g;
  const Json& projects = array_field(doc, "projects", root);
  for (std::size_t i = 0; i < projects.size(); ++i) {
    const std::string path = idx("projects", i);
    const Json& pj = projects[i];
    Project p;
    p.id = string_field(pj, "id", path);
    if (p.id.empty()) bad(path + ".id", "empty id");
    if (g.find(p.id)) bad(path + ".id", "duplicate id '" + p.id + "'");
    p.name = string_field(pj, "name", path);
    if (v >= 2) {
      const auto mode = parse_edit_mode(string_field(pj, "edit_mode", path));
      if (!mode) bad(path + ".edit_mode", "expected create, import or symmetric");
      p.edit_mode = *mode;
    }
    p.created_ms = integer_field(pj, "created_ms", path);
    p.modified_ms = integer_field(pj, "modified_ms", path);
    p.mechanism = mechanism_from_json(field(pj, "mechanism", path), path + ".mechanism", v);
    if (v >= 2) {
      if (const Json* c = optional_field(pj, "cached_curve", path)) {
        p.cached_curve = curve_from_json(*c, path + ".cached_curve");
      }
    }
    p.curve_stale = true;
    g.insert(std::move(p));
  }
  return g;
}

void save_archive_file(const Gallery& gallery, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << save_archive(gallery);
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

Gallery load_archive_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open archive " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_archive(ss.str());
}

}  // namespace detent
