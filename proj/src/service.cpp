#include "detent/service.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <type_traits>
#include <mutex>

#include "httplib.h"

#include "detent/calibration.hpp"
#include "detent/contact.hpp"
#include "detent/estimator.hpp"
#include "detent/fabrication.hpp"

#ifndef DETENT_VERSION
#define DETENT_VERSION "dev"
#endif

namespace detent {

std::string_view engine_version() { return DETENT_VERSION; }

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema:
    case ErrorCode::version_mismatch:
    case ErrorCode::svg_parse:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::io:
      return 500;
    default:
      return 422;
  }
}

namespace {

using httplib::Request;
using httplib::Response;

constexpr const char* kJson = "application/json";

void send(Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(Response& res, int status, std::string_view code, std::string_view message) {
  send(res, {{"error", {{"code", code}, {"message", message}}}}, status);
}

Json parse_body(const Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::schema, std::string("request body is not JSON: ") + e.what());
  }
}

std::string_view require_string(const Json& j, const char* key, std::string_view where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::schema, std::string(where) + "." + key + ": expected a string");
  }
  return it->get_ref<const std::string&>();
}

double require_number(const Json& j, std::string_view where) {
  if (!j.is_number()) throw Error(ErrorCode::schema, std::string(where) + ": expected a number");
  return j.get<double>();
}

Point2 require_point(const Json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::schema, std::string(where) + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }

std::optional<double> query_number(const Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  const std::string v = req.get_param_value(name);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::schema, std::string("query parameter ") + name + ": bad number '" +
                                       v + "'");
  }
  return out;
}

double step_param(const Request& req) {
  const double step = query_number(req, "step").value_or(kDefaultStep);
  if (!(step > 0.0)) throw Error(ErrorCode::schema, "query parameter step: must be positive");
  return step;
}

Side parse_side(std::string_view text, std::string_view where) {
  if (text == "left") return Side::left;
  if (text == "right") return Side::right;
  throw Error(ErrorCode::schema, std::string(where) + ": expected left or right");
}

std::string_view side_name(Side s) { return s == Side::left ? "left" : "right"; }

EditMode require_mode(const Json& j, std::string_view where) {
  if (!j.is_string()) throw Error(ErrorCode::schema, std::string(where) + ": expected a string");
  const auto mode = parse_edit_mode(j.get<std::string>());
  if (!mode) throw Error(ErrorCode::schema, std::string(where) + ": expected create, import or symmetric");
  return *mode;
}

// Builds the contour itself so geometry problems surface as 422 rather than
// being folded into schema errors.
Profile profile_body(const Json& j, Side side, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorCode::schema, std::string(where) + ": expected an object");
  MaterialSide material = default_material(side);
  if (const auto m = j.find("material"); m != j.end()) {
    if (*m == "positive_x") material = MaterialSide::positive_x;
    else if (*m == "negative_x") material = MaterialSide::negative_x;
    else throw Error(ErrorCode::schema, std::string(where) + ".material: expected positive_x or negative_x");
  }
  const auto pts = j.find("points");
  if (pts == j.end() || !pts->is_array()) {
    throw Error(ErrorCode::schema, std::string(where) + ".points: expected an array");
  }
  std::vector<Point2> points;
  for (std::size_t i = 0; i < pts->size(); ++i) {
    points.push_back(require_point((*pts)[i], std::string(where) + ".points[" + std::to_string(i) + "]"));
  }
  return Profile(Polyline(std::move(points), false), side, material);
}

Mechanism mechanism_body(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::schema, "mechanism: expected an object");
  if (const auto ps = j.find("profiles"); ps != j.end() && ps->is_array()) {
    for (std::size_t i = 0; i < ps->size(); ++i) {
      const std::string where = "mechanism.profiles[" + std::to_string(i) + "]";
      const Json& p = (*ps)[i];
      if (!p.is_object()) throw Error(ErrorCode::schema, where + ": expected an object");
      profile_body(p, parse_side(require_string(p, "side", where), where + ".side"), where);
    }
  }
  Mechanism m = mechanism_from_json(j, "mechanism");
  return m;
}

Json summary_json(const Project& p) {
  return {{"id", p.id},
          {"name", p.name},
          {"edit_mode", to_string(p.edit_mode)},
          {"modified_ms", p.modified_ms},
          {"curve_stale", p.curve_stale || !p.cached_curve}};
}

Json contact_json(const SideReaction& r, Side side) {
  const ContactResult& c = r.contact;
  Json j = {{"side", side_name(side)},
            {"state", to_string(c.state)},
            {"deflection_angle", c.deflection_angle},
            {"tip_deflection", c.tip_deflection_d},
            {"tip", point_json(c.tip)},
            {"contact_point", point_json(c.contact_point)},
            {"distance", c.distance},
            {"normal", point_json({c.normal.x, c.normal.y})},
            {"spring_force", point_json({r.spring_force.x, r.spring_force.y})},
            {"normal_force", point_json({r.normal_force.x, r.normal_force.y})},
            {"forward", r.forward},
            {"reverse", r.reverse}};
  if (c.required_deflection) j["required_deflection"] = *c.required_deflection;
  if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
  return j;
}

Json score_json(const DirectionScore& s) {
  return {{"rmse", s.rmse},
          {"peak_location_offset", s.peak_location_offset},
          {"peak_value_offset", s.peak_value_offset},
          {"compared", s.compared}};
}

Json violation_json(const Violation& v) {
  return {{"kind", to_string(v.kind)},
          {"part", v.part},
          {"location", point_json(v.location)},
          {"measured", v.measured},
          {"effective", v.effective},
          {"required", v.required}};
}

std::size_t spring_index(const Mechanism& m, const Json& edit, std::size_t position,
                         const std::string& where) {
  if (const auto s = edit.find("side"); s != edit.end()) {
    if (!s->is_string()) throw Error(ErrorCode::schema, where + ".side: expected a string");
    const Side side = parse_side(s->get<std::string>(), where + ".side");
    for (std::size_t i = 0; i < m.side_springs.size(); ++i) {
      if (m.side_springs[i].side == side) return i;
    }
    throw Error(ErrorCode::invalid_argument,
                where + ": the mechanism has no " + std::string(side_name(side)) + " spring");
  }
  if (const auto s = edit.find("index"); s != edit.end()) {
    if (!s->is_number_unsigned()) throw Error(ErrorCode::schema, where + ".index: expected an index");
    position = s->get<std::size_t>();
  }
  if (position >= m.side_springs.size()) {
    throw Error(ErrorCode::invalid_argument, where + ": no spring at index " + std::to_string(position));
  }
  return position;
}

void apply_spring_edit(SideSpringSpec& s, const Json& e, const std::string& where,
                       const CoefficientTable& table) {
  bool relookup = false;
  if (const auto f = e.find("family"); f != e.end()) {
    if (!f->is_string()) throw Error(ErrorCode::schema, where + ".family: expected a string");
    const SpringFamily family = parse_family(f->get<std::string>());
    if (family != s.family) s.geometry = SideSpringGeometry::for_family(family);
    s.family = family;
    relookup = true;
  }
  if (const auto t = e.find("ring_thickness"); t != e.end()) {
    s.ring_thickness = require_number(*t, where + ".ring_thickness");
    relookup = true;
  }
  if (const auto k = e.find("coefficient_k"); k != e.end()) {
    s.coefficient_k = require_number(*k, where + ".coefficient_k");
  } else if (relookup) {
    s.coefficient_k = table.side_coefficient(s.family, s.ring_thickness);
  }
  if (const auto p = e.find("pivot"); p != e.end()) s.pivot = require_point(*p, where + ".pivot");
  if (const auto r = e.find("rest_tip"); r != e.end()) {
    if (r->is_null()) s.rest_tip.reset();
    else s.rest_tip = require_point(*r, where + ".rest_tip");
  }
  if (const auto r = e.find("tip_radius"); r != e.end()) {
    s.tip_radius = require_number(*r, where + ".tip_radius");
  }
  if (const auto d = e.find("max_deflection"); d != e.end()) {
    s.max_deflection = require_number(*d, where + ".max_deflection");
  }
}

void apply_parameters(Mechanism& m, const Json& body, EditMode mode, const CoefficientTable& table) {
  if (!body.is_object()) throw Error(ErrorCode::schema, "parameters: expected an object");
  static const std::set<std::string> known = {"travel", "friction_mu", "side_springs", "base_spring"};
  for (const auto& [key, value] : body.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::schema, "parameters." + key + ": unknown field");
  }
  if (const auto t = body.find("travel"); t != body.end()) m.travel = require_number(*t, "parameters.travel");
  if (const auto f = body.find("friction_mu"); f != body.end()) {
    m.friction_mu = require_number(*f, "parameters.friction_mu");
  }
  if (const auto ss = body.find("side_springs"); ss != body.end()) {
    if (!ss->is_array()) throw Error(ErrorCode::schema, "parameters.side_springs: expected an array");
    for (std::size_t i = 0; i < ss->size(); ++i) {
      const std::string where = "parameters.side_springs[" + std::to_string(i) + "]";
      const Json& e = (*ss)[i];
      if (!e.is_object()) throw Error(ErrorCode::schema, where + ": expected an object");
      const std::size_t at = spring_index(m, e, i, where);
      apply_spring_edit(m.side_springs[at], e, where, table);
      if (mode == EditMode::symmetric && m.side_springs.size() == 2) {
        m.side_springs[1 - at] = mirror_x(m.side_springs[at]);
      }
    }
  }
  if (const auto b = body.find("base_spring"); b != body.end()) {
    if (b->is_null()) {
      m.base_spring.reset();
    } else {
      if (!b->is_object()) throw Error(ErrorCode::schema, "parameters.base_spring: expected an object or null");
      const double w = require_number(b->value("width", Json(m.base_spring ? m.base_spring->width : 16.0)),
                                      "parameters.base_spring.width");
      const double t = require_number(
          b->value("arm_thickness", Json(m.base_spring ? m.base_spring->arm_thickness : 1.0)),
          "parameters.base_spring.arm_thickness");
      BaseSpringSpec spec = make_base_spring(w, t, table);
      if (const auto k = b->find("coefficient_kb"); k != b->end()) {
        spec.coefficient_kb = require_number(*k, "parameters.base_spring.coefficient_kb");
      }
      m.base_spring = spec;
    }
  }
}

}  // namespace

SandboxService::SandboxService(Gallery gallery, CoefficientTable table, ServiceOptions options)
    : gallery_(std::move(gallery)), table_(std::move(table)), options_(std::move(options)) {}

Gallery SandboxService::gallery() const {
  std::shared_lock lock(mutex_);
  return gallery_;
}

SandboxService::Snapshot SandboxService::snapshot(std::string_view id) const {
  std::shared_lock lock(mutex_);
  const Project& p = gallery_.get(id);
  const auto g = generations_.find(id);
  return {p, g == generations_.end() ? 0 : g->second};
}

std::uint64_t SandboxService::generation(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto g = generations_.find(id);
  return g == generations_.end() ? 0 : g->second;
}

void SandboxService::persist() {
  if (options_.archive_path) save_archive_file(gallery_, *options_.archive_path);
}

template <typename Edit>
auto SandboxService::write(const std::string& id, Edit&& edit) {
  std::unique_lock lock(mutex_);
  if constexpr (std::is_void_v<std::invoke_result_t<Edit, Gallery&>>) {
    edit(gallery_);
    ++generations_[id];
    persist();
  } else {
    auto result = edit(gallery_);
    ++generations_[id];
    persist();
    return result;
  }
}

void SandboxService::register_routes(httplib::Server& server) {
  const std::string table_version = table_.version();
  server.set_post_routing_handler([table_version](const Request&, Response& res) {
    res.set_header("X-Detent-Engine", std::string(engine_version()));
    res.set_header("X-Detent-Table", table_version);
  });
  server.set_exception_handler([](const Request&, Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const Json::exception& e) {
      send_error(res, 400, "schema", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });
  server.set_error_handler([](const Request& req, Response& res) {
    if (res.body.empty() && res.status == 404) {
      send_error(res, 404, "not_found", "no route for " + req.method + " " + req.path);
    }
  });

  server.Get("/api/version", [this](const Request&, Response& res) {
    send(res, {{"engine", engine_version()}, {"table", table_.version()}});
  });

  server.Get("/api/projects", [this](const Request&, Response& res) {
    Json list = Json::array();
    {
      std::shared_lock lock(mutex_);
      for (const auto& p : gallery_.projects()) list.push_back(summary_json(p));
    }
    send(res, {{"projects", std::move(list)}});
  });

  server.Post("/api/projects", [this](const Request& req, Response& res) {
    const Json body = parse_body(req);
    if (!body.is_object()) throw Error(ErrorCode::schema, "request body: expected an object");
    const std::string name(require_string(body, "name", "request"));
    const auto mj = body.find("mechanism");
    if (mj == body.end()) throw Error(ErrorCode::schema, "request.mechanism: missing");
    Mechanism m = mechanism_body(*mj);
    const EditMode mode = body.contains("edit_mode") ? require_mode(body["edit_mode"], "request.edit_mode")
                                                     : EditMode::create;
    std::unique_lock lock(mutex_);
    const Project& p = gallery_.add(name, std::move(m), mode);
    ++generations_[p.id];
    persist();
    send(res, to_json(p), 201);
  });

  server.Get("/api/projects/:id", [this](const Request& req, Response& res) {
    send(res, to_json(snapshot(req.path_params.at("id")).project));
  });

  server.Put("/api/projects/:id", [this](const Request& req, Response& res) {
    const std::string id = req.path_params.at("id");
    const Json body = parse_body(req);
    if (!body.is_object()) throw Error(ErrorCode::schema, "request body: expected an object");
    std::optional<std::string> name;
    if (body.contains("name")) name = std::string(require_string(body, "name", "request"));
    std::optional<EditMode> mode;
    if (body.contains("edit_mode")) mode = require_mode(body["edit_mode"], "request.edit_mode");
    std::optional<Mechanism> mechanism;
    if (const auto mj = body.find("mechanism"); mj != body.end()) mechanism = mechanism_body(*mj);
    const Json out = write(id, [&](Gallery& g) {
      g.get(id);
      if (mechanism) g.update_mechanism(id, [&](Mechanism& m) { m = *mechanism; });
      if (name) g.rename(id, *name);
      if (mode) g.set_edit_mode(id, *mode);
      return to_json(g.get(id));
    });
    send(res, out);
  });

  server.Delete("/api/projects/:id", [this](const Request& req, Response& res) {
    const std::string id = req.path_params.at("id");
    write(id, [&](Gallery& g) { g.remove(id); });
    res.status = 204;
  });

  server.Post("/api/projects/:id/duplicate", [this](const Request& req, Response& res) {
    const std::string id = req.path_params.at("id");
    const Json out = write(id, [&](Gallery& g) { return to_json(g.duplicate(id)); });
    send(res, out, 201);
  });

  server.Put("/api/projects/:id/profile", [this](const Request& req, Response& res) {
    const std::string id = req.path_params.at("id");
    const Side side = parse_side(req.has_param("side") ? req.get_param_value("side") : "left",
                                 "query parameter side");
    const Profile profile = profile_body(parse_body(req), side, "profile");
    const Json out = write(id, [&](Gallery& g) {
      const EditMode mode = g.get(id).edit_mode;
      return to_json(g.update_mechanism(id, [&](Mechanism& m) {
        bool placed = false;
        for (auto& p : m.profiles) {
          if (p.side() == side) {
            p = profile;
            placed = true;
          } else if (mode == EditMode::symmetric) {
            p = mirror_x(profile);
          }
        }
        if (!placed) {
          throw Error(ErrorCode::invalid_argument,
                      "the mechanism has no " + std::string(side_name(side)) + " profile");
        }
      }));
    });
    send(res, out);
  });

  server.Patch("/api/projects/:id/parameters", [this](const Request& req, Response& res) {
    const std::string id = req.path_params.at("id");
    const Json body = parse_body(req);
    const Json out = write(id, [&](Gallery& g) {
      const EditMode mode = g.get(id).edit_mode;
      return to_json(g.update_mechanism(id, [&](Mechanism& m) { apply_parameters(m, body, mode, table_); }));
    });
    send(res, out);
  });

  server.Get("/api/projects/:id/fd/at", [this](const Request& req, Response& res) {
    const auto s = query_number(req, "s");
    if (!s) throw Error(ErrorCode::schema, "query parameter s: missing");
    const Mechanism m = snapshot(req.path_params.at("id")).project.mechanism;
    const Reaction r = reaction_at(m, *s);
    Json sides = Json::array();
    for (std::size_t i = 0; i < r.sides.size(); ++i) {
      sides.push_back(contact_json(r.sides[i], m.side_springs[i].side));
    }
    send(res, {{"s", *s},
               {"forward", r.forward},
               {"reverse", r.reverse},
               {"base", r.base},
               {"sides", std::move(sides)}});
  });

  server.Get("/api/projects/:id/fd.csv", [this](const Request& req, Response& res) {
    const std::string id = req.path_params.at("id");
    const double step = step_param(req);
    Snapshot snap = snapshot(id);
    FDCurve curve;
    if (snap.project.cached_curve && !snap.project.curve_stale && snap.project.cached_curve->step == step) {
      curve = *snap.project.cached_curve;
    } else {
      curve = estimate_curve(snap.project.mechanism, step, {.threads = options_.threads});
      std::unique_lock lock(mutex_);
      if (generations_[id] == snap.generation && gallery_.find(id)) gallery_.set_cached_curve(id, curve);
    }
    res.set_content(fd_csv(curve), "text/csv");
  });

  server.Get("/api/projects/:id/fd", [this](const Request& req, Response& res) {
    const std::string id = req.path_params.at("id");
    const double step = step_param(req);
    Snapshot snap = snapshot(id);
    snap.project.mechanism.validate();
    auto sampler = std::make_shared<CurveSampler>(snap.project.mechanism, step,
                                                  EstimateOptions{.threads = options_.threads});
    const std::uint64_t gen = snap.generation;
    res.set_chunked_content_provider(
        "application/x-ndjson", [this, sampler, id, gen](std::size_t, httplib::DataSink& sink) {
          auto emit = [&](const Json& j) {
            const std::string line = j.dump() + "\n";
            return sink.write(line.data(), line.size());
          };
          if (generation(id) != gen) {
            ++cancelled_;
            emit({{"cancelled", true}, {"reason", "project changed during the stream"}});
            sink.done();
            return true;
          }
          if (!sink.is_writable()) return false;
          if (!sampler->done()) {
            std::vector<FDSample> batch;
            try {
              batch = sampler->next(options_.stream_batch);
            } catch (const Error& e) {
              emit({{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}});
              sink.done();
              return true;
            }
            for (const auto& s : batch) {
              if (!emit(to_json(s))) return false;
            }
            return true;
          }
          const FDCurve curve = sampler->curve();
          Json warnings = Json::array();
          for (const auto& w : curve.warnings) warnings.push_back(to_json(w));
          emit({{"done", true}, {"samples", curve.samples.size()}, {"warnings", std::move(warnings)}});
          {
            std::unique_lock lock(mutex_);
            if (generations_[id] == gen && gallery_.find(id)) gallery_.set_cached_curve(id, curve);
          }
          sink.done();
          return true;
        },
        // A failed stream means the client went away mid-curve.
        [this](bool success) {
          if (!success) ++cancelled_;
        });
  });

  server.Get("/api/projects/:id/export.svg", [this](const Request& req, Response& res) {
    const Project p = snapshot(req.path_params.at("id")).project;
    res.set_content(export_fabrication_svg(layout_swatch(p.mechanism)), "image/svg+xml");
  });

  server.Get("/api/projects/:id/feasibility", [this](const Request& req, Response& res) {
    const Project p = snapshot(req.path_params.at("id")).project;
    FeasibilityRule rules;
    if (const auto k = query_number(req, "kerf")) rules.kerf = *k;
    Json list = Json::array();
    for (const auto& v : check_feasibility(layout_swatch(p.mechanism), rules)) list.push_back(violation_json(v));
    send(res, {{"feasible", list.empty()}, {"violations", std::move(list)}});
  });

  server.Post("/api/calibrate", [this](const Request& req, Response& res) {
    const Json body = parse_body(req);
    if (!body.is_object()) throw Error(ErrorCode::schema, "request body: expected an object");
    const MeasurementSeries measured =
        parse_measurement_csv(require_string(body, "measured", "request"), "measured");
    SimulatedInput simulated;
    if (body.contains("simulated")) {
      simulated = parse_simulated_csv(require_string(body, "simulated", "request"));
    } else if (body.contains("project")) {
      const std::string id(require_string(body, "project", "request"));
      double step = kDefaultStep;
      if (body.contains("step")) step = require_number(body["step"], "request.step");
      if (!(step > 0.0)) throw Error(ErrorCode::schema, "request.step: must be positive");
      FDCurve curve = estimate_curve(snapshot(id).project.mechanism, step, {.threads = options_.threads});
      simulated = {series_from_curve(curve), std::move(curve)};
    } else {
      throw Error(ErrorCode::schema, "request: expected simulated or project");
    }
    Json out = {{"alpha", fit_scale_factor(simulated.series, measured)}};
    if (simulated.curve) {
      const CurveScore score = score_curve(*simulated.curve, measured);
      out["score"] = {{"forward", score_json(score.forward)}, {"reverse", score_json(score.reverse)}};
    }
    send(res, out);
  });

  server.Get("/api/archive", [this](const Request&, Response& res) {
    std::shared_lock lock(mutex_);
    res.set_content(save_archive(gallery_), kJson);
  });

  server.Put("/api/archive", [this](const Request& req, Response& res) {
    Gallery loaded = load_archive(req.body);
    std::unique_lock lock(mutex_);
    for (const auto& p : gallery_.projects()) ++generations_[p.id];
    gallery_ = std::move(loaded);
    for (const auto& p : gallery_.projects()) ++generations_[p.id];
    persist();
    send(res, {{"projects", gallery_.size()}});
  });
}

bool run_server(SandboxService& service, const std::string& host, int port) {
  httplib::Server server;
  service.register_routes(server);
  return server.listen(host, port);
}

}  // namespace detent
