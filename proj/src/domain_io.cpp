#include "hmlab/domain_io.hpp"

#include <fstream>

#include "hmlab/errors.hpp"

namespace hmlab {
namespace {

template <class T>
T field(const Json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

Json point_to_json(Point p) { return Json::array({p.x, p.y}); }

Point point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("point must be a [x, y] pair of numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json obstacle_to_json(const Obstacle& o) {
  Json j;
  j["type"] = type_name(o);
  if (const auto* d = std::get_if<Disk>(&o)) {
    j["center"] = point_to_json(d->center);
    j["radius"] = d->radius;
  } else if (const auto* s = std::get_if<Segment>(&o)) {
    j["a"] = point_to_json(s->a);
    j["b"] = point_to_json(s->b);
  } else if (const auto* a = std::get_if<Arc>(&o)) {
    j["center"] = point_to_json(a->center);
    j["radius"] = a->radius;
    j["theta"] = Json::array({a->theta_min, a->theta_max});
  } else if (const auto* p = std::get_if<Polygon>(&o)) {
    Json verts = Json::array();
    for (const Point& v : p->vertices) verts.push_back(point_to_json(v));
    j["vertices"] = std::move(verts);
    j["filled"] = p->filled;
  }
  return j;
}

Obstacle obstacle_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("obstacle must be an object");
  const auto type = field<std::string>(j, "type", "obstacle");
  if (type == "disk") {
    return Disk{point_from_json(j.at("center")), field<double>(j, "radius", "disk")};
  }
  if (type == "segment") {
    if (!j.contains("a") || !j.contains("b")) throw ParseError("segment needs 'a' and 'b'");
    return Segment{point_from_json(j.at("a")), point_from_json(j.at("b"))};
  }
  if (type == "arc") {
    const auto theta = field<std::vector<double>>(j, "theta", "arc");
    if (theta.size() != 2) throw ParseError("arc 'theta' must be [t0, t1]");
    if (!j.contains("center")) throw ParseError("arc needs 'center'");
    return Arc{point_from_json(j.at("center")), field<double>(j, "radius", "arc"), theta[0], theta[1]};
  }
  if (type == "polygon") {
    if (!j.contains("vertices") || !j.at("vertices").is_array()) {
      throw ParseError("polygon needs a 'vertices' array");
    }
    Polygon poly;
    for (const Json& v : j.at("vertices")) poly.vertices.push_back(point_from_json(v));
    poly.filled = j.value("filled", false);
    return poly;
  }
  throw ParseError("unknown obstacle type '" + type + "'");
}

Json domain_to_json(const Domain& d) {
  Json j;
  j["ambient"] = {{"center", point_to_json(d.ambient().center)}, {"radius", d.ambient().radius}};
  Json obs = Json::array();
  for (const Obstacle& o : d.obstacles()) obs.push_back(obstacle_to_json(o));
  j["obstacles"] = std::move(obs);
  j["label"] = d.label();
  return j;
}

Domain domain_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("ambient")) throw ParseError("domain needs an 'ambient' disk");
  const Json& amb = j.at("ambient");
  if (!amb.contains("center")) throw ParseError("ambient needs 'center'");
  const Disk ambient{point_from_json(amb.at("center")), field<double>(amb, "radius", "ambient")};
  std::vector<Obstacle> obstacles;
  if (j.contains("obstacles")) {
    for (const Json& o : j.at("obstacles")) obstacles.push_back(obstacle_from_json(o));
  }
  return Domain(ambient, std::move(obstacles), j.value("label", std::string{}));
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(is);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << j.dump(2) << "\n";
}

Domain load_domain(const std::string& path) { return domain_from_json(read_json_file(path)); }

void save_domain(const std::string& path, const Domain& d) { write_json_file(path, domain_to_json(d)); }

}  // namespace hmlab
