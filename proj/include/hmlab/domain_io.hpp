#pragma once

#include <string>

#include <json.hpp>

#include "hmlab/geometry.hpp"

namespace hmlab {

using Json = nlohmann::json;

Json point_to_json(Point p);
Point point_from_json(const Json& j);

Json obstacle_to_json(const Obstacle& o);
Obstacle obstacle_from_json(const Json& j);

// { "ambient": {"center":[x,y], "radius":R}, "obstacles":[...], "label":"..." }
Json domain_to_json(const Domain& d);
Domain domain_from_json(const Json& j);

Domain load_domain(const std::string& path);
void save_domain(const std::string& path, const Domain& d);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace hmlab
