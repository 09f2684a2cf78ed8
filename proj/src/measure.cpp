#include "hmlab/measure.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hmlab/errors.hpp"

namespace hmlab {

EmpiricalMeasure point_mass(Point p, double mass) {
  EmpiricalMeasure mu;
  mu.atoms.push_back({p, mass, -1});
  mu.total_weight = mass;
  return mu;
}

double weight_sum(const EmpiricalMeasure& mu) {
  double s = 0.0;
  for (const Atom& a : mu.atoms) s += a.weight;
  return s;
}

double mass_on_boundary(const EmpiricalMeasure& mu, int boundary_id) {
  double s = 0.0;
  for (const Atom& a : mu.atoms) {
    if (a.boundary_id == boundary_id) s += a.weight;
  }
  return s;
}

double mass_off_ambient(const EmpiricalMeasure& mu) {
  double s = 0.0;
  for (const Atom& a : mu.atoms) {
    if (a.boundary_id >= 0) s += a.weight;
  }
  return s;
}

bool uniform_weights(const EmpiricalMeasure& mu, double rel_tol) {
  if (mu.atoms.empty()) return true;
  const double w0 = mu.atoms.front().weight;
  for (const Atom& a : mu.atoms) {
    if (std::abs(a.weight - w0) > rel_tol * w0) return false;
  }
  return true;
}

void write_measure_csv(std::ostream& os, const EmpiricalMeasure& mu) {
  const auto old_precision = os.precision(17);
  os << "# total_weight=" << mu.total_weight << "\n";
  os << "# seed=" << mu.seed << "\n";
  os << "# eps_stop=" << mu.eps_stop << "\n";
  os << "# n_samples=" << mu.n_samples << "\n";
  os << "x,y,weight\n";
  for (const Atom& a : mu.atoms) {
    os << a.point.x << "," << a.point.y << "," << a.weight << "\n";
  }
  os.precision(old_precision);
}

void write_measure_csv(const std::string& path, const EmpiricalMeasure& mu) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_measure_csv(os, mu);
}

EmpiricalMeasure read_measure_csv(std::istream& is) {
  EmpiricalMeasure mu;
  bool have_total = false;
  bool seen_columns = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "total_weight") {
          mu.total_weight = std::stod(value);
          have_total = true;
        } else if (key == "seed") {
          mu.seed = std::stoull(value);
        } else if (key == "eps_stop") {
          mu.eps_stop = std::stod(value);
        } else if (key == "n_samples") {
          mu.n_samples = std::stoull(value);
        }
      } catch (const std::exception&) {
        throw ParseError("measure csv line " + std::to_string(line_no) + ": bad value for " + key);
      }
      continue;
    }
    if (!seen_columns) {
      if (line != "x,y,weight") {
        throw ParseError("measure csv: expected column row 'x,y,weight', got '" + line + "'");
      }
      seen_columns = true;
      continue;
    }
    std::istringstream row(line);
    std::string fx, fy, fw;
    if (!std::getline(row, fx, ',') || !std::getline(row, fy, ',') || !std::getline(row, fw)) {
      throw ParseError("measure csv line " + std::to_string(line_no) + ": expected 3 columns");
    }
    Atom a;
    try {
      a.point = {std::stod(fx), std::stod(fy)};
      a.weight = std::stod(fw);
    } catch (const std::exception&) {
      throw ParseError("measure csv line " + std::to_string(line_no) + ": not a number");
    }
    if (!is_finite(a.point) || !(a.weight > 0.0)) {
      throw ParseError("measure csv line " + std::to_string(line_no) +
                       ": atoms need finite coordinates and positive weight");
    }
    mu.atoms.push_back(a);
  }
  if (!seen_columns) throw ParseError("measure csv: missing column row");
  const double sum = weight_sum(mu);
  if (!have_total) mu.total_weight = sum;
  if (std::abs(sum - mu.total_weight) > 1e-9) {
    throw ParseError("measure csv: weights sum to " + std::to_string(sum) +
                     " but header says total_weight=" + std::to_string(mu.total_weight));
  }
  return mu;
}

EmpiricalMeasure read_measure_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_measure_csv(is);
}

}  // namespace hmlab
