#include "riccibound/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace rb {

namespace {

const std::vector<std::string> kSuiteNames = {
    "curvature", "radial", "functional", "pde", "convergence", "all"};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

double parse_double(const std::string& v, int line, const std::string& field) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigParseError("line " + std::to_string(line) + ": field '" +
                           field + "' is not a number: '" + v + "'");
  }
}

}  // namespace

void Scenario::validate() const {
  if (models.empty())
    throw ConfigParseError("scenario needs at least one [model] section");
  if (suites.empty())
    throw ConfigParseError("scenario needs at least one suite");
  if (r_ladder.empty())
    throw ConfigParseError("the r ladder must be nonempty");
  for (const auto& s : suites)
    if (std::find(kSuiteNames.begin(), kSuiteNames.end(), s) ==
        kSuiteNames.end())
      throw ConfigParseError("unknown suite '" + s + "'");
}

const ModelSpec& model_by_name(const std::string& name) {
  for (const auto& spec : catalog())
    if (Model(spec).name() == name) return spec;
  throw ModelUnknown("model '" + name + "' is not in the catalog");
}

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string section;
  std::string raw;
  int line = 0;
  bool model_open = false;
  bool model_named = false;
  int model_line = 0;
  ModelSpec current;
  auto flush_model = [&]() {
    if (model_open && !model_named)
      throw ConfigParseError("line " + std::to_string(model_line) +
                             ": [model] section needs a 'name' field");
    if (model_open) sc.models.push_back(current);
    model_open = false;
    model_named = false;
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw ConfigParseError("line " + std::to_string(line) +
                               ": unterminated section header");
      flush_model();
      section = trim(s.substr(1, s.size() - 2));
      if (section != "scenario" && section != "model" && section != "ladders")
        throw ConfigParseError("line " + std::to_string(line) +
                               ": unknown section '" + section + "'");
      if (section == "model") {
        current = ModelSpec{};
        model_open = true;
        model_line = line;
      }
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("line " + std::to_string(line) +
                             ": expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigParseError("line " + std::to_string(line) +
                             ": empty key or value");
    if (section == "scenario") {
      if (key == "name")
        sc.name = val;
      else if (key == "seed")
        sc.seed = static_cast<uint64_t>(parse_double(val, line, key));
      else if (key == "tolerance")
        sc.tolerance = parse_double(val, line, key);
      else if (key == "pairs")
        sc.mc_pairs = static_cast<long>(parse_double(val, line, key));
      else if (key == "out")
        sc.out_dir = val;
      else if (key == "suites")
        sc.suites = split_words(val);
      else
        throw ConfigParseError("line " + std::to_string(line) +
                               ": unknown scenario field '" + key + "'");
    } else if (section == "ladders") {
      if (key == "r") {
        sc.r_ladder.clear();
        for (const auto& w : split_words(val))
          sc.r_ladder.push_back(parse_double(w, line, key));
        std::sort(sc.r_ladder.begin(), sc.r_ladder.end());
      } else {
        throw ConfigParseError("line " + std::to_string(line) +
                               ": unknown ladder '" + key + "'");
      }
    } else if (section == "model") {
      if (key == "name") {
        current = model_by_name(val);
        model_named = true;
      } else if (key == "dim")
        current.dim = static_cast<int>(parse_double(val, line, key));
      else if (key == "lambda")
        current.lambda = parse_double(val, line, key);
      else if (key == "K")
        current.K = parse_double(val, line, key);
      else if (key == "alpha")
        current.alpha = parse_double(val, line, key);
      else if (key == "curvature")
        current.curvature = parse_double(val, line, key);
      else if (key == "rho")
        current.rho = parse_double(val, line, key);
      else
        throw ConfigParseError("line " + std::to_string(line) +
                               ": unknown model field '" + key + "'");
    } else {
      throw ConfigParseError("line " + std::to_string(line) +
                             ": key outside any section");
    }
  }
  flush_model();
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file: " + path);
  return parse_scenario(in);
}

}  // namespace rb
