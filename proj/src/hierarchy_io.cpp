#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rtagg/agglomeration.hpp"

namespace rtagg {

namespace {
constexpr const char* kFormatName = "rtagg-hierarchy";
constexpr int kFormatVersion = 1;
}  // namespace

void save_hierarchy(const AgglomerateHierarchy& h, const std::string& path) {
  validate_hierarchy(h);
  nlohmann::json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["strategy"] = h.strategy;
  doc["n_cells"] = h.n_cells;
  doc["levels"] = nlohmann::json::array();
  for (const Partition& p : h.levels) {
    nlohmann::json level;
    level["n_agglomerates"] = p.n_agglomerates;
    level["assignment"] = p.assignment;
    doc["levels"].push_back(std::move(level));
  }
  doc["parents"] = h.parents;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(1, '\t') << "\n";
  if (!out) throw std::runtime_error("error while writing " + path);
}

AgglomerateHierarchy load_hierarchy(const std::string& path, int n_cells) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatName)
      throw std::runtime_error("not a hierarchy document");
    if (doc.at("version").get<int>() != kFormatVersion)
      throw std::runtime_error("unsupported hierarchy version");
    AgglomerateHierarchy h;
    h.strategy = doc.at("strategy").get<std::string>();
    h.n_cells = doc.at("n_cells").get<int>();
    if (h.n_cells != n_cells)
      throw std::runtime_error("hierarchy was built for " + std::to_string(h.n_cells) +
                               " cells, mesh has " + std::to_string(n_cells));
    for (const auto& level : doc.at("levels")) {
      Partition p;
      p.n_cells = h.n_cells;
      p.n_agglomerates = level.at("n_agglomerates").get<int>();
      p.assignment = level.at("assignment").get<std::vector<int>>();
      h.levels.push_back(std::move(p));
    }
    h.parents = doc.at("parents").get<std::vector<std::vector<int>>>();
    validate_hierarchy(h);
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed hierarchy document: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": invalid hierarchy: " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace rtagg
