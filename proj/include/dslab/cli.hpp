#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dslab/config.hpp"
#include "json.hpp"

namespace dslab {

// Files produced by a subcommand; written to disk only after the run succeeds.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // (name relative to out_dir, content)
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

// JSON text with every float printed as %.17g.
std::string dump_json(const nlohmann::json& j, int indent = 2);

// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

// Subcommand bodies: return the JSON summary (without the envelope) and queue their data files.
nlohmann::json run_flow(const RunConfig& cfg, Artifacts& art);
nlohmann::json run_transport(const RunConfig& cfg, Artifacts& art);
nlohmann::json run_residue(const RunConfig& cfg, Artifacts& art);
nlohmann::json run_contour(const RunConfig& cfg, Artifacts& art);
nlohmann::json run_symbol_check(const RunConfig& cfg, Artifacts& art);
nlohmann::json run_curvature(const RunConfig& cfg, Artifacts& art);

// Full command line without the program name. Exit status: 0 success, 2 configuration error,
// 3 numerical failure (the error is serialized to <out_dir>/<subcommand>.json).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dslab
