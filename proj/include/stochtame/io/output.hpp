#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "stochtame/core/errors.hpp"
#include "stochtame/integrators/record.hpp"

namespace stochtame {

/// One JSON object per line: a provenance header, then one per row.
inline void write_trajectory_jsonl(std::ostream& os, const TrajectoryRecord& r) {
  using nlohmann::json;
  json head{{"config_hash", r.config_hash}, {"seed", r.seed}};
  if (r.blowup) head["blowup"] = {{"t", r.blowup->t}, {"reason", r.blowup->reason}};
  if (r.numeric_failure) head["numeric_failure"] = *r.numeric_failure;
  os << head.dump() << "\n";
  for (const auto& w : r.rows) {
    json row{{"t", w.t},         {"norm_G", w.norm_G},     {"norm_F0", w.norm_F0}, {"norm_F1", w.norm_F1},
             {"norm_D", w.norm_D}, {"int_F1sq", w.int_F1sq}, {"regime", to_string(w.regime)},
             {"M", w.M},         {"QV", w.QV},             {"flags", w.flags}};
    os << row.dump() << "\n";
  }
}

/// Writes dir/name through `body`; the directory is created when missing.
inline std::filesystem::path write_file(const std::string& dir, const std::string& name,
                                        const std::function<void(std::ostream&)>& body) {
  namespace fs = std::filesystem;
  const fs::path p = fs::path(dir) / name;
  std::error_code ec;
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  body(f);
  f.flush();
  if (!f) throw IoError("write failed: " + p.string());
  return p;
}

}  // namespace stochtame
