#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mrc {

// One completed run directory's payload, as loaded from disk.
struct RunArtifacts {
    std::string label;  // model name, falling back to the directory name
    nlohmann::json metrics;
    nlohmann::json manifest;
};

RunArtifacts load_run_dir(const std::filesystem::path& run_dir);

// Markdown tables mirroring the report shapes: the phrasing-settings table,
// the per-language table, the dimension-vs-joint table, the order summary,
// and the path-scaling series. Table cells carry one decimal place.
std::string render_markdown(const std::vector<RunArtifacts>& runs);

// CSV data series (full precision, header row): one file per table plus
// plot-ready scaling and correlation-scatter series.
std::map<std::string, std::string> render_csv(const std::vector<RunArtifacts>& runs);

}  // namespace mrc
