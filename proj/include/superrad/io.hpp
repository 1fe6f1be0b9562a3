#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "superrad/analysis.hpp"
#include "superrad/model.hpp"

namespace superrad::io {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

const char* version_string();

inline constexpr const char* timeseries_header = "t,sz_mean,sz_sem,sz_norm,photon_mean,photon_sem";

/// One CSV row per grid point, 17 significant digits.
void write_timeseries(const ObservableSeries& series, const std::filesystem::path& path);
/// Reads a file written by write_timeseries; n_atoms is recovered from the sz_norm column.
ObservableSeries read_timeseries(const std::filesystem::path& path);

json config_to_json(const SystemParams& p, const NumericalParams& n);
/// Overlays the keys present in `j` onto p and n. Unknown keys are rejected.
void config_from_json(const json& j, SystemParams& p, NumericalParams& n);

struct RunManifest {
    json config = json::object();
    std::uint64_t seed = 0;
    std::string solver;
    std::string version = version_string();
    std::string kernel;
    std::int64_t divergent = 0;
    double wall_seconds = 0.0;
    std::map<std::string, std::string> digests;  // file name -> hex SHA-256
};

json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);
/// True if every digest matches the file of that name next to the manifest.
bool verify_digests(const RunManifest& m, const std::filesystem::path& dir);

std::string sha256_file(const std::filesystem::path& path);

json report_to_json(const analysis::ScalingReport& r, const RunManifest* manifest = nullptr);
analysis::ScalingReport report_from_json(const json& j);
void write_report(const analysis::ScalingReport& r, const RunManifest& manifest, const std::filesystem::path& path);
analysis::ScalingReport read_report(const std::filesystem::path& path);

/// Points from a report JSON, a {"points": [...]} JSON, or CSV with columns n,intensity[,sem].
std::vector<analysis::ScalingPoint> read_points(const std::filesystem::path& path);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace superrad::io
