#include "superrad/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace superrad::io {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() && s.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(path.string() + ":" + std::to_string(line) + ": malformed number '" + s + "'");
    }
}

void ensure_parent(const std::filesystem::path& path) {
    const auto parent = path.parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

const char* version_string() { return "superrad 1.0.0"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_timeseries(const ObservableSeries& s, const std::filesystem::path& path) {
    std::string text = timeseries_header;
    text += '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        text += fmt(s.times[i]) + ',' + fmt(s.sz_mean[i]) + ',' + fmt(s.sz_sem[i]) + ',' + fmt(s.sz_norm(i)) + ',' +
                fmt(s.photon_mean[i]) + ',' + fmt(s.photon_sem[i]) + '\n';
    }
    write_text(path, text);
}

ObservableSeries read_timeseries(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || line != timeseries_header) throw IoError(path.string() + ": unexpected header");
    ObservableSeries s;
    std::vector<double> norm;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 6 columns");
        s.times.push_back(parse_double(f[0], path, lineno));
        s.sz_mean.push_back(parse_double(f[1], path, lineno));
        s.sz_sem.push_back(parse_double(f[2], path, lineno));
        norm.push_back(parse_double(f[3], path, lineno));
        s.photon_mean.push_back(parse_double(f[4], path, lineno));
        s.photon_sem.push_back(parse_double(f[5], path, lineno));
    }
    s.n_atoms = 1;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        if (norm[i] != 0.0) {
            s.n_atoms = static_cast<int>(std::lround(2.0 * s.sz_mean[i] / norm[i]));
            break;
        }
    }
    if (s.n_atoms < 1) s.n_atoms = 1;
    return s;
}

json config_to_json(const SystemParams& p, const NumericalParams& n) {
    json j;
    j["scheme"] = to_string(p.scheme());
    j["frame"] = to_string(p.frame);
    j["omega_a"] = p.omega_a;
    j["omega_c"] = p.omega_c;
    j["g"] = p.g;
    j["gamma_col"] = p.gamma_col ? json(*p.gamma_col) : json(nullptr);
    j["gamma_ind"] = p.gamma_ind ? json(*p.gamma_ind) : json(nullptr);
    j["kappa"] = p.kappa;
    j["n_atoms"] = p.n_atoms;
    j["dt"] = n.dt;
    j["t_max"] = n.t_max;
    j["n_traj"] = n.n_traj;
    j["seed"] = n.seed;
    j["smoothing_window"] = n.smoothing_window;
    j["photon_cutoff"] = n.photon_cutoff;
    j["alpha_amplitude"] = to_string(n.alpha_amplitude);
    return j;
}

void config_from_json(const json& j, SystemParams& p, NumericalParams& n) {
    if (!j.is_object()) throw IoError("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "scheme") {
                // The scheme follows from which rate is set; a bare scheme picks the rate slot.
                const Scheme s = scheme_from_string(v.get<std::string>());
                const double rate = p.gamma_col.value_or(p.gamma_ind.value_or(1.0));
                if (s != p.scheme() || (!p.gamma_col && !p.gamma_ind)) {
                    p.gamma_col.reset();
                    p.gamma_ind.reset();
                    (s == Scheme::collective ? p.gamma_col : p.gamma_ind) = rate;
                }
            } else if (key == "frame") p.frame = frame_from_string(v.get<std::string>());
            else if (key == "omega_a") p.omega_a = v.get<double>();
            else if (key == "omega_c") p.omega_c = v.get<double>();
            else if (key == "g") p.g = v.get<double>();
            else if (key == "gamma_col") {
                if (v.is_null()) p.gamma_col.reset(); else p.gamma_col = v.get<double>();
            } else if (key == "gamma_ind") {
                if (v.is_null()) p.gamma_ind.reset(); else p.gamma_ind = v.get<double>();
            } else if (key == "kappa") p.kappa = v.get<double>();
            else if (key == "n_atoms") p.n_atoms = v.get<int>();
            else if (key == "dt") n.dt = v.get<double>();
            else if (key == "t_max") n.t_max = v.get<double>();
            else if (key == "n_traj") n.n_traj = v.get<std::int64_t>();
            else if (key == "seed") n.seed = v.get<std::uint64_t>();
            else if (key == "smoothing_window") n.smoothing_window = v.get<int>();
            else if (key == "photon_cutoff") n.photon_cutoff = v.get<int>();
            else if (key == "alpha_amplitude") n.alpha_amplitude = alpha_amplitude_from_string(v.get<std::string>());
            else throw IoError("unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("bad config value: ") + e.what());
    }
}

std::string sha256_file(const std::filesystem::path& path) {
    const std::string data = read_text(path);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw IoError("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

json manifest_to_json(const RunManifest& m) {
    json j;
    j["config"] = m.config;
    j["seed"] = m.seed;
    j["solver"] = m.solver;
    j["version"] = m.version;
    j["kernel"] = m.kernel;
    j["divergent_trajectories"] = m.divergent;
    j["wall_seconds"] = m.wall_seconds;
    json d = json::object();
    for (const auto& [k, v] : m.digests) d[k] = v;
    j["digests"] = d;
    return j;
}

RunManifest manifest_from_json(const json& j) {
    try {
        RunManifest m;
        m.config = j.at("config");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.solver = j.at("solver").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.kernel = j.value("kernel", "");
        m.divergent = j.value("divergent_trajectories", std::int64_t{0});
        m.wall_seconds = j.value("wall_seconds", 0.0);
        for (const auto& [k, v] : j.at("digests").items()) m.digests[k] = v.get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    write_text(path, manifest_to_json(m).dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) { return manifest_from_json(read_json(path)); }

bool verify_digests(const RunManifest& m, const std::filesystem::path& dir) {
    for (const auto& [name, digest] : m.digests) {
        const auto p = dir / name;
        if (!std::filesystem::exists(p) || sha256_file(p) != digest) return false;
    }
    return true;
}

json report_to_json(const analysis::ScalingReport& r, const RunManifest* manifest) {
    json j;
    json pts = json::array();
    for (const auto& p : r.points) {
        json e;
        e["n"] = p.n;
        e["intensity"] = p.intensity;
        e["sem"] = p.sem;
        e["t0"] = p.t0;
        e["divergent"] = p.divergent;
        pts.push_back(e);
    }
    j["points"] = pts;
    j["zeta"] = r.fit.zeta;
    j["zeta_stderr"] = r.fit.zeta_stderr;
    j["intercept"] = r.fit.intercept;
    j["r_squared"] = r.fit.r_squared;
    j["fingerprint"] = r.fingerprint;
    j["manifest"] = manifest ? manifest_to_json(*manifest) : json(nullptr);
    return j;
}

namespace {

std::vector<analysis::ScalingPoint> points_from_json(const json& arr) {
    if (!arr.is_array()) throw IoError("points must be an array");
    std::vector<analysis::ScalingPoint> out;
    try {
        for (const auto& e : arr) {
            analysis::ScalingPoint p;
            p.n = e.at("n").get<int>();
            p.intensity = e.at("intensity").get<double>();
            p.sem = e.value("sem", 0.0);
            p.t0 = e.value("t0", 0.0);
            p.divergent = e.value("divergent", std::int64_t{0});
            out.push_back(p);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed point: ") + e.what());
    }
    return out;
}

}  // namespace

analysis::ScalingReport report_from_json(const json& j) {
    if (!j.is_object() || !j.contains("points")) throw IoError("report has no points");
    analysis::ScalingReport r;
    r.points = points_from_json(j.at("points"));
    try {
        if (j.contains("zeta")) {
            r.fit.zeta = j.at("zeta").get<double>();
            r.fit.intercept = j.value("intercept", 0.0);
            r.fit.r_squared = j.value("r_squared", 0.0);
            r.fit.zeta_stderr = j.value("zeta_stderr", 0.0);
        } else {
            r.fit = analysis::power_law_fit(r.points);
        }
        r.fingerprint = j.value("fingerprint", "");
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed report: ") + e.what());
    }
    return r;
}

void write_report(const analysis::ScalingReport& r, const RunManifest& manifest, const std::filesystem::path& path) {
    write_text(path, report_to_json(r, &manifest).dump(2) + "\n");
}

analysis::ScalingReport read_report(const std::filesystem::path& path) { return report_from_json(read_json(path)); }

std::vector<analysis::ScalingPoint> read_points(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw IoError(path.string() + ": invalid JSON: " + e.what());
        }
        return points_from_json(j.is_array() ? j : j.value("points", json()));
    }
    std::istringstream in(text);
    std::string line;
    std::vector<analysis::ScalingPoint> out;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto f = split(line, ',');
        if (lineno == 1 && !f.empty() && f[0] == "n") continue;
        if (f.size() < 2 || f.size() > 3) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected n,intensity[,sem]");
        analysis::ScalingPoint p;
        const double n = parse_double(f[0], path, lineno);
        if (n != std::floor(n)) throw IoError(path.string() + ":" + std::to_string(lineno) + ": N must be an integer");
        p.n = static_cast<int>(n);
        p.intensity = parse_double(f[1], path, lineno);
        if (f.size() == 3) p.sem = parse_double(f[2], path, lineno);
        out.push_back(p);
    }
    return out;
}

}  // namespace superrad::io
