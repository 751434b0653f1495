#include "cwave/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cwave {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    const std::string t = s.substr(b, e - b);
    if (t == "nan" || t == "NaN") return NAN;
    if (t == "inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    double v = 0.0;
    const char* first = t.data();
    if (!t.empty() && t[0] == '+') ++first;
    const auto r = std::from_chars(first, t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw IoError("not a number: '" + s + "'");
    return v;
}

std::string csv_escape(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i]);
    out << "\r\n";
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw IoError("write_csv: row width differs from header in " + path.string());
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
        out << "\r\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return (int)i;
    return -1;
}

std::vector<double> CsvTable::numeric(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw IoError("no column '" + name + "'");
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(parse_double(r.at(c)));
    return v;
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> recs;
    std::vector<std::string> rec;
    std::string field;
    bool quoted = false, any = false;
    std::size_t i = 0;
    auto end_field = [&] {
        rec.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        recs.push_back(std::move(rec));
        rec.clear();
        any = false;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            ++i;
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == ',') {
            end_field();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) end_record();
        } else {
            field += c;
            any = true;
        }
        ++i;
    }
    if (quoted) throw IoError("csv: unterminated quoted field");
    if (any || !field.empty()) end_record();
    CsvTable t;
    if (recs.empty()) return t;
    t.header = recs.front();
    for (std::size_t r = 1; r < recs.size(); ++r) {
        if (recs[r].size() != t.header.size())
            throw IoError("csv: record " + std::to_string(r) + " has " + std::to_string(recs[r].size()) +
                          " fields, header has " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(recs[r]));
    }
    return t;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

// ---- manifests ----

std::string version_string() { return "cwave 0.1.0"; }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["versions"] = {{"cwave", version_string()}, {"compiler", __VERSION__}, {"cxx", (long)__cplusplus}};
    j["seed"] = seed;
    j["wall_time"] = wall_time;
    j["outputs"] = outputs;
    j["checks"] = checks;
    return j;
}

fs::path new_run_dir(const fs::path& root, const std::string& stem) {
    fs::create_directories(root);
    for (int i = 1; i < 100000; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d", i);
        const fs::path d = root / (stem + "-" + buf);
        if (fs::create_directory(d)) return d;
    }
    throw IoError("no free run directory under " + root.string());
}

void record_manifest(const fs::path& run_dir, const RunManifest& m) {
    const fs::path log = run_dir.parent_path() / "manifest.jsonl";
    const std::string dir = run_dir.filename().string();
    std::set<std::string> listed;
    {
        std::ifstream in(log);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            const std::string d = j.value("run_dir", "");
            for (const auto& o : j["outputs"]) listed.insert(d + "/" + o.get<std::string>());
        }
    }
    std::set<std::string> mine;
    for (const std::string& o : m.outputs) {
        if (!mine.insert(o).second) throw IoError("manifest lists " + o + " twice");
        if (listed.count(dir + "/" + o)) throw IoError(dir + "/" + o + " is already recorded in " + log.string());
    }
    nlohmann::json j = m.to_json();
    j["run_dir"] = dir;
    write_json(run_dir / "manifest.json", j);
    std::ofstream out(log, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append to " + log.string());
    out << j.dump() << "\n";
}

// ---- report serialisation ----

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json num(const RVec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

nlohmann::json to_json(const SolitonConfig& c) { return {{"zeta", num(c.zeta)}, {"theta", num(c.theta)}}; }

nlohmann::json to_json(const AsymptoticFit& f) {
    return {{"k", f.k},
            {"p", f.p},
            {"s_lo", num(f.s_lo)},
            {"s_hi", num(f.s_hi)},
            {"delta", num(f.delta)},
            {"delta_fit_rms", num(f.delta_fit_rms)},
            {"zeta00", num(f.zeta00)},
            {"theta00", num(f.theta00)},
            {"alpha", num(f.alpha)},
            {"alpha_closed", num(f.alpha_closed)},
            {"kappa", num(f.kappa)},
            {"b_limit", num(f.b_limit)},
            {"b_dist_end", num(f.b_dist_end)},
            {"z_dist_end", num(f.z_dist_end)},
            {"r_residual_end", num(f.r_residual_end)},
            {"sE_end", num(f.sE_end)},
            {"sE_target", num(f.sE_target)},
            {"gap_slope", num(f.gap_slope)},
            {"F_monotone", f.F_monotone},
            {"band_ok", f.band_ok},
            {"band_width", num(f.band_width)}};
}

nlohmann::json to_json(const MatrixLemmaReport& r) {
    return {{"k", r.k},
            {"sigma_identity_exact", r.sigma_identity_exact},
            {"c0", num(r.c0)},
            {"c0_formula", num(r.c0_formula)},
            {"eig_min", num(r.eig_min)},
            {"eig_min_brute", num(r.eig_min_brute)},
            {"c1", num(r.c1)},
            {"c2", num(r.c2)},
            {"samples", r.samples},
            {"violations", r.violations},
            {"witness", num(r.witness)},
            {"tilde_positive", r.tilde_positive},
            {"tilde_top", num(r.tilde_top)},
            {"tilde_sigma_residual", num(r.tilde_sigma_residual)},
            {"sigma_zcr", num(r.sigma_zcr)},
            {"saddle_error", num(r.saddle_error)},
            {"pass", r.pass()}};
}

nlohmann::json to_json(const SaddleLemmaReport& r) {
    return {{"k", r.k}, {"samples", r.samples}, {"C", num(r.C)}, {"min_ratio", num(r.min_ratio)}};
}

nlohmann::json to_json(const TodaRhsCheck& r) {
    return {{"k", r.k},
            {"p", r.p},
            {"A", num(r.A)},
            {"B", num(r.B)},
            {"config", to_json(r.cfg)},
            {"J", num(r.J)},
            {"zeta_proj", num(r.zeta_proj)},
            {"theta_proj", num(r.theta_proj)},
            {"zeta_toda", num(r.zeta_toda)},
            {"theta_toda", num(r.theta_toda)},
            {"zeta_rel_err", num(r.zeta_rel_err)},
            {"theta_rel_err", num(r.theta_rel_err)},
            {"max_rel_err", num(r.max_rel_err)},
            {"err_over_J_1.1", num(r.ratio_01)},
            {"err_over_J_1.3", num(r.ratio_03)}};
}

nlohmann::json to_json(const CharacteristicReport& r) {
    return {{"T0", num(r.T0)},
            {"T0_conf", num(r.T0_conf)},
            {"lipschitz_worst", num(r.lipschitz_worst)},
            {"lipschitz_pass", r.lipschitz_pass},
            {"corner_margin", num(r.corner_margin)},
            {"corner_pass", r.corner_pass},
            {"symmetry_worst", num(r.symmetry_worst)},
            {"symmetry_pass", r.symmetry_pass},
            {"law_x", num(r.law_x)},
            {"law_gap", num(r.law_gap)},
            {"beta", num(r.beta)},
            {"beta_target", num(r.beta_target)},
            {"beta_fit_rms", num(r.beta_fit_rms)},
            {"gamma", num(r.gamma)},
            {"beta_pass", r.beta_pass},
            {"steps", r.steps}};
}

}  // namespace cwave
