#pragma once
// Output plumbing: CSV (RFC 4180, '.' decimal, no locale), JSON summaries
// and the append-only run manifest.
#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwave/pde.hpp"
#include "cwave/surface.hpp"
#include "cwave/toda.hpp"

namespace cwave {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shortest round-trip representation, locale independent; nan/inf spelled out
std::string format_double(double v);
double parse_double(const std::string& s);

// ---- CSV ----

std::string csv_escape(const std::string& field);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int column(const std::string& name) const;  // -1 when absent
    std::vector<double> numeric(const std::string& name) const;
};
// quoted fields, doubled quotes, embedded newlines and CRLF line ends
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// ---- manifests ----

struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    double wall_time = 0.0;
    std::vector<std::string> outputs;  // file names relative to the run directory
    std::map<std::string, bool> checks;
    nlohmann::json to_json() const;
};

std::string version_string();

// A fresh directory under root, named <stem>-NNNN with the first free
// number; outputs of one command never share a directory with another.
std::filesystem::path new_run_dir(const std::filesystem::path& root, const std::string& stem);

// Writes manifest.json in run_dir and appends one line to
// <run_dir>/../manifest.jsonl.  Refuses to record a file that an earlier
// line of that log already lists.
void record_manifest(const std::filesystem::path& run_dir, const RunManifest& m);

// ---- report serialisation ----

nlohmann::json to_json(const AsymptoticFit& f);
nlohmann::json to_json(const MatrixLemmaReport& r);
nlohmann::json to_json(const SaddleLemmaReport& r);
nlohmann::json to_json(const TodaRhsCheck& r);
nlohmann::json to_json(const CharacteristicReport& r);
nlohmann::json to_json(const SolitonConfig& c);

// JSON cannot hold nan/inf; they are written as null
nlohmann::json num(double v);
nlohmann::json num(const RVec& v);

}  // namespace cwave
