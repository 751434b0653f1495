#pragma once
// Subcommand bodies of the cwave front end.  Each returns the process exit
// code; exceptions are mapped to codes in cwave_cli.cpp.
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cwave::cli {

enum Exit { ok = 0, check_failed = 1, usage = 2, aborted = 3 };

struct Context {
    std::filesystem::path out_root;  // --out, else $CWAVE_OUTPUT_ROOT, else ./cwave_runs
    int threads = 0;
    bool quiet = false;
};

struct ConstantsArgs {
    double p = 3.0;
    int n = 2048;
    double xi = 14.0;
};
int cmd_constants(const Context& ctx, const ConstantsArgs& a);

struct TodaRunArgs {
    int k = 2;
    double p = 3.0;
    std::vector<double> zeta, theta;
    double s_end = 1e5;
    double tol = 1e-10;
    double eps = 0.0;
    bool keep_real = true;
    std::uint64_t seed = 0;
};
int cmd_toda_run(const Context& ctx, const TodaRunArgs& a);

struct TodaFitArgs {
    std::string input;
    double p = 3.0;
    double window = 2.0;
};
int cmd_toda_fit(const Context& ctx, const TodaFitArgs& a);

struct TodaLemmasArgs {
    int k = 4;
    long samples = 10000;
    std::uint64_t seed = 1;
};
int cmd_toda_lemmas(const Context& ctx, const TodaLemmasArgs& a);

// random alternating-phase starts integrated independently, one per job
struct TodaSweepArgs {
    int k = 3;
    double p = 3.0;
    int count = 16;
    int jobs = 1;
    double s_end = 1e5;
    double eps = 0.0;
    std::uint64_t seed = 0;
};
int cmd_toda_sweep(const Context& ctx, const TodaSweepArgs& a);

struct PdeRunArgs {
    std::string config;
    bool has_seed = false;
    std::uint64_t seed = 0;
};
int cmd_pde_run(const Context& ctx, const PdeRunArgs& a);

struct VerifyRhsArgs {
    int k = 2;
    double p = 3.0;
    double gap = 10.0;
    std::vector<double> theta;
    int n = 2048;
    double xi = 0.0;
};
int cmd_pde_verify_rhs(const Context& ctx, const VerifyRhsArgs& a);

struct SurfaceScanArgs {
    std::string config;
};
int cmd_surface_scan(const Context& ctx, const SurfaceScanArgs& a);

}  // namespace cwave::cli
