// cwave: batch front end.  Exit codes: 0 pass, 1 numerical check failed,
// 2 usage or config error, 3 runtime abort.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "cwave/config.hpp"
#include "cwave/io.hpp"
#include "cwave/parallel.hpp"
#include "cwave/pde.hpp"
#include "cwave/surface.hpp"
#include "cwave/toda.hpp"

using namespace cwave;
using namespace cwave::cli;

int main(int argc, char** argv) {
    CLI::App app{"cwave: multisoliton and blow-up surface experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    Context ctx;
    std::string out;
    bool serial = false;
    app.add_option("--out", out, "output root (default $CWAVE_OUTPUT_ROOT, else ./cwave_runs)");
    app.add_option("--threads", ctx.threads, "OpenMP threads for the grid kernels");
    app.add_flag("--serial", serial, "use the serial reference kernels");
    app.add_flag("-q,--quiet", ctx.quiet, "do not print the summary");

    int code = 0;

    ConstantsArgs ca;
    auto* cons = app.add_subcommand("constants", "quadrature constants table as JSON");
    cons->add_option("--p", ca.p, "nonlinearity exponent")->required();
    cons->add_option("--n", ca.n, "quadrature nodes");
    cons->add_option("--xi", ca.xi, "line half-width in xi");
    cons->callback([&] { code = cmd_constants(ctx, ca); });

    auto* toda = app.add_subcommand("toda", "first-order Toda system");
    toda->require_subcommand(1);

    TodaRunArgs tr;
    auto* trun = toda->add_subcommand("run", "integrate from s = 1, trajectory CSV");
    trun->add_option("--k", tr.k, "number of solitons");
    trun->add_option("--p", tr.p);
    trun->add_option("--zeta", tr.zeta, "initial centres, comma separated")->delimiter(',');
    trun->add_option("--theta", tr.theta, "initial phases, comma separated")->delimiter(',');
    trun->add_option("--s-end", tr.s_end);
    trun->add_option("--tol", tr.tol);
    trun->add_option("--eps", tr.eps, "size of the smooth O(J^1.3) remainder");
    trun->add_flag("!--generic-remainder", tr.keep_real, "let the remainder move b off pi");
    trun->add_option("--seed", tr.seed);
    trun->callback([&] { code = cmd_toda_run(ctx, tr); });

    TodaFitArgs tf;
    auto* tfit = toda->add_subcommand("fit", "asymptotic fit of a trajectory CSV");
    tfit->add_option("--input", tf.input)->required()->check(CLI::ExistingFile);
    tfit->add_option("--p", tf.p);
    tfit->add_option("--window", tf.window, "fit window in decades of s");
    tfit->callback([&] { code = cmd_toda_fit(ctx, tf); });

    TodaLemmasArgs tl;
    auto* tlem = toda->add_subcommand("lemmas", "matrix and saddle lemma checks");
    tlem->add_option("--k", tl.k)->required();
    tlem->add_option("--samples", tl.samples);
    tlem->add_option("--seed", tl.seed);
    tlem->callback([&] { code = cmd_toda_lemmas(ctx, tl); });

    TodaSweepArgs ts;
    auto* tsw = toda->add_subcommand("sweep", "independent runs from jittered centres");
    tsw->add_option("--k", ts.k);
    tsw->add_option("--p", ts.p);
    tsw->add_option("--count", ts.count);
    tsw->add_option("--jobs", ts.jobs, "worker threads");
    tsw->add_option("--s-end", ts.s_end);
    tsw->add_option("--eps", ts.eps);
    tsw->add_option("--seed", ts.seed);
    tsw->callback([&] { code = cmd_toda_sweep(ctx, ts); });

    auto* pde = app.add_subcommand("pde", "self-similar equation");
    pde->require_subcommand(1);

    PdeRunArgs pr;
    auto* prun = pde->add_subcommand("run", "multisoliton run with modulation fits");
    prun->add_option("--config", pr.config)->required()->check(CLI::ExistingFile);
    auto* seed_opt = prun->add_option("--seed", pr.seed, "overrides [initial] seed");
    prun->callback([&] {
        pr.has_seed = seed_opt->count() > 0;
        code = cmd_pde_run(ctx, pr);
    });

    VerifyRhsArgs vr;
    auto* pver = pde->add_subcommand("verify-rhs", "projected interaction vs the Toda couplings");
    pver->add_option("--k", vr.k);
    pver->add_option("--p", vr.p);
    pver->add_option("--gap", vr.gap);
    pver->add_option("--theta", vr.theta)->delimiter(',');
    pver->add_option("--n", vr.n);
    pver->add_option("--xi", vr.xi, "line half-width (0: automatic)");
    pver->callback([&] { code = cmd_pde_verify_rhs(ctx, vr); });

    auto* surf = app.add_subcommand("surface", "physical-space blow-up surface");
    surf->require_subcommand(1);
    SurfaceScanArgs ss;
    auto* sscan = surf->add_subcommand("scan", "blow-up curve of odd data");
    sscan->add_option("--config", ss.config)->required()->check(CLI::ExistingFile);
    sscan->callback([&] { code = cmd_surface_scan(ctx, ss); });

    app.parse_complete_callback([&] {
        if (!out.empty())
            ctx.out_root = out;
        else if (const char* env = std::getenv("CWAVE_OUTPUT_ROOT"); env && *env)
            ctx.out_root = env;
        else
            ctx.out_root = "cwave_runs";
        set_threads(ctx.threads);
        set_default_exec(serial ? Exec::serial : Exec::parallel);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? 0 : usage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return usage;
    } catch (const PdeError& e) {
        std::cerr << "pde abort: " << e.what() << "\n";
        return aborted;
    } catch (const TodaError& e) {
        std::cerr << "toda abort: " << e.what() << "\n";
        return aborted;
    } catch (const SurfaceError& e) {
        std::cerr << "surface abort: " << e.what() << "\n";
        return aborted;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return aborted;
    }
    return code;
}
