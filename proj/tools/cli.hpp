#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace warpgeom::cli {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kUsage = 2, kComputation = 3 };

/// Everything a run needs, after flags, config file and environment are merged.
struct RunConfig {
    std::string subcommand;

    int dim = 2;
    std::string warp = "r";

    std::string surface;  // builtin name; empty when a mesh file is given
    std::map<std::string, double> surface_params;
    std::filesystem::path mesh_path;
    std::string mesh_format = "auto";
    std::vector<double> pole{0.0, 0.0, 0.0};
    int nu = 128, nv = 128;

    std::optional<std::string> grid;  // "a:b:n"
    std::optional<std::string> capacity;  // "rho:R", model subcommand
    std::optional<double> exit_R;         // model subcommand
    std::optional<double> rho, R, t, R0;
    std::optional<std::string> tone_grid;

    double atol = 1e-10, rtol = 1e-10;
    double solver_tol = 1e-10;
    std::filesystem::path outdir = ".";
    std::string run_name;
    bool write = true;
    bool strict = false;
    int threads = 0;
};

/// Parses argv and executes the subcommand. Human-readable lines go to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace warpgeom::cli
