#pragma once

// Benchmark harness: experiment grids over the lattice tensors with CSV
// output. The commands live in the library (not tools/main.cpp) so tests
// can drive them in-process and compare bytes.

#include "ttlat/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ttlat::cli {

struct Options {
    std::string command;
    std::vector<Int> n;     // grid dimensions; per-command default when empty
    std::vector<Index> d;   // grid orders; per-command default when empty
    std::string f = "identity";
    std::string mode = "H"; // dominant/minimal: H or Z
    double tau = 10.0;
    bool tau_given = false; // explicit --tau disables the small-case exceptions
    double tol = 1e-14;
    std::uint64_t seed = 0;
    int guesses = 1000;   // prescreening starts
    int pre_iters = 100;  // prescreening iterations per start
    int trials = 50;      // dominant Z-mode repeated starts
    int max_iters = 500;  // GEAP iteration cap (minimal/generalized)
    double eps = 1e-14;   // cross truncation
    std::string out;      // CSV/text destination; empty = stdout
    std::string cache_dir; // join tensor cache; empty = rebuild every time
    std::string trace;    // per-iteration CSV of the reported solve (single cell)
};

/// Deterministic per-cell seed so a cell's rows and cache artifacts do not
/// depend on which grid invoked them.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t d);

// Each command writes its rows to `os` and returns a process exit code.
int cmd_storage(const Options& o, std::ostream& os);
int cmd_ranks(const Options& o, std::ostream& os);
int cmd_dominant(const Options& o, std::ostream& os);
int cmd_minimal(const Options& o, std::ostream& os);
int cmd_generalized(const Options& o, std::ostream& os);
int cmd_bound(const Options& o, std::ostream& os);
int cmd_selftest(const Options& o, std::ostream& os);

/// Parse command-line arguments (without argv[0]) and dispatch. Returns 0
/// on success, 1 on failed checks (selftest, bound consistency), 2 on bad
/// usage, 3 on runtime errors.
int run(const std::vector<std::string>& args);

} // namespace ttlat::cli
