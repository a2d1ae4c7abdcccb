#pragma once

// Batch front end. `run` is the whole program minus process setup, so tests
// can drive it with in-memory streams.
//
// Exit codes: 0 every asserted property holds, 1 a property failed,
// 2 bad input (JSON, flags, paths, non-diffeomorphisms), 3 domain mismatch,
// 4 internal error.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jetflat/manifold_fn.hpp"

namespace jetflat::cli {

enum class OutputFormat { Json, Csv };

struct RunConfig {
    int grid_size = 4096;
    double tolerance = 1e-9;
    int truncation_degree = 8;
    std::uint64_t seed = 42;
    OutputFormat output_format = OutputFormat::Json;

    /// Throws ParseError unless grid_size >= 64 is a power of two and
    /// tolerance lies in (0, 1e-3].
    void validate() const;
    /// circle grid = grid_size, torus grid = max(16, grid_size / 16) per axis.
    [[nodiscard]] ScanOptions scan() const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailed = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitInternal = 4;

/// Allowed excess of an optimized path over the certified lower bound.
inline constexpr double kOptimizerTolerance = 1e-4;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jetflat::cli
