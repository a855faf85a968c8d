#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "blpp/errors.hpp"

namespace blpp {

// Uniform spatial grid shared by every curve of an environment. Grid index g
// refers to position x0 + g*delta for g in [0, num_cells]; anchor_index is
// the index at which every curve is pinned to value 0.
struct GridSpec {
    double x0 = 0.0;
    double delta = 1.0;
    int num_cells = 1;
    int anchor_index = 0;

    void validate() const;
    double position(int g) const { return x0 + g * delta; }
    int size() const { return num_cells + 1; } // number of grid points
};

// Discretized field B: one cumulative curve per line over the grid. Immutable
// after construction; safe to share across threads.
class Environment {
public:
    // Random environment: increment over cell c of line k is
    // sqrt(delta) * N(0,1), drawn from the counter stream keyed by
    // (seed, k, global cell index). The global cell index is
    // round(x0/delta) + c, so windows that differ by whole cells share
    // increments.
    static Environment generate(uint64_t seed, int line_min, int line_max,
                                const GridSpec& grid);

    // Deterministic injection: values are fn(line, position) verbatim, with
    // no pinning adjustment. Part of the public surface for oracle tests.
    static Environment from_function(int line_min, int line_max, const GridSpec& grid,
                                     const std::function<double(int, double)>& fn);

    // Injection with an explicit table, values[line - line_min][g].
    static Environment from_table(int line_min, int line_max, const GridSpec& grid,
                                  std::vector<std::vector<double>> values);

    double value(int line, int g) const {
        check_line(line);
        check_index(g);
        return values_[static_cast<size_t>(line - line_min_) * grid_.size() + g];
    }

    int line_min() const { return line_min_; }
    int line_max() const { return line_max_; }
    const GridSpec& grid() const { return grid_; }
    bool generated() const { return generated_; }
    uint64_t seed() const { return seed_; }

    // Pointer to the row of line `line`; rows have grid().size() entries.
    const double* row(int line) const {
        check_line(line);
        return values_.data() + static_cast<size_t>(line - line_min_) * grid_.size();
    }

    // Energy-preserving half turn: the returned environment R satisfies
    // R(k, z) = -B(-k, -z) up to per-line pinning constants, so every
    // staircase maps to a reversed staircase of identical energy. The model's
    // half-circle symmetry B(k,z) -> B(-k,-z) holds in law; the extra sign
    // makes it a deterministic identity for increments.
    Environment rotated() const;

    // Versioned binary dump; round trips are bit-exact.
    void dump(std::ostream& out) const;
    static Environment load(std::istream& in);

private:
    Environment() = default;
    void check_line(int line) const {
        if (line < line_min_ || line > line_max_)
            throw ParameterError("line index out of range");
    }
    void check_index(int g) const {
        if (g < 0 || g > grid_.num_cells)
            throw ParameterError("grid index out of range");
    }

    GridSpec grid_;
    int line_min_ = 0;
    int line_max_ = 0;
    uint64_t seed_ = 0;
    bool generated_ = false;
    std::vector<double> values_; // line-major, (line_max-line_min+1) x grid.size()
};

} // namespace blpp
