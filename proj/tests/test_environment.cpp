#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blpp/environment.hpp"
#include "blpp/lpp.hpp"
#include "blpp/random.hpp"
#include "blpp/stats.hpp"

using namespace blpp;

namespace {
Environment zero_env(int lines, const GridSpec& grid) {
    return Environment::from_function(0, lines, grid, [](int, double) { return 0.0; });
}
Environment identity_env(int lines, const GridSpec& grid) {
    return Environment::from_function(0, lines, grid, [](int, double x) { return x; });
}
} // namespace

TEST_CASE("grid validation") {
    const GridSpec zero_delta{0.0, 0.0, 4, 0};
    const GridSpec no_cells{0.0, 1.0, 0, 0};
    const GridSpec bad_anchor{0.0, 1.0, 4, 5};
    CHECK_THROWS_AS(zero_delta.validate(), ParameterError);
    CHECK_THROWS_AS(no_cells.validate(), ParameterError);
    CHECK_THROWS_AS(bad_anchor.validate(), ParameterError);
    GridSpec ok{1.5, 0.25, 4, 2};
    ok.validate();
    CHECK(ok.position(2) == doctest::Approx(2.0));
}

TEST_CASE("pinning and determinism") {
    GridSpec grid{0.0, 0.25, 4, 0};
    const Environment a = Environment::generate(7, 0, 0, grid);
    CHECK(a.value(0, 0) == 0.0);
    const Environment b = Environment::generate(7, 0, 0, grid);
    for (int g = 0; g <= 4; ++g) CHECK(a.value(0, g) == b.value(0, g));
}

TEST_CASE("counter keying leaves other lines unchanged") {
    GridSpec grid{0.0, 0.25, 4, 0};
    const Environment narrow = Environment::generate(7, 0, 0, grid);
    const Environment wide = Environment::generate(7, 0, 1, grid);
    for (int g = 0; g <= 4; ++g) CHECK(narrow.value(0, g) == wide.value(0, g));
}

TEST_CASE("window extension reproduces values") {
    GridSpec grid{0.0, 0.5, 20, 0};
    const Environment small = Environment::generate(42, 0, 2, grid);
    GridSpec longer{0.0, 0.5, 30, 0};
    const Environment ext = Environment::generate(42, 0, 2, longer);
    for (int l = 0; l <= 2; ++l)
        for (int g = 0; g <= 20; ++g) CHECK(small.value(l, g) == ext.value(l, g));

    // Extending to the left by whole cells, anchor following the same
    // spatial point, reproduces the overlap exactly.
    GridSpec left{-2.0, 0.5, 24, 4};
    const Environment lext = Environment::generate(42, 0, 2, left);
    for (int l = 0; l <= 2; ++l)
        for (int g = 0; g <= 20; ++g) CHECK(small.value(l, g) == lext.value(l, g + 4));
}

TEST_CASE("increment variance matches delta") {
    GridSpec grid{0.0, 0.01, 100000, 0};
    const Environment env = Environment::generate(7, 0, 0, grid);
    std::vector<double> inc(100000);
    for (int g = 0; g < 100000; ++g) inc[g] = env.value(0, g + 1) - env.value(0, g);
    const double sd = sample_sd(inc);
    const double var = sd * sd;
    // Chi-square: se(var) = delta * sqrt(2/(n-1)).
    const double se = 0.01 * std::sqrt(2.0 / 99999.0);
    CHECK(std::abs(var - 0.01) < 3 * se);
}

TEST_CASE("increments pass a KS test against the Gaussian") {
    const int n = 1000000;
    GridSpec grid{0.0, 0.25, n, 0};
    const Environment env = Environment::generate(123, 0, 0, grid);
    std::vector<double> z(n);
    for (int g = 0; g < n; ++g)
        z[g] = (env.value(0, g + 1) - env.value(0, g)) / 0.5;
    std::sort(z.begin(), z.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max(d, std::abs(f - (i + 1.0) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    // Critical value at significance 1e-3: sqrt(-ln(alpha/2)/2) / sqrt(n).
    const double crit = std::sqrt(-std::log(0.0005) / 2.0) / std::sqrt(double(n));
    CHECK(d < crit);
}

TEST_CASE("value re-derivation from the counter stream") {
    GridSpec grid{0.0, 0.25, 8, 0};
    const Environment env = Environment::generate(7, 0, 0, grid);
    double acc = 0.0;
    const double sd = std::sqrt(0.25);
    for (int c = 0; c < 3; ++c) acc += sd * gaussian_increment(7, 0, c);
    CHECK(env.value(0, 3) == doctest::Approx(acc).epsilon(1e-15));
}

TEST_CASE("value range checks") {
    GridSpec grid{0.0, 1.0, 4, 0};
    const Environment env = Environment::generate(1, 0, 1, grid);
    CHECK_THROWS_AS(env.value(2, 0), ParameterError);
    CHECK_THROWS_AS(env.value(0, 5), ParameterError);
}

TEST_CASE("injection mode stores prescribed values") {
    GridSpec grid{0.5, 0.25, 8, 0};
    const Environment env = identity_env(1, grid);
    for (int g = 0; g <= 8; ++g)
        CHECK(env.value(0, g) == doctest::Approx(0.5 + 0.25 * g));
    const Environment z = zero_env(1, grid);
    CHECK(z.value(1, 5) == 0.0);
}

TEST_CASE("dump and load round trip bit-exactly") {
    GridSpec grid{-1.25, 0.3, 17, 5};
    const Environment env = Environment::generate(99, -2, 3, grid);
    std::stringstream buf;
    env.dump(buf);
    const Environment back = Environment::load(buf);
    CHECK(back.line_min() == -2);
    CHECK(back.line_max() == 3);
    CHECK(back.grid().x0 == grid.x0);
    CHECK(back.grid().delta == grid.delta);
    CHECK(back.seed() == 99);
    for (int l = -2; l <= 3; ++l)
        for (int g = 0; g <= 17; ++g) CHECK(env.value(l, g) == back.value(l, g));

    std::stringstream bad("not an environment");
    CHECK_THROWS_AS(Environment::load(bad), ParameterError);
}

TEST_CASE("rotation preserves staircase energies") {
    GridSpec grid{0.0, 0.5, 10, 0};
    const Environment env = Environment::generate(5, 0, 3, grid);
    const Environment rot = env.rotated();

    const Staircase s = geodesic(env, {1, 0}, {8, 3}, TieRule::leftmost);
    // Image staircase: mirrored positions and lines, traversed in reverse.
    // The entry of the original on line m is the image's exit on line -m.
    Staircase image;
    image.start = {10 - s.end.g, -s.end.line};
    image.end = {10 - s.start.g, -s.start.line};
    image.jumps.resize(s.jumps.size());
    const int j = s.end.line;
    for (int m = -j + 1; m <= 0; ++m)
        image.jumps[static_cast<size_t>(m + j - 1)] = 10 - s.exit(-m);
    const double e1 = staircase_energy(env, s);
    const double e2 = staircase_energy(rot, image);
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));

    // The half turn is an involution on the stored table.
    const Environment back = rot.rotated();
    for (int l = 0; l <= 3; ++l)
        for (int g = 0; g <= 10; ++g)
            CHECK(env.value(l, g) == doctest::Approx(back.value(l, g)).epsilon(1e-15));
}
