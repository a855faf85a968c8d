#include "blpp/environment.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "blpp/random.hpp"

namespace blpp {

void GridSpec::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta) || !std::isfinite(x0))
        throw ParameterError("grid delta must be positive and finite");
    if (num_cells < 1)
        throw ParameterError("grid needs at least one cell");
    if (anchor_index < 0 || anchor_index > num_cells)
        throw ParameterError("anchor index outside grid");
}

Environment Environment::generate(uint64_t seed, int line_min, int line_max,
                                  const GridSpec& grid) {
    grid.validate();
    if (line_min > line_max)
        throw ParameterError("line_min must not exceed line_max");

    Environment env;
    env.grid_ = grid;
    env.line_min_ = line_min;
    env.line_max_ = line_max;
    env.seed_ = seed;
    env.generated_ = true;

    const int points = grid.size();
    const int lines = line_max - line_min + 1;
    env.values_.assign(static_cast<size_t>(lines) * points, 0.0);

    const double step_sd = std::sqrt(grid.delta);
    const int64_t base_cell = std::llround(grid.x0 / grid.delta);

    for (int line = line_min; line <= line_max; ++line) {
        double* row = env.values_.data() +
                      static_cast<size_t>(line - line_min) * points;
        // Increment over cell c lives between grid points c and c+1.
        std::vector<double> inc(static_cast<size_t>(grid.num_cells));
        for (int c = 0; c < grid.num_cells; ++c)
            inc[c] = step_sd * gaussian_increment(seed, line, base_cell + c);
        row[grid.anchor_index] = 0.0;
        for (int g = grid.anchor_index + 1; g <= grid.num_cells; ++g)
            row[g] = row[g - 1] + inc[g - 1];
        for (int g = grid.anchor_index - 1; g >= 0; --g)
            row[g] = row[g + 1] - inc[g];
    }
    return env;
}

Environment Environment::from_function(int line_min, int line_max, const GridSpec& grid,
                                       const std::function<double(int, double)>& fn) {
    grid.validate();
    if (line_min > line_max)
        throw ParameterError("line_min must not exceed line_max");

    Environment env;
    env.grid_ = grid;
    env.line_min_ = line_min;
    env.line_max_ = line_max;
    env.generated_ = false;

    const int points = grid.size();
    env.values_.reserve(static_cast<size_t>(line_max - line_min + 1) * points);
    for (int line = line_min; line <= line_max; ++line)
        for (int g = 0; g < points; ++g)
            env.values_.push_back(fn(line, grid.position(g)));
    return env;
}

Environment Environment::from_table(int line_min, int line_max, const GridSpec& grid,
                                    std::vector<std::vector<double>> values) {
    grid.validate();
    if (line_min > line_max)
        throw ParameterError("line_min must not exceed line_max");
    const size_t lines = static_cast<size_t>(line_max - line_min + 1);
    if (values.size() != lines)
        throw ParameterError("table has wrong number of lines");

    Environment env;
    env.grid_ = grid;
    env.line_min_ = line_min;
    env.line_max_ = line_max;
    env.generated_ = false;
    env.values_.reserve(lines * grid.size());
    for (const auto& rowvals : values) {
        if (rowvals.size() != static_cast<size_t>(grid.size()))
            throw ParameterError("table row has wrong number of grid points");
        env.values_.insert(env.values_.end(), rowvals.begin(), rowvals.end());
    }
    return env;
}

Environment Environment::rotated() const {
    GridSpec g;
    g.delta = grid_.delta;
    g.num_cells = grid_.num_cells;
    g.x0 = -(grid_.x0 + grid_.num_cells * grid_.delta);
    g.anchor_index = grid_.num_cells - grid_.anchor_index;

    Environment env;
    env.grid_ = g;
    env.line_min_ = -line_max_;
    env.line_max_ = -line_min_;
    env.generated_ = false;

    const int points = grid_.size();
    env.values_.resize(values_.size());
    for (int line = env.line_min_; line <= env.line_max_; ++line) {
        const double* src = row(-line);
        double* dst = env.values_.data() +
                      static_cast<size_t>(line - env.line_min_) * points;
        for (int gi = 0; gi < points; ++gi)
            dst[gi] = -src[points - 1 - gi];
    }
    return env;
}

namespace {
constexpr char kMagic[8] = {'B', 'L', 'P', 'P', 'E', 'N', 'V', '1'};

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParameterError("truncated environment dump");
    return v;
}
} // namespace

void Environment::dump(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    put<uint32_t>(out, 1); // format version
    put<uint8_t>(out, generated_ ? 1 : 0);
    put<uint64_t>(out, seed_);
    put<int64_t>(out, line_min_);
    put<int64_t>(out, line_max_);
    put<double>(out, grid_.x0);
    put<double>(out, grid_.delta);
    put<int64_t>(out, grid_.num_cells);
    put<int64_t>(out, grid_.anchor_index);
    out.write(reinterpret_cast<const char*>(values_.data()),
              static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

Environment Environment::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParameterError("not an environment dump");
    const uint32_t version = get<uint32_t>(in);
    if (version != 1)
        throw ParameterError("unsupported environment dump version");

    Environment env;
    env.generated_ = get<uint8_t>(in) != 0;
    env.seed_ = get<uint64_t>(in);
    env.line_min_ = static_cast<int>(get<int64_t>(in));
    env.line_max_ = static_cast<int>(get<int64_t>(in));
    env.grid_.x0 = get<double>(in);
    env.grid_.delta = get<double>(in);
    env.grid_.num_cells = static_cast<int>(get<int64_t>(in));
    env.grid_.anchor_index = static_cast<int>(get<int64_t>(in));
    env.grid_.validate();
    if (env.line_min_ > env.line_max_)
        throw ParameterError("corrupt environment dump");

    const size_t count = static_cast<size_t>(env.line_max_ - env.line_min_ + 1) *
                         env.grid_.size();
    env.values_.resize(count);
    in.read(reinterpret_cast<char*>(env.values_.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw ParameterError("truncated environment dump");
    return env;
}

} // namespace blpp
