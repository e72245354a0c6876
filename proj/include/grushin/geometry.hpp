#pragma once

#include "grushin/profiles.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace grushin {

enum class YTopology { Torus, Interval };

double y_length(YTopology t);

// Piecewise-linear function y -> x, sampled uniformly over the y period
// (torus: [0,2π) wrapped, interval: [0,π] endpoints included).
class Path {
  public:
    Path() = default;
    Path(std::vector<double> xs, YTopology topo);
    static Path constant(double x, YTopology topo, int samples = 64);
    template <class F> static Path from_function(F f, YTopology topo, int samples = 256) {
        std::vector<double> xs(samples);
        int div = topo == YTopology::Torus ? samples : samples - 1;
        for (int i = 0; i < samples; ++i) xs[i] = f(y_length(topo) * i / div);
        return Path(std::move(xs), topo);
    }
    double operator()(double y) const;
    double y_of(int i) const;
    const std::vector<double>& xs() const { return xs_; }
    double max() const;
    double min() const;
    Path shifted(double dy) const;
    YTopology topology() const { return topo_; }

  private:
    std::vector<double> xs_;
    YTopology topo_ = YTopology::Torus;
    double offset_ = 0.0;
};

struct Grid2D {
    // cell-centred raster over [x0,x1] x [0, y_len)
    double x0 = -1, x1 = 1;
    int nx = 400;
    int ny = 512;
    YTopology topo = YTopology::Torus;
    double dx() const { return (x1 - x0) / nx; }
    double dy() const { return y_length(topo) / ny; }
    double xc(int i) const { return x0 + (i + 0.5) * dx(); }
    double yc(int j) const { return (j + 0.5) * dy(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

struct Raster {
    Grid2D grid;
    std::vector<std::uint8_t> mask;
    bool at(int i, int j) const { return mask[grid.index(i, j)] != 0; }
    std::size_t count() const;
};

class ControlRegion {
  public:
    enum class Kind { Band, RectComplement, Rects };
    struct Rect {
        double x0, x1, y0, y1;
    };

    static ControlRegion band(Path g1, Path g2, double L_minus, double L_plus);
    // complement of [a, L+) x W0
    static ControlRegion rect_complement(double a, std::pair<double, double> W0, double L_minus,
                                         double L_plus, YTopology topo = YTopology::Torus);
    static ControlRegion rects(std::vector<Rect> rs, double L_minus, double L_plus,
                               YTopology topo = YTopology::Torus);

    Kind kind() const { return kind_; }
    YTopology topology() const { return topo_; }
    double L_minus() const { return Lm_; }
    double L_plus() const { return Lp_; }
    const Path& gamma1() const { return g1_; }
    const Path& gamma2() const { return g2_; }
    double a() const { return a_; }
    std::pair<double, double> W0() const { return W0_; }
    const std::vector<Rect>& rect_list() const { return rects_; }

    bool contains(double x, double y) const;
    Raster rasterize(const Grid2D& g) const;
    // y-ordinates where the geometry has features (vertices, edges)
    std::vector<double> feature_ordinates() const;
    ControlRegion rotated(double dy) const;

  private:
    Kind kind_ = Kind::Band;
    YTopology topo_ = YTopology::Torus;
    double Lm_ = 1, Lp_ = 1;
    Path g1_, g2_;
    double a_ = 0;
    std::pair<double, double> W0_{0, 0};
    std::vector<Rect> rects_;
};

struct TimeBounds {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    std::optional<double> critical;
    // segment and line achieving the lower bound
    double seg_a = 0, seg_b = 0, y0 = 0;
};

TimeBounds minimal_time(const DegeneracyProfile& p, const ControlRegion& r);

TimeBounds lower_bound_time(const DegeneracyProfile& p, const ControlRegion& r, int probe_count,
                            int nx = 2000);

struct CutoffField {
    Grid2D grid;
    std::vector<double> values;
    std::vector<std::uint8_t> gradient_support;
    double at(int i, int j) const { return values[grid.index(i, j)]; }
    CutoffField complement() const;
};

CutoffField build_cutoff(const ControlRegion& r, double epsilon, const Grid2D& grid);

// closed polyline (x, y) points; y is taken modulo the period on the torus
using Polyline = std::vector<std::array<double, 2>>;

bool separates_boundaries(const Polyline& path, const Grid2D& grid);

Polyline mid_path(const ControlRegion& band, int samples = 512);

} // namespace grushin
