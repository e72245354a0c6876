#include "grushin/geometry.hpp"

#include "grushin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace grushin {

double y_length(YTopology t) { return t == YTopology::Torus ? 2 * std::numbers::pi : std::numbers::pi; }

namespace {

double wrap(double y, double period) {
    double r = std::fmod(y, period);
    return r < 0 ? r + period : r;
}

bool in_arc(double y, std::pair<double, double> W, YTopology topo) {
    if (topo == YTopology::Interval) return y >= W.first && y <= W.second;
    double L = y_length(topo);
    double w = W.second - W.first;
    if (w >= L) return true;
    return wrap(y - W.first, L) <= w;
}

} // namespace

Path::Path(std::vector<double> xs, YTopology topo) : xs_(std::move(xs)), topo_(topo) {
    std::size_t need = topo == YTopology::Torus ? 1 : 2;
    if (xs_.size() < need) throw InvalidArgument("path needs samples");
}

Path Path::constant(double x, YTopology topo, int samples) {
    return Path(std::vector<double>(samples, x), topo);
}

double Path::y_of(int i) const {
    int n = static_cast<int>(xs_.size());
    double L = y_length(topo_);
    if (topo_ == YTopology::Torus) return wrap(L * i / n + offset_, L);
    return L * i / (n - 1);
}

double Path::operator()(double y) const {
    int n = static_cast<int>(xs_.size());
    double L = y_length(topo_);
    if (topo_ == YTopology::Torus) {
        double s = wrap(y - offset_, L) / L * n;
        int i = static_cast<int>(std::floor(s));
        double t = s - i;
        i %= n;
        return (1 - t) * xs_[i] + t * xs_[(i + 1) % n];
    }
    if (n == 1) return xs_[0];
    double s = std::clamp(y, 0.0, L) / L * (n - 1);
    int i = std::min(static_cast<int>(std::floor(s)), n - 2);
    double t = s - i;
    return (1 - t) * xs_[i] + t * xs_[i + 1];
}

double Path::max() const { return *std::max_element(xs_.begin(), xs_.end()); }
double Path::min() const { return *std::min_element(xs_.begin(), xs_.end()); }

Path Path::shifted(double dy) const {
    Path p = *this;
    if (topo_ == YTopology::Torus) p.offset_ = wrap(offset_ + dy, y_length(topo_));
    return p;
}

std::size_t Raster::count() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }

ControlRegion ControlRegion::band(Path g1, Path g2, double L_minus, double L_plus) {
    ControlRegion r;
    r.kind_ = Kind::Band;
    r.topo_ = g1.topology();
    if (g2.topology() != r.topo_) throw InvalidArgument("band paths must share the y topology");
    r.Lm_ = L_minus;
    r.Lp_ = L_plus;
    // the difference of two piecewise-linear paths is extremal at a vertex of either
    std::vector<double> ys;
    for (int i = 0; i < static_cast<int>(g1.xs().size()); ++i) ys.push_back(g1.y_of(i));
    for (int i = 0; i < static_cast<int>(g2.xs().size()); ++i) ys.push_back(g2.y_of(i));
    double gap = std::numeric_limits<double>::infinity();
    for (double y : ys) gap = std::min(gap, g2(y) - g1(y));
    if (!(gap > 0)) throw InvalidArgument("band paths must satisfy gamma1 < gamma2");
    if (!(g1.min() > -L_minus) || !(g2.max() < L_plus))
        throw InvalidArgument("band paths must map into the open interval");
    r.g1_ = std::move(g1);
    r.g2_ = std::move(g2);
    return r;
}

ControlRegion ControlRegion::rect_complement(double a, std::pair<double, double> W0, double L_minus,
                                             double L_plus, YTopology topo) {
    if (!(W0.second > W0.first)) throw InvalidArgument("W0 must have nonempty interior");
    if (!(a > -L_minus && a < L_plus)) throw InvalidArgument("a must lie inside the interval");
    ControlRegion r;
    r.kind_ = Kind::RectComplement;
    r.topo_ = topo;
    r.Lm_ = L_minus;
    r.Lp_ = L_plus;
    r.a_ = a;
    r.W0_ = W0;
    return r;
}

ControlRegion ControlRegion::rects(std::vector<Rect> rs, double L_minus, double L_plus, YTopology topo) {
    for (const auto& q : rs)
        if (!(q.x1 > q.x0) || !(q.y1 > q.y0)) throw InvalidArgument("degenerate rectangle");
    ControlRegion r;
    r.kind_ = Kind::Rects;
    r.topo_ = topo;
    r.Lm_ = L_minus;
    r.Lp_ = L_plus;
    r.rects_ = std::move(rs);
    return r;
}

bool ControlRegion::contains(double x, double y) const {
    if (!(x > -Lm_ && x < Lp_)) return false;
    switch (kind_) {
    case Kind::Band:
        return g1_(y) < x && x < g2_(y);
    case Kind::RectComplement:
        return !(x >= a_ && in_arc(y, W0_, topo_));
    case Kind::Rects:
        for (const auto& q : rects_)
            if (x > q.x0 && x < q.x1 && y > q.y0 && y < q.y1) return true;
        return false;
    }
    return false;
}

Raster ControlRegion::rasterize(const Grid2D& g) const {
    Raster r{g, std::vector<std::uint8_t>(static_cast<std::size_t>(g.nx) * g.ny, 0)};
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) r.mask[g.index(i, j)] = contains(g.xc(i), g.yc(j)) ? 1 : 0;
    return r;
}

std::vector<double> ControlRegion::feature_ordinates() const {
    std::vector<double> ys;
    switch (kind_) {
    case Kind::Band:
        for (int i = 0; i < static_cast<int>(g1_.xs().size()); ++i) ys.push_back(g1_.y_of(i));
        for (int i = 0; i < static_cast<int>(g2_.xs().size()); ++i) ys.push_back(g2_.y_of(i));
        break;
    case Kind::RectComplement:
        ys = {W0_.first, W0_.second, 0.5 * (W0_.first + W0_.second)};
        break;
    case Kind::Rects:
        for (const auto& q : rects_) {
            ys.push_back(q.y0);
            ys.push_back(q.y1);
        }
        break;
    }
    return ys;
}

ControlRegion ControlRegion::rotated(double dy) const {
    ControlRegion r = *this;
    double L = y_length(topo_);
    switch (kind_) {
    case Kind::Band:
        r.g1_ = g1_.shifted(dy);
        r.g2_ = g2_.shifted(dy);
        break;
    case Kind::RectComplement:
        r.W0_ = {W0_.first + dy, W0_.second + dy};
        break;
    case Kind::Rects:
        for (auto& q : r.rects_) {
            double s = wrap(q.y0 + dy, L) - q.y0;
            q.y0 += s;
            q.y1 += s;
        }
        break;
    }
    return r;
}

TimeBounds minimal_time(const DegeneracyProfile& p, const ControlRegion& r) {
    if (r.kind() != ControlRegion::Kind::Band) throw InvalidArgument("minimal_time needs a band region");
    if (!(p.min_dq() > 0)) throw HypothesisViolation("min q' <= 0");
    // a- = -max(gamma2^-), a+ = max(gamma1^+)
    double a_minus = std::min(0.0, r.gamma2().min());
    double a_plus = std::max(0.0, r.gamma1().max());
    double t = std::max(agmon_distance(p, a_minus), agmon_distance(p, a_plus)) / p.q_prime_0();
    TimeBounds b;
    b.lower = b.upper = t;
    b.critical = t;
    b.seg_a = a_minus;
    b.seg_b = a_plus;
    return b;
}

TimeBounds lower_bound_time(const DegeneracyProfile& p, const ControlRegion& r, int probe_count, int nx) {
    Grid2D g;
    g.x0 = -r.L_minus();
    g.x1 = r.L_plus();
    g.nx = nx;
    g.ny = std::max(512, probe_count);
    g.topo = r.topology();
    Raster ras = r.rasterize(g);
    const double Y = y_length(g.topo);

    std::vector<double> probes;
    for (int k = 0; k < probe_count; ++k) probes.push_back((k + 0.5) * Y / probe_count);
    for (double y : r.feature_ordinates()) {
        probes.push_back(y);
        probes.push_back(y - g.dy());
        probes.push_back(y + g.dy());
    }

    TimeBounds best;
    best.lower = 0.0;
    std::vector<std::uint8_t> clear(g.nx);
    for (double y0 : probes) {
        double yy = g.topo == YTopology::Torus ? wrap(y0, Y) : std::clamp(y0, 0.0, Y * (1 - 1e-15));
        int j = std::min(static_cast<int>(yy / g.dy()), g.ny - 1);
        // chessboard neighbourhood: the row and the two adjacent rows
        std::vector<int> rows{j};
        for (int dj : {-1, 1}) {
            int jj = j + dj;
            if (g.topo == YTopology::Torus) rows.push_back((jj + g.ny) % g.ny);
            else if (jj >= 0 && jj < g.ny) rows.push_back(jj);
        }
        for (int i = 0; i < g.nx; ++i) {
            bool c = true;
            for (int jj : rows) c = c && !ras.at(i, jj);
            clear[i] = c;
        }
        // run of clear cells around the origin
        int iz = static_cast<int>(std::floor((0.0 - g.x0) / g.dx()));
        iz = std::clamp(iz, 0, g.nx - 1);
        if (!clear[iz]) continue;
        int lo = iz, hi = iz;
        while (lo > 0 && clear[lo - 1]) --lo;
        while (hi < g.nx - 1 && clear[hi + 1]) ++hi;
        // half-cell safety margin: endpoints at the centres of the extreme clear cells
        double a = lo == 0 ? -r.L_minus() : g.xc(lo);
        double b = hi == g.nx - 1 ? r.L_plus() : g.xc(hi);
        if (!(a < 0 && b > 0)) continue;
        double da = agmon_distance_tilde(p, a).finite_or();
        double db = agmon_distance_tilde(p, b).finite_or();
        double v = std::min(da, db) / p.q_prime_0();
        if (v > best.lower) {
            best.lower = v;
            best.seg_a = a;
            best.seg_b = b;
            best.y0 = yy;
        }
    }
    best.upper = std::numeric_limits<double>::infinity();
    return best;
}

CutoffField CutoffField::complement() const {
    CutoffField c = *this;
    for (auto& v : c.values) v = 1.0 - v;
    return c;
}

namespace {

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    double vx = bx - ax, vy = by - ay;
    double L2 = vx * vx + vy * vy;
    double t = L2 > 0 ? std::clamp(((px - ax) * vx + (py - ay) * vy) / L2, 0.0, 1.0) : 0.0;
    double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return std::hypot(dx, dy);
}

// Euclidean distance from (x,y) to the graph of a path, with periodic copies on the torus
double distance_to_graph(const Path& path, YTopology topo, double x, double y, int samples) {
    double Y = y_length(topo);
    double best = std::numeric_limits<double>::infinity();
    int div = topo == YTopology::Torus ? samples : samples - 1;
    std::vector<double> shifts{0.0};
    if (topo == YTopology::Torus) shifts = {-Y, 0.0, Y};
    for (double s : shifts) {
        for (int k = 0; k < div; ++k) {
            double y0 = Y * k / div, y1 = Y * (k + 1) / div;
            best = std::min(best, point_segment_distance(x, y, path(y0), y0 + s, path(y1), y1 + s));
        }
    }
    return best;
}

} // namespace

CutoffField build_cutoff(const ControlRegion& r, double epsilon, const Grid2D& grid) {
    if (r.kind() != ControlRegion::Kind::Band) throw InvalidArgument("build_cutoff needs a band region");
    if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
    const Path& g1 = r.gamma1();
    const Path& g2 = r.gamma2();
    const YTopology topo = r.topology();
    const double Y = y_length(topo);

    const int S = 256;
    double width = std::numeric_limits<double>::infinity();
    double clearance = std::numeric_limits<double>::infinity();
    for (int k = 0; k < S; ++k) {
        double y = Y * k / S;
        width = std::min(width, g2(y) - g1(y));
        double xm = 0.5 * (g1(y) + g2(y));
        clearance = std::min(clearance, distance_to_graph(g1, topo, xm, y, S));
        clearance = std::min(clearance, distance_to_graph(g2, topo, xm, y, S));
    }
    if (!(epsilon < 0.5 * width) || !(epsilon < clearance)) {
        std::ostringstream os;
        os << "epsilon=" << epsilon << " vs half width " << 0.5 * width << ", clearance " << clearance;
        throw EpsilonTooLarge(os.str());
    }

    CutoffField f;
    f.grid = grid;
    const int nx = grid.nx, ny = grid.ny;
    const double dx = grid.dx(), dy = grid.dy();
    std::vector<std::uint8_t> omega_side(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        double y = grid.yc(j);
        double xm = 0.5 * (g1(y) + g2(y));
        for (int i = 0; i < nx; ++i) omega_side[grid.index(i, j)] = grid.xc(i) < xm ? 1 : 0;
    }

    // bump of radius epsilon/2
    const double rad = 0.5 * epsilon;
    const int kx = static_cast<int>(std::floor(rad / dx));
    const int ky = static_cast<int>(std::floor(rad / dy));
    struct Tap {
        int di, dj;
        double w;
    };
    std::vector<Tap> taps;
    double wsum = 0;
    for (int dj = -ky; dj <= ky; ++dj)
        for (int di = -kx; di <= kx; ++di) {
            double s2 = (di * dx * di * dx + dj * dy * dj * dy) / (rad * rad);
            if (s2 >= 1.0) continue;
            double w = std::exp(-1.0 / (1.0 - s2));
            taps.push_back({di, dj, w});
        }
    for (const auto& t : taps) wsum += t.w;

    f.values.assign(omega_side.size(), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double acc = 0;
            for (const auto& t : taps) {
                int ii = i + t.di, jj = j + t.dj;
                double ind;
                if (ii < 0) ind = 1.0;
                else if (ii >= nx) ind = 0.0;
                else {
                    if (topo == YTopology::Torus) jj = (jj % ny + ny) % ny;
                    else jj = std::clamp(jj, 0, ny - 1);
                    ind = omega_side[grid.index(ii, jj)];
                }
                acc += t.w * ind;
            }
            // same summation order as wsum, so fully covered cells give exactly 1
            f.values[grid.index(i, j)] = acc == wsum ? 1.0 : acc / wsum;
        }

    f.gradient_support.assign(f.values.size(), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double c = f.values[grid.index(i, j)];
            bool varies = false;
            for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= nx) continue;
                if (topo == YTopology::Torus) jj = (jj + ny) % ny;
                else if (jj < 0 || jj >= ny) continue;
                if (f.values[grid.index(ii, jj)] != c) varies = true;
            }
            f.gradient_support[grid.index(i, j)] = varies ? 1 : 0;
        }
    return f;
}

bool separates_boundaries(const Polyline& path, const Grid2D& grid) {
    if (path.size() < 2) return false;
    const int nx = grid.nx, ny = grid.ny;
    const double dx = grid.dx(), dy = grid.dy();
    const double Y = y_length(grid.topo);
    const bool torus = grid.topo == YTopology::Torus;
    std::vector<std::uint8_t> blocked(static_cast<std::size_t>(nx) * ny, 0);

    auto mark = [&](double x, double y) {
        int i = static_cast<int>(std::floor((x - grid.x0) / dx));
        double yy = torus ? wrap(y, Y) : y;
        int j = static_cast<int>(std::floor(yy / dy));
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                int ii = i + di, jj = j + dj;
                if (ii < 0 || ii >= nx) continue;
                if (torus) jj = (jj % ny + ny) % ny;
                else if (jj < 0 || jj >= ny) continue;
                blocked[grid.index(ii, jj)] = 1;
            }
    };

    const double step = 0.25 * std::min(dx, dy);
    const std::size_t n = path.size();
    // on the torus the polyline is closed; on (0,π) it runs wall to wall
    const std::size_t segs = torus ? n : n - 1;
    for (std::size_t k = 0; k < segs; ++k) {
        auto [xa, ya] = path[k];
        auto [xb, yb] = path[(k + 1) % n];
        if (torus) yb += Y * std::round((ya - yb) / Y);
        double len = std::hypot(xb - xa, yb - ya);
        int m = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int s = 0; s <= m; ++s) {
            double t = static_cast<double>(s) / m;
            mark(xa + t * (xb - xa), ya + t * (yb - ya));
        }
    }

    std::vector<std::uint8_t> seen(blocked.size(), 0);
    std::queue<std::pair<int, int>> q;
    for (int j = 0; j < ny; ++j)
        if (!blocked[grid.index(0, j)]) {
            seen[grid.index(0, j)] = 1;
            q.push({0, j});
        }
    while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        if (i == nx - 1) return false;
        for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            int ii = i + di, jj = j + dj;
            if (ii < 0 || ii >= nx) continue;
            if (torus) jj = (jj + ny) % ny;
            else if (jj < 0 || jj >= ny) continue;
            auto id = grid.index(ii, jj);
            if (blocked[id] || seen[id]) continue;
            seen[id] = 1;
            q.push({ii, jj});
        }
    }
    return true;
}

Polyline mid_path(const ControlRegion& band, int samples) {
    if (band.kind() != ControlRegion::Kind::Band) throw InvalidArgument("mid_path needs a band region");
    Polyline out;
    double Y = y_length(band.topology());
    bool torus = band.topology() == YTopology::Torus;
    int div = torus ? samples : samples - 1;
    for (int k = 0; k < samples; ++k) {
        double y = Y * k / div;
        out.push_back({0.5 * (band.gamma1()(y) + band.gamma2()(y)), y});
    }
    return out;
}

} // namespace grushin
