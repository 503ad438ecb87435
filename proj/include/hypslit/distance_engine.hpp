#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "hypslit/slit_domains.hpp"

namespace hypslit {

struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool valid() const { return x1 > x0 && y1 > y0 && std::isfinite(x0) && std::isfinite(x1) && std::isfinite(y0) && std::isfinite(y1); }
    bool contains(Point z) const { return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1; }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

struct GridSpec {
    double cellSize = 1e-9;        // absolute floor on cell size
    Rect window{};                 // empty window = choose automatically
    int connectivity = 16;         // 8 or 16
    double relResolution = 0.25;   // cell side <= relResolution * delta(centre)
    double floorFraction = 1.0 / 16;
    double columnAspect = 16.0;    // height/width cap of leaves deep inside a slit column
    std::size_t maxCells = 4'000'000;
};

inline void validate(const GridSpec& g) {
    if (!(g.cellSize > 0)) throw Error(ErrorKind::ConfigError, "cell size must be positive");
    if (g.connectivity != 8 && g.connectivity != 16) throw Error(ErrorKind::ConfigError, "connectivity must be 8 or 16");
    if (!(g.relResolution > 0) || !(g.floorFraction > 0)) throw Error(ErrorKind::ConfigError, "grid resolutions must be positive");
    if (!(g.columnAspect >= 1)) throw Error(ErrorKind::ConfigError, "column aspect must be at least 1");
}

struct BoundPair {
    double lo = 0;
    double hi = kInf;
    std::string loMethod = "none", hiMethod = "none";

    std::vector<std::string> methods() const { return {"lo:" + loMethod, "hi:" + hiMethod}; }
};

// ------------------------------------------------------------ line integrals

/// Integral of |dz| / delta over the segment [p, q].
inline double qh_segment_length(const SlitDomain& omega, Point p, Point q) {
    const double L = std::abs(q - p);
    if (L == 0) return 0;
    if (segment_hits_slit(omega, p, q)) throw Error(ErrorKind::CurveExitsDomain, "segment meets a slit");
    auto f = [&](double t) { return 1.0 / boundary_distance_raw(omega, p + t * (q - p)); };
    double err = 0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 15, 1e-11, &err);
    return v * L;
}

inline double qh_polyline_length(const SlitDomain& omega, const std::vector<Point>& pts) {
    double s = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) s += qh_segment_length(omega, pts[i - 1], pts[i]);
    return s;
}

/// (1/4 or 1/2) * int |dz|/delta <= hyperbolic length <= int |dz|/delta.
inline BoundPair hyperbolic_length_bounds(const SlitDomain& omega, const Curve& gamma, bool convex = false) {
    for (const auto& p : gamma.points)
        if (!omega.contains(p)) throw Error(ErrorKind::CurveExitsDomain, "curve sample lies on a slit");
    BoundPair b;
    b.hi = qh_polyline_length(omega, gamma.points);
    b.lo = (convex ? 0.5 : 0.25) * b.hi;
    b.loMethod = convex ? "qh-integral/2" : "qh-integral/4";
    b.hiMethod = "qh-integral";
    return b;
}

// -------------------------------------------------------------- quadtree grid

namespace detail {

struct Cell {
    double x0, y0, w, h;
    int child = -1;  // index of the first child
    int split = 0;   // 0 quad, 1 left/right halves, 2 bottom/top halves
    double size() const { return std::max(w, h); }
    double thickness() const { return std::min(w, h); }
    int kids() const { return split == 0 ? 4 : 2; }
    Point centre() const { return Point(x0 + 0.5 * w, y0 + 0.5 * h); }
};

inline double cell_gap(const Cell& a, const Cell& b) {
    return std::max({0.0, a.x0 - (b.x0 + b.w), b.x0 - (a.x0 + a.w), a.y0 - (b.y0 + b.h), b.y0 - (a.y0 + a.h)});
}

/// Horizontal distance between the nearest walls left and right of z.
inline double local_gap(const SlitDomain& omega, Point z) {
    double l = -kInf, r = kInf;
    for (const auto& s : omega.slits()) {
        if (s.top < z.imag()) continue;
        if (s.x <= z.real()) l = std::max(l, s.x);
        else r = std::min(r, s.x);
    }
    return r - l;
}

/// Smallest gap between consecutive slits reaching the cell's rows, over the
/// gaps that overlap the cell's x-range.
inline double cell_local_gap(const SlitDomain& omega, double x0, double x1, double y0) {
    double prev = -kInf, best = kInf;
    for (const auto& s : omega.slits()) {
        if (s.top < y0) continue;
        if (s.x > x0 && prev < x1) best = std::min(best, s.x - prev);
        prev = s.x;
    }
    return best;
}

/// True when no tip lies in the cell's rows and every slit ending below the
/// cell is farther than the nearest slit running through them: there the
/// boundary distance depends on x alone.
inline bool vertically_invariant(const SlitDomain& omega, const Cell& c) {
    const double x1 = c.x0 + c.w, y1 = c.y0 + c.h;
    double lowGap = kInf, prev = -kInf, reach = -kInf;
    bool any = false;
    auto far = [](double x, double l, double r) { return std::min(x - l, r - x); };
    for (const auto& s : omega.slits()) {
        if (s.top <= c.y0) {
            lowGap = std::min(lowGap, c.y0 - s.top);
            continue;
        }
        if (s.top < y1) return false;
        // farthest point of [x0, x1] from the through-slits seen so far
        if (any) {
            const double m = std::clamp(0.5 * (prev + s.x), c.x0, x1);
            if (prev < x1 && s.x > c.x0) reach = std::max(reach, far(m, prev, s.x));
        } else if (s.x > c.x0) {
            reach = std::max(reach, s.x - c.x0);
        }
        prev = s.x;
        any = true;
    }
    if (!any) return false;
    if (prev < x1) reach = std::max(reach, x1 - prev);
    return reach < lowGap;
}

inline double tip_distance(const SlitDomain& omega, Point z) {
    double d = kInf;
    for (const auto& s : omega.slits()) d = std::min(d, std::abs(z - Point(s.x, s.top)));
    return d;
}

}  // namespace detail

/// Adaptive quadtree over a window: cells shrink with the boundary distance
/// of their centre, down to a floor tied to the local slit spacing.
class QuadGrid {
public:
    QuadGrid(const SlitDomain& omega, const GridSpec& spec) : omega_(&omega), spec_(spec) {
        validate(spec);
        if (!spec.window.valid()) throw Error(ErrorKind::ConfigError, "grid window is empty");
        const Rect& W = spec.window;
        const double side = std::min(W.width(), W.height());
        const int nx = std::max(1, static_cast<int>(std::ceil(W.width() / side - 1e-9)));
        const int ny = std::max(1, static_cast<int>(std::ceil(W.height() / side - 1e-9)));
        const double cw = W.width() / nx, ch = W.height() / ny;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                roots_.push_back(static_cast<int>(cells_.size()));
                cells_.push_back({W.x0 + i * cw, W.y0 + j * ch, cw, ch});
            }
        std::vector<int> stack(roots_.rbegin(), roots_.rend());
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            if (const int how = split_kind(cells_[id]); how >= 0) {
                if (cells_.size() + 4 > spec.maxCells) throw Error(ErrorKind::ConfigError, "grid too fine for the window");
                const detail::Cell c = cells_[id];
                const int first = static_cast<int>(cells_.size());
                cells_[id].child = first;
                cells_[id].split = how;
                const double hw = 0.5 * c.w, hh = 0.5 * c.h;
                if (how == 0) {
                    cells_.push_back({c.x0, c.y0, hw, hh});
                    cells_.push_back({c.x0 + hw, c.y0, hw, hh});
                    cells_.push_back({c.x0, c.y0 + hh, hw, hh});
                    cells_.push_back({c.x0 + hw, c.y0 + hh, hw, hh});
                } else if (how == 1) {
                    cells_.push_back({c.x0, c.y0, hw, c.h});
                    cells_.push_back({c.x0 + hw, c.y0, hw, c.h});
                } else {
                    cells_.push_back({c.x0, c.y0, c.w, hh});
                    cells_.push_back({c.x0, c.y0 + hh, c.w, hh});
                }
                for (int k = cells_[id].kids() - 1; k >= 0; --k) stack.push_back(first + k);
            } else {
                const Point m = c_centre(id);
                if (boundary_distance_raw(omega, m) > 0) {
                    nodeOf_.resize(cells_.size(), -1);
                    nodeOf_[id] = static_cast<int>(nodes_.size());
                    nodes_.push_back(id);
                }
            }
        }
        nodeOf_.resize(cells_.size(), -1);
    }

    std::size_t node_count() const { return nodes_.size(); }
    const detail::Cell& node_cell(int n) const { return cells_[nodes_[n]]; }
    Point node_point(int n) const { return cells_[nodes_[n]].centre(); }
    const GridSpec& spec() const { return spec_; }

    /// Node indices of leaves meeting the rectangle.
    template <class F>
    void query(double x0, double y0, double x1, double y1, F&& f) const {
        std::vector<int> stack(roots_.begin(), roots_.end());
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            const auto& c = cells_[id];
            if (c.x0 > x1 || c.x0 + c.w < x0 || c.y0 > y1 || c.y0 + c.h < y0) continue;
            if (c.child >= 0) {
                for (int k = 0; k < c.kids(); ++k) stack.push_back(c.child + k);
            } else if (nodeOf_[id] >= 0) {
                f(nodeOf_[id]);
            }
        }
    }

    /// Size of the leaf containing z (0 if z is outside the window).
    double leaf_size_at(Point z) const {
        for (int r : roots_) {
            int id = r;
            const auto& c0 = cells_[id];
            if (z.real() < c0.x0 || z.real() > c0.x0 + c0.w || z.imag() < c0.y0 || z.imag() > c0.y0 + c0.h) continue;
            while (cells_[id].child >= 0) {
                const auto& c = cells_[id];
                const int right = z.real() >= c.x0 + 0.5 * c.w ? 1 : 0, up = z.imag() >= c.y0 + 0.5 * c.h ? 1 : 0;
                id = c.child + (c.split == 0 ? right + 2 * up : c.split == 1 ? right : up);
            }
            return cells_[id].size();
        }
        return 0;
    }

    double min_cell(Point c) const {
        return std::max(spec_.cellSize, 4e-13 * (std::abs(c.real()) + std::abs(c.imag())));
    }

private:
    Point c_centre(int id) const { return cells_[id].centre(); }

    /// -1 keeps the cell as a leaf; otherwise the split kind.
    int split_kind(const detail::Cell& c) const {
        const Point m = c.centre();
        const double mc = min_cell(m);
        if (c.size() <= mc) return -1;
        const double d = boundary_distance_raw(*omega_, m);
        const double fl = spec_.floorFraction * std::min(detail::cell_local_gap(*omega_, c.x0, c.x0 + c.w, c.y0), detail::tip_distance(*omega_, m));
        const double r = std::max({spec_.relResolution * d, fl, mc});
        if (c.size() <= r) return -1;
        if (spec_.columnAspect > 1 && detail::vertically_invariant(*omega_, c)) {
            if (c.h > spec_.columnAspect * c.w) return 2;
            return c.w > r ? 1 : -1;
        }
        if (c.h > 1.5 * c.w) return 2;
        if (c.w > 1.5 * c.h) return 1;
        return 0;
    }

    const SlitDomain* omega_;
    GridSpec spec_;
    std::vector<detail::Cell> cells_;
    std::vector<int> roots_;
    std::vector<int> nodes_;
    std::vector<int> nodeOf_;
};

struct ShortestPath {
    double q = 0;            // integral of |dz|/delta along the returned polyline
    double graphValue = 0;   // in-graph (midpoint rule) value
    Curve curve;             // params = in-graph cumulative distance
    double maxEdge = 0;      // largest edge weight on the path
    std::size_t nodes = 0;
};

namespace detail {

inline double edge_weight(const SlitDomain& omega, Point p, Point q, double clamp) {
    return std::abs(q - p) / std::max(boundary_distance_raw(omega, 0.5 * (p + q)), clamp);
}

inline bool lex_less(Point a, Point b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

}  // namespace detail

/// Dijkstra on the quadtree graph; ties broken by (value, hops, node id).
namespace detail {

/// Greedy chord shortcuts that never increase the integral length.
inline std::vector<std::size_t> shortcut(const SlitDomain& omega, const std::vector<Point>& pts) {
    const std::size_t n = pts.size();
    std::vector<double> seg(n, 0.0), cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        seg[i] = qh_segment_length(omega, pts[i - 1], pts[i]);
        cum[i] = cum[i - 1] + seg[i];
    }
    std::vector<std::size_t> keep{0};
    std::size_t i = 0;
    while (i + 1 < n) {
        std::size_t next = i + 1;
        for (std::size_t j = std::min(n - 1, i + 48); j > i + 1; --j) {
            if (segment_hits_slit(omega, pts[i], pts[j])) continue;
            if (qh_segment_length(omega, pts[i], pts[j]) <= cum[j] - cum[i]) {
                next = j;
                break;
            }
        }
        keep.push_back(next);
        i = next;
    }
    return keep;
}

}  // namespace detail

inline ShortestPath grid_shortest_path(const SlitDomain& omega, const QuadGrid& grid, Point z, Point w) {
    const GridSpec& spec = grid.spec();
    if (!omega.contains(z) || !omega.contains(w)) throw Error(ErrorKind::PointOutsideDomain, "endpoint lies on a slit");
    if (!spec.window.contains(z) || !spec.window.contains(w)) throw Error(ErrorKind::ConfigError, "endpoint outside the grid window");
    ShortestPath out;
    if (z == w) {
        out.curve.params = {0.0};
        out.curve.points = {z};
        return out;
    }
    const bool flip = detail::lex_less(w, z);
    if (flip) std::swap(z, w);

    const int n = static_cast<int>(grid.node_count());
    const int S = n, T = n + 1;
    const double ring = spec.connectivity == 16 ? 1.0 : 1e-9;
    auto clamp_at = [&](Point p) { return 0.5 * grid.min_cell(p); };

    auto attach = [&](Point p) {
        std::vector<std::pair<int, double>> links;
        const double h = 1.5 * std::max(grid.leaf_size_at(p), grid.min_cell(p));
        grid.query(p.real() - h, p.imag() - h, p.real() + h, p.imag() + h, [&](int v) {
            const Point c = grid.node_point(v);
            if (!segment_hits_slit(omega, p, c)) links.emplace_back(v, detail::edge_weight(omega, p, c, clamp_at(p)));
        });
        std::sort(links.begin(), links.end());
        return links;
    };
    const auto srcLinks = attach(z);
    const auto dstLinksV = attach(w);
    std::map<int, double> dstLinks(dstLinksV.begin(), dstLinksV.end());

    std::vector<double> dist(n + 2, kInf);
    std::vector<int> hops(n + 2, 0), prev(n + 2, -1);
    std::vector<char> done(n + 2, 0);
    using Entry = std::tuple<double, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    auto relax = [&](int from, int to, double wgt) {
        const double nd = dist[from] + wgt;
        const int nh = hops[from] + 1;
        if (nd < dist[to] || (nd == dist[to] && (nh < hops[to] || (nh == hops[to] && from < prev[to])))) {
            dist[to] = nd;
            hops[to] = nh;
            prev[to] = from;
            pq.emplace(nd, nh, to);
        }
    };
    dist[S] = 0;
    pq.emplace(0.0, 0, S);
    {
        const double h = 1.5 * std::max(grid.leaf_size_at(z), grid.min_cell(z));
        if (std::abs(w.real() - z.real()) <= h && std::abs(w.imag() - z.imag()) <= h && !segment_hits_slit(omega, z, w))
            relax(S, T, detail::edge_weight(omega, z, w, clamp_at(z)));
    }
    while (!pq.empty()) {
        auto [d, hp, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == T) break;
        if (u == S) {
            for (auto [v, wt] : srcLinks) relax(S, v, wt);
            continue;
        }
        const auto& cu = grid.node_cell(u);
        const Point pu = cu.centre();
        const double e = ring * cu.thickness();
        grid.query(cu.x0 - e, cu.y0 - e, cu.x0 + cu.w + e, cu.y0 + cu.h + e, [&](int v) {
            if (v == u || done[v]) return;
            const auto& cv = grid.node_cell(v);
            if (detail::cell_gap(cu, cv) > ring * std::min(cu.thickness(), cv.thickness())) return;
            const Point pv = cv.centre();
            if (segment_hits_slit(omega, pu, pv)) return;
            relax(u, v, detail::edge_weight(omega, pu, pv, clamp_at(0.5 * (pu + pv))));
        });
        if (auto it = dstLinks.find(u); it != dstLinks.end()) relax(u, T, it->second);
    }
    if (!std::isfinite(dist[T])) throw Error(ErrorKind::Unreachable, "target not reachable inside the grid window");

    std::vector<int> chain;
    for (int v = T; v >= 0; v = prev[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    auto point_of = [&](int v) { return v == S ? z : v == T ? w : grid.node_point(v); };
    for (std::size_t i = 0; i < chain.size(); ++i) {
        out.curve.points.push_back(point_of(chain[i]));
        out.curve.params.push_back(dist[chain[i]]);
        if (i > 0) out.maxEdge = std::max(out.maxEdge, dist[chain[i]] - dist[chain[i - 1]]);
    }
    out.graphValue = dist[T];
    out.nodes = grid.node_count();
    if (flip) {
        std::reverse(out.curve.points.begin(), out.curve.points.end());
        std::reverse(out.curve.params.begin(), out.curve.params.end());
        for (auto& p : out.curve.params) p = out.graphValue - p;
    }
    // Sum segment integrals in canonical (lexicographic) order so that the
    // value does not depend on the query direction.
    std::vector<Point> canon = out.curve.points;
    if (flip) std::reverse(canon.begin(), canon.end());
    std::vector<Point> cut;
    for (std::size_t k : detail::shortcut(omega, canon)) cut.push_back(canon[k]);
    out.q = qh_polyline_length(omega, cut);
    return out;
}

/// Window around z and w padded by max(|z-w|, delta(z), delta(w)).
inline Rect auto_window(const SlitDomain& omega, Point z, Point w, double scale = 1.0) {
    const double pad = scale * std::max({std::abs(z - w), boundary_distance_raw(omega, z), boundary_distance_raw(omega, w)});
    Rect r{std::min(z.real(), w.real()) - pad, std::min(z.imag(), w.imag()) - pad,
           std::max(z.real(), w.real()) + pad, std::max(z.imag(), w.imag()) + pad};
    // leave room to pass over any slit standing between the endpoints
    const double xl = std::min(z.real(), w.real()), xr = std::max(z.real(), w.real()), yl = std::min(z.imag(), w.imag());
    for (const auto& s : omega.slits())
        if (s.x > xl && s.x < xr && s.top >= yl) r.y1 = std::max(r.y1, s.top + pad);
    return r;
}

inline ShortestPath quasihyperbolic_shortest_path(const SlitDomain& omega, Point z, Point w, GridSpec grid) {
    if (!omega.contains(z) || !omega.contains(w)) throw Error(ErrorKind::PointOutsideDomain, "endpoint lies on a slit");
    if (!grid.window.valid()) grid.window = auto_window(omega, z, w);
    QuadGrid g(omega, grid);
    return grid_shortest_path(omega, g, z, w);
}

// ------------------------------------------------------ comparison bounds

struct PointData {
    Point z;
    double delta = 0;
    std::vector<Point> u;     // log of the half-plane chart image, per enclosing model
    std::vector<char> ok;     // chart evaluation succeeded
};

/// Two-sided distance bounds on a slit domain: enclosing models and good boxes
/// from below, inscribed models, good boxes and grid paths from above.
class DistanceEngine {
public:
    explicit DistanceEngine(SlitDomain omega, std::optional<ConstantsLedger> ledger = std::nullopt, GridSpec grid = {})
        : omega_(std::move(omega)), ledger_(ledger), grid_(grid) {
        enclosing_ = enclosing_models(omega_);
        const auto& s = omega_.slits();
        if (s.size() == 1) exact_ = 0;
        if (s.size() == 2 && s[0].top == s[1].top) exact_ = 2;  // index of the TwoSlit entry
        if (ledger_) boxes_ = detect_good_boxes(omega_, *ledger_);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t k = i + 1; k < s.size(); ++k) {
                const double R = s[k].x - s[i].x;
                const double M = inscribed_semistrip(omega_, s[i].x, R);
                if (std::isfinite(M)) inscribed_.emplace_back(SemiStrip{s[i].x, R, M});
                else inscribed_.emplace_back(Strip{s[i].x, R});
            }
        inscribed_.emplace_back(HSector{kPi / 2, 0, Point(0, omega_.max_top()), kPi / 2});
        inscribed_.emplace_back(HSector{kPi / 2, 0, Point(s.front().x, 0), kPi});
        inscribed_.emplace_back(HSector{kPi / 2, 0, Point(s.back().x, 0), 0});
    }

    const SlitDomain& omega() const { return omega_; }
    const std::optional<ConstantsLedger>& ledger() const { return ledger_; }
    const std::vector<GoodBox>& boxes() const { return boxes_; }
    const std::vector<ModelDomain>& enclosing() const { return enclosing_; }
    const GridSpec& grid() const { return grid_; }
    double Cbig() const { return ledger_ ? ledger_->Cbig : kInf; }

    PointData data(Point z) const {
        if (!omega_.contains(z)) throw Error(ErrorKind::PointOutsideDomain, "point lies on a slit");
        PointData d;
        d.z = z;
        d.delta = boundary_distance_raw(omega_, z);
        d.u.resize(enclosing_.size());
        d.ok.assign(enclosing_.size(), 0);
        for (std::size_t i = 0; i < enclosing_.size(); ++i) {
            try {
                d.u[i] = log_chart(enclosing_[i], z).L;
                d.ok[i] = finite(d.u[i]) && std::abs(d.u[i].imag()) < 0.5 * kPi;
            } catch (const Error&) {
                d.ok[i] = 0;
            }
        }
        return d;
    }

    /// Largest certified lower bound and its method tag.
    std::pair<double, std::string> lower(const PointData& A, const PointData& B) const {
        if (A.z == B.z) return {0.0, "coincident"};
        double best = 0.25 * std::log1p(std::abs(A.z - B.z) / std::min(A.delta, B.delta));
        std::string how = "log-envelope";
        for (std::size_t i = 0; i < enclosing_.size(); ++i) {
            if (!A.ok[i] || !B.ok[i]) continue;
            const double v = halfplane_distance_log(A.u[i], B.u[i]);
            if (v > best) {
                best = v;
                how = "model:" + model_name(enclosing_[i]) + "[" + std::to_string(i) + "]";
            }
        }
        if (ledger_) {
            const double C = ledger_->Cbig;
            double chain = 0;
            for (std::size_t i = 0; i < boxes_.size(); ++i) {
                const GoodBox& bx = boxes_[i];
                const bool ia = bx.contains(A.z), ib = bx.contains(B.z);
                if (ia && ib) {
                    const double v = distance(bx.strip(), A.z, B.z) / C;
                    if (v > best) {
                        best = v;
                        how = "box-sandwich[" + std::to_string(i) + "]";
                    }
                    continue;
                }
                chain += box_cut(bx, A.z, B.z, ia, ib) / C;
            }
            if (chain > best) {
                best = chain;
                how = "box-cut";
            }
        }
        return {best, how};
    }

    /// Cheap certified upper bound (no grid).
    std::pair<double, std::string> upper(Point z, Point w) const {
        if (z == w) return {0.0, "coincident"};
        double best = kInf;
        std::string how = "none";
        auto take = [&](double v, const std::string& tag) {
            if (v < best) {
                best = v;
                how = tag;
            }
        };
        if (exact_ >= 0) take(distance(enclosing_[exact_], z, w), "exact");
        for (const auto& V : inscribed_)
            if (contains(V, z) && contains(V, w)) take(distance(V, z, w), "inscribed:" + model_name(V));
        for (const auto& V : wedges_for(z, w)) take(distance(V, z, w), "inscribed:wedge");
        if (ledger_)
            for (std::size_t i = 0; i < boxes_.size(); ++i)
                if (boxes_[i].contains(z) && boxes_[i].contains(w))
                    take(ledger_->Cbig * distance(boxes_[i].strip(), z, w), "box-sandwich[" + std::to_string(i) + "]");
        if (!segment_hits_slit(omega_, z, w)) take(qh_segment_length(omega_, z, w), "segment");
        return {best, how};
    }

    /// Refinement k uses relResolution / 2^(k-1); bounds are running extrema.
    BoundPair bound(Point z, Point w, int budget) const {
        const PointData A = data(z), B = data(w);
        BoundPair out;
        std::tie(out.lo, out.loMethod) = lower(A, B);
        std::tie(out.hi, out.hiMethod) = upper(z, w);
        if (exact_ >= 0) {
            // omega is one of its own models
            out.lo = out.hi = distance(enclosing_[exact_], z, w);
            out.loMethod = out.hiMethod = "exact";
            return out;
        }
        if (budget > 0 && grid_.window.valid() && (!grid_.window.contains(z) || !grid_.window.contains(w)))
            throw Error(ErrorKind::ConfigError, "point pair outside the grid window");
        for (int k = 1; k <= budget; ++k) {
            GridSpec g = grid_;
            g.relResolution = grid_.relResolution / std::pow(2.0, k - 1);
            if (!g.window.valid()) g.window = auto_window(omega_, z, w);
            try {
                const ShortestPath sp = quasihyperbolic_shortest_path(omega_, z, w, g);
                if (sp.q < out.hi) {
                    out.hi = sp.q;
                    out.hiMethod = "grid";
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Unreachable && e.kind() != ErrorKind::ConfigError) throw;
            }
        }
        if (out.hi < out.lo) out.hi = out.lo;  // rounding guard
        return out;
    }

    std::vector<ModelDomain> wedges_for(Point z, Point w) const {
        std::vector<ModelDomain> out;
        const double pad = 0.5 * std::abs(z - w) + 1e-9 * (std::abs(z) + std::abs(w));
        for (double px : {0.5 * (z.real() + w.real()), z.real(), w.real()})
            for (double beta : {kPi / 6, kPi / 4, kPi / 3, 5 * kPi / 12, kPi / 2}) {
                const double ct = beta == kPi / 2 ? 0.0 : 1.0 / std::tan(beta);
                const double y = std::min(z.imag() - std::abs(z.real() - px) * ct, w.imag() - std::abs(w.real() - px) * ct) - pad;
                const Point apex(px, y);
                if (!sector_containment(omega_, apex, beta, 0)) continue;
                HSector V{beta, 0, apex, kPi / 2};
                if (contains(V, z) && contains(V, w)) out.emplace_back(V);
            }
        return out;
    }

private:
    static double box_cut(const GoodBox& bx, Point z, Point w, bool iz, bool iw) {
        auto exit_cost = [&](Point p) {
            double h = bx.top() - p.imag();
            if (!bx.open_bottom()) h = std::min(h, p.imag() - bx.bottom());
            return kPi * h / (2.0 * bx.R);
        };
        if (iz != iw) return exit_cost(iz ? z : w);
        if (bx.open_bottom()) return 0;
        auto below = [&](Point p) { return bx.in_column(p) && p.imag() <= bx.bottom(); };
        auto outside = [&](Point p) { return !(bx.in_column(p) && p.imag() < bx.top()); };
        if ((below(z) && outside(w)) || (below(w) && outside(z))) return kPi * (bx.top() - bx.bottom()) / (2.0 * bx.R);
        return 0;
    }

    SlitDomain omega_;
    std::optional<ConstantsLedger> ledger_;
    GridSpec grid_;
    std::vector<ModelDomain> enclosing_;
    std::vector<ModelDomain> inscribed_;
    std::vector<GoodBox> boxes_;
    int exact_ = -1;  // index of an enclosing model equal to Omega, if any
};

inline BoundPair bound_distance(const SlitDomain& omega, Point z, Point w, int budget) {
    return DistanceEngine(omega).bound(z, w, budget);
}

inline BoundPair bound_distance(const DistanceEngine& eng, Point z, Point w, int budget) { return eng.bound(z, w, budget); }

// --------------------------------------------------------- approx geodesics

struct QGPair {
    std::size_t i = 0, j = 0;
    double length = 0;  // integral upper bound on the sub-arc length
    double klo = 0;     // certified lower bound on the endpoint distance
};

struct QGCertificate {
    double A = 1, B = 0;
    std::size_t checkedPairs = 0;
    double maxSlack = 0;  // max of length - A klo - B over checked pairs (<= 0)
    double eta = 0;       // assumed directional slack of the grid metric
    std::vector<QGPair> pairs;
};

inline bool verify_certificate(const QGCertificate& c) {
    for (const auto& p : c.pairs)
        if (!(p.length <= c.A * p.klo + c.B + 1e-9)) return false;
    return c.A >= 1 && c.B >= 0;
}

struct GeodesicResult {
    Curve curve;                     // params = cumulative integral length
    QGCertificate cert;
    double q = 0;                    // integral length of the whole curve
    std::vector<double> graphDist;   // in-graph distance from the start
    std::size_t nodes = 0;
};

/// Grid metric slack: worst ratio of grid path to straight length for the
/// direction set of the stencil.
inline double grid_direction_slack(int connectivity) {
    return connectivity == 16 ? 1.0 / std::cos(std::atan(0.5) / 2.0) - 1.0 : 1.0 / std::cos(kPi / 8) - 1.0;
}


inline GeodesicResult approx_geodesic(const DistanceEngine& eng, Point z, Point w, GridSpec grid,
                                      double etaMax = 0.5, std::size_t maxChecked = 160) {
    const SlitDomain& omega = eng.omega();
    if (!grid.window.valid()) grid.window = auto_window(omega, z, w);
    const bool flip = detail::lex_less(w, z);
    if (flip) std::swap(z, w);
    QuadGrid g(omega, grid);
    const ShortestPath sp = grid_shortest_path(omega, g, z, w);
    const auto keep = detail::shortcut(omega, sp.curve.points);

    GeodesicResult out;
    out.nodes = sp.nodes;
    for (std::size_t k : keep) {
        out.curve.points.push_back(sp.curve.points[k]);
        out.graphDist.push_back(sp.curve.params[k]);
    }
    if (flip) {
        std::reverse(out.curve.points.begin(), out.curve.points.end());
        std::reverse(out.graphDist.begin(), out.graphDist.end());
        for (auto& d : out.graphDist) d = sp.graphValue - d;
    }
    const std::size_t n = out.curve.points.size();
    out.curve.params.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        out.curve.params[i] = out.curve.params[i - 1] + qh_segment_length(omega, out.curve.points[i - 1], out.curve.points[i]);
    out.q = out.curve.params.back();

    // Certificate: sub-paths are shortest in the graph, the graph metric is
    // within (1+eta) of the quasihyperbolic one up to B, and k >= k_qh / 4.
    QGCertificate& c = out.cert;
    c.eta = grid_direction_slack(grid.connectivity);
    c.B = 2.0 * sp.maxEdge;
    std::vector<std::size_t> idx;
    const std::size_t m = std::min(n, maxChecked);
    for (std::size_t k = 0; k < m; ++k) idx.push_back(m == 1 ? 0 : (k * (n - 1)) / (m - 1));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    std::vector<PointData> pd;
    for (std::size_t k : idx) pd.push_back(eng.data(out.curve.points[k]));
    double A = 1;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const std::size_t i = idx[a], j = idx[b];
            QGPair p;
            p.i = i;
            p.j = j;
            p.length = out.curve.params[j] - out.curve.params[i];
            const double kq = std::abs(out.graphDist[j] - out.graphDist[i]);
            p.klo = std::max(eng.lower(pd[a], pd[b]).first, (kq / (1.0 + c.eta) - c.B) / 4.0);
            if (p.klo > 0) A = std::max(A, (p.length - c.B) / p.klo);
            c.pairs.push_back(p);
        }
    c.A = A;
    c.checkedPairs = c.pairs.size();
    c.maxSlack = -kInf;
    for (const auto& p : c.pairs) c.maxSlack = std::max(c.maxSlack, p.length - c.A * p.klo - c.B);
    if (c.pairs.empty()) c.maxSlack = 0;
    if (c.A > 4.0 + etaMax)
        throw Error(ErrorKind::CertificateFailed, "quasi-geodesic constant " + std::to_string(c.A) + " exceeds 4 + eta_max");
    return out;
}

// ----------------------------------------------------------- set distances

struct SetDistance {
    BoundPair bounds;
    double sampleMin = 0;  // min of sample lower bounds before the gap slack
    double slack = 0;      // sampleMin - lo
    std::size_t samples = 0;
};

/// Distances from points to a fixed polyline; chart data of the target are
/// cached and gaps are subdivided where the slack could hide the minimum.
class SetDistanceOracle {
public:
    SetDistanceOracle(const DistanceEngine& eng, const Curve& target) : eng_(&eng) {
        if (target.points.empty()) throw Error(ErrorKind::ConfigError, "empty target curve");
        for (const auto& p : target.points) {
            if (!eng.omega().contains(p)) throw Error(ErrorKind::CurveExitsDomain, "target sample lies on a slit");
            nodes_.push_back(eng.data(p));
        }
    }

    std::size_t size() const { return nodes_.size(); }

    /// slackTol < 0: gaps are refined until the slack is below 0.2% of the
    /// neighbouring sample bounds.
    SetDistance query(Point z, int budget = 0, double slackTol = -1, int maxDepth = 24) const {
        const PointData Z = eng_->data(z);
        struct Sample {
            PointData d;
            double lo;
        };
        SetDistance out;
        std::vector<Sample> s;
        s.reserve(nodes_.size());
        double sampleMin = kInf;
        for (const auto& nd : nodes_) {
            s.push_back({nd, eng_->lower(Z, nd).first});
            sampleMin = std::min(sampleMin, s.back().lo);
        }
        double lo = sampleMin;
        std::function<void(const Sample&, const Sample&, int)> gap = [&](const Sample& a, const Sample& b, int depth) {
            if (a.d.z == b.d.z) return;
            const double g = qh_segment_length(eng_->omega(), a.d.z, b.d.z);
            const double v = 0.5 * (a.lo + b.lo - g);
            const double floorAB = std::min(a.lo, b.lo);
            const double tol = slackTol < 0 ? 2e-3 * floorAB : slackTol;
            if (v >= floorAB - tol || depth >= maxDepth || v >= sampleMin) {
                lo = std::min(lo, std::max(0.0, std::min(v, floorAB)));
                return;
            }
            Sample m2{eng_->data(0.5 * (a.d.z + b.d.z)), 0};
            m2.lo = eng_->lower(Z, m2.d).first;
            sampleMin = std::min(sampleMin, m2.lo);
            gap(a, m2, depth + 1);
            gap(m2, b, depth + 1);
        };
        for (std::size_t i = 1; i < s.size(); ++i) gap(s[i - 1], s[i], 0);
        out.sampleMin = sampleMin;
        out.bounds.lo = std::max(0.0, std::min(lo, sampleMin));
        out.bounds.loMethod = "samples-minus-gap";
        out.slack = sampleMin - out.bounds.lo;
        out.samples = s.size();

        std::size_t best = 0;
        double hi = kInf;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double h = eng_->upper(z, s[i].d.z).first;
            if (h < hi) {
                hi = h;
                best = i;
            }
        }
        out.bounds.hi = hi;
        out.bounds.hiMethod = "sample-upper";
        // the target is the polyline, so points between samples count too
        for (std::size_t nb : {best - 1, best + 1}) {
            if (nb >= s.size() || !std::isfinite(hi)) continue;
            const Point a = s[best].d.z, b = s[nb].d.z;
            if (segment_hits_slit(eng_->omega(), a, b)) continue;
            auto f = [&](double t) { return eng_->upper(z, a + t * (b - a)).first; };
            double l = 0, r = 1;
            for (int it = 0; it < 40; ++it) {
                const double m1 = l + (r - l) / 3, m2 = r - (r - l) / 3;
                if (f(m1) <= f(m2)) r = m2;
                else l = m1;
            }
            const double v = f(0.5 * (l + r));
            if (v < out.bounds.hi) {
                out.bounds.hi = v;
                out.bounds.hiMethod = "segment-upper";
            }
        }
        if (budget > 0 && std::isfinite(hi) && hi > 0) {
            const BoundPair b = eng_->bound(z, s[best].d.z, budget);
            if (b.hi < out.bounds.hi) {
                out.bounds.hi = b.hi;
                out.bounds.hiMethod = "sample-" + b.hiMethod;
            }
        }
        if (!std::isfinite(out.bounds.hi)) {
            // nearest sample through the grid as a last resort
            std::size_t k = 0;
            for (std::size_t i = 1; i < s.size(); ++i)
                if (std::abs(s[i].d.z - z) < std::abs(s[k].d.z - z)) k = i;
            const BoundPair b = eng_->bound(z, s[k].d.z, std::max(budget, 1));
            out.bounds.hi = b.hi;
            out.bounds.hiMethod = "sample-" + b.hiMethod;
        }
        if (out.bounds.hi < out.bounds.lo) out.bounds.hi = out.bounds.lo;
        return out;
    }

private:
    const DistanceEngine* eng_;
    std::vector<PointData> nodes_;
};

inline BoundPair distance_to_set(const DistanceEngine& eng, Point z, const Curve& target, int budget) {
    return SetDistanceOracle(eng, target).query(z, budget).bounds;
}

inline BoundPair distance_to_set(const SlitDomain& omega, Point z, const Curve& target, int budget) {
    return distance_to_set(DistanceEngine(omega), z, target, budget);
}

}  // namespace hypslit
