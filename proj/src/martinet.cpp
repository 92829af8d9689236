#include "srlab/martinet.hpp"

#include <cmath>
#include <unordered_map>

#include "srlab/hamiltonian.hpp"
#include "srlab/parallel.hpp"

namespace srlab {

MartinetStructure MartinetStructure::flat() {
    ContactMetric cm = catalog::martinet_flat();
    return MartinetStructure{cm.frame, cm.A};
}

namespace {

ScalarExpr growth_determinant(const Frame2& frame) {
    VectorField br = lie_bracket(frame.f1, frame.f2);
    // det with columns f1, f2, [f1,f2]
    auto c = [&](const VectorField& v, int i) { return v.component(i); };
    const VectorField &a = frame.f1, &b = frame.f2;
    return c(a, 0) * (c(b, 1) * c(br, 2) - c(b, 2) * c(br, 1)) -
           c(b, 0) * (c(a, 1) * c(br, 2) - c(a, 2) * c(br, 1)) +
           c(br, 0) * (c(a, 1) * c(b, 2) - c(a, 2) * c(b, 1));
}

}  // namespace

std::vector<Eigen::Vector3d> martinet_surface(const Frame2& frame, double halfwidth, int resolution) {
    if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
    ScalarExpr phi = growth_determinant(frame);
    std::vector<Eigen::Vector3d> out;
    double h = 2.0 * halfwidth / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
        for (int k = 0; k < resolution; ++k) {
            double y = -halfwidth + h * j, z = -halfwidth + h * k;
            double prev = 0.0;
            for (int i = 0; i < resolution; ++i) {
                double x = -halfwidth + h * i;
                std::array<double, 3> q{x, y, z};
                double val = phi.eval(std::span<const double>(q.data(), 3));
                if (i > 0 && ((prev <= 0.0 && val > 0.0) || (prev >= 0.0 && val < 0.0) ||
                              (prev == 0.0 && val == 0.0))) {
                    double s = (prev == val) ? 0.0 : prev / (prev - val);
                    out.emplace_back(x - h + s * h, y, z);
                } else if (val == 0.0 && i == 0) {
                    out.emplace_back(x, y, z);
                }
                prev = val;
            }
        }
    }
    return out;
}

std::vector<Eigen::Vector3d> singular_curve(const Frame2& frame, const Eigen::Vector3d& q_start,
                                            double T, double step, double surface_tol) {
    ScalarExpr phi = growth_determinant(frame);
    std::array<ScalarExpr, 3> dphi{phi.diff(0), phi.diff(1), phi.diff(2)};
    {
        std::span<const double> qs(q_start.data(), 3);
        if (std::abs(phi.eval(qs)) > surface_tol)
            throw std::invalid_argument("start point is not on the Martinet surface");
    }

    // Direction field: the kernel of w ↦ ∇φ·w restricted to Δ.
    Eigen::Vector2d prev_ab(0.0, 1.0);  // prefer the +f2 branch initially
    auto direction = [&](const Eigen::Vector3d& x) -> Eigen::Vector3d {
        std::span<const double> xs(x.data(), 3);
        Eigen::Vector3d f1 = frame.f1.eval(xs), f2 = frame.f2.eval(xs);
        Eigen::Vector3d g(dphi[0].eval(xs), dphi[1].eval(xs), dphi[2].eval(xs));
        Eigen::Vector2d ab(-g.dot(f2), g.dot(f1));  // annihilates (g·f1, g·f2)
        if (ab.norm() < 1e-14) throw NumericalError("singular line field degenerates");
        ab.normalize();
        if (ab.dot(prev_ab) < 0.0) ab = -ab;
        prev_ab = ab;
        Eigen::Vector3d d = ab(0) * f1 + ab(1) * f2;
        return d / d.norm();  // unit speed for the orthonormal flat metric
    };

    std::vector<Eigen::Vector3d> out{q_start};
    if (T == 0.0) return out;
    int nsteps = static_cast<int>(std::ceil(std::abs(T) / step - 1e-12));
    double dt = T / nsteps;
    Eigen::Vector3d x = q_start;
    for (int i = 0; i < nsteps; ++i) {
        Eigen::Vector3d k1 = direction(x);
        Eigen::Vector3d k2 = direction(x + 0.5 * dt * k1);
        Eigen::Vector3d k3 = direction(x + 0.5 * dt * k2);
        Eigen::Vector3d k4 = direction(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back(x);
    }
    return out;
}

CutProbeReport cut_locus_probe(const Eigen::Vector3d& q1, const BvpOptions& opts) {
    MartinetStructure ms = MartinetStructure::flat();
    CutProbeReport rep;
    rep.bvp = solve_geodesic_bvp(ms.frame, ms.A, ms.q0, q1, opts);
    if (q1(0) == 0.0 && q1(2) == 0.0 && q1(1) != 0.0) rep.singular_length = std::abs(q1(1));
    return rep;
}

double sr_distance(const Eigen::Vector3d& q1, const BvpOptions& opts) {
    return cut_locus_probe(q1, opts).bvp.distance;
}

namespace {

struct HashGrid {
    double cell;
    std::unordered_map<std::int64_t, std::vector<int>> bins;  // flat point index lists

    explicit HashGrid(double cell_size) : cell(cell_size) {}

    std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell)); }
    static std::int64_t pack(std::int64_t cx, std::int64_t cy, std::int64_t cz) {
        auto m = [](std::int64_t v) { return v & 0x1fffff; };
        return (m(cx) << 42) | (m(cy) << 21) | m(cz);
    }
    std::int64_t key(const Eigen::Vector3d& x) const {
        return pack(cell_of(x(0)), cell_of(x(1)), cell_of(x(2)));
    }
    void insert(const Eigen::Vector3d& x, int idx) { bins[key(x)].push_back(idx); }

    // Neighbor cells are enumerated in integer cell space; shifting the
    // query point by +-cell and re-flooring misses cells when the point
    // sits on a cell boundary.
    template <class Fn>
    void for_neighbors(const Eigen::Vector3d& x, Fn&& fn) const {
        std::int64_t cx = cell_of(x(0)), cy = cell_of(x(1)), cz = cell_of(x(2));
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = bins.find(pack(cx + dx, cy + dy, cz + dz));
                    if (it == bins.end()) continue;
                    for (int idx : it->second) fn(idx);
                }
    }
};

struct DSU {
    std::vector<int> parent;
    explicit DSU(int n) : parent(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
    }
};

}  // namespace

SphereSampleSet sphere_sample(double r, const SphereOptions& opts) {
    if (r <= 0.0) throw std::invalid_argument("radius must be positive");
    MartinetStructure ms = MartinetStructure::flat();
    SymbolicHamiltonian H = geodesic_hamiltonian(ms.frame, ms.A);
    HamiltonianFlow flow(H);

    const int NT = opts.n_theta, NP = opts.n_psi;
    const int n = NT * NP;
    double lam_scale = opts.lambda_scale > 0.0 ? opts.lambda_scale : 1.0 / (r * r);
    double psi_cap = 0.5 * M_PI * opts.psi_cap_fraction;
    double rho = opts.rho > 0.0 ? opts.rho : 0.02 * r;
    double tau = opts.time_margin_factor * rho;
    double step = r / opts.steps_per_shot;

    SphereSampleSet set;
    set.radius = r;
    set.n_theta = NT;
    set.n_psi = NP;
    set.samples.resize(static_cast<std::size_t>(n));

    // One trajectory per covector grid node, recorded at every step.
    std::vector<std::vector<Eigen::Vector3d>> paths(static_cast<std::size_t>(n));
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t idx) {
            int it = static_cast<int>(idx) / NP, ip = static_cast<int>(idx) % NP;
            double theta = -M_PI + 2.0 * M_PI * it / NT;
            double psi = NP == 1 ? 0.0 : -psi_cap + 2.0 * psi_cap * ip / (NP - 1);
            SphereSample& s = set.samples[idx];
            s.i_theta = it;
            s.i_psi = ip;
            s.theta = theta;
            s.psi = psi;
            s.p0 = {std::cos(theta), std::sin(theta), lam_scale * std::tan(psi)};
            Eigen::VectorXd xi0(6);
            xi0 << 0, 0, 0, s.p0(0), s.p0(1), s.p0(2);
            Trajectory tr = flow.integrate(xi0, r, step, 1);
            auto& path = paths[idx];
            path.reserve(tr.states.size());
            for (const auto& st : tr.states) path.push_back(st.head<3>());
            s.endpoint = path.back();
        },
        opts.threads);

    // The sphere is pancake-thin in x3 (thickness ~ r³); proximity tests
    // use coordinates with x3 stretched so the endpoint cloud is O(r)
    // thick, otherwise opposite discs collide inside isotropic balls.
    double s3max = 0.0;
    for (const auto& s : set.samples) s3max = std::max(s3max, std::abs(s.endpoint(2)));
    double stretch = r / std::max(s3max, 1e-12);
    auto scaled = [stretch](const Eigen::Vector3d& x) {
        return Eigen::Vector3d(x(0), x(1), stretch * x(2));
    };

    // Spatial hash over all recorded path points, storing (sample, time).
    HashGrid grid(rho);
    std::vector<int> owner;
    std::vector<double> when;
    for (int i = 0; i < n; ++i) {
        const auto& path = paths[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < path.size(); ++k) {
            owner.push_back(i);
            when.push_back(step * static_cast<double>(k));
            grid.insert(scaled(path[k]), static_cast<int>(owner.size()) - 1);
        }
    }
    std::vector<Eigen::Vector3d> flat_points;
    flat_points.reserve(owner.size());
    for (int i = 0; i < n; ++i)
        for (const auto& pt : paths[static_cast<std::size_t>(i)]) flat_points.push_back(scaled(pt));

    // Minimality: no other covector's trajectory reaches a ρ-ball around
    // the endpoint strictly earlier than r − τ.
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t idx) {
            Eigen::Vector3d x = scaled(set.samples[idx].endpoint);
            bool beaten = false;
            grid.for_neighbors(x, [&](int pt) {
                if (beaten) return;
                if (owner[static_cast<std::size_t>(pt)] == static_cast<int>(idx)) return;
                if (when[static_cast<std::size_t>(pt)] >= r - tau) return;
                if ((flat_points[static_cast<std::size_t>(pt)] - x).norm() < rho) beaten = true;
            });
            set.samples[idx].minimal = !beaten;
        },
        opts.threads);

    // Locus flags: a minimal sample lies on the singular locus when its
    // endpoint coincides with another minimal sample whose geodesic is
    // genuinely different. "Different" is measured at the path midpoint,
    // not in covector space: near the abnormal direction whole families of
    // covectors parameterize almost the same path. Exactly coincident
    // endpoints (the straight-line columns through the singular points)
    // count regardless of the midpoint test.
    std::vector<Eigen::Vector3d> midpoints(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& path = paths[static_cast<std::size_t>(i)];
        midpoints[static_cast<std::size_t>(i)] = scaled(path[path.size() / 2]);
    }
    {
        double mid_sep = opts.midpoint_separation * rho;
        HashGrid egrid(2.0 * rho);
        for (int i = 0; i < n; ++i)
            if (set.samples[static_cast<std::size_t>(i)].minimal)
                egrid.insert(scaled(set.samples[static_cast<std::size_t>(i)].endpoint), i);
        for (int i = 0; i < n; ++i) {
            SphereSample& s = set.samples[static_cast<std::size_t>(i)];
            if (!s.minimal) continue;
            egrid.for_neighbors(scaled(s.endpoint), [&](int j) {
                if (j == i) return;
                const SphereSample& o = set.samples[static_cast<std::size_t>(j)];
                double dend = (scaled(o.endpoint) - scaled(s.endpoint)).norm();
                if (dend > rho) return;
                double dmid = (midpoints[static_cast<std::size_t>(j)] -
                               midpoints[static_cast<std::size_t>(i)])
                                  .norm();
                if (dmid > mid_sep || dend < 1e-10) s.locus = true;
            });
        }
    }

    // Smooth components: union-find over covector-grid adjacency of
    // minimal, non-locus samples. Samples bordering the non-minimal band
    // are excluded: the minimality test is noisy within one cell of the
    // band and produces sliver components there.
    auto sample_at = [&](int it, int ip) -> SphereSample& {
        return set.samples[static_cast<std::size_t>(it * NP + ip)];
    };
    auto wrap_t = [&](int it) { return (it % NT + NT) % NT; };
    DSU dsu(n);
    auto interior = [&](int it, int ip) {
        const SphereSample& s = sample_at(it, ip);
        if (!s.minimal) return false;
        const int dts[4] = {1, -1, 0, 0}, dps[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            int jp = ip + dps[d];
            if (jp < 0 || jp >= NP) continue;
            if (!sample_at(wrap_t(it + dts[d]), jp).minimal) return false;
        }
        return true;
    };
    auto usable = [&](int it, int ip) {
        const SphereSample& s = sample_at(it, ip);
        return s.minimal && !s.locus && interior(it, ip);
    };
    for (int it = 0; it < NT; ++it) {
        for (int ip = 0; ip < NP; ++ip) {
            if (!usable(it, ip)) continue;
            if (usable(wrap_t(it + 1), ip)) dsu.unite(it * NP + ip, wrap_t(it + 1) * NP + ip);
            if (ip + 1 < NP && usable(it, ip + 1)) dsu.unite(it * NP + ip, it * NP + ip + 1);
        }
    }
    std::unordered_map<int, int> comp_size;
    for (int it = 0; it < NT; ++it)
        for (int ip = 0; ip < NP; ++ip)
            if (usable(it, ip)) comp_size[dsu.find(it * NP + ip)]++;
    int big = 0, small = 0;
    int min_size = std::max(8, n / 200);
    for (const auto& [root, sz] : comp_size) (sz >= min_size ? big : small)++;
    set.smooth_components = big;
    if (small > 0) {
        set.resolution_ok = false;
        set.note = std::to_string(small) + " fragment component(s) below the size threshold";
    }

    // Build the locus polyline. The locus lies in the plane x1 = 0 and
    // winds once around the x1-axis, so after deduplication the nodes are
    // ordered by angle in the stretched (x2, x3) plane. The cut preimage is
    // sampled unevenly by the covector grid, so angle ordering is far more
    // robust than nearest-neighbor chaining across the sparse arcs.
    std::vector<Eigen::Vector3d> nodes;     // true coordinates
    std::vector<Eigen::Vector3d> nodes_sc;  // stretched
    for (int i = 0; i < n; ++i) {
        if (!set.samples[static_cast<std::size_t>(i)].locus) continue;
        const Eigen::Vector3d& x = set.samples[static_cast<std::size_t>(i)].endpoint;
        Eigen::Vector3d xs = scaled(x);
        bool dup = false;
        for (const auto& y : nodes_sc)
            if ((xs - y).norm() < 1.0 * rho) {
                dup = true;
                break;
            }
        if (!dup) {
            nodes.push_back(x);
            nodes_sc.push_back(xs);
        }
    }
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::atan2(nodes_sc[a](2), nodes_sc[a](1)) <
               std::atan2(nodes_sc[b](2), nodes_sc[b](1));
    });
    if (nodes.size() >= 24) {
        double perimeter = 0.0, max_gap = 0.0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            double gap =
                (nodes_sc[order[(i + 1) % order.size()]] - nodes_sc[order[i]]).norm();
            perimeter += gap;
            max_gap = std::max(max_gap, gap);
        }
        for (std::size_t id : order) set.locus_polyline.push_back(nodes[id]);
        if (max_gap < 0.15 * perimeter) {
            set.locus_loops = 1;
        } else {
            set.resolution_ok = false;
            set.note = "locus sampling gap exceeds 15% of the perimeter";
        }
    } else if (!nodes.empty()) {
        set.resolution_ok = false;
        set.note = "too few locus nodes to form a polyline";
    }
    return set;
}

}  // namespace srlab
