#include "shapegrad/geodesic.hpp"

#include <algorithm>
#include <cmath>

namespace shapegrad {

namespace {

struct LocalHelmholtz {
    double m[3][3]; // one component block; both components identical
    double lump;    // lumped vector-mass contribution per vertex (area/3)
};

LocalHelmholtz local_helmholtz(const Vec2& p0, const Vec2& p1, const Vec2& p2, double A) {
    LocalHelmholtz lh;
    const auto eg = element_geometry(p0, p1, p2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            lh.m[i][j] = eg.area / 12.0 * (i == j ? 2.0 : 1.0) +
                         A * eg.area * dot(eg.grad[static_cast<std::size_t>(i)], eg.grad[static_cast<std::size_t>(j)]);
    lh.lump = eg.area / 3.0;
    return lh;
}

struct LocalElasticity {
    double k[6][6];
};

LocalElasticity local_elasticity(const Vec2& p0, const Vec2& p1, const Vec2& p2, double mu_e,
                                 double lambda) {
    LocalElasticity le;
    const auto eg = element_geometry(p0, p1, p2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Vec2 gi = eg.grad[static_cast<std::size_t>(i)];
            const Vec2 gj = eg.grad[static_cast<std::size_t>(j)];
            const double gij = dot(gi, gj);
            const double gi_c[2] = {gi.x, gi.y};
            const double gj_c[2] = {gj.x, gj.y};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    le.k[2 * i + a][2 * j + b] =
                        eg.area * (mu_e * (gi_c[b] * gj_c[a] + (a == b ? gij : 0.0)) +
                                   lambda * gi_c[a] * gj_c[b]);
        }
    return le;
}

double mean_edge_length(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    return ((p1 - p0).norm() + (p2 - p1).norm() + (p0 - p2).norm()) / 3.0;
}

} // namespace

// Central differences of the element-local operator contributions with
// respect to each corner coordinate, reusable across momenta iterates at a
// fixed configuration.
struct GeodesicMetric::DeltaCache {
    // HS: per element, per (corner, component): 9 block entries + 1 lump.
    // SP: per element, per (corner, component): 36 entries.
    std::vector<double> data;
    int per_perturbation = 0;
};

GeodesicMetric::GeodesicMetric(const TriMesh& mesh_template, const MetricSpec& spec)
    : template_(mesh_template), spec_(spec) {
    spec_.check();
    if (spec_.kind == MetricKind::SP) frozen_mu_ = mu_field(template_, spec_.mu_min, spec_.mu_max);
    constrained_.assign(2 * template_.vertices.size(), 0);
    for (int d : outer_boundary_dofs(template_)) constrained_[static_cast<std::size_t>(d)] = 1;
}

void GeodesicMetric::check_positive(const std::vector<Vec2>& q, int step) const {
    for (const auto& tri : template_.triangles) {
        const double a = signed_area(q[static_cast<std::size_t>(tri.v[0])], q[static_cast<std::size_t>(tri.v[1])],
                                     q[static_cast<std::size_t>(tri.v[2])]);
        if (!(a > 0.0))
            throw GeodesicIntegrationError("geodesic: mesh inverted during integration", step);
    }
}

void GeodesicMetric::build_operator(const std::vector<Vec2>& q, SparseMatrix& B,
                                    std::vector<double>& lumped) const {
    const int n = 2 * static_cast<int>(q.size());
    std::vector<SparseMatrix::Triplet> t;
    lumped.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& tri : template_.triangles) {
        const Vec2 p0 = q[static_cast<std::size_t>(tri.v[0])];
        const Vec2 p1 = q[static_cast<std::size_t>(tri.v[1])];
        const Vec2 p2 = q[static_cast<std::size_t>(tri.v[2])];
        if (spec_.kind == MetricKind::HS) {
            const LocalHelmholtz lh = local_helmholtz(p0, p1, p2, spec_.A);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j)
                    for (int d = 0; d < 2; ++d)
                        t.push_back({2 * tri.v[static_cast<std::size_t>(i)] + d,
                                     2 * tri.v[static_cast<std::size_t>(j)] + d, lh.m[i][j]});
                for (int d = 0; d < 2; ++d)
                    lumped[static_cast<std::size_t>(2 * tri.v[static_cast<std::size_t>(i)] + d)] += lh.lump;
            }
        } else {
            const double mu_e = (frozen_mu_[static_cast<std::size_t>(tri.v[0])] +
                                 frozen_mu_[static_cast<std::size_t>(tri.v[1])] +
                                 frozen_mu_[static_cast<std::size_t>(tri.v[2])]) / 3.0;
            const LocalElasticity le = local_elasticity(p0, p1, p2, mu_e, spec_.lambda);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b)
                            t.push_back({2 * tri.v[static_cast<std::size_t>(i)] + a,
                                         2 * tri.v[static_cast<std::size_t>(j)] + b, le.k[2 * i + a][2 * j + b]});
        }
    }
    B = SparseMatrix::from_triplets(n, std::move(t));
}

namespace {

void mask_dofs(const std::vector<unsigned char>& constrained, std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (constrained[i]) x[i] = 0.0;
}

} // namespace

SparseSystem GeodesicMetric::metric_matrix_at(const std::vector<Vec2>& q) const {
    if (q.size() != template_.vertices.size())
        throw std::invalid_argument("metric_matrix_at: configuration size mismatch");
    check_positive(q, -1);
    SparseMatrix B;
    std::vector<double> lumped;
    build_operator(q, B, lumped);

    SparseMatrix G = B;
    if (spec_.kind == MetricKind::HS) {
        for (int f = 1; f < spec_.s; ++f) {
            // G <- B * D^{-1} * G
            std::vector<SparseMatrix::Triplet> t;
            for (int r = 0; r < B.size(); ++r) {
                const auto br = B.row(r);
                for (int k = 0; k < br.count; ++k) {
                    const int mid = br.cols[k];
                    if (constrained_[static_cast<std::size_t>(mid)]) continue;
                    const double w = br.vals[k] / lumped[static_cast<std::size_t>(mid)];
                    const auto gr = G.row(mid);
                    for (int l = 0; l < gr.count; ++l)
                        t.push_back({r, gr.cols[l], w * gr.vals[l]});
                }
            }
            G = SparseMatrix::from_triplets(B.size(), std::move(t));
        }
    }

    SparseSystem sys;
    sys.matrix = std::move(G);
    sys.constrained = constrained_;
    sys.constrained_value.assign(constrained_.size(), 0.0);
    return sys;
}

std::vector<double> GeodesicMetric::apply(const std::vector<Vec2>& q,
                                          const std::vector<double>& v) const {
    SparseMatrix B;
    std::vector<double> lumped;
    build_operator(q, B, lumped);
    std::vector<double> z = v;
    mask_dofs(constrained_, z);
    z = B.apply(z);
    mask_dofs(constrained_, z);
    for (int f = 1; f < spec_.s && spec_.kind == MetricKind::HS; ++f) {
        for (std::size_t i = 0; i < z.size(); ++i) z[i] /= lumped[i];
        z = B.apply(z);
        mask_dofs(constrained_, z);
    }
    return z;
}

std::vector<double> GeodesicMetric::solve(const std::vector<Vec2>& q,
                                          const std::vector<double>& rhs, double tol) const {
    SparseMatrix B;
    std::vector<double> lumped;
    build_operator(q, B, lumped);
    SparseSystem sys;
    sys.matrix = std::move(B);
    sys.constrained = constrained_;
    sys.constrained_value.assign(constrained_.size(), 0.0);

    std::vector<double> v = solve_spd(sys, rhs, tol);
    if (spec_.kind == MetricKind::HS)
        for (int f = 1; f < spec_.s; ++f) {
            std::vector<double> dv(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) dv[i] = lumped[i] * v[i];
            v = solve_spd(sys, dv, tol);
        }
    return v;
}

double GeodesicMetric::hamiltonian(const PhaseState& state, double tol) const {
    if (state.q.size() != template_.vertices.size() || state.p.size() != state.q.size())
        throw std::invalid_argument("hamiltonian: phase state size mismatch");
    check_positive(state.q, -1);
    std::vector<double> p = flatten(state.p);
    mask_dofs(constrained_, p);
    const std::vector<double> v = solve(state.q, p, tol);
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) h += p[i] * v[i];
    return 0.5 * h;
}

GeodesicMetric::DeltaCache GeodesicMetric::build_delta_cache_at(const std::vector<Vec2>& q) const {
    DeltaCache cache;
    cache.per_perturbation = spec_.kind == MetricKind::HS ? 10 : 36;
    const std::size_t stride = static_cast<std::size_t>(cache.per_perturbation) * 6;
    cache.data.assign(stride * template_.triangles.size(), 0.0);

    for (std::size_t e = 0; e < template_.triangles.size(); ++e) {
        const auto& tri = template_.triangles[e];
        const Vec2 base[3] = {q[static_cast<std::size_t>(tri.v[0])], q[static_cast<std::size_t>(tri.v[1])],
                              q[static_cast<std::size_t>(tri.v[2])]};
        const double h_fd = 1e-6 * mean_edge_length(base[0], base[1], base[2]);
        const double mu_e = spec_.kind == MetricKind::SP
                                ? (frozen_mu_[static_cast<std::size_t>(tri.v[0])] +
                                   frozen_mu_[static_cast<std::size_t>(tri.v[1])] +
                                   frozen_mu_[static_cast<std::size_t>(tri.v[2])]) / 3.0
                                : 0.0;
        for (int lv = 0; lv < 3; ++lv)
            for (int d = 0; d < 2; ++d) {
                Vec2 plus[3] = {base[0], base[1], base[2]};
                Vec2 minus[3] = {base[0], base[1], base[2]};
                if (d == 0) { plus[lv].x += h_fd; minus[lv].x -= h_fd; }
                else { plus[lv].y += h_fd; minus[lv].y -= h_fd; }
                double* out = cache.data.data() + stride * e +
                              static_cast<std::size_t>(cache.per_perturbation) * (2 * lv + d);
                const double inv2h = 1.0 / (2.0 * h_fd);
                if (spec_.kind == MetricKind::HS) {
                    const LocalHelmholtz a = local_helmholtz(plus[0], plus[1], plus[2], spec_.A);
                    const LocalHelmholtz b = local_helmholtz(minus[0], minus[1], minus[2], spec_.A);
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            out[3 * i + j] = (a.m[i][j] - b.m[i][j]) * inv2h;
                    out[9] = (a.lump - b.lump) * inv2h;
                } else {
                    const LocalElasticity a = local_elasticity(plus[0], plus[1], plus[2], mu_e, spec_.lambda);
                    const LocalElasticity b = local_elasticity(minus[0], minus[1], minus[2], mu_e, spec_.lambda);
                    for (int i = 0; i < 6; ++i)
                        for (int j = 0; j < 6; ++j)
                            out[6 * i + j] = (a.k[i][j] - b.k[i][j]) * inv2h;
                }
            }
    }
    return cache;
}

std::vector<Vec2> GeodesicMetric::dH_with(const SparseMatrix& B, const std::vector<double>& lumped,
                                          const DeltaCache& cache,
                                          const std::vector<double>& v) const {
    // Chain vectors r_j = (D^{-1} B)^j v; the derivative of v^T G v splits
    // into element-local pairings against dB and dD:
    //   d(v^T G v) = sum_j r_j^T dB r_{s-1-j} - sum_{j>=1} r_j^T dD r_{s-j}.
    const int s = spec_.kind == MetricKind::HS ? spec_.s : 1;
    std::vector<std::vector<double>> r(static_cast<std::size_t>(s));
    r[0] = v;
    for (int j = 1; j < s; ++j) {
        std::vector<double> t = B.apply(r[static_cast<std::size_t>(j - 1)]);
        mask_dofs(constrained_, t);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] /= lumped[i];
        r[static_cast<std::size_t>(j)] = std::move(t);
    }

    std::vector<Vec2> dh(template_.vertices.size(), Vec2{0.0, 0.0});
    const std::size_t stride = static_cast<std::size_t>(cache.per_perturbation) * 6;

    for (std::size_t e = 0; e < template_.triangles.size(); ++e) {
        const auto& tri = template_.triangles[e];
        const int gv[3] = {tri.v[0], tri.v[1], tri.v[2]};
        for (int lv = 0; lv < 3; ++lv)
            for (int d = 0; d < 2; ++d) {
                const double* delta = cache.data.data() + stride * e +
                                      static_cast<std::size_t>(cache.per_perturbation) * (2 * lv + d);
                double acc = 0.0;
                if (spec_.kind == MetricKind::HS) {
                    for (int j = 0; j < s; ++j) {
                        const auto& a = r[static_cast<std::size_t>(j)];
                        const auto& b = r[static_cast<std::size_t>(s - 1 - j)];
                        for (int i = 0; i < 3; ++i)
                            for (int k = 0; k < 3; ++k) {
                                const double pairing =
                                    a[static_cast<std::size_t>(2 * gv[i])] * b[static_cast<std::size_t>(2 * gv[k])] +
                                    a[static_cast<std::size_t>(2 * gv[i] + 1)] * b[static_cast<std::size_t>(2 * gv[k] + 1)];
                                acc += delta[3 * i + k] * pairing;
                            }
                    }
                    for (int j = 1; j < s; ++j) {
                        const auto& a = r[static_cast<std::size_t>(j)];
                        const auto& b = r[static_cast<std::size_t>(s - j)];
                        double diag = 0.0;
                        for (int i = 0; i < 3; ++i)
                            diag += a[static_cast<std::size_t>(2 * gv[i])] * b[static_cast<std::size_t>(2 * gv[i])] +
                                    a[static_cast<std::size_t>(2 * gv[i] + 1)] * b[static_cast<std::size_t>(2 * gv[i] + 1)];
                        acc -= delta[9] * diag;
                    }
                } else {
                    for (int i = 0; i < 3; ++i)
                        for (int ci = 0; ci < 2; ++ci)
                            for (int k = 0; k < 3; ++k)
                                for (int ck = 0; ck < 2; ++ck)
                                    acc += delta[6 * (2 * i + ci) + (2 * k + ck)] *
                                           v[static_cast<std::size_t>(2 * gv[i] + ci)] *
                                           v[static_cast<std::size_t>(2 * gv[k] + ck)];
                }
                Vec2& slot = dh[static_cast<std::size_t>(gv[lv])];
                if (d == 0) slot.x += -0.5 * acc; else slot.y += -0.5 * acc;
            }
    }
    return dh;
}

std::vector<Vec2> GeodesicMetric::dH_dq(const PhaseState& state, double tol) const {
    if (state.q.size() != template_.vertices.size() || state.p.size() != state.q.size())
        throw std::invalid_argument("dH_dq: phase state size mismatch");
    check_positive(state.q, -1);
    SparseMatrix B;
    std::vector<double> lumped;
    build_operator(state.q, B, lumped);
    std::vector<double> p = flatten(state.p);
    mask_dofs(constrained_, p);
    const std::vector<double> v = solve(state.q, p, tol);
    const DeltaCache cache = build_delta_cache_at(state.q);
    return dH_with(B, lumped, cache, v);
}

SparseSystem metric_matrix_at(const std::vector<Vec2>& q, const TriMesh& mesh_template,
                              const MetricSpec& spec) {
    return GeodesicMetric(mesh_template, spec).metric_matrix_at(q);
}

double hamiltonian(const PhaseState& state, const TriMesh& mesh_template, const MetricSpec& spec) {
    return GeodesicMetric(mesh_template, spec).hamiltonian(state);
}

std::vector<Vec2> dH_dq(const PhaseState& state, const TriMesh& mesh_template,
                        const MetricSpec& spec) {
    return GeodesicMetric(mesh_template, spec).dH_dq(state);
}

namespace {

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double linf(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

constexpr int kFixedPointCap = 300;

} // namespace

PhaseState verlet_step(const GeodesicMetric& metric, const PhaseState& state, double h) {
    const double cg_tol = 1e-12;
    metric.check_positive(state.q, -1);

    SparseMatrix B0;
    std::vector<double> lumped0;
    metric.build_operator(state.q, B0, lumped0);
    const GeodesicMetric::DeltaCache cache0 = metric.build_delta_cache_at(state.q);

    SparseSystem sys0;
    sys0.matrix = B0; // copy; B0 stays available for the chain in dH_with
    sys0.constrained = metric.constrained_;
    sys0.constrained_value.assign(metric.constrained_.size(), 0.0);
    auto solve0 = [&](const std::vector<double>& rhs) {
        std::vector<double> v = solve_spd(sys0, rhs, cg_tol);
        if (metric.spec_.kind == MetricKind::HS)
            for (int f = 1; f < metric.spec_.s; ++f) {
                std::vector<double> dv(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) dv[i] = lumped0[i] * v[i];
                v = solve_spd(sys0, dv, cg_tol);
            }
        return v;
    };

    std::vector<double> p0 = flatten(state.p);
    mask_dofs(metric.constrained_, p0);
    const double p_scale = std::max(linf(p0), 1e-300);
    const double p_tol = 1e-13 * p_scale;

    // Implicit half-step momenta: p_half = p0 - h/2 * dH/dq(q0, p_half).
    std::vector<double> p_half = p0;
    for (int it = 0;; ++it) {
        const std::vector<double> v = solve0(p_half);
        std::vector<double> g = flatten(metric.dH_with(B0, lumped0, cache0, v));
        mask_dofs(metric.constrained_, g);
        std::vector<double> next(p0.size());
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = p0[i] - 0.5 * h * g[i];
        const double change = linf(next, p_half);
        p_half = std::move(next);
        if (change <= p_tol) break;
        if (it >= kFixedPointCap)
            throw GeodesicIntegrationError("geodesic: momentum fixed point stalled", -1);
    }

    // Implicit position step: q1 = q0 + h/2 (H_p(q0, p_half) + H_p(q1, p_half)).
    const std::vector<double> va = solve0(p_half);
    std::vector<double> q0f = flatten(state.q);
    const double q_tol = 1e-13 * std::max(linf(q0f), 1.0);
    std::vector<double> q1 = q0f;
    for (std::size_t i = 0; i < q1.size(); ++i) q1[i] += h * va[i];
    for (int it = 0;; ++it) {
        const std::vector<Vec2> qv = unflatten(q1);
        metric.check_positive(qv, -1);
        const std::vector<double> vb = metric.solve(qv, p_half, cg_tol);
        std::vector<double> next(q1.size());
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = q0f[i] + 0.5 * h * (va[i] + vb[i]);
        const double change = linf(next, q1);
        q1 = std::move(next);
        if (change <= q_tol) break;
        if (it >= kFixedPointCap)
            throw GeodesicIntegrationError("geodesic: position fixed point stalled", -1);
    }

    // Explicit second momentum half-step at the new configuration.
    const std::vector<Vec2> q1v = unflatten(q1);
    metric.check_positive(q1v, -1);
    SparseMatrix B1;
    std::vector<double> lumped1;
    metric.build_operator(q1v, B1, lumped1);
    const GeodesicMetric::DeltaCache cache1 = metric.build_delta_cache_at(q1v);
    const std::vector<double> v1 = metric.solve(q1v, p_half, cg_tol);
    std::vector<double> g1 = flatten(metric.dH_with(B1, lumped1, cache1, v1));
    mask_dofs(metric.constrained_, g1);
    std::vector<double> p1(p_half.size());
    for (std::size_t i = 0; i < p1.size(); ++i) p1[i] = p_half[i] - 0.5 * h * g1[i];
    mask_dofs(metric.constrained_, p1);

    return {q1v, unflatten(p1)};
}

ShootResult shoot(const TriMesh& mesh, const VectorField& v0, double T, int n_steps,
                  const MetricSpec& spec) {
    if (v0.size() != mesh.vertices.size())
        throw std::invalid_argument("shoot: v0 must have one value per vertex");
    if (n_steps < 1) throw std::invalid_argument("shoot: n_steps must be >= 1");
    const GeodesicMetric metric(mesh, spec);
    {
        std::vector<double> flat = flatten(v0);
        for (std::size_t i = 0; i < flat.size(); ++i)
            if (metric.constrained_[i] && flat[i] != 0.0)
                throw std::invalid_argument("shoot: v0 must vanish on the OUTER boundary");
    }

    PhaseState st;
    st.q = mesh.vertices;
    std::vector<double> p0 = metric.apply(st.q, flatten(v0));
    mask_dofs(metric.constrained_, p0);
    st.p = unflatten(p0);

    ShootResult res;
    {
        const std::vector<double> vf = flatten(v0);
        double h0 = 0.0;
        for (std::size_t i = 0; i < p0.size(); ++i) h0 += p0[i] * vf[i];
        TriMesh m0 = mesh;
        res.diagnostics.push_back({0, 0.5 * h0, mesh_quality(m0).min_quality});
    }

    const double h = T / n_steps;
    for (int k = 1; k <= n_steps; ++k) {
        try {
            st = verlet_step(metric, st, h);
        } catch (const GeodesicIntegrationError& e) {
            throw GeodesicIntegrationError(e.what(), k);
        }
        TriMesh cur = mesh;
        cur.vertices = st.q;
        res.diagnostics.push_back({k, metric.hamiltonian(st), mesh_quality(cur).min_quality});
    }

    res.mesh = mesh;
    res.mesh.vertices = st.q;
    std::vector<double> pT = flatten(st.p);
    mask_dofs(metric.constrained_, pT);
    res.final_velocity = unflatten(metric.solve(st.q, pT));
    return res;
}

} // namespace shapegrad
