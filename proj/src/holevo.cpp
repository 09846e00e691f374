#include "qcap/holevo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qcap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSupportTol = 1e-12;

double geodesic(const BlochPoint& a, const BlochPoint& b) {
    return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

BlochPoint normalized(const BlochPoint& p) {
    const double n = p.norm();
    if (n < 1e-300) return {0.0, 0.0, 1.0};
    return p * (1.0 / n);
}

}  // namespace

double bloch_entropy(double r) {
    r = std::clamp(r, 0.0, 1.0);
    return binary_entropy(0.5 * (1.0 + r));
}

double bloch_divergence(const BlochPoint& r, const BlochPoint& s) {
    const double nr = r.norm(), ns = s.norm();
    const double mu_plus = 0.5 * (1.0 + ns), mu_minus = 0.5 * (1.0 - ns);
    // Projection of r onto the eigen-axis of rho_s gives the weights of
    // rho_r on the eigenvectors of rho_s.
    const double proj = ns > 0.0 ? r.dot(s) / ns : 0.0;
    const double w_plus = 0.5 * (1.0 + proj), w_minus = 0.5 * (1.0 - proj);
    double val = -bloch_entropy(nr);
    if (mu_minus < kSupportTol) {
        if (w_minus > kSupportTol) return kDivergenceInfinity;
    } else {
        val -= w_minus * std::log2(mu_minus);
    }
    val -= w_plus * std::log2(mu_plus);
    return std::max(val, 0.0);
}

double ensemble_objective(const QubitChannel& c, const std::vector<WeightedInput>& ensemble) {
    BlochPoint sigma{};
    double avg_s = 0.0;
    for (const auto& e : ensemble) {
        const BlochPoint out = c.map(e.point);
        sigma = sigma + out * e.probability;
        avg_s += e.probability * bloch_entropy(out.norm());
    }
    return bloch_entropy(sigma.norm()) - avg_s;
}

Lattice build_lattice(std::size_t k) {
    if (k < 2) throw std::invalid_argument("build_lattice: k must be >= 2");
    Lattice lat;
    lat.k = k;
    lat.points.push_back({0.0, 0.0, 1.0});
    for (std::size_t u = 1; u < k; ++u) {
        const double phi = kPi * static_cast<double>(u) / static_cast<double>(k);
        const double sphi = std::sin(phi), cphi = std::cos(phi);
        for (std::size_t v = 0; v < k; ++v) {
            const double theta = 2.0 * kPi * static_cast<double>(v) / static_cast<double>(k);
            lat.points.push_back({sphi * std::cos(theta), sphi * std::sin(theta), cphi});
        }
    }
    lat.points.push_back({0.0, 0.0, -1.0});

    // Coarseness: deterministic 10k^2-point sweep; candidate nearest vertices
    // located from the angular coordinates instead of a full scan.
    const std::size_t samples = 10 * k * k;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    double delta = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden * static_cast<double>(i);
        const BlochPoint q{rad * std::cos(th), rad * std::sin(th), z};
        const double phi = std::acos(std::clamp(z, -1.0, 1.0));
        const double theta = std::fmod(std::atan2(q.y, q.x) + 2.0 * kPi, 2.0 * kPi);
        const double fu = phi * static_cast<double>(k) / kPi;
        const double fv = theta * static_cast<double>(k) / (2.0 * kPi);
        double best = kPi;
        for (long du = -1; du <= 1; ++du)
            for (long dv = -1; dv <= 1; ++dv) {
                const long u = std::clamp<long>(std::lround(fu) + du, 0, static_cast<long>(k));
                std::size_t idx;
                if (u == 0)
                    idx = 0;
                else if (u == static_cast<long>(k))
                    idx = lat.points.size() - 1;
                else {
                    long v = (std::lround(fv) + dv) % static_cast<long>(k);
                    if (v < 0) v += static_cast<long>(k);
                    idx = 1 + static_cast<std::size_t>(u - 1) * k + static_cast<std::size_t>(v);
                }
                best = std::min(best, geodesic(q, lat.points[idx]));
            }
        delta = std::max(delta, best);
    }
    lat.delta = delta;
    return lat;
}

namespace {

struct BaState {
    std::vector<double> p;           // weights over lattice support
    std::vector<std::size_t> active; // indices into the lattice
    BlochPoint sigma;
    double objective = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Multiplicative-weights fixed point over the simplex for fixed outputs.
BaState run_simplex_opt(const std::vector<BlochPoint>& outputs, const std::vector<double>& s_out,
                        double tol, std::size_t max_iter) {
    const std::size_t n = outputs.size();
    BaState st;
    st.active.resize(n);
    std::iota(st.active.begin(), st.active.end(), 0);
    st.p.assign(n, 1.0 / static_cast<double>(n));

    std::vector<double> div(n);
    double gamma = 1.0;
    double prev_obj = -1.0;
    std::vector<double> saved_p;

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        st.iterations = iter + 1;
        BlochPoint sigma{};
        double avg_s = 0.0;
        for (std::size_t a = 0; a < st.active.size(); ++a) {
            const std::size_t i = st.active[a];
            sigma = sigma + outputs[i] * st.p[a];
            avg_s += st.p[a] * s_out[i];
        }
        double obj = bloch_entropy(sigma.norm()) - avg_s;

        if (obj < prev_obj - 1e-15 && !saved_p.empty()) {
            // The last step overshot: undo it and damp. gamma = 1 is the
            // plain Blahut-Arimoto step, which never decreases the
            // objective, so the floor keeps every subsequent step accepted.
            st.p = saved_p;
            gamma = std::max(gamma * 0.5, 1.0);
            sigma = {};
            avg_s = 0.0;
            for (std::size_t a = 0; a < st.active.size(); ++a) {
                const std::size_t i = st.active[a];
                sigma = sigma + outputs[i] * st.p[a];
                avg_s += st.p[a] * s_out[i];
            }
            obj = bloch_entropy(sigma.norm()) - avg_s;
        } else {
            gamma = std::min(gamma * 1.05, 400.0);
        }
        st.sigma = sigma;
        st.objective = obj;

        double max_div = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            max_div = std::max(max_div, bloch_divergence(outputs[i], sigma));
        st.gap = max_div - obj;
        if (st.gap < tol) {
            st.converged = true;
            break;
        }

        for (std::size_t a = 0; a < st.active.size(); ++a)
            div[a] = bloch_divergence(outputs[st.active[a]], sigma);

        saved_p = st.p;
        double norm = 0.0;
        for (std::size_t a = 0; a < st.active.size(); ++a) {
            st.p[a] *= std::exp2(std::min(gamma * (div[a] - obj), 600.0));
            norm += st.p[a];
        }
        for (auto& w : st.p) w /= norm;

        if ((iter + 1) % 200 == 0) {
            // Drop vanished support so later iterations stay cheap, and
            // re-admit any lattice point whose divergence still exceeds the
            // objective: such a point belongs to the optimal support even if
            // an early aggressive step crushed its weight.
            std::vector<bool> is_active(n, false);
            for (std::size_t a = 0; a < st.active.size(); ++a)
                is_active[st.active[a]] = true;
            std::vector<double> np;
            std::vector<std::size_t> na;
            double total = 0.0;
            for (std::size_t a = 0; a < st.active.size(); ++a)
                if (st.p[a] > 1e-15) {
                    np.push_back(st.p[a]);
                    na.push_back(st.active[a]);
                    total += st.p[a];
                }
            for (std::size_t i = 0; i < n; ++i)
                if (!is_active[i] && bloch_divergence(outputs[i], sigma) > obj + 1e-12) {
                    np.push_back(1e-12);
                    na.push_back(i);
                    total += 1e-12;
                }
            if (na.size() >= 2) {
                for (auto& w : np) w /= total;
                st.p = std::move(np);
                st.active = std::move(na);
                saved_p.clear();
            }
        }
        prev_obj = st.objective;
    }
    return st;
}

struct Cluster {
    double weight = 0.0;
    BlochPoint centroid;             // weight centroid, re-projected
    std::vector<std::size_t> members;  // indices into a point list
};

std::vector<Cluster> merge_clusters(const std::vector<BlochPoint>& pts,
                                    const std::vector<double>& w, double threshold) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (geodesic(pts[i], pts[j]) <= threshold) parent[find(i)] = find(j);

    std::vector<Cluster> out;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(out.size());
            out.emplace_back();
        }
        Cluster& cl = out[static_cast<std::size_t>(slot[r])];
        cl.weight += w[i];
        cl.centroid = cl.centroid + pts[i] * w[i];
        cl.members.push_back(i);
    }
    for (auto& cl : out) cl.centroid = normalized(cl.centroid);
    return out;
}

// Reduce a degenerate optimizer support (continuous rings of equivalent
// inputs for axially symmetric channels) to a minimal representative set.
std::vector<WeightedInput> reduce_support(const std::vector<BlochPoint>& pts,
                                          const std::vector<double>& w,
                                          const BlochPoint& sigma_out, std::size_t k) {
    const double spacing = 2.0 * kPi / static_cast<double>(k);
    std::vector<Cluster> clusters = merge_clusters(pts, w, 1.5 * spacing);

    struct Rep {
        double weight;
        BlochPoint point;
    };
    std::vector<Rep> reps;
    for (const auto& cl : clusters) {
        double diam = 0.0;
        for (std::size_t a = 0; a < cl.members.size(); ++a)
            for (std::size_t b = a + 1; b < cl.members.size(); ++b)
                diam = std::max(diam, geodesic(pts[cl.members[a]], pts[cl.members[b]]));
        if (diam > 4.0 * spacing) {
            // Spread-out cluster: keep the heaviest member and the member
            // farthest from it (an arc or the whole sphere reduces to an
            // equivalent two-point ensemble).
            std::size_t heavy = cl.members[0];
            for (std::size_t m : cl.members)
                if (w[m] > w[heavy]) heavy = m;
            std::size_t far = heavy;
            for (std::size_t m : cl.members)
                if (geodesic(pts[m], pts[heavy]) > geodesic(pts[far], pts[heavy])) far = m;
            reps.push_back({0.5 * cl.weight, pts[heavy]});
            reps.push_back({0.5 * cl.weight, pts[far]});
        } else {
            reps.push_back({cl.weight, cl.centroid});
        }
    }

    // Ring degeneracy: three or more representatives at a common polar angle
    // about the average-output axis are one continuous family; two points at
    // mirrored azimuths carry the same average.
    const BlochPoint axis =
        sigma_out.norm() > 1e-9 ? normalized(sigma_out) : BlochPoint{0.0, 0.0, 1.0};
    std::vector<Rep> final_reps;
    std::vector<bool> used(reps.size(), false);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> group{i};
        for (std::size_t j = i + 1; j < reps.size(); ++j)
            if (!used[j] &&
                std::abs(reps[j].point.dot(axis) - reps[i].point.dot(axis)) < 1.2 * spacing &&
                geodesic(reps[i].point, reps[j].point) > 2.0 * spacing)
                group.push_back(j);
        if (group.size() >= 3) {
            double gw = 0.0;
            std::size_t heavy = group[0];
            for (std::size_t g : group) {
                used[g] = true;
                gw += reps[g].weight;
                if (reps[g].weight > reps[heavy].weight) heavy = g;
            }
            const BlochPoint pm = reps[heavy].point;
            const BlochPoint mirror = normalized(axis * (2.0 * pm.dot(axis)) - pm);
            final_reps.push_back({0.5 * gw, pm});
            final_reps.push_back({0.5 * gw, mirror});
        } else {
            used[i] = true;
            final_reps.push_back(reps[i]);
        }
    }

    std::vector<WeightedInput> out;
    for (const auto& r : final_reps) out.push_back({r.weight, r.point});
    return out;
}

}  // namespace

CapacityResult restricted_capacity(const QubitChannel& c, const Lattice& lat, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("restricted_capacity: tol must be positive");
    if (const auto rep = cptp_check(c); !rep.is_cptp)
        throw std::invalid_argument("restricted_capacity: channel is not CPTP");

    const std::size_t n = lat.points.size();
    std::vector<BlochPoint> outputs(n);
    std::vector<double> s_out(n);
    for (std::size_t i = 0; i < n; ++i) {
        outputs[i] = c.map(lat.points[i]);
        s_out[i] = bloch_entropy(outputs[i].norm());
    }

    const BaState st = run_simplex_opt(outputs, s_out, tol, 200000);

    CapacityResult res;
    res.value = st.objective;
    res.average_output = st.sigma;
    res.certificate_gap = st.gap;
    res.k_used = lat.k;
    res.converged = st.converged;
    res.iterations = st.iterations;
    res.error_bound = std::max(st.gap, 0.0);

    // Engaging ensemble: surviving support, merged and de-degenerated, with
    // weights re-solved over the representatives only.
    std::vector<BlochPoint> pts;
    std::vector<double> w;
    for (std::size_t a = 0; a < st.active.size(); ++a)
        if (st.p[a] > 1e-6) {
            pts.push_back(lat.points[st.active[a]]);
            w.push_back(st.p[a]);
        }
    std::vector<WeightedInput> reps = reduce_support(pts, w, st.sigma, lat.k);

    std::vector<BlochPoint> rep_out(reps.size());
    std::vector<double> rep_s(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        rep_out[i] = c.map(reps[i].point);
        rep_s[i] = bloch_entropy(rep_out[i].norm());
    }
    const BaState rst = run_simplex_opt(rep_out, rep_s, std::min(tol, 1e-11), 50000);

    res.ensemble.clear();
    double total = 0.0;
    for (std::size_t a = 0; a < rst.active.size(); ++a)
        if (rst.p[a] > 1e-6) total += rst.p[a];
    for (std::size_t a = 0; a < rst.active.size(); ++a)
        if (rst.p[a] > 1e-6)
            res.ensemble.push_back({rst.p[a] / total, reps[rst.active[a]].point});
    return res;
}

double certify_radius(const QubitChannel& c, const DensityMatrix& sigma, const Lattice& lat) {
    const BlochPoint s = density_to_stokes(sigma);
    double m = 0.0;
    for (const auto& p : lat.points) m = std::max(m, bloch_divergence(c.map(p), s));
    return m;
}

namespace {

// Solve (J^T J + ridge) dx = -J^T r for a dense system (rows x cols).
std::vector<double> solve_least_squares(const std::vector<std::vector<double>>& jac,
                                        const std::vector<double>& res) {
    const std::size_t rows = jac.size(), cols = jac.empty() ? 0 : jac[0].size();
    std::vector<std::vector<double>> a(cols, std::vector<double>(cols, 0.0));
    std::vector<double> b(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < cols; ++i) {
            if (jac[r][i] == 0.0) continue;
            b[i] -= jac[r][i] * res[r];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] += jac[r][i] * jac[r][j];
        }
    double tr = 0.0;
    for (std::size_t i = 0; i < cols; ++i) tr += a[i][i];
    const double ridge = 1e-12 * std::max(tr / static_cast<double>(cols), 1e-30);
    for (std::size_t i = 0; i < cols; ++i) a[i][i] += ridge;

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < cols; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < cols; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        const double d = a[col][col];
        if (std::abs(d) < 1e-300) continue;
        for (std::size_t r = 0; r < cols; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < cols; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(cols, 0.0);
    for (std::size_t i = 0; i < cols; ++i)
        if (std::abs(a[i][i]) > 1e-300) x[i] = b[i] / a[i][i];
    return x;
}

struct NewtonEval {
    std::vector<double> residual;
    double value = 0.0;
    BlochPoint sigma;
    bool degenerate = false;
};

// Variables: (phi_i, theta_i) pairs, then the m weights.
NewtonEval newton_residual(const QubitChannel& c, const std::vector<double>& x, std::size_t m) {
    NewtonEval ev;
    ev.residual.assign(3 * m, 0.0);
    std::vector<BlochPoint> n_in(m), out(m);
    BlochPoint sigma{};
    double wsum = 0.0, avg_s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double phi = x[2 * i], theta = x[2 * i + 1], w = x[2 * m + i];
        n_in[i] = {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                   std::cos(phi)};
        out[i] = c.map(n_in[i]);
        sigma = sigma + out[i] * w;
        wsum += w;
        avg_s += w * bloch_entropy(out[i].norm());
    }
    ev.sigma = sigma;
    const double ns = sigma.norm();
    if (ns > 1.0 - 1e-11) {
        ev.degenerate = true;
        return ev;
    }
    ev.value = bloch_entropy(ns) - avg_s;

    const BlochPoint shat = ns > 1e-12 ? sigma * (1.0 / ns) : BlochPoint{0.0, 0.0, 0.0};
    const double b = 0.5 * (std::log2(1.0 + ns) - std::log2(1.0 - ns));

    std::vector<double> div(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = out[i].norm();
        if (r > 1.0 - 1e-9) {
            ev.degenerate = true;
            return ev;
        }
        div[i] = bloch_divergence(out[i], sigma);

        // grad wrt the output Bloch vector, pulled back through L^T and
        // projected on the tangent basis at the input point.
        BlochPoint g_out{};
        if (r > 1e-12) {
            const double sp = 0.5 * (std::log2(1.0 + r) - std::log2(1.0 - r)) / r;
            g_out = out[i] * sp;
        }
        g_out = g_out - shat * b;
        BlochPoint g_in{};
        g_in.x = c.linear[0][0] * g_out.x + c.linear[1][0] * g_out.y + c.linear[2][0] * g_out.z;
        g_in.y = c.linear[0][1] * g_out.x + c.linear[1][1] * g_out.y + c.linear[2][1] * g_out.z;
        g_in.z = c.linear[0][2] * g_out.x + c.linear[1][2] * g_out.y + c.linear[2][2] * g_out.z;

        const double phi = x[2 * i], theta = x[2 * i + 1];
        const BlochPoint e_phi{std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta),
                               -std::sin(phi)};
        const BlochPoint e_theta{-std::sin(phi) * std::sin(theta),
                                 std::sin(phi) * std::cos(theta), 0.0};
        ev.residual[2 * i] = g_in.dot(e_phi);
        ev.residual[2 * i + 1] = g_in.dot(e_theta);
    }
    for (std::size_t i = 1; i < m; ++i) ev.residual[2 * m + i - 1] = div[i] - div[0];
    ev.residual[3 * m - 1] = wsum - 1.0;
    return ev;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

CapacityResult refine_capacity(const QubitChannel& c, const CapacityResult& seed, double tol) {
    if (seed.ensemble.empty())
        throw std::invalid_argument("refine_capacity: seed has no engaging ensemble");
    const std::size_t m = seed.ensemble.size();

    std::vector<double> x(3 * m);
    for (std::size_t i = 0; i < m; ++i) {
        const BlochPoint& p = seed.ensemble[i].point;
        x[2 * i] = std::acos(std::clamp(p.z, -1.0, 1.0));
        x[2 * i + 1] = std::atan2(p.y, p.x);
        x[2 * m + i] = seed.ensemble[i].probability;
    }

    NewtonEval ev = newton_residual(c, x, m);
    if (ev.degenerate) {
        // Pure outputs (noiseless directions): the divergence gradient is
        // unbounded there and the seed is already optimal to lattice accuracy.
        CapacityResult res = seed;
        res.converged = true;
        return res;
    }

    const std::size_t nvar = 3 * m;
    bool ok = false;
    for (std::size_t iter = 0; iter < 80; ++iter) {
        if (max_abs(ev.residual) < tol) {
            ok = true;
            break;
        }
        // Finite-difference Jacobian.
        std::vector<std::vector<double>> jac(nvar, std::vector<double>(nvar, 0.0));
        const double h = 1e-6;
        for (std::size_t j = 0; j < nvar; ++j) {
            std::vector<double> xp = x;
            xp[j] += h;
            const NewtonEval evp = newton_residual(c, xp, m);
            if (evp.degenerate) throw std::runtime_error("refine_capacity: stepped into a degenerate point");
            for (std::size_t r = 0; r < nvar; ++r)
                jac[r][j] = (evp.residual[r] - ev.residual[r]) / h;
        }
        const std::vector<double> dx = solve_least_squares(jac, ev.residual);

        double scale = 1.0;
        bool accepted = false;
        for (int damp = 0; damp < 20; ++damp) {
            std::vector<double> xn = x;
            for (std::size_t j = 0; j < nvar; ++j) xn[j] += scale * dx[j];
            const NewtonEval evn = newton_residual(c, xn, m);
            if (!evn.degenerate && max_abs(evn.residual) < max_abs(ev.residual)) {
                x = std::move(xn);
                ev = evn;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;
    }
    if (!ok && max_abs(ev.residual) > std::max(tol, 1e-8))
        throw std::runtime_error("refine_capacity: Newton iteration did not converge");

    CapacityResult res;
    res.value = ev.value;
    res.average_output = ev.sigma;
    res.k_used = seed.k_used;
    res.converged = true;
    res.error_bound = max_abs(ev.residual);
    double div0 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double phi = x[2 * i], theta = x[2 * i + 1];
        const BlochPoint p{std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                           std::cos(phi)};
        res.ensemble.push_back({x[2 * m + i], p});
        div0 = std::max(div0, bloch_divergence(c.map(p), ev.sigma));
    }
    res.certificate_gap = div0 - ev.value;

    // Drop members the weight solve eliminated; re-polish if any were dropped.
    std::vector<WeightedInput> kept;
    for (const auto& e : res.ensemble)
        if (e.probability > 1e-7) kept.push_back(e);
    if (kept.size() < res.ensemble.size() && kept.size() >= 1) {
        CapacityResult again = seed;
        again.ensemble = kept;
        return refine_capacity(c, again, tol);
    }
    return res;
}

CapacityResult capacity(const QubitChannel& c, double target_err) {
    if (target_err <= 0.0) throw std::invalid_argument("capacity: target_err must be positive");
    CapacityResult best;
    bool have_prev = false;
    double prev_value = 0.0;

    for (std::size_t k : {10, 20, 40, 80, 160}) {
        const Lattice lat = build_lattice(k);
        const CapacityResult restricted =
            restricted_capacity(c, lat, std::clamp(target_err * 1e-2, 1e-9, 1e-6));
        CapacityResult refined;
        try {
            refined = refine_capacity(c, restricted, 1e-11);
        } catch (const std::exception&) {
            refined = restricted;  // fall back; the next k re-seeds Newton
        }
        refined.k_used = k;

        // Lattice-wide certificate against the refined center.
        BlochPoint sig = refined.average_output;
        double max_div = 0.0;
        for (const auto& p : lat.points) max_div = std::max(max_div, bloch_divergence(c.map(p), sig));
        for (const auto& e : refined.ensemble)
            max_div = std::max(max_div, bloch_divergence(c.map(e.point), sig));
        refined.certificate_gap = max_div - refined.value;

        const double step = have_prev ? std::abs(refined.value - prev_value)
                                      : std::numeric_limits<double>::infinity();
        refined.error_bound = (have_prev ? step : std::max(restricted.certificate_gap, 0.0)) +
                              std::max(refined.certificate_gap, 0.0);
        best = refined;
        if (have_prev && step < target_err && refined.certificate_gap < std::max(target_err, 1e-8)) {
            best.converged = true;
            return best;
        }
        prev_value = refined.value;
        have_prev = true;
    }
    best.converged = false;  // resource cap: report best-so-far
    return best;
}

PureState schmidt_state(const SchmidtPoint& s) {
    const complex eiphu = std::polar(1.0, s.phi_u), eiphv = std::polar(1.0, s.phi_v);
    const complex u0 = std::cos(s.theta_u), u1 = eiphu * std::sin(s.theta_u);
    const complex up0 = std::conj(eiphu) * std::sin(s.theta_u), up1 = -std::cos(s.theta_u);
    const complex v0 = std::cos(s.theta_v), v1 = eiphv * std::sin(s.theta_v);
    const complex vp0 = std::conj(eiphv) * std::sin(s.theta_v), vp1 = -std::cos(s.theta_v);
    const double sp = std::sqrt(std::clamp(s.p, 0.0, 1.0));
    const double sq = std::sqrt(std::clamp(1.0 - s.p, 0.0, 1.0));
    const complex phase = std::polar(1.0, s.nu);
    std::vector<complex> v(4);
    v[0] = sp * u0 * v0 + phase * sq * up0 * vp0;
    v[1] = sp * u0 * v1 + phase * sq * up0 * vp1;
    v[2] = sp * u1 * v0 + phase * sq * up1 * vp0;
    v[3] = sp * u1 * v1 + phase * sq * up1 * vp1;
    double n = 0.0;
    for (const auto& z : v) n += std::norm(z);
    n = std::sqrt(n);
    for (auto& z : v) z /= n;
    return PureState(std::move(v), FactoredDims{2, 2});
}

namespace {

// 4x4 Pauli-basis transfer matrix of the affine channel (index 0 = identity).
std::array<std::array<double, 4>, 4> transfer_matrix(const QubitChannel& c) {
    std::array<std::array<double, 4>, 4> m{};
    m[0][0] = 1.0;
    for (int i = 0; i < 3; ++i) {
        m[i + 1][0] = c.shift[i];
        for (int j = 0; j < 3; ++j) m[i + 1][j + 1] = c.linear[i][j];
    }
    return m;
}

const std::array<ComplexMatrix, 4>& pauli_set() {
    static const std::array<ComplexMatrix, 4> s = {
        ComplexMatrix(2, {1, 0, 0, 1}), ComplexMatrix(2, {0, 1, 1, 0}),
        ComplexMatrix(2, {0, complex(0, -1), complex(0, 1), 0}), ComplexMatrix(2, {1, 0, 0, -1})};
    return s;
}

const std::array<ComplexMatrix, 16>& pauli_pair_set() {
    static const std::array<ComplexMatrix, 16> s = [] {
        std::array<ComplexMatrix, 16> t;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) t[a * 4 + b] = kron(pauli_set()[a], pauli_set()[b]);
        return t;
    }();
    return s;
}

}  // namespace

DensityMatrix apply_channel_pair(const QubitChannel& c, const DensityMatrix& rho) {
    if (rho.dim() != 4) throw std::invalid_argument("apply_channel_pair: need a two-qubit state");
    const auto m = transfer_matrix(c);
    const auto& pp = pauli_pair_set();

    double coef[4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            complex t = 0.0;
            const ComplexMatrix& p = pp[a * 4 + b];
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t col = 0; col < 4; ++col) t += rho.matrix(r, col) * p(col, r);
            coef[a][b] = t.real();
        }
    double cp[4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) s += m[a][i] * m[b][j] * coef[i][j];
            cp[a][b] = s;
        }
    ComplexMatrix out(4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            if (cp[a][b] == 0.0) continue;
            out += pp[a * 4 + b] * complex(0.25 * cp[a][b]);
        }
    return DensityMatrix(std::move(out), FactoredDims{2, 2});
}

namespace {

// H(Lambda^x2 |psi><psi| || ref) with log_ref precomputed (base-2 log of the
// reference on its support; reference assumed full rank).
double pair_divergence(const QubitChannel& c, const PureState& psi,
                       const ComplexMatrix& log_ref) {
    const DensityMatrix out = apply_channel_pair(c, psi.density());
    double s = 0.0;
    for (double lam : hermitian_eigenvalues(out.matrix))
        if (lam > 1e-15) s += lam * std::log2(lam);
    complex cross = 0.0;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t col = 0; col < 4; ++col) cross += out.matrix(r, col) * log_ref(col, r);
    return s - cross.real();
}

ComplexMatrix log2_matrix(const ComplexMatrix& h) {
    const EigenSystem es = hermitian_eigensystem(h);
    ComplexMatrix out(h.dim());
    for (std::size_t k = 0; k < h.dim(); ++k) {
        const double lam = std::max(es.values[k], 1e-300);
        const double lg = std::log2(lam);
        for (std::size_t r = 0; r < h.dim(); ++r)
            for (std::size_t col = 0; col < h.dim(); ++col)
                out(r, col) += lg * es.vectors(r, k) * std::conj(es.vectors(col, k));
    }
    return out;
}

}  // namespace

AdditivityScan additivity_scan(const QubitChannel& c, const BlochPoint& avg_output,
                               std::size_t np, std::size_t na, unsigned threads) {
    if (np < 2 || na < 2) throw std::invalid_argument("additivity_scan: grid too small");
    const DensityMatrix ref1 = stokes_density(avg_output);
    const ComplexMatrix log_ref = log2_matrix(kron(ref1.matrix, ref1.matrix));

    const std::size_t total = np * na * na * na * na * na;
    auto point_at = [&](std::size_t idx) {
        SchmidtPoint s;
        auto take = [&](std::size_t count, double lo, double hi) {
            const std::size_t j = idx % count;
            idx /= count;
            return lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
        };
        s.nu = take(na, 0.0, 2.0 * kPi);
        s.phi_v = take(na, 0.0, 0.5 * kPi);
        s.theta_v = take(na, 0.0, 2.0 * kPi);
        s.phi_u = take(na, 0.0, 0.5 * kPi);
        s.theta_u = take(na, 0.0, 2.0 * kPi);
        s.p = take(np, 0.0, 1.0);
        return s;
    };

    unsigned nthreads = threads ? threads : std::thread::hardware_concurrency();
    if (nthreads == 0) nthreads = 1;
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, total));

    std::vector<double> best_val(nthreads, -1.0);
    std::vector<std::size_t> best_idx(nthreads, 0);
    auto worker = [&](unsigned t) {
        const std::size_t lo = total * t / nthreads, hi = total * (t + 1) / nthreads;
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const double v = pair_divergence(c, schmidt_state(point_at(idx)), log_ref);
            if (v > best_val[t]) {
                best_val[t] = v;
                best_idx[t] = idx;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();

    AdditivityScan scan;
    scan.evaluated = total;
    std::size_t arg = best_idx[0];
    double bv = best_val[0];
    for (unsigned t = 1; t < nthreads; ++t)
        if (best_val[t] > bv || (best_val[t] == bv && best_idx[t] < arg)) {
            bv = best_val[t];
            arg = best_idx[t];
        }
    scan.max_divergence = bv;
    scan.argmax = point_at(arg);

    for (std::size_t j = 0; j < np; ++j) {
        SchmidtPoint s = scan.argmax;
        s.p = static_cast<double>(j) / static_cast<double>(np - 1);
        scan.p_slice.emplace_back(s.p, pair_divergence(c, schmidt_state(s), log_ref));
    }
    return scan;
}

std::vector<std::pair<double, double>> pair_output_entropy_slice(const QubitChannel& c,
                                                                 std::size_t npoints) {
    if (npoints < 3) throw std::invalid_argument("pair_output_entropy_slice: need >= 3 points");
    std::vector<std::pair<double, double>> out;
    for (std::size_t j = 0; j < npoints; ++j) {
        const double p = static_cast<double>(j) / static_cast<double>(npoints - 1);
        std::vector<complex> v(4);
        v[0] = std::sqrt(p);
        v[3] = std::sqrt(1.0 - p);
        double n = std::sqrt(std::norm(v[0]) + std::norm(v[3]));
        v[0] /= n;
        v[3] /= n;
        const PureState psi(std::move(v), FactoredDims{2, 2});
        const DensityMatrix mapped = apply_channel_pair(c, psi.density());
        out.emplace_back(p, von_neumann_entropy(mapped));
    }
    return out;
}

}  // namespace qcap
