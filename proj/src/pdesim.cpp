#include "blowup/pdesim.hpp"

#include <fmt/format.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/residual.hpp"

namespace blowup {

namespace {

std::string json_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t k = 0; k < v.size(); ++k) out += fmt::format("{}{:.17g}", k ? "," : "", v[k]);
    return out + "]";
}

// Bisection on a monotone predicate: returns x in [lo, hi] where f changes sign.
template <class F>
double bisect(F f, double lo, double hi) {
    const bool flo = f(lo) > 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) > 0.0) == flo) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Origin ξ0 and width w of x = a + w sinh(β(ξ - ξ0)) through (0, lo) and (1, hi).
struct SinhMap {
    double xi0 = 0.0, w = 1.0;
};

SinhMap fit_sinh(double lo, double hi, double a, double beta) {
    if (a <= lo) return {0.0, (hi - lo) / std::sinh(beta)};
    if (a >= hi) return {1.0, (hi - lo) / std::sinh(beta)};
    const double ratio = (a - lo) / (hi - a);
    const double xi0 = bisect(
        [&](double x) { return std::sinh(beta * x) / std::sinh(beta * (1.0 - x)) - ratio; }, 1e-12,
        1.0 - 1e-12);
    return {xi0, (hi - a) / std::sinh(beta * (1.0 - xi0))};
}

// Finite-volume three-point rows of r^{-k} ∂_r(r^k ∂_r u) on nodes x. Row m
// couples m-1, m, m+1. Dirichlet at the ends unless `axis` makes node 0 a
// symmetry axis.
struct Stencil {
    std::vector<double> lo, mid, hi;
};

Stencil fv_stencil(const std::vector<double>& x, double k, bool axis) {
    const std::size_t N = x.size();
    Stencil s{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
    auto area = [&](double r) { return std::pow(r, k); };
    auto vol = [&](double r) { return std::pow(r, k + 1.0) / (k + 1.0); };
    if (axis) {
        const double h = x[1] - x[0];
        const double half = 0.5 * (x[0] + x[1]);
        const double c = area(half) / h / (vol(half) - vol(x[0]));
        s.mid[0] = -c;
        s.hi[0] = c;
    }
    for (std::size_t m = 1; m + 1 < N; ++m) {
        const double hm = x[m] - x[m - 1], hp = x[m + 1] - x[m];
        const double left = 0.5 * (x[m - 1] + x[m]), right = 0.5 * (x[m] + x[m + 1]);
        const double V = vol(right) - vol(left);
        s.lo[m] = area(left) / hm / V;
        s.hi[m] = area(right) / hp / V;
        s.mid[m] = -(s.lo[m] + s.hi[m]);
    }
    return s;
}

double reaction_flow(double u, double dt, double p) {
    if (u <= 0.0) return u;
    const double q = p - 1.0;
    const double base = 1.0 - q * dt * std::pow(u, q);
    if (base <= 0.0) throw NumericalError("reaction flow blows up within the step");
    return u * std::pow(base, -1.0 / q);
}

// Vertex of the parabola through three samples; falls back to the middle node.
double parabola_vertex(double xm, double x0, double xp, double fm, double f0, double fp) {
    const double d1 = (f0 - fm) / (x0 - xm), d2 = (fp - f0) / (xp - x0);
    const double curv = (d2 - d1) / (xp - xm);
    if (!(curv < 0.0)) return x0;
    const double v = 0.5 * (xm + x0) - d1 / (2.0 * curv);
    return std::clamp(v, xm, xp);
}

struct LineFit {
    double slope = 0.0, intercept = 0.0, rss = 0.0, sxx = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double N = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= N;
    my /= N;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.sxx = sxx;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double e = y[k] - f.intercept - f.slope * x[k];
        f.rss += e * e;
    }
    return f;
}

}  // namespace

void Domain::validate() const {
    if (!(x1_min > 0.0)) throw ConfigError("domain needs x1_min > 0");
    if (!(x1_max > x1_min)) throw ConfigError("domain needs x1_max > x1_min");
    if (!(rho_max > 0.0)) throw ConfigError("domain needs rho_max > 0");
}

Domain Domain::from(const GeometryConfig& geom) {
    Domain d{geom.m, geom.m_out, geom.rho_max};
    d.validate();
    return d;
}

AxisSpec AxisSpec::with_min_spacing(double lo, double hi, int cells, double focus, double h_min) {
    if (cells < 4) throw ConfigError("an axis needs at least 4 cells");
    if (!(h_min > 0.0)) throw ConfigError("minimum spacing must be positive");
    AxisSpec spec{cells, focus, 0.0};
    const double uniform = (hi - lo) / cells;
    if (h_min >= uniform) return spec;
    auto focus_spacing = [&](double beta) {
        const SinhMap m = fit_sinh(lo, hi, focus, beta);
        return m.w * beta / cells - h_min;
    };
    spec.beta = bisect(focus_spacing, 1e-8, 60.0);
    return spec;
}

std::vector<double> AxisSpec::nodes(double lo, double hi) const {
    std::vector<double> x(static_cast<std::size_t>(cells) + 1);
    if (beta <= 0.0) {
        for (int k = 0; k <= cells; ++k) x[k] = lo + (hi - lo) * k / cells;
        return x;
    }
    const SinhMap m = fit_sinh(lo, hi, focus, beta);
    const double a = std::clamp(focus, lo, hi);
    for (int k = 0; k <= cells; ++k)
        x[k] = a + m.w * std::sinh(beta * (static_cast<double>(k) / cells - m.xi0));
    x.front() = lo;
    x.back() = hi;
    return x;
}

PdeGrid PdeGrid::build(const Domain& dom, const AxisSpec& ax1, const AxisSpec& axrho) {
    dom.validate();
    return {ax1.nodes(dom.x1_min, dom.x1_max), axrho.nodes(0.0, dom.rho_max)};
}

double PdeGrid::min_spacing() const {
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < x1.size(); ++k) h = std::min(h, x1[k] - x1[k - 1]);
    for (std::size_t k = 1; k < rho.size(); ++k) h = std::min(h, rho[k] - rho[k - 1]);
    return h;
}

std::string PdeGrid::to_json() const {
    return fmt::format(R"({{"nx":{},"nrho":{},"min_spacing":{:.6g},"x1":{},"rho":{}}})", nx(), nr(),
                       min_spacing(), json_array(x1), json_array(rho));
}

AxiField::AxiField(PdeGrid g, double t0) : grid(std::move(g)), u(grid.nx() * grid.nr(), 0.0), t(t0) {}

AxiField AxiField::sample(PdeGrid g, double t0, const std::function<double(AxiPoint)>& f) {
    AxiField field(std::move(g), t0);
    const std::size_t nx = field.grid.nx(), nr = field.grid.nr();
    for (std::size_t i = 1; i + 1 < nx; ++i)
        for (std::size_t j = 0; j + 1 < nr; ++j) field.at(i, j) = f({field.grid.x1[i], field.grid.rho[j]});
    return field;
}

AxiField::Peak AxiField::peak() const {
    Peak pk;
    const std::size_t nx = grid.nx(), nr = grid.nr();
    pk.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < nr; ++j)
            if (at(i, j) > pk.value) {
                pk.value = at(i, j);
                pk.i = i;
                pk.j = j;
            }
    const auto& x = grid.x1;
    const auto& r = grid.rho;
    pk.x1 = x[pk.i];
    pk.rho = r[pk.j];
    if (pk.i > 0 && pk.i + 1 < nx)
        pk.x1 = parabola_vertex(x[pk.i - 1], x[pk.i], x[pk.i + 1], at(pk.i - 1, pk.j), pk.value,
                                at(pk.i + 1, pk.j));
    if (pk.j > 0 && pk.j + 1 < nr)
        pk.rho = parabola_vertex(r[pk.j - 1], r[pk.j], r[pk.j + 1], at(pk.i, pk.j - 1), pk.value,
                                 at(pk.i, pk.j + 1));
    return pk;
}

double AxiField::boundary_max() const {
    const std::size_t nx = grid.nx(), nr = grid.nr();
    double m = 0.0;
    for (std::size_t j = 0; j < nr; ++j) m = std::max({m, std::abs(at(0, j)), std::abs(at(nx - 1, j))});
    for (std::size_t i = 0; i < nx; ++i) m = std::max(m, std::abs(at(i, nr - 1)));
    return m;
}

void AxiField::write_snapshot(const std::string& path_prefix) const {
    {
        std::ofstream bin(path_prefix + ".bin", std::ios::binary);
        if (!bin) throw ConfigError("cannot open " + path_prefix + ".bin");
        bin.write(reinterpret_cast<const char*>(u.data()),
                  static_cast<std::streamsize>(u.size() * sizeof(double)));
    }
    std::ofstream hdr(path_prefix + ".json");
    if (!hdr) throw ConfigError("cannot open " + path_prefix + ".json");
    hdr << fmt::format(
        R"({{"format":"float64-le","layout":"x1-major","t":{:.17g},"shape":[{},{}],"grid":{}}})",
        t, grid.nx(), grid.nr(), grid.to_json())
        << '\n';
}

void AxiField::write_axis_csv(std::ostream& os) const {
    os << "x1,u\n";
    for (std::size_t i = 0; i < grid.nx(); ++i) os << fmt::format("{:.17g},{:.17g}\n", grid.x1[i], at(i, 0));
}

double reduced_rhs(const AxiField& f, std::size_t i, std::size_t j, const DimensionConfig& cfg,
                   const Physics& phys) {
    const auto& g = f.grid;
    if (i == 0 || i + 1 >= g.nx() || j + 1 >= g.nr()) return 0.0;
    if (!(g.x1[0] > 0.0)) throw ConfigError("reduced_rhs needs x1 > 0");
    double rhs = 0.0;
    if (phys.diffusion) {
        // Local stencils from the three neighbouring nodes on each axis.
        const std::vector<double> xs{g.x1[i - 1], g.x1[i], g.x1[i + 1]};
        const Stencil sx = fv_stencil(xs, 1.0, false);
        rhs += sx.lo[1] * f.at(i - 1, j) + sx.mid[1] * f.at(i, j) + sx.hi[1] * f.at(i + 1, j);
        const double k = cfg.n - 2;
        if (j == 0) {
            const Stencil sr = fv_stencil({g.rho[0], g.rho[1]}, k, true);
            rhs += sr.mid[0] * f.at(i, 0) + sr.hi[0] * f.at(i, 1);
        } else {
            const Stencil sr = fv_stencil({g.rho[j - 1], g.rho[j], g.rho[j + 1]}, k, false);
            rhs += sr.lo[1] * f.at(i, j - 1) + sr.mid[1] * f.at(i, j) + sr.hi[1] * f.at(i, j + 1);
        }
    }
    if (phys.reaction) rhs += power_p(f.at(i, j), cfg);
    if (phys.source) rhs += phys.source({g.x1[i], g.rho[j]}, f.t);
    return rhs;
}

Stepper::Stepper(AxiField field, const DimensionConfig& cfg, Physics phys)
    : field_(std::move(field)), cfg_(cfg), phys_(std::move(phys)) {
    const auto& g = field_.grid;
    if (g.nx() < 4 || g.nr() < 3) throw ConfigError("grid too small for the stepper");
    if (!(g.x1[0] > 0.0)) throw ConfigError("stepper needs x1 > 0");
    Stencil sx = fv_stencil(g.x1, 1.0, false);
    Stencil sr = fv_stencil(g.rho, cfg_.n - 2.0, true);
    ax_lo_ = std::move(sx.lo);
    ax_mid_ = std::move(sx.mid);
    ax_hi_ = std::move(sx.hi);
    ar_lo_ = std::move(sr.lo);
    ar_mid_ = std::move(sr.mid);
    ar_hi_ = std::move(sr.hi);
}

double Stepper::next_dt(const StepPolicy& policy) const {
    double sup = 0.0;
    for (double v : field_.u) sup = std::max(sup, v);
    double dt = policy.dt_max;
    if (phys_.reaction && sup > 0.0) dt = std::min(dt, policy.cfl * std::pow(sup, 1.0 - cfg_.p));
    return dt;
}

void Stepper::react(double dt) {
    for (double& v : field_.u) v = reaction_flow(v, dt, cfg_.p);
}

void Stepper::diffuse(double dt) {
    const auto& g = field_.grid;
    const std::size_t nx = g.nx(), nr = g.nr();
    const double k = 0.5 * dt;
    auto& u = field_.u;
    std::vector<double> src;
    if (phys_.source) {
        src.assign(u.size(), 0.0);
        const double tm = field_.t + k;
        for (std::size_t i = 1; i + 1 < nx; ++i)
            for (std::size_t j = 0; j + 1 < nr; ++j) src[i * nr + j] = phys_.source({g.x1[i], g.rho[j]}, tm);
    }
    if (!phys_.diffusion) {
        for (std::size_t m = 0; m < u.size(); ++m)
            if (!src.empty()) u[m] += dt * src[m];
        return;
    }
    std::vector<double> w(u.size(), 0.0);

    // Half step implicit in x1, explicit in ρ.
    for (std::size_t i = 1; i + 1 < nx; ++i)
        for (std::size_t j = 0; j + 1 < nr; ++j) {
            const std::size_t m = i * nr + j;
            double ar = ar_mid_[j] * u[m] + ar_hi_[j] * u[m + 1];
            if (j > 0) ar += ar_lo_[j] * u[m - 1];
            w[m] = u[m] + k * ar + (src.empty() ? 0.0 : k * src[m]);
        }
    {
        const lapack_int mx = static_cast<lapack_int>(nx - 2);
        std::vector<double> dl(mx - 1), d(mx), du(mx - 1);
        for (lapack_int r = 0; r < mx; ++r) {
            const std::size_t i = r + 1;
            d[r] = 1.0 - k * ax_mid_[i];
            if (r + 1 < mx) {
                du[r] = -k * ax_hi_[i];
                dl[r] = -k * ax_lo_[i + 1];
            }
        }
        const lapack_int info = LAPACKE_dgtsv(LAPACK_ROW_MAJOR, mx, static_cast<lapack_int>(nr - 1),
                                              dl.data(), d.data(), du.data(), w.data() + nr,
                                              static_cast<lapack_int>(nr));
        if (info != 0) throw NumericalError(fmt::format("x1 line solve failed (info {})", info));
    }

    // Half step implicit in ρ, explicit in x1.
    for (std::size_t i = 1; i + 1 < nx; ++i)
        for (std::size_t j = 0; j + 1 < nr; ++j) {
            const std::size_t m = i * nr + j;
            const double ax = ax_lo_[i] * w[m - nr] + ax_mid_[i] * w[m] + ax_hi_[i] * w[m + nr];
            u[m] = w[m] + k * ax + (src.empty() ? 0.0 : k * src[m]);
        }
    {
        const lapack_int mr = static_cast<lapack_int>(nr - 1);
        std::vector<double> dl(mr - 1), d(mr), du(mr - 1);
        for (lapack_int j = 0; j < mr; ++j) {
            d[j] = 1.0 - k * ar_mid_[j];
            if (j + 1 < mr) {
                du[j] = -k * ar_hi_[j];
                dl[j] = -k * ar_lo_[j + 1];
            }
        }
        const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, mr, static_cast<lapack_int>(nx - 2),
                                              dl.data(), d.data(), du.data(), u.data() + nr,
                                              static_cast<lapack_int>(nr));
        if (info != 0) throw NumericalError(fmt::format("rho line solve failed (info {})", info));
    }
}

void Stepper::step(double dt) {
    if (!(dt > 0.0)) throw ConfigError("step needs dt > 0");
    if (phys_.reaction) react(0.5 * dt);
    diffuse(dt);
    if (phys_.reaction) react(0.5 * dt);
    field_.t += dt;

    double sup = 0.0, neg = 0.0;
    for (double v : field_.u) {
        sup = std::max(sup, v);
        neg = std::max(neg, -v);
    }
    if (neg > 0.0) {
        const double rel = sup > 0.0 ? neg / sup : std::numeric_limits<double>::infinity();
        clipped_ = std::max(clipped_, rel);
        if (rel > negative_tolerance)
            throw NumericalError(fmt::format("negative values reached {:.3g} of sup u", rel));
        for (double& v : field_.u) v = std::max(v, 0.0);
    }
}

void RunTrace::write_csv(std::ostream& os) const {
    os << "t,sup_u,x1_star,rho_star,lam_num,dt,lam0,d_num\n";
    for (const auto& r : records)
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t,
                          r.sup_u, r.x1_star, r.rho_star, r.lam_num, r.dt, r.lam0, r.d_num);
}

RunTrace RunTrace::read_csv(std::istream& is) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
            header.push_back(cell);
        }
        break;
    }
    const auto col = [&](const std::string& name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    if (col("t") < 0 || col("sup_u") < 0) throw ConfigError("trace needs t and sup_u columns");
    const std::vector<std::pair<const char*, double RunRecord::*>> fields{
        {"t", &RunRecord::t},         {"sup_u", &RunRecord::sup_u},     {"x1_star", &RunRecord::x1_star},
        {"rho_star", &RunRecord::rho_star}, {"lam_num", &RunRecord::lam_num}, {"dt", &RunRecord::dt},
        {"lam0", &RunRecord::lam0},   {"d_num", &RunRecord::d_num}};
    RunTrace trace;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("malformed trace row: " + line);
            }
        }
        if (cells.size() != header.size()) throw ConfigError("trace row width mismatch: " + line);
        RunRecord rec;
        for (const auto& [name, member] : fields)
            if (const int c = col(name); c >= 0) rec.*member = cells[c];
        trace.records.push_back(rec);
    }
    return trace;
}

PdeGrid ansatz_grid(const Ansatz& ansatz, const Domain& dom, const RunOptions& opts) {
    const PathState st = ansatz.path().at(0.0);
    const Centers c = centers(ansatz.path(), 0.0);
    const double h_min = st.lam0 / opts.resolution;
    const AxisSpec ax = AxisSpec::with_min_spacing(dom.x1_min, dom.x1_max, opts.cells_x1, c.xi.x1, h_min);
    const AxisSpec ar = AxisSpec::with_min_spacing(0.0, dom.rho_max, opts.cells_rho, 0.0, h_min);
    return PdeGrid::build(dom, ax, ar);
}

std::string run_manifest_json(const Ansatz& ansatz, const Domain& dom, const RunOptions& opts) {
    const PdeGrid g = ansatz_grid(ansatz, dom, opts);
    const auto& geo = ansatz.geometry();
    return fmt::format(
        R"({{"n":{},"T":{:.17g},"ell":{:.17g},"sigma":{:.17g},)"
        R"("domain":{{"x1_min":{:.17g},"x1_max":{:.17g},"rho_max":{:.17g}}},)"
        R"("grid":{{"cells_x1":{},"cells_rho":{},"resolution":{:.17g},"min_spacing":{:.17g}}},)"
        R"("dt_policy":{{"cfl":{:.17g},"dt_max":{:.17g},"dt_min":{:.17g}}},)"
        R"("stop":{{"fraction_of_T":{:.17g},"sup_factor":{:.17g},"quench_factor":{:.17g},"max_steps":{}}},)"
        R"j("record_every":{},"seed":{{"field":"max(W2(x,0),0)","b":{:.17g},"R":{:.17g},"Rprime":{:.17g}}}}})j",
        ansatz.cfg().n, ansatz.path().T(), ansatz.path().ell(), ansatz.path().sigma(), dom.x1_min,
        dom.x1_max, dom.rho_max, opts.cells_x1, opts.cells_rho, opts.resolution, g.min_spacing(),
        opts.policy.cfl, opts.policy.dt_max, opts.policy.dt_min, opts.stop_fraction, opts.sup_factor,
        opts.quench_factor, opts.max_steps, opts.record_every, geo.b, geo.R, geo.Rprime);
}

RunOutcome simulate_from_ansatz(const Ansatz& ansatz, const Domain& dom, const RunOptions& opts) {
    if (!(opts.stop_fraction > 0.0 && opts.stop_fraction < 1.0))
        throw ConfigError("stop fraction must lie in (0, 1)");
    if (opts.record_every < 1) throw ConfigError("record_every must be positive");
    const DimensionConfig& cfg = ansatz.cfg();
    const double T = ansatz.path().T();
    const double t_stop = opts.stop_fraction * T;

    AxiField seed = AxiField::sample(ansatz_grid(ansatz, dom, opts), 0.0, [&](AxiPoint x) {
        return std::max(eval_W2(x, 0.0, ansatz), 0.0);
    });
    Stepper stepper(std::move(seed), cfg);

    RunTrace trace;
    double sup0 = 0.0;
    auto record = [&](double dt) {
        const AxiField& f = stepper.field();
        const AxiField::Peak pk = f.peak();
        RunRecord r;
        r.t = f.t;
        r.sup_u = pk.value;
        r.x1_star = pk.x1;
        r.rho_star = pk.rho;
        r.lam_num = std::pow(cfg.alpha_n / pk.value, 2.0 / (cfg.n - 2));
        r.dt = dt;
        r.lam0 = ansatz.path().at(std::min(f.t, T)).lam0;
        r.d_num = pk.x1 - 1.0;
        trace.records.push_back(r);
        trace.boundary_max = std::max(trace.boundary_max, f.boundary_max() / pk.value);
        return pk.value;
    };
    sup0 = record(0.0);
    if (!(sup0 > 0.0)) throw NumericalError("seed field vanishes on the grid");

    long step = 0;
    for (;;) {
        double dt = stepper.next_dt(opts.policy);
        const double t = stepper.field().t;
        if (t + dt >= t_stop) dt = t_stop - t;
        if (dt < opts.policy.dt_min) {
            trace.reason = "dt_underflow";
            break;
        }
        stepper.step(dt);
        ++step;
        const double sup = [&] {
            double s = 0.0;
            for (double v : stepper.field().u) s = std::max(s, v);
            return s;
        }();
        const bool done_time = stepper.field().t >= t_stop;
        const bool done_sup = sup >= opts.sup_factor * sup0;
        const bool done_quench = sup * opts.quench_factor <= sup0;
        const bool done_steps = step >= opts.max_steps;
        if (step % opts.record_every == 0 || done_time || done_sup || done_quench || done_steps) record(dt);
        if (done_time) trace.reason = "stop_time";
        else if (done_sup) trace.reason = "sup_threshold";
        else if (done_quench) trace.reason = "quench";
        else if (done_steps) trace.reason = "max_steps";
        if (!trace.reason.empty()) break;
    }
    trace.steps = static_cast<int>(step);
    trace.clipped_negative = stepper.clipped_negative();
    return {std::move(trace), stepper.field()};
}

RunTrace run_from_ansatz(const Ansatz& ansatz, const Domain& dom, const RunOptions& opts) {
    return simulate_from_ansatz(ansatz, dom, opts).trace;
}

std::string RateFit::to_json() const {
    return fmt::format(
        R"({{"exponent":{:.10g},"stderr":{:.6g},"T_star":{:.17g},"T_star_richardson":{:.17g},)"
        R"("typeI":{:.10g},"typeII":{:.10g},"records":{}}})",
        exponent, stderr_, T_star, T_star_richardson, typeI, typeII, records);
}

RateFit fit_rate(const RunTrace& trace, const FitWindow& window, const DimensionConfig& cfg) {
    std::vector<double> t, logsup;
    for (const auto& r : trace.records)
        if (r.t >= window.t_begin && r.t <= window.t_end && r.sup_u > 0.0) {
            t.push_back(r.t);
            logsup.push_back(std::log(r.sup_u));
        }
    const std::size_t N = t.size();
    if (N < 20) throw ConfigError(fmt::format("rate fit needs at least 20 records, window has {}", N));

    RateFit out;
    out.records = static_cast<int>(N);
    out.typeI = cfg.typeI_rate;
    out.typeII = cfg.gamma;

    // Richardson estimate: sup^{1-p} is linear in t for the ODE blow-up.
    const std::size_t tail = std::min<std::size_t>(5, N);
    std::vector<double> tt(t.end() - tail, t.end()), yy;
    for (std::size_t k = N - tail; k < N; ++k) yy.push_back(std::exp((1.0 - cfg.p) * logsup[k]));
    const LineFit rich = least_squares(tt, yy);
    if (!(rich.slope < 0.0)) throw NumericalError("sup u is not growing at the end of the window");
    out.T_star_richardson = -rich.intercept / rich.slope;

    const double t_last = t.back();
    auto fit_at = [&](double Tstar) {
        std::vector<double> x(N);
        for (std::size_t k = 0; k < N; ++k) x[k] = std::log(Tstar - t[k]);
        return least_squares(x, logsup);
    };

    double Tstar = 0.0;
    if (window.T_star) {
        Tstar = *window.T_star;
        if (!(Tstar > t_last)) throw ConfigError("fixed T* must exceed the last record time");
    } else {
        const double gap = std::max(out.T_star_richardson - t_last, 1e-14 * std::max(1.0, std::abs(t_last)));
        // Golden section in log(T* - t_last).
        double a = std::log(gap / 30.0), b = std::log(gap * 30.0);
        const double lo = a, hi = b;
        auto rss = [&](double z) { return fit_at(t_last + std::exp(z)).rss; };
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = rss(c), fd = rss(d);
        for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = rss(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = rss(d);
            }
        }
        const double z = 0.5 * (a + b);
        if (z - lo < 1e-3 * (hi - lo) || hi - z < 1e-3 * (hi - lo))
            throw NumericalError("T* search ended on the bracket edge; the window is ill-conditioned");
        Tstar = t_last + std::exp(z);
    }
    const LineFit f = fit_at(Tstar);
    out.T_star = Tstar;
    out.exponent = -f.slope;
    out.stderr_ = N > 2 ? std::sqrt(f.rss / static_cast<double>(N - 2) / f.sxx) : 0.0;
    return out;
}

}  // namespace blowup
