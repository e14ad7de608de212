#include "affine/checks.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <sstream>

namespace affine {

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

int geti(const toml::Value& p, const char* key, int fallback) {
    return static_cast<int>(p.get_integer(key, fallback));
}

// Random invertible coordinate map: a near-identity linear part plus a small
// smooth warp, guaranteed invertible on the sampling box.
CoordMap random_coord_map(Rng& rng, int D) {
    CoordMap map;
    map.dim = D;
    for (int i = 1; i <= D; ++i) {
        Expr e = Expr::coord(i);
        for (int j = 1; j <= D; ++j)
            if (j != i) e = e + Expr::constant(rng.uniform(-0.08, 0.08)) * Expr::coord(j);
        e = e + Expr::constant(rng.uniform(-0.09, 0.09)) * sin(Expr::coord(1 + rng.index(D)));
        map.fwd.push_back(e);
    }
    return map;
}

FrameField random_frame_transformation(Rng& rng, int D, bool constant) {
    if (constant) {
        std::vector<double> m(static_cast<size_t>(D) * D);
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) m[i * D + j] = (i == j ? 1.0 : 0.0) + rng.uniform(-0.2, 0.2);
        return FrameField::constant(D, m);
    }
    int a = 1 + rng.index(D);
    int b = 1 + rng.index(D);
    while (b == a) b = 1 + rng.index(D);
    Expr angle = Expr::constant(rng.uniform(-0.6, 0.6)) * Expr::coord(1 + rng.index(D)) +
                 Expr::constant(rng.uniform(-0.4, 0.4));
    return FrameField::plane_rotation(D, std::min(a, b), std::max(a, b), angle);
}

const ReferenceSystemStack& pick_stack(const Scenario& sc, const toml::Value& p) {
    std::string name = p.get_string("stack", "");
    if (name.empty()) {
        if (!sc.background_stack.empty()) name = sc.background_stack;
        else if (!sc.stacks.empty()) name = sc.stacks.begin()->first;
        else throw ScenarioError("check needs a reference-system stack");
    }
    return sc.stack(name);
}

CheckReport base_report(const Scenario& sc, const std::string& id) {
    CheckReport r;
    r.id = id;
    r.tolerance = sc.tolerance_for(id);
    return r;
}

void finish(CheckReport& r) {
    r.status = r.residual <= r.tolerance ? CheckReport::Status::pass : CheckReport::Status::fail;
}

// --------------------------------------------------------------------------
// check implementations
// --------------------------------------------------------------------------

CheckReport check_transformation_laws(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "transformation-laws");
    const auto& stack = pick_stack(sc, p);
    int trials = geti(p, "trials", 20);
    int points = geti(p, "points", 100);
    int D = sc.sig.total_dim;
    Rng rng(splitmix64(sc.seed ^ 0x7472616eULL));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto samples = sample_points(D, points, splitmix64(sc.seed + 31 * t), sc.box * 0.8, false);
        CoordMap map = random_coord_map(rng, D);
        FrameField k = random_frame_transformation(rng, D, t % 2 == 0);
        worst = std::max(worst, verify_coordinate_transformation_law(stack, ConnKind::gauge, map, samples));
        worst = std::max(worst,
                         verify_coordinate_transformation_law(stack, ConnKind::holonomic, map, samples));
        worst = std::max(worst, verify_frame_transformation_law(stack, k, samples));
        worst = std::max(worst, verify_curvature_frame_covariance(stack, k, samples));
        // the coordinate covariance of curvature is the costliest route;
        // a sample subset keeps the sweep within budget
        std::vector<Point> sub(samples.begin(), samples.begin() + std::min<size_t>(samples.size(), 12));
        worst = std::max(worst, verify_curvature_coordinate_covariance(stack, ConnKind::holonomic, map, sub));
        r.samples += points;
    }
    r.residual = worst;
    finish(r);
    return r;
}

CheckReport check_pure_gauge_flatness(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "pure-gauge-flatness");
    int frames = geti(p, "frames", 10);
    int points = geti(p, "points", 100);
    int D = sc.sig.total_dim;
    Rng rng(splitmix64(sc.seed ^ 0x666c6174ULL));
    double worst = 0.0;
    for (int f = 0; f < frames; ++f) {
        std::vector<Expr> b(static_cast<size_t>(D) * D);
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j)
                b[i * D + j] = Expr::constant(i == j ? 1.0 : 0.0) +
                               Expr::constant(rng.uniform(-0.15, 0.15)) * sin(Expr::coord(1 + rng.index(D))) +
                               Expr::constant(rng.uniform(-0.1, 0.1)) * Expr::coord(1 + rng.index(D));
        ReferenceSystemStack stack{"f", FrameField(D, b), std::nullopt, std::nullopt};
        GaugeConnection conn(stack);
        auto samples = sample_points(D, points, splitmix64(sc.seed + 977 * f), 0.7, false);
        for (const Point& q : samples) {
            auto K = curvature_at(conn, q);
            for (double v : K) worst = std::max(worst, std::fabs(v));
        }
        r.samples += points;
    }
    r.residual = worst;
    finish(r);
    return r;
}

CheckReport check_field_strengths(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "field-strengths");
    if (!sc.sector) throw ScenarioError("field-strengths needs a [sector]");
    const auto& stack = pick_stack(sc, p);
    int points = geti(p, "points", 100);
    auto samples = sc.sample(points, 0x6673ULL);
    HolonomicConnection conn(transform_stack(stack, sc.inversion));
    MetricField metric = MetricField::from_stack(transform_stack(stack, sc.inversion));
    auto check = verify_weak_em_field_strengths(*sc.sector, conn, metric, samples);
    r.samples = points;
    r.residual = *std::max_element(check.residual.begin(), check.residual.end());
    double min_strength = p.get_number("min_strength", 0.0);
    finish(r);
    std::ostringstream os;
    os << "max field strength " << check.max_strength;
    if (check.max_strength < min_strength) {
        r.status = CheckReport::Status::fail;
        os << " below required " << min_strength;
    }
    r.diagnostics = os.str();
    return r;
}

CheckReport check_decomposition_roundtrip(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "decomposition-roundtrip");
    if (!sc.sector) throw ScenarioError("decomposition-roundtrip needs a [sector]");
    int trials = geti(p, "trials", 10);
    int D = sc.sig.total_dim;
    Rng rng(splitmix64(sc.seed ^ 0x72747269ULL));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> g(static_cast<size_t>(D) * D * D);
        for (auto& v : g) v = rng.uniform(-1, 1);
        worst = std::max(worst, decomposition_roundtrip_residual(*sc.sector, g, D));
    }
    r.samples = trials;
    r.residual = worst;
    finish(r);
    return r;
}

CheckReport run_line_check(const Scenario& sc, const toml::Value& p, const char* id,
                           const std::function<LineResidualReport(const SectorConfig&, const ConnectionField&,
                                                                  const MetricField&, const TensorField&,
                                                                  const std::vector<Point>&)>& fn,
                           const std::function<SectorScenario(uint64_t)>& gen) {
    CheckReport r = base_report(sc, id);
    int scenarios = geti(p, "scenarios", 10);
    int points = geti(p, "points", 4);
    double worst = 0.0;
    for (int s = 0; s < scenarios; ++s) {
        SectorScenario scen = gen(splitmix64(sc.seed + 101 * s));
        auto samples = sample_points(scen.cfg.sig.total_dim, points, splitmix64(sc.seed + 7 * s), 0.7, false);
        auto rep = fn(scen.cfg, *scen.conn, scen.metric, scen.rho, samples);
        if (rep.skipped) {
            r.status = CheckReport::Status::skipped;
            r.diagnostics = rep.diagnostic;
            return r;
        }
        worst = std::max(worst, rep.max_residual());
        r.samples += points;
    }
    r.residual = worst;
    finish(r);
    return r;
}

CheckReport check_lepton_evolution(const Scenario& sc, const toml::Value& p) {
    CheckReport r = run_line_check(sc, p, "lepton-evolution", lepton_evolution_residual,
                                   make_conforming_lepton_scenario);
    // structural content: the right-handed neutral line carries no
    // electromagnetic or charged coupling
    auto lines = lepton_evolution_lines(false);
    const auto& nuR = lines.back();
    bool clean = !line_couples_potential(nuR, PotentialId::W1) && !line_couples_potential(nuR, PotentialId::A);
    if (!clean) {
        r.status = CheckReport::Status::fail;
        r.diagnostics = "right-handed neutral line carries a forbidden coupling";
    } else if (r.diagnostics.empty()) {
        r.diagnostics = "neutral right-handed line is structurally decoupled";
    }
    return r;
}

CheckReport check_pmns(const Scenario& sc, const toml::Value& p) {
    return run_line_check(sc, p, "pmns-mixing", pmns_mixing_residual, make_conforming_pmns_scenario);
}

CheckReport check_ckm(const Scenario& sc, const toml::Value& p) {
    return run_line_check(sc, p, "ckm-mixing", ckm_mixing_residual, make_conforming_ckm_scenario);
}

CheckReport check_gluon_assembly(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "gluon-assembly");
    int trials = geti(p, "trials", 10);
    int D = 8;
    SectorConfig cfg = SectorConfig::make(Sector::unified, D);
    if (sc.sector && sc.sector->indices().has_strong()) {
        cfg = *sc.sector;
        D = cfg.sig.total_dim;
    }
    SectorIndices ix = cfg.indices();
    Rng rng(splitmix64(sc.seed ^ 0x676c756fULL));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> g(static_cast<size_t>(D) * D * D, 0.0);
        auto set = [&](int m, int n, int P, double v) {
            g[((m - 1) * static_cast<size_t>(D) + (n - 1)) * D + P] = v;
        };
        for (int P = 0; P < D; ++P) {
            double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
            set(ix.strong_1, ix.strong_1, P, a);
            set(ix.strong_2, ix.strong_2, P, b);
            set(ix.strong_3, ix.strong_3, P, -(a + b));
            for (int m : {ix.strong_1, ix.strong_2, ix.strong_3})
                for (int n : {ix.strong_1, ix.strong_2, ix.strong_3})
                    if (m != n) set(m, n, P, rng.uniform(-1, 1));
        }
        auto rep = assemble_gluon_matrix(cfg, g, D);
        if (!rep.applicable) {
            r.status = CheckReport::Status::skipped;
            r.diagnostics = "trace condition violated";
            return r;
        }
        worst = std::max({worst, rep.assembly_residual, rep.roundtrip_residual});
    }
    r.samples = trials;
    r.residual = worst;
    finish(r);
    return r;
}

CheckReport check_energy_momentum(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "energy-momentum");
    EvolutionSetup setup = sc.evolution_setup();
    int points = geti(p, "points", 100);
    int control_trials = geti(p, "control_trials", 50);
    double control_factor = p.get_number("control_factor", 100.0);
    auto samples = sc.sample(points, 0x656d6fULL);
    Rng rng(splitmix64(sc.seed ^ 0x656d6fULL));
    double worst = 0.0;
    int control_ok = 0, control_total = 0;
    for (const Point& q : samples) {
        auto v = setup.gradient(q);
        double norm = 0.0;
        for (double c : v) norm += c * c;
        if (std::sqrt(norm) < 1e-8) continue;
        double on_res = energy_momentum_residual(setup, q, v);
        worst = std::max(worst, on_res);
        if (control_total < control_trials) {
            std::vector<double> off(v.size());
            for (auto& c : off) c = rng.uniform(-1, 1);
            double off_res = energy_momentum_residual(setup, q, off);
            ++control_total;
            if (off_res >= control_factor * std::max(on_res, 1e-300)) ++control_ok;
        }
        ++r.samples;
    }
    r.residual = worst;
    finish(r);
    double frac = control_total ? static_cast<double>(control_ok) / control_total : 1.0;
    std::ostringstream os;
    os << "off-direction control " << control_ok << "/" << control_total;
    if (frac < p.get_number("control_fraction", 0.95)) {
        r.status = CheckReport::Status::fail;
        os << " below required fraction";
    }
    r.diagnostics = os.str();
    return r;
}

CheckReport check_momentum_velocity(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "momentum-velocity");
    EvolutionSetup setup = sc.evolution_setup();
    double step = p.get_number("step", 0.01);
    int steps = geti(p, "steps", 60);
    Point start = sc.sample(1, 0x6d76ULL)[0];
    if (const toml::Value* s = p.find("start")) {
        std::vector<double> c;
        for (const auto& v : s->array()) c.push_back(v->number());
        start = Point(std::move(c));
    }
    GradientLine line = integrate_gradient_line(setup, start, step, steps);
    if (line.truncated) {
        r.status = CheckReport::Status::skipped;
        r.diagnostics = line.diagnostic;
        return r;
    }
    r.residual = momentum_velocity_residual(setup, line);
    r.samples = static_cast<int>(line.samples.size());
    finish(r);
    // fourth-order endpoint convergence under step halving
    auto endpoint = [&](double h, int n) {
        return integrate_gradient_line(setup, start, h, n).endpoint();
    };
    Point e1 = endpoint(step, steps);
    Point e2 = endpoint(step / 2, steps * 2);
    Point e3 = endpoint(step / 4, steps * 4);
    double d1 = 0.0, d2 = 0.0;
    for (int d = 0; d < sc.sig.total_dim; ++d) {
        d1 = std::max(d1, std::fabs(e1[d] - e2[d]));
        d2 = std::max(d2, std::fabs(e2[d] - e3[d]));
    }
    double order = d2 > 0 ? std::log2(d1 / d2) : 4.0;
    std::ostringstream os;
    os << "observed endpoint order " << order;
    r.diagnostics = os.str();
    if (order < p.get_number("min_order", 3.5)) r.status = CheckReport::Status::fail;
    return r;
}

CheckReport check_gamma_algebra(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "gamma-algebra");
    double worst = 0.0;
    std::vector<int> dims = {2, 5, 6, 8};
    if (const toml::Value* dl = p.find("dims")) {
        dims.clear();
        for (const auto& v : dl->array()) dims.push_back(static_cast<int>(v->integer()));
    }
    for (int D : dims) {
        std::vector<double> I(static_cast<size_t>(D) * D, 0.0), G(static_cast<size_t>(D) * D, 0.0),
            Ginv(static_cast<size_t>(D) * D, 0.0);
        for (int i = 0; i < D; ++i) {
            I[i * D + i] = 1.0;
            double v = 1.0 + 0.4 * i;
            G[i * D + i] = v;
            Ginv[i * D + i] = 1.0 / v;
        }
        worst = std::max(worst, build_gamma_set(I, D).anticommutator_residual(I));
        worst = std::max(worst, build_gamma_set(G, D).anticommutator_residual(Ginv));
        r.samples += 2;
    }
    r.residual = worst;
    finish(r);
    // first-order squared identity on the scenario's gradient line
    if (!sc.evolution_charge.empty()) {
        EvolutionSetup setup = sc.evolution_setup();
        double step = p.get_number("step", 0.02);
        int steps = geti(p, "steps", 40);
        GradientLine line = integrate_gradient_line(setup, sc.sample(1, 0x6761ULL)[0], step, steps);
        if (!line.truncated) {
            DiracResidual dres = dirac_residual(setup, line);
            std::ostringstream os;
            if (dres.skipped) os << "first-order check skipped: " << dres.diagnostic;
            else {
                os << "squared-identity residual " << dres.squared_identity << ", sign branch "
                   << dres.sign_branch;
                if (dres.squared_identity > p.get_number("dirac_tolerance", 1e-6))
                    r.status = CheckReport::Status::fail;
            }
            r.diagnostics = os.str();
        }
    }
    return r;
}

CheckReport check_action_ratio(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "action-ratio");
    EvolutionSetup setup = sc.evolution_setup();
    double step = p.get_number("step", 0.01);
    int steps = geti(p, "steps", 80);
    Point start = sc.sample(1, 0x6172ULL)[0];
    GradientLine line = integrate_gradient_line(setup, start, step, steps);
    if (line.truncated) {
        r.status = CheckReport::Status::skipped;
        r.diagnostics = line.diagnostic;
        return r;
    }
    ActionReport rep = affine_action(setup, line, true);
    if (!rep.gamma_available) {
        r.status = CheckReport::Status::skipped;
        r.diagnostics = "background not orthogonal";
        return r;
    }
    r.residual = std::fabs(rep.gamma_action - 2.0 * rep.action);
    r.samples = static_cast<int>(line.samples.size());
    std::ostringstream os;
    os << "elementary " << rep.action << ", first-order " << rep.gamma_action;
    r.diagnostics = os.str();
    finish(r);
    return r;
}

CheckReport check_yang_mills(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "yang-mills");
    const auto& stack = pick_stack(sc, p);
    HolonomicConnection conn(transform_stack(stack, sc.inversion));
    MetricField metric = MetricField::from_stack(transform_stack(stack, sc.inversion));
    int points = geti(p, "points", 10);
    int m = geti(p, "component_m", 4), n = geti(p, "component_n", 5);
    auto samples = sc.sample(points, 0x796dULL);
    double worst = 0.0, control = 1e300;
    for (const Point& q : samples) {
        auto rep = yang_mills_residual(conn, metric, q, {}, m, n);
        worst = std::max(worst, rep.residual_declared);
        std::vector<double> off(sc.sig.total_dim, 0.0);
        off[0] = 1.0;
        off[2] = -0.5;
        auto bad = yang_mills_residual(conn, metric, q, off, m, n);
        control = std::min(control, bad.residual_declared);
        ++r.samples;
    }
    r.residual = worst;
    finish(r);
    std::ostringstream os;
    os << "off-direction control floor " << control;
    if (control < 10 * r.tolerance) {
        r.status = CheckReport::Status::fail;
        os << " below 10x tolerance";
    }
    r.diagnostics = os.str();
    return r;
}

CheckReport check_charge_extraction(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "charge-extraction");
    const auto& stack = pick_stack(sc, p);
    HolonomicConnection conn(transform_stack(stack, sc.inversion));
    MetricField metric = MetricField::from_stack(transform_stack(stack, sc.inversion));
    int points = geti(p, "points", 6);
    auto samples = sc.sample(points, 0x6365ULL);
    std::vector<double> dir(sc.sig.total_dim, 0.0);
    dir[1] = 1.0;
    double worst = 0.0, charge_max = 0.0;
    for (const Point& q : samples) {
        auto cc = extract_charge(conn, metric, dir, q);
        auto G = metric.G_at(q);
        int D = sc.sig.total_dim;
        for (int M = 0; M < D; ++M)
            for (int N = 0; N < D; ++N) {
                double s = 0.0;
                for (int H = 0; H < D; ++H) s += G[M * D + H] * cc.rho_up[H * D + N];
                worst = std::max(worst, std::fabs(cc.rho_low[M * D + N] - s));
                charge_max = std::max(charge_max, std::fabs(cc.rho_up[M * D + N]));
            }
        ++r.samples;
    }
    r.residual = worst;
    finish(r);
    std::ostringstream os;
    os << "max charge " << charge_max;
    if (p.get_bool("require_nonzero", false) && charge_max < 1e-6) {
        r.status = CheckReport::Status::fail;
        os << " (expected nonvanishing)";
    }
    r.diagnostics = os.str();
    return r;
}

CheckReport check_lorentz_force(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "lorentz-force");
    int points = geti(p, "points", 5);
    int D = sc.sig.total_dim;
    // the balance holds exactly for symmetric connections, so the asserted
    // part runs on a metric-derived background built from the seed
    Rng rng(splitmix64(sc.seed ^ 0x6c66ULL));
    std::vector<Expr> diag(D, Expr::constant(1.0));
    for (int i = sc.sig.external_dim; i < D; ++i)
        diag[i] = pow(Expr::constant(1.0) + Expr::constant(rng.uniform(0.1, 0.3)) *
                                                sin(Expr::coord(1 + rng.index(D))),
                      2.0);
    MetricField metric = MetricField::diagonal(D, diag);
    std::vector<Expr> rho(static_cast<size_t>(D) * D, Expr::constant(0.0));
    for (int m = 0; m < D; ++m)
        for (int n = 0; n < D; ++n) rho[m * D + n] = random_smooth_expr(rng, D, 0.5);
    EvolutionSetup sym{std::make_shared<ChristoffelConnection>(metric), metric,
                       TensorField::from_exprs(D, {Var::lower, Var::lower}, rho),
                       ChargeFunctional::component(std::min(2, D), std::min(3, D))};
    auto samples = sc.sample(points, 0x6c66ULL);
    double worst = 0.0, gap = 0.0;
    for (const Point& q : samples) {
        auto rep = lorentz_force(sym, q);
        worst = std::max(worst, rep.residual);
        gap = std::max(gap, rep.torsion_gap);
        ++r.samples;
    }
    r.residual = worst;
    finish(r);
    std::ostringstream os;
    os << "symmetric-background gap " << gap;
    // with a declared background, its residual is reported against the size
    // of the connection's antisymmetric part, not asserted
    if (!sc.background_stack.empty() && !sc.evolution_charge.empty()) {
        EvolutionSetup setup = sc.evolution_setup();
        double bres = 0.0, bgap = 0.0;
        for (const Point& q : samples) {
            auto rep = lorentz_force(setup, q);
            bres = std::max(bres, rep.residual);
            bgap = std::max(bgap, rep.torsion_gap);
        }
        os << "; scenario background residual " << bres << " vs antisymmetric part " << bgap;
        if (bres > bgap + 10 * r.tolerance) {
            r.status = CheckReport::Status::fail;
            os << " (exceeds the antisymmetric part)";
        }
    }
    r.diagnostics = os.str();
    return r;
}

CheckReport check_generation_report(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "generation-report");
    if (!sc.sector || sc.sector->sector != Sector::unified)
        throw ScenarioError("generation-report needs the unified sector");
    SectorScenario scen = make_conforming_pmns_scenario(splitmix64(sc.seed ^ 0x67656eULL));
    Point q = sample_points(8, 1, sc.seed, 0.5, false)[0];
    auto combos = generation_report(scen.cfg, scen.rho.eval_at(q), 8, {});
    r.samples = geti(p, "points", 1);
    std::ostringstream os;
    os.precision(4);
    os << "second (" << combos.mu[0] << ", " << combos.mu[1] << "), third (" << combos.tau[0] << ", "
       << combos.tau[1] << "); reported only";
    r.diagnostics = os.str();
    r.status = CheckReport::Status::pass;
    return r;
}

CheckReport check_heisenberg(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "heisenberg");
    EvolutionSetup setup = sc.evolution_setup();
    double step = p.get_number("step", 0.01);
    int steps = geti(p, "steps", 40);
    int D = sc.sig.total_dim;
    Rng rng(splitmix64(sc.seed ^ 0x6873ULL));
    std::vector<Expr> xc(D, Expr::constant(0.0));
    for (int i = 0; i < D; ++i)
        xc[i] = Expr::constant(rng.uniform(-0.4, 0.4)) * Expr::coord(1 + rng.index(D)) +
                Expr::constant(rng.uniform(-0.3, 0.3)) * sin(Expr::coord(1 + rng.index(D)));
    TensorField X = TensorField::vector_field(D, xc);
    TensorField f = TensorField::scalar(D, Expr::coord(1) * Expr::coord(2) + sin(Expr::coord(2)));
    Point start = sc.sample(1, 0x6873ULL)[0];
    GradientLine coarse = integrate_gradient_line(setup, start, step, steps);
    GradientLine fine = integrate_gradient_line(setup, start, step / 2, steps * 2);
    if (coarse.truncated || fine.truncated) {
        r.status = CheckReport::Status::skipped;
        r.diagnostics = coarse.truncated ? coarse.diagnostic : fine.diagnostic;
        return r;
    }
    auto rep1 = heisenberg_schrodinger_check(setup, X, f, coarse);
    auto rep2 = heisenberg_schrodinger_check(setup, X, f, fine);
    double r1 = std::max(rep1.bracket, rep1.transport);
    double r2 = std::max(rep2.bracket, rep2.transport);
    r.residual = r2;
    r.samples = static_cast<int>(fine.samples.size());
    // the identities hold in the step -> 0 limit: accept a residual at the
    // absolute floor or a demonstrated second-order refinement
    bool converges = r2 <= 0.35 * r1;
    r.status = (r2 <= r.tolerance || converges) ? CheckReport::Status::pass : CheckReport::Status::fail;
    std::ostringstream os;
    os << "bracket " << rep2.bracket << ", transport " << rep2.transport << ", refinement ratio "
       << (r1 > 0 ? r2 / r1 : 0.0);
    r.diagnostics = os.str();
    return r;
}

CheckReport check_cpt(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "cpt");
    const auto& stack = pick_stack(sc, p);
    std::string charge_name = p.get_string("charge", sc.evolution_charge);
    const TensorField& rho = sc.charge(charge_name);
    int D = sc.sig.total_dim;
    int segs = geti(p, "path_samples", 40);
    // fixed smooth test path built from the scenario seed
    Rng rng(splitmix64(sc.seed ^ 0x637074ULL));
    std::vector<double> amp(D), phase(D);
    for (int d = 0; d < D; ++d) {
        amp[d] = rng.uniform(-0.4, 0.4);
        phase[d] = rng.uniform(0, 3.14);
    }
    std::vector<Point> path;
    for (int i = 0; i <= segs; ++i) {
        double t = static_cast<double>(i) / segs;
        std::vector<double> c(D);
        for (int d = 0; d < D; ++d) c[d] = amp[d] * t + 0.1 * std::sin(2 * t + phase[d]);
        path.emplace_back(std::move(c));
    }
    InversionState id = InversionState::identity(D);
    auto before = covariant_differential_along_path(rho, stack, sc.sig, path, id);
    InversionState flipped = id;
    flipped.apply(InversionSpec::cpt(D));
    auto after = covariant_differential_along_path(rho, stack, sc.sig, path, flipped);
    double worst = 0.0;
    for (size_t i = 0; i < before.size(); ++i) worst = std::max(worst, std::fabs(before[i] - after[i]));
    r.residual = worst;
    r.samples = segs;
    finish(r);
    // involution: applying the full inversion twice restores the state
    InversionState twice = id;
    twice.apply(InversionSpec::cpt(D));
    twice.apply(InversionSpec::cpt(D));
    if (!(twice == id)) {
        r.status = CheckReport::Status::fail;
        r.diagnostics = "double inversion did not restore the state";
    } else if (r.diagnostics.empty()) {
        r.diagnostics = "double inversion restores the state bit-exactly";
    }
    return r;
}

CheckReport check_density_composability(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "density-composability");
    std::string name = p.get_string("ensemble", "");
    if (name.empty() && !sc.ensembles.empty()) name = sc.ensembles.begin()->first;
    auto it = sc.ensembles.find(name);
    if (it == sc.ensembles.end()) throw ScenarioError("density check needs an [ensembles.<name>]");
    const EnsembleRequest& req = it->second;
    EvolutionSetup setup = sc.evolution_setup();
    int n_steps = static_cast<int>(std::llround(req.time / req.step));
    if (n_steps % 2) throw ScenarioError("ensemble time must span an even number of steps");
    GradientLine center = integrate_gradient_line(setup, req.start, req.step, n_steps);
    if (center.truncated) {
        r.status = CheckReport::Status::skipped;
        r.diagnostics = center.diagnostic;
        return r;
    }
    Point c = center.samples[n_steps / 2].point;
    auto ww = estimate_density_position(setup, req.start, req.time, req.step, req.spec);
    auto w1 = estimate_density_position(setup, req.start, req.time / 2, req.step, req.spec);
    auto w2 = estimate_density_position(setup, c, req.time / 2, req.step, req.spec);
    auto zw = estimate_density_momentum(setup, req.start, req.time, req.step, req.spec, req.disc_radius);
    auto z1 = estimate_density_momentum(setup, req.start, req.time / 2, req.step, req.spec, req.disc_radius);
    auto z2 = estimate_density_momentum(setup, c, req.time / 2, req.step, req.spec, req.disc_radius);
    if (ww.degenerate || w1.degenerate || w2.degenerate || zw.degenerate || z1.degenerate ||
        z2.degenerate) {
        r.status = CheckReport::Status::fail;
        r.diagnostics = "degenerate endpoint cloud";
        return r;
    }
    double wbias = std::fabs(ww.value - w1.value * w2.value);
    double wsig = std::sqrt(ww.stderr_value * ww.stderr_value +
                            std::pow(w1.value * w2.stderr_value, 2) +
                            std::pow(w2.value * w1.stderr_value, 2));
    double zbias = std::fabs(zw.value - z1.value * z2.value);
    double zsig = std::sqrt(zw.stderr_value * zw.stderr_value +
                            std::pow(z1.value * z2.stderr_value, 2) +
                            std::pow(z2.value * z1.stderr_value, 2));
    r.samples = ww.members + zw.members;
    r.estimate = ww.value;
    r.stderr_value = wsig;
    std::ostringstream os;
    os << "position " << ww.value << " vs " << w1.value * w2.value << " (3sig " << 3 * wsig
       << "); section " << zw.value << " vs " << z1.value * z2.value << " (3sig " << 3 * zsig << ")";
    r.diagnostics = os.str();
    bool ok = wbias <= 3 * wsig && zbias <= 3 * zsig;
    r.status = ok ? CheckReport::Status::estimated : CheckReport::Status::fail;
    return r;
}

CheckReport check_confinement(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "confinement-exclusion");
    int count = geti(p, "count", 100);
    Rng rng(splitmix64(sc.seed ^ 0x636f6eULL));
    std::array<double, 9> zero{};
    int derived = 0;
    for (int t = 0; t < count; ++t) {
        std::array<double, 9> rho{};
        rho[1] = rng.uniform(-1, 1);
        rho[2] = rng.uniform(-1, 1);
        rho[3] = rng.uniform(-1, 1);
        rho[5] = rng.uniform(-1, 1);
        rho[6] = rng.uniform(-1, 1);
        rho[7] = rng.uniform(-1, 1);
        auto cls = classify_field(rho, zero, 0.0, "d3");
        bool ok = !cls.quark_nonzero[2] && cls.confinement_excluded;
        derived += ok ? 1 : 0;
    }
    r.samples = count;
    r.residual = count - derived;  // exact: every configuration must derive the exclusion
    r.tolerance = 0.0;
    r.status = derived == count ? CheckReport::Status::pass : CheckReport::Status::fail;
    std::ostringstream os;
    os << derived << "/" << count << " configurations derive the exclusion";
    r.diagnostics = os.str();
    return r;
}

CheckReport check_curvature_antisymmetry(const Scenario& sc, const toml::Value& p) {
    CheckReport r = base_report(sc, "curvature-antisymmetry");
    const auto& stack = pick_stack(sc, p);
    int points = geti(p, "points", 20);
    int D = sc.sig.total_dim;
    std::vector<ConnectionPtr> conns = {
        std::make_shared<GaugeConnection>(stack),
        std::make_shared<ChristoffelConnection>(MetricField::from_stack(stack)),
        std::make_shared<HolonomicConnection>(stack)};
    auto samples = sc.sample(points, 0x616eULL);
    double worst = 0.0;
    for (const auto& conn : conns)
        for (const Point& q : samples) {
            auto K = curvature_at(*conn, q);
            for (int M = 0; M < D; ++M)
                for (int N = 0; N < D; ++N)
                    for (int P = 0; P < D; ++P)
                        for (int Q = P; Q < D; ++Q)
                            worst = std::max(worst,
                                             std::fabs(K[((M * D + N) * D + P) * D + Q] +
                                                       K[((M * D + N) * D + Q) * D + P]));
            ++r.samples;
        }
    r.residual = worst;
    finish(r);
    return r;
}

}  // namespace

const std::map<std::string, CheckInfo>& check_registry() {
    static const std::map<std::string, CheckInfo> registry = {
        {"transformation-laws", {check_transformation_laws, 1e-6, "connection and curvature transformation laws"}},
        {"pure-gauge-flatness", {check_pure_gauge_flatness, 1e-6, "trivial-inner gauge connections are flat"}},
        {"field-strengths", {check_field_strengths, 1e-6, "electroweak field-strength identities"}},
        {"decomposition-roundtrip", {check_decomposition_roundtrip, 1e-10, "potential decomposition round trip"}},
        {"lepton-evolution", {check_lepton_evolution, 1e-6, "lepton evolution identities"}},
        {"pmns-mixing", {check_pmns, 1e-6, "mixed lepton evolution identities"}},
        {"ckm-mixing", {check_ckm, 1e-6, "mixed quark evolution identities"}},
        {"gluon-assembly", {check_gluon_assembly, 1e-10, "color matrix assembly"}},
        {"energy-momentum", {check_energy_momentum, 1e-8, "on-shell energy-momentum equation"}},
        {"momentum-velocity", {check_momentum_velocity, 1e-6, "momentum-velocity relation on lines"}},
        {"gamma-algebra", {check_gamma_algebra, 1e-12, "generator anticommutators and first-order identity"}},
        {"action-ratio", {check_action_ratio, 1e-4, "first-order action doubles the elementary action"}},
        {"yang-mills", {check_yang_mills, 1e-6, "source equation in the divergence direction"}},
        {"charge-extraction", {check_charge_extraction, 1e-10, "charge raising/lowering consistency"}},
        {"lorentz-force", {check_lorentz_force, 1e-5, "force balance along the evolution direction"}},
        {"generation-report", {check_generation_report, 0.0, "three-generation combination report"}},
        {"heisenberg", {check_heisenberg, 1e-4, "dual-picture flow identities"}},
        {"cpt", {check_cpt, 1e-10, "full inversion invariance of the accumulated differential"}},
        {"density-composability", {check_density_composability, 0.0, "density estimates compose along lines"}},
        {"confinement-exclusion", {check_confinement, 0.0, "lone down-type quark exclusion"}},
        {"curvature-antisymmetry", {check_curvature_antisymmetry, 1e-12, "curvature last-pair antisymmetry"}},
    };
    return registry;
}

bool glob_match(const std::string& pattern, const std::string& text) {
    if (pattern.empty()) return true;
    // iterative '*' wildcard match
    size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == text[t])) { ++p; ++t; }
        else if (p < pattern.size() && pattern[p] == '*') { star = p++; mark = t; }
        else if (star != std::string::npos) { p = star + 1; t = ++mark; }
        else return false;
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<CheckReport> run_checks(const Scenario& sc, const std::string& filter, bool parallel) {
    const auto& registry = check_registry();
    std::vector<const CheckRequest*> selected;
    for (const auto& req : sc.checks)
        if (glob_match(filter, req.id)) selected.push_back(&req);

    auto run_one = [&](const CheckRequest& req) {
        CheckReport r;
        double t0 = now_ms();
        auto it = registry.find(req.id);
        if (it == registry.end()) {
            r.id = req.id;
            r.status = CheckReport::Status::fail;
            r.diagnostics = "unknown check id";
        } else {
            // per-check default tolerance unless the scenario overrides it
            Scenario local = sc;
            if (!local.tolerance_overrides.count(req.id))
                local.tolerance_overrides[req.id] = it->second.default_tolerance;
            try {
                r = it->second.run(local, *req.params);
            } catch (const std::exception& e) {
                r.id = req.id;
                r.status = CheckReport::Status::fail;
                r.diagnostics = e.what();
            }
        }
        r.wall_ms = now_ms() - t0;
        return r;
    };

    std::vector<CheckReport> reports(selected.size());
    if (parallel) {
        std::vector<std::future<CheckReport>> futures;
        futures.reserve(selected.size());
        for (const auto* req : selected)
            futures.push_back(std::async(std::launch::async, run_one, std::cref(*req)));
        for (size_t i = 0; i < futures.size(); ++i) reports[i] = futures[i].get();
    } else {
        for (size_t i = 0; i < selected.size(); ++i) reports[i] = run_one(*selected[i]);
    }
    return reports;
}

}  // namespace affine
