#include "affine/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace affine {

namespace {

Expr parse_field_expr(const std::string& text, int dim, const std::string& where) {
    try {
        Expr e = parse_expr(text);
        if (e.max_coord() > dim)
            throw ScenarioError(where + ": expression references x" + std::to_string(e.max_coord()) +
                                " beyond dimension " + std::to_string(dim));
        return e;
    } catch (const std::runtime_error& e) {
        throw ScenarioError(where + ": " + e.what());
    }
}

FrameField parse_frame(const toml::Value& spec, int D, const std::string& where) {
    std::string kind = spec.get_string("kind", "identity");
    if (kind == "identity") return FrameField::identity(D);
    if (kind == "diagonal") {
        const toml::Value* entries = spec.find("entries");
        if (!entries || !entries->is_array() || static_cast<int>(entries->array().size()) != D)
            throw ScenarioError(where + ": diagonal frame needs " + std::to_string(D) + " entries");
        std::vector<Expr> diag;
        for (const auto& e : entries->array()) diag.push_back(parse_field_expr(e->str(), D, where));
        return FrameField::diagonal(D, diag);
    }
    if (kind == "matrix") {
        const toml::Value* rows = spec.find("rows");
        if (!rows || !rows->is_array() || static_cast<int>(rows->array().size()) != D)
            throw ScenarioError(where + ": matrix frame needs " + std::to_string(D) + " rows");
        std::vector<Expr> b;
        for (const auto& row : rows->array()) {
            if (!row->is_array() || static_cast<int>(row->array().size()) != D)
                throw ScenarioError(where + ": each row needs " + std::to_string(D) + " entries");
            for (const auto& e : row->array()) b.push_back(parse_field_expr(e->str(), D, where));
        }
        const toml::Value* inv = spec.find("inverse_rows");
        if (inv) {
            std::vector<Expr> c;
            for (const auto& row : inv->array())
                for (const auto& e : row->array()) c.push_back(parse_field_expr(e->str(), D, where));
            return FrameField(D, b, c);
        }
        return FrameField(D, b);
    }
    if (kind == "rotations") {
        std::vector<Expr> diag(D, Expr::constant(1.0));
        const toml::Value* base = spec.find("base_diagonal");
        if (base) {
            if (static_cast<int>(base->array().size()) != D)
                throw ScenarioError(where + ": base_diagonal needs " + std::to_string(D) + " entries");
            for (int i = 0; i < D; ++i) diag[i] = parse_field_expr(base->array()[i]->str(), D, where);
        }
        double scale = spec.get_number("scale", 1.0);
        if (scale != 1.0)
            for (int i = 0; i < D; ++i) diag[i] = Expr::constant(scale) * diag[i];
        FrameField f = FrameField::diagonal(D, diag);
        const toml::Value* rots = spec.find("rotations");
        if (rots) {
            for (const auto& r : rots->array()) {
                const toml::Value* plane = r->find("plane");
                if (!plane || plane->array().size() != 2)
                    throw ScenarioError(where + ": rotation needs plane = [a, b]");
                int a = static_cast<int>(plane->array()[0]->integer());
                int b = static_cast<int>(plane->array()[1]->integer());
                Expr angle = parse_field_expr(r->get_string("angle", "0"), D, where);
                f.premultiply(FrameField::plane_rotation(D, a, b, angle));
            }
        }
        return f;
    }
    throw ScenarioError(where + ": unknown frame kind '" + kind + "'");
}

TensorField parse_charge(const toml::Value& spec, const SpaceSignature& sig, const std::string& where) {
    int D = sig.total_dim;
    std::string kind = spec.get_string("kind", "matrix");
    if (kind == "matrix") {
        const toml::Value* rows = spec.find("entries");
        if (!rows || !rows->is_array() || static_cast<int>(rows->array().size()) != D)
            throw ScenarioError(where + ": charge needs " + std::to_string(D) + " rows");
        std::vector<Expr> comps;
        for (const auto& row : rows->array()) {
            if (static_cast<int>(row->array().size()) != D)
                throw ScenarioError(where + ": each charge row needs " + std::to_string(D) + " entries");
            for (const auto& e : row->array()) comps.push_back(parse_field_expr(e->str(), D, where));
        }
        return TensorField::from_exprs(D, {Var::lower, Var::lower}, comps);
    }
    if (kind == "internal_random" || kind == "full_random") {
        Rng rng(static_cast<uint64_t>(spec.get_integer("seed", 1)));
        double amp = spec.get_number("amplitude", 0.5);
        double nonlinearity = spec.get_number("nonlinearity", 1.0);
        bool zero_at_origin = spec.get_bool("zero_at_origin", false);
        int first = kind == "full_random" ? 0 : sig.external_dim;
        std::vector<Expr> comps(static_cast<size_t>(D) * D, Expr::constant(0.0));
        for (int m = first; m < D; ++m)
            for (int n = first; n < D; ++n) {
                Expr e = Expr::constant(amp * rng.uniform(-1, 1)) * Expr::coord(1 + rng.index(D)) +
                         Expr::constant(amp * rng.uniform(-1, 1)) * Expr::coord(1 + rng.index(D)) +
                         Expr::constant(amp * nonlinearity * rng.uniform(-1, 1)) *
                             sin(Expr::constant(rng.uniform(0.5, 1.5)) * Expr::coord(1 + rng.index(D))) +
                         Expr::constant(amp * nonlinearity * rng.uniform(-1, 1)) *
                             cos(Expr::constant(rng.uniform(0.5, 1.5)) * Expr::coord(1 + rng.index(D)));
                if (!zero_at_origin) e = e + Expr::constant(amp * rng.uniform(-0.5, 0.5));
                if (zero_at_origin) {
                    // subtract the value at the origin so lines can start on
                    // the charge's zero locus
                    std::vector<double> origin(D, 0.0);
                    e = e - Expr::constant(e.eval(origin.data(), D));
                }
                comps[m * static_cast<size_t>(D) + n] = e;
            }
        return TensorField::from_exprs(D, {Var::lower, Var::lower}, comps);
    }
    throw ScenarioError(where + ": unknown charge kind '" + kind + "'");
}

Point parse_point(const toml::Value* arr, int D, const std::string& where) {
    if (!arr || !arr->is_array() || static_cast<int>(arr->array().size()) != D)
        throw ScenarioError(where + ": needs " + std::to_string(D) + " coordinates");
    std::vector<double> c;
    for (const auto& v : arr->array()) c.push_back(v->number());
    return Point(std::move(c));
}

}  // namespace

ConnectionPtr Scenario::background_connection() const {
    if (background_stack.empty()) return std::make_shared<ZeroConnection>(sig.total_dim);
    ReferenceSystemStack s = transform_stack(stack(background_stack), inversion);
    if (background_kind == "holonomic") return std::make_shared<HolonomicConnection>(s);
    if (background_kind == "gauge") return std::make_shared<GaugeConnection>(s);
    if (background_kind == "christoffel")
        return std::make_shared<ChristoffelConnection>(MetricField::from_stack(s));
    throw ScenarioError("unknown background connection kind '" + background_kind + "'");
}

MetricField Scenario::background_metric() const {
    if (background_stack.empty()) return MetricField::euclidean(sig.total_dim);
    return MetricField::from_stack(transform_stack(stack(background_stack), inversion));
}

EvolutionSetup Scenario::evolution_setup() const {
    if (evolution_charge.empty()) throw ScenarioError("no evolution charge declared");
    return EvolutionSetup{background_connection(), background_metric(),
                          transform_tensor(charge(evolution_charge), inversion), functional};
}

std::vector<Point> Scenario::sample(int count, uint64_t salt) const {
    return sample_points(sig.total_dim, count, splitmix64(seed ^ salt), box, false);
}

Scenario load_scenario_text(const std::string& text) {
    toml::Value root;
    try {
        root = toml::parse(text);
    } catch (const toml::ParseError& e) {
        throw ScenarioError(std::string("parse error: ") + e.what());
    }
    Scenario sc;
    const toml::Value* space = root.find("space");
    if (!space) throw ScenarioError("missing [space] table");
    int D = static_cast<int>(space->get_integer("dim", 0));
    int r = static_cast<int>(space->get_integer("external_dim", 3));
    try {
        sc.sig = SpaceSignature(D, r);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("invalid space signature: ") + e.what());
    }
    sc.inversion = InversionState::identity(D);

    if (const toml::Value* s = root.find("sampling")) {
        sc.seed = static_cast<uint64_t>(s->get_integer("seed", 1));
        sc.points = static_cast<int>(s->get_integer("points", 100));
        sc.box = s->get_number("box", 1.0);
    }
    if (const toml::Value* t = root.find("tolerances")) {
        sc.default_tolerance = t->get_number("default", 1e-6);
        for (const auto& [k, v] : t->table())
            if (k != "default" && v->is_number()) sc.tolerance_overrides[k] = v->number();
    }
    if (const char* env = std::getenv("AFFINE_TOL")) {
        try {
            sc.default_tolerance = std::stod(env);
        } catch (...) {
            throw ScenarioError("AFFINE_TOL is not a number");
        }
    }

    auto validation_points = sample_points(D, 16, splitmix64(sc.seed ^ 0xabcdefULL), sc.box, false);

    if (const toml::Value* stacks = root.find("stacks")) {
        for (const auto& [name, spec] : stacks->table()) {
            ReferenceSystemStack stack;
            stack.label = name;
            const toml::Value* outer = spec->find("outer");
            if (!outer) throw ScenarioError("stack '" + name + "' needs an outer frame");
            stack.outer = parse_frame(*outer, D, "stacks." + name + ".outer");
            if (const toml::Value* inner = spec->find("inner"))
                stack.inner = parse_frame(*inner, D, "stacks." + name + ".inner");
            // eager invertibility validation
            for (const Point& p : validation_points) {
                try {
                    stack.outer.inverse_at(p);
                    if (stack.inner) stack.inner->inverse_at(p);
                } catch (const SingularFrameError& e) {
                    std::string coords = "(";
                    for (int i = 0; i < D; ++i)
                        coords += (i ? ", " : "") + std::to_string(e.point[i]);
                    throw ScenarioError("stack '" + name + "' is singular at " + coords + ")");
                }
                if (stack.outer.has_closed_inverse() && stack.outer.inverse_consistency(p) > 1e-8)
                    throw ScenarioError("stack '" + name + "': declared inverse does not match the frame");
            }
            sc.stacks.emplace(name, std::move(stack));
        }
    }

    if (const toml::Value* sect = root.find("sector")) {
        std::string kind = sect->get_string("kind", "");
        Sector s;
        if (kind == "weak_em") s = Sector::weak_em;
        else if (kind == "strong") s = Sector::strong;
        else if (kind == "unified") s = Sector::unified;
        else throw ScenarioError("unknown sector '" + kind + "'");
        try {
            SectorConfig cfg = SectorConfig::make(s, D);
            auto read3 = [&](const char* key, std::array<double, 3>& out) {
                if (const toml::Value* v = sect->find(key)) {
                    if (v->array().size() != 3) throw ScenarioError(std::string(key) + " needs 3 entries");
                    for (int i = 0; i < 3; ++i) out[i] = v->array()[i]->number();
                }
            };
            read3("lepton_c_a", cfg.lepton_c_a);
            read3("lepton_c_b", cfg.lepton_c_b);
            read3("quark_c_a", cfg.quark_c_a);
            read3("quark_c_b", cfg.quark_c_b);
            if (const toml::Value* v = sect->find("rst")) {
                if (v->array().size() != 9) throw ScenarioError("rst needs 9 entries");
                for (int i = 0; i < 9; ++i) cfg.rst[i] = v->array()[i]->number();
                std::array<double, 9> inv;
                mat_inverse(cfg.rst.data(), inv.data(), 3);  // throws when singular
            }
            sc.sector = cfg;
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("sector configuration: ") + e.what());
        } catch (const SingularMatrixError&) {
            throw ScenarioError("sector configuration: rst coefficient matrix is singular");
        }
        // eager sector-metric validation against the declared stack
        std::string stack_name = sect->get_string("stack", "");
        if (!stack_name.empty()) {
            MetricField metric = MetricField::from_stack(sc.stack(stack_name));
            SectorConfig probe = *sc.sector;
            for (const Point& p : validation_points)
                if (probe.derive_couplings(metric, p) > 1e-8)
                    throw ScenarioError("sector metric equalities violated by stack '" + stack_name + "'");
        }
    }

    if (const toml::Value* charges = root.find("charges")) {
        for (const auto& [name, spec] : charges->table())
            sc.charges.emplace(name, parse_charge(*spec, sc.sig, "charges." + name));
    }

    if (const toml::Value* bg = root.find("background")) {
        sc.background_stack = bg->get_string("stack", "");
        sc.background_kind = bg->get_string("kind", "holonomic");
        if (!sc.background_stack.empty()) sc.stack(sc.background_stack);  // resolve check
    }
    if (const toml::Value* ev = root.find("evolution")) {
        sc.evolution_charge = ev->get_string("charge", "");
        if (!sc.evolution_charge.empty()) sc.charge(sc.evolution_charge);
        if (const toml::Value* comp = ev->find("component")) {
            if (comp->is_string() && comp->str() == "sum") sc.functional = ChargeFunctional::sum();
            else if (comp->is_array() && comp->array().size() == 2)
                sc.functional = ChargeFunctional::component(
                    static_cast<int>(comp->array()[0]->integer()),
                    static_cast<int>(comp->array()[1]->integer()));
            else throw ScenarioError("evolution.component must be [m, n] or \"sum\"");
            if (sc.functional.kind == ChargeFunctional::Kind::component &&
                (sc.functional.m < 1 || sc.functional.m > D || sc.functional.n < 1 ||
                 sc.functional.n > D))
                throw ScenarioError("evolution.component indices out of range");
        }
    }

    if (const toml::Value* ens = root.find("ensembles")) {
        for (const auto& [name, spec] : ens->table()) {
            EnsembleRequest req;
            req.name = name;
            req.spec.count = static_cast<int>(spec->get_integer("count", 128));
            req.spec.radius = spec->get_number("radius", 0.1);
            req.spec.seed = static_cast<uint64_t>(spec->get_integer("seed", 1));
            req.spec.det_constraint = spec->get_bool("det_constraint", true);
            req.spec.bootstrap = static_cast<int>(spec->get_integer("bootstrap", 200));
            req.time = spec->get_number("time", 0.5);
            req.step = spec->get_number("step", 0.01);
            req.disc_radius = spec->get_number("disc_radius", 0.02);
            req.start = spec->find("start") ? parse_point(spec->find("start"), D, "ensembles." + name)
                                            : Point(std::vector<double>(D, 0.0));
            try {
                req.spec.validate();
            } catch (const std::invalid_argument& e) {
                throw ScenarioError("ensembles." + name + ": " + e.what());
            }
            sc.ensembles.emplace(name, std::move(req));
        }
    }

    if (const toml::Value* checks = root.find("checks")) {
        if (!checks->is_array()) throw ScenarioError("[[checks]] must be an array of tables");
        for (const auto& c : checks->array()) {
            CheckRequest req;
            req.id = c->get_string("id", "");
            if (req.id.empty()) throw ScenarioError("every check needs an id");
            req.params = c;
            sc.checks.push_back(std::move(req));
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario_text(ss.str());
}

}  // namespace affine
