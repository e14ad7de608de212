// Command-line front end: load a scenario, run its checks, decompose sector
// potentials, trace evolution lines, or sample density ensembles.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "affine/checks.hpp"
#include "affine/density.hpp"

using namespace affine;

namespace {

int write_or_print(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return 0;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write '" << out_path << "'\n";
        return 2;
    }
    out << content;
    return 0;
}

int cmd_verify(const std::string& path, const std::string& filter, const std::string& format,
               int64_t seed_override, bool parallel, bool no_timing, const std::string& out_path) {
    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    }
    if (seed_override >= 0) sc.seed = static_cast<uint64_t>(seed_override);
    auto reports = run_checks(sc, filter, parallel);
    std::string body;
    if (format == "json") body = report_json(reports, !no_timing);
    else if (format == "csv") body = report_csv(reports, !no_timing);
    else body = report_text(reports);
    int rc = write_or_print(body, out_path);
    if (rc != 0) return rc;
    return report_exit_code(reports);
}

int cmd_decompose(const std::string& path, const std::string& sector_name,
                  const std::string& stack_name, const std::vector<double>& at) {
    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    }
    if (!sc.sector) {
        std::cerr << "scenario declares no sector\n";
        return 2;
    }
    if (!sector_name.empty()) {
        std::string declared = sc.sector->sector == Sector::weak_em   ? "weak_em"
                               : sc.sector->sector == Sector::strong ? "strong"
                                                                     : "unified";
        if (sector_name != declared) {
            std::cerr << "scenario declares sector '" << declared << "', not '" << sector_name << "'\n";
            return 2;
        }
    }
    std::string name = stack_name;
    if (name.empty()) name = sc.background_stack.empty() ? sc.stacks.begin()->first : sc.background_stack;
    int D = sc.sig.total_dim;
    Point p(at.empty() ? std::vector<double>(D, 0.1) : at);
    try {
        p.require_dim(D);
        const auto& stack = sc.stack(name);
        HolonomicConnection conn(stack);
        MetricField metric = MetricField::from_stack(stack);
        SectorConfig cfg = *sc.sector;
        double metric_res = cfg.derive_couplings(metric, p);
        auto gl = lower_gamma(conn.at(p), metric.G_at(p), D);
        PotentialSlice s = decompose_potentials(cfg, gl, D);
        std::cout << "stack " << name << ", metric residual " << metric_res << ", couplings g="
                  << cfg.coupling_weak << " gs=" << cfg.coupling_strong << "\n";
        auto row = [&](const char* nm, const std::vector<double>& v) {
            if (v.empty()) return;
            std::cout << nm << ":";
            for (double x : v) std::cout << " " << x;
            std::cout << "\n";
        };
        row("Z ", s.Z);
        row("A ", s.A);
        row("W1", s.W1);
        row("W2", s.W2);
        row("U1", s.U1);
        row("V1", s.V1);
        row("U2", s.U2);
        row("V2", s.V2);
        row("U3", s.U3);
        row("V3", s.V3);
        row("X23", s.X23);
        row("Y23", s.Y23);
        row("X31", s.X31);
        row("Y31", s.Y31);
        row("X12", s.X12);
        row("Y12", s.Y12);
        row("R ", s.R);
        row("S ", s.S);
        row("T ", s.T);
    } catch (const std::exception& e) {
        std::cerr << "decompose error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int cmd_evolve(const std::string& path, const std::string& charge, const std::vector<double>& start,
               int steps, double step, const std::string& out_path) {
    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    }
    try {
        if (!charge.empty()) sc.evolution_charge = charge;
        EvolutionSetup setup = sc.evolution_setup();
        Point p(start.empty() ? std::vector<double>(sc.sig.total_dim, 0.0) : start);
        p.require_dim(sc.sig.total_dim);
        GradientLine line = integrate_gradient_line(setup, p, step, steps);
        std::ostringstream os;
        os << "x0";
        for (int d = 1; d <= sc.sig.total_dim; ++d) os << ",x" << d;
        os << ",energy\n";
        os.precision(12);
        for (const auto& s : line.samples) {
            os << s.x0;
            for (double c : s.point.coords) os << "," << c;
            os << "," << s.energy << "\n";
        }
        int rc = write_or_print(os.str(), out_path);
        if (rc != 0) return rc;
        std::cerr << "samples " << line.samples.size() << ", accumulated action "
                  << line.accumulated_action;
        if (line.truncated) std::cerr << " (truncated: " << line.diagnostic << ")";
        std::cerr << "\n";
        return line.truncated ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "evolve error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_sample(const std::string& path, const std::string& ensemble, const std::string& out_prefix) {
    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::string name = ensemble;
        if (name.empty() && !sc.ensembles.empty()) name = sc.ensembles.begin()->first;
        auto it = sc.ensembles.find(name);
        if (it == sc.ensembles.end()) {
            std::cerr << "unknown ensemble '" << name << "'\n";
            return 2;
        }
        const EnsembleRequest& req = it->second;
        EvolutionSetup setup = sc.evolution_setup();
        auto w = estimate_density_position(setup, req.start, req.time, req.step, req.spec);
        auto z = estimate_density_momentum(setup, req.start, req.time, req.step, req.spec,
                                           req.disc_radius);
        // per-member endpoint table
        auto transforms = sample_transformations(req.spec, sc.sig.total_dim);
        std::ostringstream csv;
        csv << "member,endpoint,action,accepted\n";
        csv.precision(12);
        int n_steps = std::max(1, static_cast<int>(std::llround(req.time / req.step)));
        for (size_t i = 0; i < transforms.size(); ++i) {
            TensorField rho_t = transform_charge(setup.rho, transforms[i], sc.sig.total_dim);
            EvolutionSetup member{setup.conn, setup.metric, rho_t, setup.functional};
            GradientLine line = integrate_gradient_line(member, req.start, req.step, n_steps);
            csv << i << ",\"";
            for (int d = 0; d < sc.sig.total_dim; ++d)
                csv << (d ? " " : "") << (line.truncated ? 0.0 : line.endpoint()[d]);
            csv << "\"," << line.accumulated_action << "," << (line.truncated ? 0 : 1) << "\n";
        }
        std::ostringstream json;
        json.precision(17);
        json << "{\n  \"ensemble\": \"" << name << "\",\n  \"seed\": " << req.spec.seed
             << ",\n  \"members\": " << req.spec.count << ",\n  \"step\": " << req.step
             << ",\n  \"time\": " << req.time << ",\n  \"position_density\": {\"value\": " << w.value
             << ", \"stderr\": " << w.stderr_value << ", \"degenerate\": " << (w.degenerate ? "true" : "false")
             << "},\n  \"section_density\": {\"value\": " << z.value << ", \"stderr\": " << z.stderr_value
             << ", \"degenerate\": " << (z.degenerate ? "true" : "false") << "}\n}\n";
        if (out_prefix.empty()) {
            std::cout << json.str();
        } else {
            std::ofstream c(out_prefix + "_members.csv"), j(out_prefix + "_summary.json");
            if (!c || !j) {
                std::cerr << "cannot write output files\n";
                return 2;
            }
            c << csv.str();
            j << json.str();
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "sample error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine-connection gauge geometry verification harness"};
    app.require_subcommand(1);

    std::string scenario, filter, format = "text", out_path, stack_name, charge, ensemble, out_prefix;
    std::vector<double> start_coords;
    int64_t seed_override = -1;
    int steps = 100;
    double step = 0.01;
    bool parallel = false, no_timing = false;

    auto* verify = app.add_subcommand("verify", "run the scenario's checks");
    verify->add_option("scenario", scenario)->required();
    verify->add_option("--filter", filter, "glob over check ids");
    verify->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));
    verify->add_option("--seed", seed_override);
    verify->add_flag("--parallel", parallel, "run checks concurrently");
    verify->add_flag("--no-timing", no_timing, "omit wall-time fields for byte-stable reports");
    verify->add_option("--out", out_path);

    std::string sector_name;
    auto* decomp = app.add_subcommand("decompose", "print sector potentials at a point");
    decomp->add_option("scenario", scenario)->required();
    decomp->add_option("--sector", sector_name, "must match the scenario's declared sector");
    decomp->add_option("--stack", stack_name);
    decomp->add_option("--at", start_coords, "evaluation point coordinates");

    auto* evolve = app.add_subcommand("evolve", "integrate a gradient line");
    evolve->add_option("scenario", scenario)->required();
    evolve->add_option("--charge", charge);
    evolve->add_option("--start", start_coords);
    evolve->add_option("--steps", steps);
    evolve->add_option("--step", step);
    evolve->add_option("--out", out_path);

    auto* sample = app.add_subcommand("sample", "run a density ensemble");
    sample->add_option("scenario", scenario)->required();
    sample->add_option("--ensemble", ensemble);
    sample->add_option("--out", out_prefix, "file prefix for the member table and summary");

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed())
        return cmd_verify(scenario, filter, format, seed_override, parallel, no_timing, out_path);
    if (decomp->parsed()) return cmd_decompose(scenario, sector_name, stack_name, start_coords);
    if (evolve->parsed()) return cmd_evolve(scenario, charge, start_coords, steps, step, out_path);
    if (sample->parsed()) return cmd_sample(scenario, ensemble, out_prefix);
    return 2;
}
