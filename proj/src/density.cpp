#include "affine/density.hpp"

#include "affine/transform.hpp"

namespace affine {

std::vector<std::vector<double>> sample_transformations(const EnsembleSpec& spec, int D) {
    spec.validate();
    std::vector<double> center = spec.center;
    if (center.empty()) {
        center.assign(static_cast<size_t>(D) * D, 0.0);
        for (int i = 0; i < D; ++i) center[i * D + i] = 1.0;
    }
    Rng master(spec.seed);
    std::vector<std::vector<double>> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        Rng rng = master.derive(static_cast<uint64_t>(i));
        std::vector<double> A(static_cast<size_t>(D) * D);
        for (auto& v : A) v = spec.radius * rng.uniform(-1.0, 1.0);
        if (spec.det_constraint) {
            double tr = 0.0;
            for (int d = 0; d < D; ++d) tr += A[d * D + d];
            for (int d = 0; d < D; ++d) A[d * D + d] -= tr / D;
        }
        auto E = mat_exp(A, D);
        std::vector<double> T(static_cast<size_t>(D) * D, 0.0);
        mat_mul(center.data(), E.data(), T.data(), D);
        out.push_back(std::move(T));
    }
    return out;
}

TensorField transform_charge(const TensorField& rho, const std::vector<double>& T, int D) {
    FrameField k = FrameField::constant(D, T);
    return apply_frame_to_tensor(rho, k);
}

double cloud_volume_proxy(const std::vector<Point>& cloud, int D) {
    int n = static_cast<int>(cloud.size());
    if (n < 2) return 0.0;
    std::vector<double> mean(D, 0.0);
    for (const Point& p : cloud)
        for (int d = 0; d < D; ++d) mean[d] += p[d];
    for (double& m : mean) m /= n;
    std::vector<double> cov(static_cast<size_t>(D) * D, 0.0);
    for (const Point& p : cloud)
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) cov[i * D + j] += (p[i] - mean[i]) * (p[j] - mean[j]);
    for (double& c : cov) c /= (n - 1);
    auto lam = sym_eigenvalues(cov.data(), D);
    double proxy = 1.0;
    for (int k = 0; k < D - 1; ++k) proxy *= std::sqrt(std::max(lam[k], 0.0));
    return proxy;
}

namespace {

struct CloudPair {
    std::vector<Point> curved, flat;
    Point center_endpoint;
};

CloudPair ensemble_endpoints(const EvolutionSetup& curved, const Point& a, double t, double step,
                             const EnsembleSpec& spec) {
    int D = curved.dim();
    auto transforms = sample_transformations(spec, D);
    int n_steps = std::max(1, static_cast<int>(std::llround(t / step)));
    CloudPair out;
    MetricField flat_metric = MetricField::euclidean(D);
    auto flat_conn = std::make_shared<ZeroConnection>(D);
    for (const auto& T : transforms) {
        TensorField rho_t = transform_charge(curved.rho, T, D);
        EvolutionSetup curved_t{curved.conn, curved.metric, rho_t, curved.functional};
        EvolutionSetup flat_t{flat_conn, flat_metric, rho_t, curved.functional};
        GradientLine lc = integrate_gradient_line(curved_t, a, step, n_steps);
        GradientLine lf = integrate_gradient_line(flat_t, a, step, n_steps);
        if (lc.truncated || lf.truncated) continue;
        out.curved.push_back(lc.endpoint());
        out.flat.push_back(lf.endpoint());
    }
    {
        GradientLine center = integrate_gradient_line(curved, a, step, n_steps);
        out.center_endpoint = center.samples.empty() ? a : center.endpoint();
    }
    return out;
}

double bootstrap_stderr(const std::vector<Point>& num, const std::vector<Point>& den, int D,
                        uint64_t seed, int replicates) {
    int n = static_cast<int>(num.size());
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<double> vals;
    vals.reserve(replicates);
    for (int r = 0; r < replicates; ++r) {
        std::vector<Point> bn, bd;
        bn.reserve(n);
        bd.reserve(n);
        for (int i = 0; i < n; ++i) {
            int j = rng.index(n);
            bn.push_back(num[j]);
            bd.push_back(den[j]);
        }
        double q = cloud_volume_proxy(bd, D);
        if (q < 1e-300) continue;
        vals.push_back(cloud_volume_proxy(bn, D) / q);
    }
    if (vals.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    return std::sqrt(var / (vals.size() - 1));
}

}  // namespace

DensityEstimate estimate_density_position(const EvolutionSetup& curved, const Point& a, double t,
                                          double step, const EnsembleSpec& spec) {
    int D = curved.dim();
    CloudPair clouds = ensemble_endpoints(curved, a, t, step, spec);
    DensityEstimate out;
    out.members = static_cast<int>(clouds.curved.size());
    out.center_endpoint = clouds.center_endpoint;
    double den = cloud_volume_proxy(clouds.curved, D);
    double num = cloud_volume_proxy(clouds.flat, D);
    if (out.members < 2 || den < 1e-12 || num < 1e-300) {
        out.degenerate = true;
        return out;
    }
    out.value = num / den;
    out.stderr_value = bootstrap_stderr(clouds.flat, clouds.curved, D, spec.seed, spec.bootstrap);
    return out;
}

DensityEstimate estimate_density_momentum(const EvolutionSetup& curved, const Point& a, double t,
                                          double step, const EnsembleSpec& spec, double disc_radius) {
    int D = curved.dim();
    spec.validate();
    int n_steps = std::max(1, static_cast<int>(std::llround(t / step)));
    // orthonormal basis of the section normal to the direction at a
    auto v = curved.gradient(a);
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw std::invalid_argument("direction field vanishes at the section center");
    std::vector<double> u(D);
    for (int d = 0; d < D; ++d) u[d] = v[d] / norm;
    std::vector<std::vector<double>> basis;
    for (int axis = 0; axis < D && static_cast<int>(basis.size()) < D - 1; ++axis) {
        std::vector<double> e(D, 0.0);
        e[axis] = 1.0;
        double du = 0.0;
        for (int d = 0; d < D; ++d) du += e[d] * u[d];
        for (int d = 0; d < D; ++d) e[d] -= du * u[d];
        for (const auto& b : basis) {
            double eb = 0.0;
            for (int d = 0; d < D; ++d) eb += e[d] * b[d];
            for (int d = 0; d < D; ++d) e[d] -= eb * b[d];
        }
        double en = 0.0;
        for (double c : e) en += c * c;
        en = std::sqrt(en);
        if (en < 1e-8) continue;
        for (double& c : e) c /= en;
        basis.push_back(e);
    }
    Rng master(spec.seed);
    std::vector<Point> starts, ends;
    DensityEstimate out;
    for (int i = 0; i < spec.count; ++i) {
        Rng rng = master.derive(static_cast<uint64_t>(i));
        // uniform in the (D-1)-ball of the section
        std::vector<double> dir(basis.size());
        double dn = 0.0;
        for (auto& c : dir) {
            c = rng.normal();
            dn += c * c;
        }
        dn = std::sqrt(dn);
        double rad = disc_radius * std::pow(rng.uniform01(), 1.0 / basis.size());
        Point start = a;
        for (size_t kb = 0; kb < basis.size(); ++kb)
            for (int d = 0; d < D; ++d) start.coords[d] += rad * dir[kb] / dn * basis[kb][d];
        GradientLine line = integrate_gradient_line(curved, start, step, n_steps);
        if (line.truncated) continue;
        starts.push_back(start);
        ends.push_back(line.endpoint());
    }
    out.members = static_cast<int>(starts.size());
    {
        GradientLine center = integrate_gradient_line(curved, a, step, n_steps);
        out.center_endpoint = center.samples.empty() ? a : center.endpoint();
    }
    double den = cloud_volume_proxy(ends, D);
    double num = cloud_volume_proxy(starts, D);
    if (out.members < 2 || den < 1e-300 || num < 1e-300) {
        out.degenerate = true;
        return out;
    }
    out.value = num / den;
    out.stderr_value = bootstrap_stderr(starts, ends, D, spec.seed, spec.bootstrap);
    return out;
}

PropagatorResult propagator_sum(const EvolutionSetup& curved, const Point& a, const Point& b,
                                double x0_window, double step, double accept_radius,
                                const EnsembleSpec& spec, int density_subcount) {
    int D = curved.dim();
    auto transforms = sample_transformations(spec, D);
    int n_steps = std::max(1, static_cast<int>(std::llround(x0_window / step)));
    PropagatorResult out;
    out.total = static_cast<int>(transforms.size());
    std::complex<double> acc{0.0, 0.0};
    for (size_t i = 0; i < transforms.size(); ++i) {
        TensorField rho_t = transform_charge(curved.rho, transforms[i], D);
        EvolutionSetup member{curved.conn, curved.metric, rho_t, curved.functional};
        GradientLine line = integrate_gradient_line(member, a, step, n_steps);
        PropagatorMember pm;
        pm.id = static_cast<int>(i);
        pm.endpoint = line.truncated ? a : line.endpoint();
        pm.action = line.accumulated_action;
        if (!line.truncated) {
            double dist = 0.0;
            for (int d = 0; d < D; ++d) dist += (pm.endpoint[d] - b[d]) * (pm.endpoint[d] - b[d]);
            pm.accepted = std::sqrt(dist) <= accept_radius;
        }
        if (pm.accepted) {
            // the member's own density: sub-ensemble centered on its
            // transformation, applied to the original charge
            EnsembleSpec sub = spec;
            sub.count = density_subcount;
            sub.seed = splitmix64(spec.seed ^ (i + 1));
            sub.center = transforms[i];
            sub.bootstrap = 32;
            DensityEstimate w = estimate_density_position(curved, a, x0_window, step, sub);
            pm.weight = w.degenerate ? 0.0 : std::sqrt(std::max(0.0, w.value));
            acc += pm.weight * std::exp(std::complex<double>(0.0, pm.action));
            ++out.accepted;
        }
        out.members.push_back(std::move(pm));
    }
    if (out.accepted > 0) {
        out.value = acc / static_cast<double>(out.accepted);
        out.defined = true;
    }
    return out;
}

}  // namespace affine
