#include "lld/fem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>

#include "lld/errors.hpp"
#include "lld/kernels.hpp"

namespace lld {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

double Mesh::max_h() const {
    double m = 0.0;
    for (Eigen::Index e = 0; e < elements(); ++e) m = std::max(m, h(e));
    return m;
}

Eigen::VectorXd Mesh::spacing() const {
    Eigen::VectorXd hv(elements());
    for (Eigen::Index e = 0; e < elements(); ++e) hv[e] = h(e);
    return hv;
}

Eigen::VectorXd Mesh::coordinates() const { return Eigen::Map<const Eigen::VectorXd>(x.data(), nodes()); }

Eigen::Index Mesh::find_node(double xv, double tol) const {
    auto it = std::lower_bound(x.begin(), x.end(), xv - tol);
    if (it != x.end() && std::abs(*it - xv) <= tol) return it - x.begin();
    return -1;
}

Mesh uniform_mesh(int n) {
    if (n < 1) throw ContractViolation("uniform_mesh: n must be positive");
    Mesh m;
    m.n = n;
    m.x.resize(n + 1);
    for (int k = 0; k <= n; ++k) m.x[k] = static_cast<double>(k) / n;
    return m;
}

Mesh build_mesh(const Geometry& g, int n) {
    if (n < 16) throw ContractViolation("build_mesh: n must be at least 16");
    const double bp[] = {0.0, g.x1 - g.eps, g.x1, g.x1 + g.eps, g.x2 - g.eps, g.x2, g.x2 + g.eps, 1.0};
    if (!(g.eps > 1e-12)) throw RefineRequest("build_mesh: eps too small to resolve");
    for (int i = 0; i + 1 < 8; ++i)
        if (!(bp[i + 1] > bp[i]))
            throw RefineRequest("build_mesh: breakpoints collide (x1+eps >= x2-eps or layer leaves [0,1]); "
                                "reduce eps");
    const double h = 1.0 / n;
    Mesh m;
    m.n = n;
    m.has_geometry = true;
    m.geometry = g;
    m.x.assign(std::begin(bp), std::end(bp));
    for (int k = 1; k < n; ++k) {
        const double xk = static_cast<double>(k) / n;
        bool keep = true;
        for (double b : bp) keep = keep && std::abs(xk - b) >= h / 8.0;
        if (keep) m.x.push_back(xk);
    }
    std::sort(m.x.begin(), m.x.end());
    m.x.erase(std::unique(m.x.begin(), m.x.end()), m.x.end());
    m.i_left = m.find_node(bp[1], 0.0);
    m.i_x1 = m.find_node(bp[2], 0.0);
    m.i_x1p = m.find_node(bp[3], 0.0);
    m.i_x2m = m.find_node(bp[4], 0.0);
    m.i_x2 = m.find_node(bp[5], 0.0);
    m.i_right = m.find_node(bp[6], 0.0);
    return m;
}

Mesh build_mesh(const ProblemConfig& config, const DiffusionProfile& profile, int n) {
    return build_mesh(Geometry{config.x1, config.x2, profile.eps()}, n);
}

Eigen::VectorXd DiscreteOperator::embed(const Eigen::VectorXd& dofs) const {
    if (kind == OperatorKind::perturbed) return dofs;
    const Eigen::Index N = nodes();
    const Eigen::Index w = c1_ - c0_;
    if (dofs.size() != N - w) throw ContractViolation("embed: dimension mismatch");
    Eigen::VectorXd u(N);
    u.head(c0_) = dofs.head(c0_);
    u.segment(c0_, w + 1).setConstant(dofs[c0_]);
    u.tail(N - c1_ - 1) = dofs.tail(N - c1_ - 1);
    return u;
}

Eigen::VectorXd DiscreteOperator::restrict_load(const Eigen::VectorXd& load) const {
    if (kind == OperatorKind::perturbed) return load;
    const Eigen::Index N = nodes();
    const Eigen::Index w = c1_ - c0_;
    if (load.size() != N) throw ContractViolation("restrict_load: dimension mismatch");
    Eigen::VectorXd r(N - w);
    r.head(c0_) = load.head(c0_);
    r[c0_] = load.segment(c0_, w + 1).sum();
    r.tail(N - c1_ - 1) = load.tail(N - c1_ - 1);
    return r;
}

Eigen::VectorXd DiscreteOperator::to_dofs(const Eigen::VectorXd& nodal) const {
    if (kind == OperatorKind::perturbed) return nodal;
    const Eigen::Index N = nodes();
    const Eigen::Index w = c1_ - c0_;
    Eigen::VectorXd r(N - w);
    r.head(c0_) = nodal.head(c0_);
    r[c0_] = nodal[c0_];
    r.tail(N - c1_ - 1) = nodal.tail(N - c1_ - 1);
    return r;
}

SymTridiag DiscreteOperator::collapse(const SymTridiag& T) const {
    if (kind == OperatorKind::perturbed) return T;
    const Eigen::Index N = T.size();
    const Eigen::Index w = c1_ - c0_;
    SymTridiag C(N - w);
    for (Eigen::Index i = 0; i < c0_; ++i) C.diag[i] = T.diag[i];
    for (Eigen::Index i = 0; i < c0_; ++i) C.off[i] = T.off[i];
    double s = 0.0;
    for (Eigen::Index i = c0_; i <= c1_; ++i) s += T.diag[i];
    for (Eigen::Index i = c0_; i < c1_; ++i) s += 2.0 * T.off[i];
    C.diag[c0_] = s;
    for (Eigen::Index i = c1_ + 1; i < N; ++i) C.diag[i - w] = T.diag[i];
    for (Eigen::Index i = c1_; i + 1 < N; ++i) C.off[i - w] = T.off[i];
    return C;
}

double DiscreteOperator::energy_sq_nodal(const Eigen::VectorXd& u) const {
    if (u.size() != nodes()) throw ContractViolation("energy: dimension mismatch");
    const Eigen::Index ne = nodes() - 1;
    double s = 0.0;
    for (Eigen::Index e = 0; e < ne; ++e) {
        const double d = u[e + 1] - u[e];
        s += k_elem[e] * d * d;
    }
    return s + R_full.quad(u);
}

double DiscreteOperator::energy_nodal(const Eigen::VectorXd& u) const { return std::sqrt(std::max(0.0, energy_sq_nodal(u))); }

double DiscreteOperator::energy_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return A.bilinear(a, b); }

const LdltTridiag& DiscreteOperator::A_factor() const { return *factor_; }

DiscreteOperator assemble_coefficients(std::shared_ptr<const Mesh> mesh, const std::function<double(double)>& p,
                                       const std::function<double(double)>& q, OperatorKind kind) {
    const Mesh& m = *mesh;
    const Eigen::Index N = m.nodes();
    const Eigen::Index ne = m.elements();
    if (kind == OperatorKind::limit && !m.has_geometry)
        throw AssemblyError("limit operator needs a mesh with x1, x2 nodes");

    const Eigen::VectorXd h = m.spacing();
    Eigen::VectorXd qg(3 * ne), ones = Eigen::VectorXd::Ones(3 * ne);
    DiscreteOperator op;
    op.kind = kind;
    op.mesh = mesh;
    op.k_elem.resize(ne);
    op.h_elem = h;
    for (Eigen::Index e = 0; e < ne; ++e) {
        const bool in_core = kind == OperatorKind::limit && e >= m.i_x1 && e < m.i_x2;
        double pint = 0.0;
        for (int g = 0; g < 3; ++g) {
            const double xg = m.x[e] + kernels::kGaussNode[g] * h[e];
            qg[g * ne + e] = q(xg);
            if (!in_core) pint += kernels::kGaussWeight[g] * p(xg);
        }
        op.k_elem[e] = pint / h[e];
    }
    SymTridiag S_full(N);
    for (Eigen::Index e = 0; e < ne; ++e) {
        S_full.diag[e] += op.k_elem[e];
        S_full.diag[e + 1] += op.k_elem[e];
        S_full.off[e] = -op.k_elem[e];
    }
    op.R_full = SymTridiag(N);
    op.M_full = SymTridiag(N);
    const auto& kt = kernels::active();
    kt.gauss_weighted_mass(view(qg), view(h), view(op.R_full.diag), view(op.R_full.off));
    kt.gauss_weighted_mass(view(ones), view(h), view(op.M_full.diag), view(op.M_full.off));

    if (kind == OperatorKind::limit) {
        op.c0_ = m.i_x1;
        op.c1_ = m.i_x2;
    }
    op.S = op.collapse(S_full);
    op.R = op.collapse(op.R_full);
    op.M = op.collapse(op.M_full);
    op.A = lincomb(1.0, op.S, 1.0, op.R);
    op.factor_ = std::make_shared<LdltTridiag>(op.A);
    if (!op.factor_->ok()) throw AssemblyError("assembled operator is not positive definite");
    return op;
}

DiscreteOperator assemble(std::shared_ptr<const Mesh> mesh, const ProblemConfig& config, const DiffusionProfile& profile,
                          OperatorKind kind) {
    if (!mesh->has_geometry) throw AssemblyError("mesh was not built for this profile");
    for (double b : profile.breakpoints())
        if (mesh->find_node(b) < 0) throw AssemblyError("mesh does not resolve profile breakpoint " + std::to_string(b));
    auto q = [&](double x) { return config.q(x); };
    DiscreteOperator op;
    if (kind == OperatorKind::perturbed) {
        op = assemble_coefficients(mesh, [&](double x) { return profile(x); }, q, kind);
        op.eps = profile.eps();
    } else {
        op = assemble_coefficients(mesh, [&](double x) { return profile.p0(x); }, q, kind);
        op.eps = 0.0;
    }
    op.c_omega0 = config.c_omega0();
    return op;
}

DiscreteOperator assemble_h1(std::shared_ptr<const Mesh> mesh) {
    return assemble_coefficients(std::move(mesh), [](double) { return 1.0; }, [](double) { return 1.0; });
}

double energy_norm(const DiscreteOperator& op, const GridFunction& u) {
    if (u.values.size() != op.nodes()) throw ContractViolation("energy_norm: dimension mismatch");
    return op.energy_nodal(u.values);
}

double omega0_average(const Mesh& m, const Eigen::VectorXd& u) {
    double s = 0.0;
    for (Eigen::Index e = m.i_x1; e < m.i_x2; ++e) s += 0.5 * m.h(e) * (u[e] + u[e + 1]);
    return s / (m.x[m.i_x2] - m.x[m.i_x1]);
}

GridFunction extend_E(const DiffusionProfile& profile, const Mesh& m, const GridFunction& u) {
    if (!m.has_geometry) throw ContractViolation("extend_E: mesh without geometry");
    GridFunction out = u;
    out.space = Space::constrained;
    const double avg = omega0_average(m, u.values);
    const double eps = profile.eps();
    const double ul = u.values[m.i_left];
    const double ur = u.values[m.i_right];
    const double xl = m.x[m.i_left];
    const double xr = m.x[m.i_right];
    for (Eigen::Index i = m.i_left + 1; i < m.i_x1; ++i) out.values[i] = ul + (avg - ul) * (m.x[i] - xl) / eps;
    for (Eigen::Index i = m.i_x1; i <= m.i_x2; ++i) out.values[i] = avg;
    for (Eigen::Index i = m.i_x2 + 1; i < m.i_right; ++i) out.values[i] = ur + (avg - ur) * (xr - m.x[i]) / eps;
    return out;
}

double embedding_constant(const DiscreteOperator& op) {
    const DiscreteOperator h1 = assemble_h1(op.mesh);
    const SymTridiag H = op.collapse(h1.A);
    return pencil_eigenvalue(op.A, H, static_cast<int>(op.dim()) - 1);
}

OperatorPair make_pair(const ProblemConfig& config, double eps, int n) {
    DiffusionProfile profile = make_profile(config, eps);
    auto mesh = std::make_shared<const Mesh>(build_mesh(config, profile, n));
    DiscreteOperator a = assemble(mesh, config, profile, OperatorKind::perturbed);
    DiscreteOperator b = assemble(mesh, config, profile, OperatorKind::limit);
    const double pd = p_dist(profile);
    return OperatorPair{mesh, profile, std::move(a), std::move(b), tau_of(pd, eps), pd};
}

void write_coo(const std::string& path, const SymTridiag& T) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open " + path);
    os.precision(17);
    const Eigen::Index n = T.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0) os << i << ' ' << i - 1 << ' ' << T.off[i - 1] << '\n';
        os << i << ' ' << i << ' ' << T.diag[i] << '\n';
        if (i + 1 < n) os << i << ' ' << i + 1 << ' ' << T.off[i] << '\n';
    }
}

void write_csv(const std::string& path, const GridFunction& u) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open " + path);
    os.precision(17);
    os << "x,u\n";
    for (Eigen::Index i = 0; i < u.values.size(); ++i) os << u.mesh->x[i] << ',' << u.values[i] << '\n';
}

}  // namespace lld
