#include "lld/attractor.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>

#include "lld/errors.hpp"
#include "lld/galerkin.hpp"
#include "lld/kernels.hpp"
#include "lld/spectral.hpp"

namespace lld {

namespace {

struct Shot {
    long arrival_step = -1;  // first step within arrive_tol of another equilibrium
    double length = 0.0;
    double sup = 0.0;
};

// True when u is within tol of an equilibrium other than `source`.
bool arrived(const DiscreteOperator& op, const std::vector<Equilibrium>& eqs, int source, const Eigen::VectorXd& u_nodal,
             double tol) {
    for (int k = 0; k < static_cast<int>(eqs.size()); ++k) {
        if (k == source) continue;
        if (op.energy_nodal(u_nodal - eqs[k].u.values) <= tol) return true;
    }
    return false;
}

}  // namespace

AttractorSample sample_attractor(const DiscreteOperator& op, const Nonlinearity& f, const std::vector<Equilibrium>& eqs,
                                 const SampleSpec& spec) {
    AttractorSample out;
    out.eps = op.eps;
    for (int k = 0; k < static_cast<int>(eqs.size()); ++k) {
        if (!(eqs[k].margin > kHyperbolicMargin))
            throw HyperbolicityFailure("sample_attractor: equilibrium " + std::to_string(k) + " is not hyperbolic");
        out.points.push_back(CloudPoint{eqs[k].u.values, k, 0, 0.0, true});
        out.max_sup = std::max(out.max_sup, eqs[k].u.values.cwiseAbs().maxCoeff());
    }
    const long max_steps = static_cast<long>(std::ceil(spec.t_max / spec.flow.dt));
    const double K = f.cutoff_K();

    for (int k = 0; k < static_cast<int>(eqs.size()); ++k) {
        const Equilibrium& eq = eqs[k];
        if (eq.morse_index == 0) continue;
        SymTridiag Jf;
        nonlinear_load(op, f, eq.dofs, &Jf);
        const auto unstable = pencil_eigenpairs(lincomb(1.0, op.A, -1.0, Jf), op.M, eq.morse_index);
        for (int dir = 0; dir < eq.morse_index; ++dir) {
            for (int sign : {1, -1}) {
                const Eigen::VectorXd start = eq.dofs + sign * spec.delta_launch * unstable[dir].vector;
                // Pass 1: arclength and arrival step.
                Shot shot;
                {
                    Integrator in(op, f, start, spec.flow);
                    Eigen::VectorXd prev = op.embed(start);
                    for (long s = 1; s <= max_steps; ++s) {
                        in.step();
                        const Eigen::VectorXd u = op.embed(in.state());
                        shot.length += op.energy_nodal(u - prev);
                        shot.sup = std::max(shot.sup, u.cwiseAbs().maxCoeff());
                        prev = u;
                        if (!u.allFinite() || shot.sup > 4.0 * K) {
                            std::ostringstream os;
                            os << "trajectory from equilibrium " << k << " is unbounded (sup " << shot.sup << " at t="
                               << in.time() << ")";
                            throw DynamicsAnomaly(os.str());
                        }
                        if (arrived(op, eqs, k, u, spec.arrive_tol)) {
                            shot.arrival_step = s;
                            break;
                        }
                    }
                    if (shot.arrival_step < 0) shot.arrival_step = max_steps;
                }
                out.max_sup = std::max(out.max_sup, shot.sup);
                // Pass 2: replay and snapshot at uniform arclength.
                const int n = std::max(2, spec.snapshots);
                const double ds = shot.length / (n - 1);
                Integrator in(op, f, start, spec.flow);
                Eigen::VectorXd prev = op.embed(start);
                double s_prev = 0.0;
                int next = 0;
                const int tag = sign * (dir + 1);
                out.points.push_back(CloudPoint{prev, k, tag, 0.0, false});
                ++next;
                for (long s = 1; s <= shot.arrival_step && next < n; ++s) {
                    in.step();
                    const Eigen::VectorXd u = op.embed(in.state());
                    const double seg = op.energy_nodal(u - prev);
                    const double s_cur = s_prev + seg;
                    while (next < n - 1 && next * ds <= s_cur) {
                        const double w = seg > 0.0 ? (next * ds - s_prev) / seg : 1.0;
                        out.points.push_back(CloudPoint{(1.0 - w) * prev + w * u, k, tag, in.time() - (1.0 - w) * spec.flow.dt, false});
                        ++next;
                    }
                    prev = u;
                    s_prev = s_cur;
                }
                while (next < n) {
                    out.points.push_back(CloudPoint{prev, k, tag, in.time(), false});
                    ++next;
                }
                ++out.heteroclinics;
            }
        }
    }
    return out;
}

std::vector<Eigen::VectorXd> cloud_vectors(const AttractorSample& s) {
    std::vector<Eigen::VectorXd> v;
    v.reserve(s.points.size());
    for (const auto& p : s.points) v.push_back(p.u);
    return v;
}

double directed_hausdorff(const std::vector<Eigen::VectorXd>& A, const std::vector<Eigen::VectorXd>& B,
                          const DiscreteOperator& op) {
    if (A.empty() || B.empty()) throw ContractViolation("hausdorff: empty cloud");
    // Full-space energy matrix; for the limit operator dofs differ from nodes.
    SymTridiag E(op.nodes());
    for (Eigen::Index e = 0; e + 1 < op.nodes(); ++e) {
        E.diag[e] += op.k_elem[e];
        E.diag[e + 1] += op.k_elem[e];
        E.off[e] = -op.k_elem[e];
    }
    E = lincomb(1.0, E, 1.0, op.R_full);
    std::vector<Eigen::VectorXd> EB;
    std::vector<double> nb;
    EB.reserve(B.size());
    for (const auto& b : B) {
        EB.push_back(E * b);
        nb.push_back(op.energy_sq_nodal(b));
    }
    const auto& kt = kernels::active();
    double worst = 0.0;
    for (const auto& a : A) {
        const double na = op.energy_sq_nodal(a);
        const std::span<const double> av(a.data(), static_cast<std::size_t>(a.size()));
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < B.size(); ++j) {
            const double d2 = na + nb[j] - 2.0 * kt.dot(av, {EB[j].data(), static_cast<std::size_t>(EB[j].size())});
            if (d2 < best) {
                best = d2;
                arg = j;
            }
        }
        // The Gram form loses digits for nearby points; recompute the winner directly.
        worst = std::max(worst, op.energy_nodal(a - B[arg]));
    }
    return worst;
}

double hausdorff(const std::vector<Eigen::VectorXd>& A, const std::vector<Eigen::VectorXd>& B, const DiscreteOperator& op) {
    return directed_hausdorff(A, B, op) + directed_hausdorff(B, A, op);
}

double hausdorff(const AttractorSample& A, const AttractorSample& B, const DiscreteOperator& op) {
    return hausdorff(cloud_vectors(A), cloud_vectors(B), op);
}

void write_cloud_csv(const std::string& path, const Mesh& mesh, const AttractorSample& s) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open " + path);
    os.precision(12);
    os << "source,direction,time,equilibrium";
    for (Eigen::Index i = 0; i < mesh.nodes(); ++i) os << ",u" << i;
    os << '\n';
    for (const auto& p : s.points) {
        os << p.source << ',' << p.direction << ',' << p.time << ',' << (p.equilibrium ? 1 : 0);
        for (Eigen::Index i = 0; i < p.u.size(); ++i) os << ',' << p.u[i];
        os << '\n';
    }
}

}  // namespace lld
