#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lld/model.hpp"
#include "lld/tridiag.hpp"

namespace lld {

struct Geometry {
    double x1, x2, eps;
};

/// P1 mesh on [0,1]. Background nodes k/n are merged with the breakpoints
/// {x1-eps, x1, x1+eps, x2-eps, x2, x2+eps}; a background node closer than
/// h/8 to a breakpoint is dropped, which keeps meshes for n and 2^j n nested.
struct Mesh {
    std::vector<double> x;
    int n = 0;
    bool has_geometry = false;
    Geometry geometry{0.0, 0.0, 0.0};
    Eigen::Index i_left = 0, i_x1 = 0, i_x1p = 0, i_x2m = 0, i_x2 = 0, i_right = 0;

    Eigen::Index nodes() const { return static_cast<Eigen::Index>(x.size()); }
    Eigen::Index elements() const { return nodes() - 1; }
    double h(Eigen::Index e) const { return x[e + 1] - x[e]; }
    double max_h() const;
    Eigen::VectorXd spacing() const;
    Eigen::VectorXd coordinates() const;
    Eigen::Index find_node(double xv, double tol = 1e-13) const;  // -1 if absent
};

Mesh build_mesh(const Geometry& g, int n);
Mesh build_mesh(const ProblemConfig& config, const DiffusionProfile& profile, int n);
Mesh uniform_mesh(int n);

enum class OperatorKind { perturbed, limit };

enum class Space { full, constrained };

/// Nodal values on a mesh.
struct GridFunction {
    std::shared_ptr<const Mesh> mesh;
    Eigen::VectorXd values;
    Space space = Space::full;
};

/// Galerkin matrices of the form int p u'v' + int q u v on a P1 mesh.
/// For kind == limit the dofs are the nodal values with all nodes of
/// [x1, x2] collapsed into one coefficient (the basis B); S, R, M, A are
/// then B^T (.) B, which stays tridiagonal in that ordering.
class DiscreteOperator {
public:
    OperatorKind kind = OperatorKind::perturbed;
    double eps = 0.0;  // 0 for the limit operator
    std::shared_ptr<const Mesh> mesh;

    SymTridiag S, R, M, A;      // dof coordinates
    SymTridiag R_full, M_full;  // nodal coordinates
    Eigen::VectorXd k_elem;     // element stiffness (int_e p) / h_e^2, nodal coordinates
    Eigen::VectorXd h_elem;     // element lengths
    double c_omega0 = 0.0;

    Eigen::Index dim() const { return A.size(); }
    Eigen::Index nodes() const { return mesh->nodes(); }

    /// B d: dof vector -> nodal values.
    Eigen::VectorXd embed(const Eigen::VectorXd& dofs) const;
    /// B^T v: nodal load -> dof load.
    Eigen::VectorXd restrict_load(const Eigen::VectorXd& load) const;
    /// Inverse of embed on the constrained space (Omega_0 value read at x1).
    Eigen::VectorXd to_dofs(const Eigen::VectorXd& nodal) const;
    /// B^T T B for a nodal tridiagonal T.
    SymTridiag collapse(const SymTridiag& T) const;

    /// Squared energy norm of a nodal vector: sum_e k_e (du_e)^2 + u^T R u.
    double energy_sq_nodal(const Eigen::VectorXd& u) const;
    double energy_nodal(const Eigen::VectorXd& u) const;
    /// Energy inner product of dof vectors, d^T A e.
    double energy_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

    /// Cached LDL^T factor of A.
    const LdltTridiag& A_factor() const;

    Eigen::Index collapse_begin() const { return c0_; }
    Eigen::Index collapse_end() const { return c1_; }

private:
    friend DiscreteOperator assemble_coefficients(std::shared_ptr<const Mesh>, const std::function<double(double)>&,
                                                  const std::function<double(double)>&, OperatorKind);
    Eigen::Index c0_ = 0, c1_ = 0;  // collapsed node range [c0_, c1_]
    std::shared_ptr<LdltTridiag> factor_;
};

/// Generic assembly with diffusion p and reaction q = lambda + c.
/// For kind == limit the mesh must carry geometry; p is only used on Omega_1.
DiscreteOperator assemble_coefficients(std::shared_ptr<const Mesh> mesh, const std::function<double(double)>& p,
                                       const std::function<double(double)>& q,
                                       OperatorKind kind = OperatorKind::perturbed);

DiscreteOperator assemble(std::shared_ptr<const Mesh> mesh, const ProblemConfig& config, const DiffusionProfile& profile,
                          OperatorKind kind);

/// H^1 inner product int u'v' + int u v on the mesh (diagnostics only).
DiscreteOperator assemble_h1(std::shared_ptr<const Mesh> mesh);

double energy_norm(const DiscreteOperator& op, const GridFunction& u);

/// Extension E onto the constrained space: u on [0,x1-eps] U [x2+eps,1],
/// the Omega_0 average on [x1,x2], linear across the layers.
GridFunction extend_E(const DiffusionProfile& profile, const Mesh& mesh, const GridFunction& u);

/// Omega_0 average of a nodal P1 function (trapezoid, exact for P1).
double omega0_average(const Mesh& mesh, const Eigen::VectorXd& u);

/// Largest generalized eigenvalue of (energy form, H^1 form): the embedding
/// constant of H^1 into the energy space, squared.
double embedding_constant(const DiscreteOperator& op);

/// Perturbed and limit operators on one shared mesh.
struct OperatorPair {
    std::shared_ptr<const Mesh> mesh;
    DiffusionProfile profile;
    DiscreteOperator eps_op;
    DiscreteOperator limit_op;
    TauValue tau;
    double p_dist;
};

OperatorPair make_pair(const ProblemConfig& config, double eps, int n);

void write_coo(const std::string& path, const SymTridiag& T);
void write_csv(const std::string& path, const GridFunction& u);

}  // namespace lld
