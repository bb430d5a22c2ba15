#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "lld/equilibria.hpp"
#include "lld/fem.hpp"
#include "lld/semigroup.hpp"

namespace lld {

struct CloudPoint {
    Eigen::VectorXd u;     // nodal values
    int source = -1;       // index of the launching equilibrium (or itself)
    int direction = 0;     // +-(k+1) for unstable eigenvector k, 0 for an equilibrium
    double time = 0.0;
    bool equilibrium = false;
};

struct AttractorSample {
    double eps = 0.0;
    std::vector<CloudPoint> points;
    int heteroclinics = 0;
    double max_sup = 0.0;
};

struct SampleSpec {
    double delta_launch = 1e-4;
    double arrive_tol = 1e-5;
    double t_max = 200.0;
    int snapshots = 200;  // per heteroclinic, uniform in energy arclength
    FlowConfig flow;
};

/// Equilibria plus heteroclinic orbits launched from u_* +- delta phi_k along
/// each unstable eigenvector, sampled uniformly in energy arclength.
AttractorSample sample_attractor(const DiscreteOperator& op, const Nonlinearity& f, const std::vector<Equilibrium>& equilibria,
                                 const SampleSpec& spec = {});

/// sup_{a in A} inf_{b in B} ||a - b|| in the energy norm of norm_op (nodal coordinates).
double directed_hausdorff(const std::vector<Eigen::VectorXd>& A, const std::vector<Eigen::VectorXd>& B,
                          const DiscreteOperator& norm_op);

/// dist(A, B) + dist(B, A).
double hausdorff(const std::vector<Eigen::VectorXd>& A, const std::vector<Eigen::VectorXd>& B, const DiscreteOperator& norm_op);
double hausdorff(const AttractorSample& A, const AttractorSample& B, const DiscreteOperator& norm_op);

std::vector<Eigen::VectorXd> cloud_vectors(const AttractorSample& s);

void write_cloud_csv(const std::string& path, const Mesh& mesh, const AttractorSample& s);

}  // namespace lld
