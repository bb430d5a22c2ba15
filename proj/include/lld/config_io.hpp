#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lld/model.hpp"

namespace lld {

struct NumericsConfig {
    std::vector<double> eps_list{1e-1, 0.031622776601683791, 1e-2, 0.0031622776601683794, 1e-3};
    int mesh_n_elliptic = 2048;
    int mesh_n_dynamics = 1024;
    double dt = 1e-3;
    std::string scheme = "implicit-euler";
    int m = 1;
    int graph_nodes = 33;
    double graph_dt = 2e-3;
    double graph_tol = 1e-6;
    int snapshots = 200;
    double delta_launch = 1e-4;
    int eig_k = 30;
    double gap_eps = 1e-2;
    std::vector<double> mus{1.0, 10.0};
    int loads = 3;
    int semigroup_stride = 20;  // every n-th attractor sample point is used as w0
    std::uint64_t seed = 0;
    int threads = 0;            // 0: hardware concurrency
    bool dump = false;          // graph and cloud CSV dumps
};

struct AcceptanceConfig {
    double min_slope = 0.85;
    double ratio_spread = 10.0;
    double invariance = 5e-3;
    double containment = 1e-2;
    double gap_ratio_tol = 0.15;
    int gap_ratio_from = 20;
    bool enforce_gap_ratio = false;
};

struct RunConfig {
    ProblemConfig problem;
    NumericsConfig numerics;
    AcceptanceConfig acceptance;
    std::string text;    // raw JSON as read
    std::string sha256;  // of `text`
};

/// Parses the JSON descriptor; ConfigError carries the line or key at fault.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string sha256_hex(const std::string& data);

}  // namespace lld
