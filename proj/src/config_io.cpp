#include "lld/config_io.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "lld/errors.hpp"

namespace lld {

namespace {

using nlohmann::json;

template <class T>
T get(const json& obj, const char* key, const std::string& path, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("key '" + path + key + "': " + e.what());
    }
}

template <class T>
T require(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + path + key + "'");
    return get<T>(obj, key, path, T{});
}

Coefficient coefficient(const json& obj, const char* key, const std::string& path, const Coefficient& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    try {
        if (v.is_number()) return Coefficient::constant(v.get<double>());
        if (v.is_string()) return Coefficient::parse(v.get<std::string>());
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + path + key + "': " + e.what());
    }
    throw ConfigError("key '" + path + key + "': expected \"const:<v>\" or \"poly:[...]\"");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("JSON ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("top level must be an object");

    RunConfig rc;
    rc.text = text;
    rc.sha256 = sha256_hex(text);
    ProblemConfig& p = rc.problem;
    p.lambda = require<double>(root, "lambda", "");
    p.c = coefficient(root, "c", "", p.c);
    p.m0 = require<double>(root, "m0", "");
    p.x1 = require<double>(root, "x1", "");
    p.x2 = require<double>(root, "x2", "");
    p.eps0 = require<double>(root, "eps0", "");

    if (root.contains("f")) {
        const json& f = root.at("f");
        if (!f.is_object()) throw ConfigError("key 'f': expected an object");
        const std::string family = get<std::string>(f, "family", "f.", "cubic");
        const auto params = get<std::vector<double>>(f, "params", "f.", {1.0, 1.0});
        const double K = get<double>(f, "cutoff_K", "f.", 4.0);
        try {
            p.f = Nonlinearity::parse_family(family, params, K);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("key 'f': ") + e.what());
        }
    }
    if (root.contains("profile")) {
        const json& pr = root.at("profile");
        if (!pr.is_object()) throw ConfigError("key 'profile': expected an object");
        try {
            p.profile.kind = profile_kind_from_string(get<std::string>(pr, "kind", "profile.", "ramp"));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("key 'profile.kind': ") + e.what());
        }
        p.profile.p0 = coefficient(pr, "p0", "profile.", p.profile.p0);
        p.profile.alpha = get<double>(pr, "alpha", "profile.", 1.0);
        p.profile.table = get<std::vector<double>>(pr, "table", "profile.", {});
        if (p.profile.kind == ProfileKind::custom_table && p.profile.table.size() < 2)
            throw ConfigError("key 'profile.table': custom-table needs at least two entries");
    }

    NumericsConfig& n = rc.numerics;
    if (root.contains("numerics")) {
        const json& j = root.at("numerics");
        const std::string s = "numerics.";
        n.eps_list = get(j, "eps_list", s, n.eps_list);
        n.mesh_n_elliptic = get(j, "mesh_n_elliptic", s, n.mesh_n_elliptic);
        n.mesh_n_dynamics = get(j, "mesh_n_dynamics", s, n.mesh_n_dynamics);
        n.dt = get(j, "dt", s, n.dt);
        n.scheme = get(j, "scheme", s, n.scheme);
        n.m = get(j, "m", s, n.m);
        n.graph_nodes = get(j, "graph_nodes", s, n.graph_nodes);
        n.graph_dt = get(j, "graph_dt", s, n.graph_dt);
        n.graph_tol = get(j, "graph_tol", s, n.graph_tol);
        n.snapshots = get(j, "snapshots", s, n.snapshots);
        n.delta_launch = get(j, "delta_launch", s, n.delta_launch);
        n.eig_k = get(j, "eig_k", s, n.eig_k);
        n.gap_eps = get(j, "gap_eps", s, n.gap_eps);
        n.mus = get(j, "mus", s, n.mus);
        n.loads = get(j, "loads", s, n.loads);
        n.semigroup_stride = get(j, "semigroup_stride", s, n.semigroup_stride);
        n.seed = get(j, "seed", s, n.seed);
        n.threads = get(j, "threads", s, n.threads);
        n.dump = get(j, "dump", s, n.dump);
    }
    if (n.m < 1 || n.m > 3) throw ConfigError("key 'numerics.m': must be 1, 2 or 3");
    if (n.eps_list.empty()) throw ConfigError("key 'numerics.eps_list': empty");

    AcceptanceConfig& a = rc.acceptance;
    if (root.contains("acceptance")) {
        const json& j = root.at("acceptance");
        const std::string s = "acceptance.";
        a.min_slope = get(j, "min_slope", s, a.min_slope);
        a.ratio_spread = get(j, "ratio_spread", s, a.ratio_spread);
        a.invariance = get(j, "invariance", s, a.invariance);
        a.containment = get(j, "containment", s, a.containment);
        a.gap_ratio_tol = get(j, "gap_ratio_tol", s, a.gap_ratio_tol);
        a.gap_ratio_from = get(j, "gap_ratio_from", s, a.gap_ratio_from);
        a.enforce_gap_ratio = get(j, "enforce_gap_ratio", s, a.enforce_gap_ratio);
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

}  // namespace lld
