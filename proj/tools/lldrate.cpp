#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lld/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Convergence-rate experiments for reaction-diffusion problems with large diffusion on a subinterval"};
    app.require_subcommand(1, 1);

    std::string config, out = "out";
    std::vector<double> eps_list;
    int mesh_n = 0;
    std::uint64_t seed = 0;
    bool dump = false;

    for (const auto& name : lld::kSubcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON problem descriptor")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--eps-list", eps_list, "eps values of the sweep")->delimiter(',');
        sub->add_option("--mesh-n", mesh_n, "elements per unit length for all meshes")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "seed for randomized diagnostics");
        sub->add_flag("--dump", dump, "write graph and attractor cloud CSVs");
    }
    CLI11_PARSE(app, argc, argv);

    lld::RunOptions opt;
    opt.out_dir = out;
    if (!eps_list.empty()) opt.eps_list = eps_list;
    auto* sub = app.get_subcommands().front();
    if (sub->count("--mesh-n")) opt.mesh_n = mesh_n;
    if (sub->count("--seed")) opt.seed = seed;
    if (dump) opt.dump = true;
    return lld::run_command(sub->get_name(), config, opt);
}
