#include <CLI11.hpp>

#include "tbeam/cli_commands.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string mode = "closed";
    int n = -1;
    double cfl = -1.0;
    double t_final = -1.0;
    double delta1 = 0.0, delta2 = 0.0;
    bool delta1_set = false, delta2_set = false;
    std::string out_dir;
    bool zero_initial = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "key=value parameter file");
    cmd->add_option("--mode", f.mode, "open|closed")->check(CLI::IsMember({"open", "closed"}));
    cmd->add_option("--n", f.n, "grid cells");
    cmd->add_option("--cfl", f.cfl, "Courant number");
    cmd->add_option("--t-final", f.t_final, "simulation end time");
    cmd->add_option("--delta1", f.delta1, "ODE decay rate 1")->each([&](const std::string&) {
        f.delta1_set = true;
    });
    cmd->add_option("--delta2", f.delta2, "ODE decay rate 2")->each([&](const std::string&) {
        f.delta2_set = true;
    });
    cmd->add_option("--out", f.out_dir, "output directory");
}

tbeam::RunConfig build_config(const CommonFlags& f) {
    tbeam::RunConfig cfg;
    if (!f.config_path.empty()) cfg = tbeam::load_config(f.config_path);
    if (f.n > 0) cfg.n = f.n;
    if (f.cfl > 0.0) cfg.cfl = f.cfl;
    if (f.t_final > 0.0) cfg.t_final = f.t_final;
    if (f.delta1_set) cfg.ctrl.delta1 = f.delta1;
    if (f.delta2_set) cfg.ctrl.delta2 = f.delta2;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    cfg.mode = f.mode == "open" ? tbeam::SimMode::open_loop : tbeam::SimMode::closed_loop;
    return cfg;
}

std::vector<std::pair<double, double>> parse_pairs(const std::vector<std::string>& specs) {
    std::vector<std::pair<double, double>> pairs;
    for (const std::string& s : specs) {
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw CLI::ValidationError("--deltas", "expected delta1,delta2 but got '" + s + "'");
        pairs.emplace_back(std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)));
    }
    return pairs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backstepping boundary control of an anti-damped Timoshenko beam"};
    app.require_subcommand(1);

    CommonFlags fg, fs, fv, fw;
    std::string gains_path;
    std::vector<std::string> delta_specs;

    CLI::App* gains = app.add_subcommand("gains", "solve the control kernels, write gains.csv/phi.csv");
    add_common(gains, fg);

    CLI::App* sim = app.add_subcommand("simulate", "run the beam in open or closed loop");
    add_common(sim, fs);

    CLI::App* verify = app.add_subcommand("verify", "run the invariant check battery");
    add_common(verify, fv);
    verify->add_option("--gains", gains_path, "stored gains.csv to cross-check");

    CLI::App* sweep = app.add_subcommand("sweep", "closed-loop runs over a list of (delta1,delta2)");
    add_common(sweep, fw);
    sweep->add_option("--deltas", delta_specs, "comma pairs, e.g. --deltas 5,2 8,8")->required();

    CLI11_PARSE(app, argc, argv);

    return tbeam::cli::run_guarded([&]() -> int {
        if (gains->parsed()) return tbeam::cli::cmd_gains(build_config(fg));
        if (sim->parsed()) return tbeam::cli::cmd_simulate(build_config(fs));
        if (verify->parsed()) return tbeam::cli::cmd_verify(build_config(fv), gains_path);
        if (sweep->parsed()) return tbeam::cli::cmd_sweep(build_config(fw), parse_pairs(delta_specs));
        return 1;
    });
}
