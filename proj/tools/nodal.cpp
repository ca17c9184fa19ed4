// nodal: forward solves, nodal-data inversion and asymptotic checks for the
// Dirac system with a mid-point transmission condition.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nodal/commands.hpp"

namespace {

void add_mode(CLI::App* cmd, nodal::Mode& mode, std::string& text) {
    cmd->add_option("--mode", text, "paper or consistent")
        ->check(CLI::IsMember({"paper", "consistent"}))
        ->default_val("consistent");
    cmd->callback([&mode, &text] { mode = nodal::parse_mode(text); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirac inverse nodal problem toolkit"};
    app.require_subcommand(1);

    nodal::ForwardArgs fwd;
    auto* forward = app.add_subcommand("forward", "eigenvalues and nodal sets for a config");
    forward->add_option("--config", fwd.config, "config JSON")->required();
    forward->add_option("--n-min", fwd.n_min, "smallest index")->default_val(1);
    forward->add_option("--n-max", fwd.n_max, "largest index")->required();
    forward->add_flag("--even", fwd.even, "even indices only");
    forward->add_option("--out", fwd.out, "nodal file (stdout if omitted)");
    forward->add_option("--csv", fwd.csv, "also write n, mu_n, rank, node rows");
    forward->add_option("--grid-n", fwd.grid_n, "RK4 steps per half interval");

    nodal::InvertArgs inv;
    std::string inv_mode;
    auto* invert = app.add_subcommand("invert", "reconstruct theta, V and m from a nodal file");
    invert->add_option("--nodes", inv.nodes, "nodal file")->required();
    add_mode(invert, inv.mode, inv_mode);
    invert->add_option("--grid-size", inv.grid_size, "reporting points per half")->default_val(64);
    invert->add_option("--out", inv.out, "report JSON (stdout if omitted)");
    invert->add_option("--csv", inv.csv, "also write the grid table");

    nodal::VerifyArgs ver;
    std::string ver_mode;
    auto* verify = app.add_subcommand("verify", "forward, invert and compare with the config");
    verify->add_option("--config", ver.config, "config JSON")->required();
    verify->add_option("--n-min", ver.n_min, "smallest even index")->default_val(2);
    verify->add_option("--n-max", ver.n_max, "largest even index")->default_val(512);
    add_mode(verify, ver.mode, ver_mode);
    verify->add_option("--out", ver.out, "report JSON (stdout if omitted)");
    verify->add_option("--grid-n", ver.grid_n, "RK4 steps per half interval");

    nodal::AsymptArgs asy;
    auto* asympt = app.add_subcommand("asympt", "compare forward results with the asymptotic formulas");
    asympt->add_option("--config", asy.config, "config JSON")->required();
    asympt->add_option("--n", asy.n, "indices, comma separated")->delimiter(',')->required();
    asympt->add_option("--out", asy.out, "report JSON (stdout if omitted)");
    asympt->add_option("--csv", asy.csv, "also write the per-n table");
    asympt->add_option("--grid-n", asy.grid_n, "RK4 steps per half interval");

    nodal::SynthArgs syn;
    std::string syn_mode;
    auto* synth = app.add_subcommand("synth", "nodal file from an asymptotic series");
    synth->add_flag("--example", syn.example, "the reference series (theta = 1, m = 2, V = -cos x)");
    synth->add_option("--config", syn.config, "config JSON, nodes from node_asymptotic");
    add_mode(synth, syn.mode, syn_mode);
    synth->add_option("--n-min", syn.n_min, "smallest even index")->default_val(8);
    synth->add_option("--n-max", syn.n_max, "largest even index")->default_val(512);
    synth->add_option("--out", syn.out, "nodal file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : nodal::exit_code::usage;
    }

    if (*forward) return nodal::cmd_forward(fwd, std::cout, std::cerr);
    if (*invert) return nodal::cmd_invert(inv, std::cout, std::cerr);
    if (*verify) return nodal::cmd_verify(ver, std::cout, std::cerr);
    if (*asympt) return nodal::cmd_asympt(asy, std::cout, std::cerr);
    if (*synth) return nodal::cmd_synth(syn, std::cout, std::cerr);
    return nodal::exit_code::usage;
}
