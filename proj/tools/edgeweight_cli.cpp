// Command-line front end: weight, verify, series, continuum, szego-check.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "edgeweight/commands.hpp"

namespace {

using edgeweight::cli::RunConfig;

struct ModelFlags {
    std::optional<std::string> config, kind, family;
    std::optional<double> C, beta, alpha, depth, offset, C0, x0;
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
    app->add_option("--config", m.config, "key=value model file (flags override its entries)");
    app->add_option("--model", m.kind, "power-law-b | log-law-a | free | custom");
    app->add_option("--C", m.C, "amplitude of b_n = -C n^-beta");
    app->add_option("--beta", m.beta, "decay exponent");
    app->add_option("--family", m.family, "f family for log-law-a: power | iterated-log");
    app->add_option("--alpha", m.alpha, "exponent of f(x) = (1+x)^-alpha");
    app->add_option("--depth", m.depth, "iterated-log depth (1..3)");
    app->add_option("--offset", m.offset, "extra offset for the iterated-log family");
}

void add_potential_flags(CLI::App* app, ModelFlags& m) {
    app->add_option("--config", m.config, "key=value potential file (flags override its entries)");
    app->add_option("--C0", m.C0, "amplitude of V = C0 (x + x0)^-beta");
    app->add_option("--beta", m.beta, "decay exponent");
    app->add_option("--x0", m.x0, "shift x0 (default 1)");
}

edgeweight::KeyValues to_key_values(const ModelFlags& m) {
    edgeweight::KeyValues kv;
    if (m.config) kv = edgeweight::parse_key_values_file(*m.config);
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) kv[key] = edgeweight::cli::format_number(*v);
    };
    if (m.kind) kv["kind"] = *m.kind;
    if (m.family) kv["family"] = *m.family;
    put("C", m.C);
    put("beta", m.beta);
    put("alpha", m.alpha);
    put("depth", m.depth);
    put("offset", m.offset);
    put("C0", m.C0);
    put("x0", m.x0);
    return kv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge asymptotics of spectral weights for monotone Jacobi and Schrodinger operators"};
    app.require_subcommand(1);
    RunConfig cfg;
    ModelFlags mf;

    auto* weight = app.add_subcommand("weight", "edge sweep: N, g, h, Carmona estimate per grid point");
    add_model_flags(weight, mf);
    weight->add_option("--x", cfg.xs, "explicit x values");
    weight->add_option("--delta", cfg.deltas, "explicit delta = 2 - x values");
    weight->add_option("--x-min", cfg.x_min, "grid start");
    weight->add_option("--x-max", cfg.x_max, "grid end");
    weight->add_option("--points", cfg.points, "number of grid points");
    weight->add_flag("!--linear", cfg.log_delta, "space the range linearly in x instead of geometrically in delta");
    weight->add_option("--n", cfg.n, "Carmona index (default max(10 N, 1000))");
    weight->add_option("--width", cfg.width, "bump half-width (default automatic)");

    auto* verify = app.add_subcommand("verify", "property suites for every module");
    verify->add_option("--seed", cfg.seed, "random seed");
    verify->add_flag("--quick", cfg.quick, "reduced instance counts");
    verify->add_flag("--perturb-monotonicity", cfg.perturb_monotonicity, "negative control: break b_n monotonicity");

    auto* series = app.add_subcommand("series", "exact coefficients and edge-series terms");
    series->add_option("--L", cfg.L, "highest coefficient index");
    series->add_option("--C", mf.C, "amplitude C");
    series->add_option("--beta", mf.beta, "decay exponent beta");
    series->add_option("--delta", cfg.deltas, "delta values for the series table");
    series->add_flag("--residual", cfg.residual, "compare against direct sums on the delta grid");

    auto* cont = app.add_subcommand("continuum", "continuum edge rows over energies");
    add_potential_flags(cont, mf);
    cont->add_option("--E", cfg.energies, "energies");

    auto* szego = app.add_subcommand("szego-check", "Szego and quasi-Szego divergence diagnostics");
    szego->add_option("--C", mf.C, "amplitude C");
    szego->add_option("--beta", mf.beta, "decay exponent beta");
    szego->add_option("--delta", cfg.deltas, "geometric delta grid (decreasing)");

    for (auto* sub : {weight, verify, series, cont, szego}) {
        sub->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output,-o", cfg.output, "output file (default stdout)");
        sub->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : edgeweight::cli::kExitConfigError;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command != "weight" && cfg.command != "continuum" && cfg.format == "csv") cfg.format = "json";
    try {
        cfg.model = to_key_values(mf);
    } catch (const edgeweight::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return edgeweight::cli::kExitConfigError;
    }
    return edgeweight::cli::run(cfg, std::cout, std::cerr);
}
