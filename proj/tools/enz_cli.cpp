#include <iostream>

#include "CLI11.hpp"
#include "enz/cli/commands.hpp"

namespace {

std::vector<enz::Complex> parse_deltas(const std::string& s) {
  std::vector<enz::Complex> out;
  for (const auto& d : enz::cli::detail::split(s, ';')) out.push_back(enz::cli::detail::complex_value(d));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace enz::cli;
  CLI::App app{"ENZ photonic-doping solver"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";

  auto add = [&](const std::string& name, const std::string& help) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("-c,--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sc->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
    return sc;
  };

  std::optional<int> order;
  std::optional<std::string> delta, deltas, window;

  auto* aux = add("aux", "auxiliary solves, beta, c*, mu_eff");
  auto* expand = add("expand", "corrector hierarchy and truncated expansion");
  expand->add_option("--order", order, "truncation order J");
  expand->add_option("--delta", delta, "delta as re,im");
  auto* direct = add("direct", "direct transmission solve");
  direct->add_option("--delta", delta, "delta as re,im");
  auto* sweep = add("sweep-delta", "expansion error against direct solves");
  sweep->add_option("--deltas", deltas, "';'-separated list of re,im");
  sweep->add_option("--order", order, "largest order J");
  sweep->add_option("--window", window, "disk:cx,cy,r or all");
  auto* oracle = add("oracle-check", "compare with the axisymmetric Bessel solution");
  auto* radius = add("radius", "spectral radius estimate of the iteration map");
  auto* res = add("resonance-sweep", "approach to a dopant resonance");
  auto* poy = add("poynting", "Poynting vector and its ENZ limit");
  poy->add_option("--delta", delta, "delta as re,im");
  auto* conv = add("convergence-table", "auxiliary quantities over a list of mesh sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    RunConfig cfg = parse_config_file(config_path);
    CLI::App* sc = app.get_subcommands().front();
    Run run(sc->get_name(), cfg, out_dir);
    auto value = [](const std::optional<std::string>& s, auto parse, auto fallback) {
      if (!s) return fallback;
      try {
        return parse(*s);
      } catch (const std::invalid_argument& e) {
        enz::fail(enz::ErrorCode::ParseError, e.what());
      }
    };
    enz::Complex d = value(delta, detail::complex_value, cfg.physics.delta);
    int rc = 0;
    if (sc == aux) rc = cmd_aux(cfg, run);
    else if (sc == expand) rc = cmd_expand(cfg, {order.value_or(cfg.run.order), d}, run);
    else if (sc == direct) rc = cmd_direct(cfg, d, run);
    else if (sc == sweep) {
      SweepOptions so;
      so.deltas = value(deltas, parse_deltas, cfg.run.deltas);
      so.order = order.value_or(cfg.run.order);
      so.window = value(window, detail::window_value, cfg.run.window);
      rc = cmd_sweep_delta(cfg, so, run);
    } else if (sc == oracle) rc = cmd_oracle_check(cfg, run);
    else if (sc == radius) rc = cmd_radius(cfg, run);
    else if (sc == res) rc = cmd_resonance_sweep(cfg, run);
    else if (sc == poy) rc = cmd_poynting(cfg, d, run);
    else if (sc == conv) rc = cmd_convergence_table(cfg, run);
    run.finish();
    return rc;
  } catch (const enz::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return enz::exit_code(e.code());
  }
}
