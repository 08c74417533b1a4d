#include "hihtp/channel.hpp"
#include "hihtp/experiment.hpp"
#include "hihtp/protocol.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace hihtp;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c, bool config_required = false) {
  auto* opt = app->add_option("--config", c.config, "JSON configuration file");
  if (config_required) opt->required();
  app->add_option("--out", c.out, "output file (default: stdout)");
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
}

nlohmann::json load_config(const Common& c) {
  return c.config.empty() ? nlohmann::json::object() : load_json_file(c.config);
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << text;
  os.flush();
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

void write_sweep(const SweepOutput& out, const std::string& path) {
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  std::ostringstream os;
  emit_csv(out.records, os);
  write_text(os.str(), path);
}

template <Field S>
SuccessReport solve_once(const ProtocolConfig& c) {
  const auto inst = draw_planted_instance<S>(c.dims, c.mu, c.sigma, c.s, c.seed, c.snr_db);
  const auto result = hihtp::hihtp(inst.op, inst.y, inst.profile, c.solver);
  return evaluate_instance(result, inst, c.solver.residual_tol);
}

// "mu=2,sigma=2,s=2"
void apply_cell(const std::string& text, SweepGrid& g) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad --cell entry '" + item + "' (expected key=value)");
    const auto key = item.substr(0, eq);
    const auto range = IntRange::parse(item.substr(eq + 1));
    if (key == "mu")
      g.mu = range;
    else if (key == "sigma")
      g.sigma = range;
    else if (key == "s")
      g.s = range;
    else
      throw std::invalid_argument("unknown --cell key '" + key + "' (use mu, sigma, s)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical hard thresholding pursuit for blind multi-user recovery"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Common solve_c, sweep_c, protocol_c, paper_c;

  auto* solve = app.add_subcommand("solve", "recover one planted instance and print the success report");
  add_common(solve, solve_c);

  auto* sweep_cmd = app.add_subcommand("sweep", "run a (mu, sigma, s) grid and write CSV");
  add_common(sweep_cmd, sweep_c, true);
  std::optional<int> sweep_trials;
  bool sweep_timing = false;
  sweep_cmd->add_option("--trials", sweep_trials, "trials per cell");
  sweep_cmd->add_flag("--timing", sweep_timing, "record wall-clock solver time (output no longer reproducible)");

  auto* protocol = app.add_subcommand("protocol", "run the two-phase secure access protocol and print JSON");
  add_common(protocol, protocol_c);

  auto* paper = app.add_subcommand("paper", "full-scale preset: N=1024, N_d=E=128, N_r=10");
  add_common(paper, paper_c);
  std::string cell, mu_range, sigma_range, s_range;
  int paper_trials = 20;
  bool paper_timing = false;
  paper->add_option("--cell", cell, "single cell, e.g. mu=2,sigma=2,s=2");
  paper->add_option("--mu-range", mu_range, "a, a:b or a:b:step");
  paper->add_option("--sigma-range", sigma_range, "a, a:b or a:b:step");
  paper->add_option("--s-range", s_range, "a, a:b or a:b:step");
  paper->add_option("--trials", paper_trials, "trials per cell")->check(CLI::PositiveNumber);
  paper->add_flag("--timing", paper_timing, "record wall-clock solver time");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      auto j = load_config(solve_c);
      if (solve_c.seed) j["seed"] = *solve_c.seed;
      const auto c = protocol_config_from_json(j);
      const auto rep = c.field == FieldKind::real ? solve_once<double>(c) : solve_once<Complex>(c);
      write_text(to_json(rep).dump(2) + "\n", solve_c.out);
    } else if (sweep_cmd->parsed()) {
      auto grid = SweepGrid::from_json(load_config(sweep_c));
      if (sweep_c.seed) grid.seed = *sweep_c.seed;
      if (sweep_trials) grid.trials = *sweep_trials;
      if (sweep_timing) grid.timing = true;
      write_sweep(sweep(grid), sweep_c.out);
    } else if (protocol->parsed()) {
      auto j = load_config(protocol_c);
      if (protocol_c.seed) j["seed"] = *protocol_c.seed;
      const auto outcome = run_protocol(protocol_config_from_json(j));
      write_text(to_json(outcome).dump(2) + "\n", protocol_c.out);
    } else if (paper->parsed()) {
      auto grid = SweepGrid::from_json(load_config(paper_c), SweepGrid::paper());
      if (paper_c.seed) grid.seed = *paper_c.seed;
      grid.trials = paper_trials;
      grid.timing = paper_timing;
      if (!cell.empty()) apply_cell(cell, grid);
      if (!mu_range.empty()) grid.mu = IntRange::parse(mu_range);
      if (!sigma_range.empty()) grid.sigma = IntRange::parse(sigma_range);
      if (!s_range.empty()) grid.s = IntRange::parse(s_range);
      const auto cells = grid.mu.values().size() * grid.sigma.values().size() * grid.s.values().size();
      // the solver only ever forms the restricted columns; refuse configurations
      // whose support alone would not fit
      const auto op_dims = grid.dims;
      const auto layout = op_dims.layout();
      const double support_bytes = static_cast<double>(op_dims.measurements) * grid.mu.stop * grid.sigma.stop *
                                   grid.s.stop * (grid.field == FieldKind::real ? 8.0 : 16.0);
      if (support_bytes > static_cast<double>(kDefaultDenseBudget))
        throw std::invalid_argument("paper: restricted system exceeds the memory budget");
      std::cerr << "paper: N=" << op_dims.measurements << " N_d=" << op_dims.taps << " E=" << op_dims.entries
                << " N_r=" << op_dims.users << ", " << cells << " cell(s) x " << grid.trials
                << " trials, matrix-free operator (dense would need "
                << static_cast<double>(op_dims.measurements) * static_cast<double>(layout.size()) *
                       (grid.field == FieldKind::real ? 8.0 : 16.0) / (1 << 30)
                << " GiB)\n";
      if (cells > 16) std::cerr << "warning: " << cells << " cells at full scale can take hours\n";
      write_sweep(sweep(grid), paper_c.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
