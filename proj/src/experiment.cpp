#include "hihtp/experiment.hpp"

#include "hihtp/channel.hpp"
#include "hihtp/protocol.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hihtp {

std::vector<Index> IntRange::values() const {
  if (step < 1) throw std::invalid_argument("range: step must be positive");
  std::vector<Index> out;
  for (Index v = start; v <= stop; v += step) out.push_back(v);
  return out;
}

IntRange IntRange::parse(const std::string& text) {
  std::vector<Index> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    Index v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty())
      throw std::invalid_argument("bad range '" + text + "' (expected a, a:b or a:b:step)");
    parts.push_back(v);
  }
  if (parts.empty() || parts.size() > 3) throw std::invalid_argument("bad range '" + text + "'");
  IntRange r{parts[0], parts.size() > 1 ? parts[1] : parts[0], parts.size() > 2 ? parts[2] : 1};
  if (r.values().empty()) throw std::invalid_argument("range '" + text + "' is empty");
  return r;
}

IntRange IntRange::from_json(const nlohmann::json& j) {
  IntRange r;
  if (j.is_number_integer()) {
    r.start = r.stop = j.get<Index>();
  } else if (j.is_array()) {
    if (j.empty() || j.size() > 3) throw std::invalid_argument("range array must hold 1 to 3 integers");
    r.start = j.at(0).get<Index>();
    r.stop = j.size() > 1 ? j.at(1).get<Index>() : r.start;
    r.step = j.size() > 2 ? j.at(2).get<Index>() : 1;
  } else if (j.is_object()) {
    r.start = j.at("start").get<Index>();
    r.stop = j.value("stop", r.start);
    r.step = j.value("step", Index{1});
  } else {
    throw std::invalid_argument("range must be an integer, an array or an object");
  }
  if (r.values().empty()) throw std::invalid_argument("range is empty");
  return r;
}

void SweepGrid::validate() const {
  if (mu.values().empty() || sigma.values().empty() || s.values().empty())
    throw std::invalid_argument("sweep: ranges must be non-empty");
  if (trials < 1) throw std::invalid_argument("sweep: trials must be at least 1");
  if (dims.measurements < 1 || dims.taps < 1 || dims.entries < 1 || dims.users < 1 || dims.taps > dims.measurements)
    throw std::invalid_argument("sweep: invalid dimensions");
  quantizer.validate();
  solver.validate();
}

SweepGrid SweepGrid::desk() { return {}; }

SweepGrid SweepGrid::paper() {
  SweepGrid g;
  g.dims = {1024, 128, 128, 10};
  g.mu = {2, 5, 1};
  g.sigma = {2, 15, 1};
  g.s = {2, 15, 1};
  return g;
}

SweepGrid SweepGrid::from_json(const nlohmann::json& j, SweepGrid g) {
  g.dims = dims_from_json(j, g.dims);
  if (j.contains("mu_range")) g.mu = IntRange::from_json(j.at("mu_range"));
  if (j.contains("sigma_range")) g.sigma = IntRange::from_json(j.at("sigma_range"));
  if (j.contains("s_range")) g.s = IntRange::from_json(j.at("s_range"));
  g.trials = j.value("trials", g.trials);
  g.seed = j.value("seed", g.seed);
  if (j.contains("field")) g.field = parse_field(j.at("field").get<std::string>());
  g.quantizer = quantizer_from_json(j, g.field);
  if (j.contains("snr_db")) {
    if (j.at("snr_db").is_null())
      g.snr_db.reset();
    else
      g.snr_db = j.at("snr_db").get<double>();
  }
  g.solver = solver_from_json(j, g.solver);
  g.timing = j.value("timing", g.timing);
  g.validate();
  return g;
}

std::uint64_t trial_seed(std::uint64_t master, Index mu, Index sigma, Index s, int trial) {
  return split_seed(master, {stream::trial, static_cast<std::uint64_t>(mu), static_cast<std::uint64_t>(sigma),
                             static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(trial)});
}

namespace {

template <Field S>
TrialOutcome run_trial_as(const SweepGrid& grid, Index mu, Index sigma, Index s, int trial) {
  const auto seed = trial_seed(grid.seed, mu, sigma, s, trial);
  const auto inst = draw_planted_instance<S>(grid.dims, mu, sigma, s, seed, grid.snr_db);
  const auto start = std::chrono::steady_clock::now();
  const auto result = hihtp(inst.op, inst.y, inst.profile, grid.solver);
  const auto stop = std::chrono::steady_clock::now();
  const auto rep = evaluate_success(result, inst.lifted(), inst.truth_factors(), grid.solver.residual_tol);
  TrialOutcome t;
  t.success = rep.success;
  t.iterations = result.iterations;
  t.residual = result.residual_norm;
  if (grid.timing) t.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return t;
}

bool feasible(const SweepGrid& g, Index mu, Index sigma, Index s) {
  return mu >= 1 && mu <= g.dims.users && sigma >= 1 && sigma <= g.dims.taps && s >= 1 && s <= g.dims.entries;
}

}  // namespace

TrialOutcome run_trial(const SweepGrid& grid, Index mu, Index sigma, Index s, int trial) {
  return grid.field == FieldKind::real ? run_trial_as<double>(grid, mu, sigma, s, trial)
                                       : run_trial_as<Complex>(grid, mu, sigma, s, trial);
}

SweepOutput sweep(const SweepGrid& grid) {
  grid.validate();
  SweepOutput out;
  struct Cell {
    Index mu, sigma, s;
  };
  std::vector<Cell> cells;
  for (const Index mu : grid.mu.values())
    for (const Index sigma : grid.sigma.values())
      for (const Index s : grid.s.values()) {
        if (feasible(grid, mu, sigma, s))
          cells.push_back({mu, sigma, s});
        else
          out.warnings.push_back("skipping infeasible cell mu=" + std::to_string(mu) + " sigma=" +
                                 std::to_string(sigma) + " s=" + std::to_string(s));
      }

  const auto jobs = static_cast<std::int64_t>(cells.size()) * grid.trials;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(jobs));
  std::vector<std::string> errors(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t job = 0; job < jobs; ++job) {
    const auto& c = cells[static_cast<std::size_t>(job / grid.trials)];
    try {
      outcomes[static_cast<std::size_t>(job)] = run_trial(grid, c.mu, c.sigma, c.s, static_cast<int>(job % grid.trials));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(job)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error("sweep trial failed: " + e);

  const int components = grid.field == FieldKind::real ? 1 : 2;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    SweepRecord r;
    r.mu = cells[k].mu;
    r.sigma = cells[k].sigma;
    r.s = cells[k].s;
    r.trials = grid.trials;
    double iters = 0.0, residual = 0.0, runtime = 0.0;
    for (int t = 0; t < grid.trials; ++t) {
      const auto& o = outcomes[k * static_cast<std::size_t>(grid.trials) + static_cast<std::size_t>(t)];
      r.successes += o.success;
      iters += o.iterations;
      residual += o.residual;
      runtime += o.runtime_ms;
    }
    r.success_rate = static_cast<double>(r.successes) / r.trials;
    r.mean_iterations = iters / r.trials;
    r.mean_residual = residual / r.trials;
    r.mean_runtime_ms = runtime / r.trials;
    r.key_bits = grid.quantizer.key_length(r.sigma, components);
    out.records.push_back(r);
  }
  return out;
}

namespace {

template <typename T>
void put_number(std::ostream& os, T v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, ptr - buf);
}

template <typename T>
T get_number(const std::string& field, std::size_t row, const char* column) {
  T v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw std::runtime_error("csv row " + std::to_string(row) + ": bad value '" + field + "' in column " + column);
  return v;
}

}  // namespace

void emit_csv(const std::vector<SweepRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    put_number(os, r.mu);
    os << ',';
    put_number(os, r.sigma);
    os << ',';
    put_number(os, r.s);
    os << ',';
    put_number(os, r.trials);
    os << ',';
    put_number(os, r.successes);
    os << ',';
    put_number(os, r.success_rate);
    os << ',';
    put_number(os, r.mean_iterations);
    os << ',';
    put_number(os, r.mean_residual);
    os << ',';
    put_number(os, r.mean_runtime_ms);
    os << ',';
    put_number(os, r.key_bits);
    os << '\n';
  }
  if (!os) throw std::runtime_error("csv write failed");
}

void emit_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  emit_csv(records, os);
  os.flush();
  if (!os) throw std::runtime_error("csv write to " + path + " failed");
}

std::vector<SweepRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw std::runtime_error("csv: unexpected header");
  std::vector<SweepRecord> out;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 10) throw std::runtime_error("csv row " + std::to_string(row) + ": expected 10 fields");
    SweepRecord r;
    r.mu = get_number<Index>(f[0], row, "mu");
    r.sigma = get_number<Index>(f[1], row, "sigma");
    r.s = get_number<Index>(f[2], row, "s");
    r.trials = get_number<int>(f[3], row, "trials");
    r.successes = get_number<int>(f[4], row, "successes");
    r.success_rate = get_number<double>(f[5], row, "success_rate");
    r.mean_iterations = get_number<double>(f[6], row, "mean_iterations");
    r.mean_residual = get_number<double>(f[7], row, "mean_residual");
    r.mean_runtime_ms = get_number<double>(f[8], row, "mean_runtime_ms");
    r.key_bits = get_number<Index>(f[9], row, "key_bits");
    out.push_back(r);
  }
  return out;
}

}  // namespace hihtp
