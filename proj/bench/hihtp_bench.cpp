// Serial reference kernels against the OpenMP ones at full scale.

#include "hihtp/channel.hpp"
#include "hihtp/hier_sparsity.hpp"
#include "hihtp/operator.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

using namespace hihtp;

namespace {

double median_ms(const std::function<void()>& fn, int reps) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
  return t[static_cast<std::size_t>(reps / 2)];
}

template <Field S>
void run(const char* field, int reps) {
  const OperatorDims dims{1024, 128, 128, 10};
  const auto op = MeasurementOperator<S>::random(dims, 1);
  Rng rng(2);
  LiftedVector<S> z(op.layout());
  for (auto& v : z.values) v = rng.standard_normal<S>();
  Signal<S> y(dims.measurements);
  for (auto& v : y) v = rng.standard_normal<S>();
  const SparsityProfile p{2, 2, 2, op.layout()};

  volatile double sink = 0.0;
  const auto row = [&](const char* name, const std::function<void()>& serial, const std::function<void()>& parallel) {
    const double a = median_ms(serial, reps);
    const double b = median_ms(parallel, reps);
    std::printf("%-8s %-15s %10.3f %10.3f %8.2fx\n", field, name, a, b, a / b);
  };
  row("apply", [&] { sink = sink + serial::apply(op, z).norm(); }, [&] { sink = sink + op.apply(z).norm(); });
  row("adjoint", [&] { sink = sink + serial::adjoint(op, y).values.norm(); },
      [&] { sink = sink + op.adjoint(y).values.norm(); });
  row("hier_threshold", [&] { sink = sink + static_cast<double>(serial::hier_threshold(z, p).size()); },
      [&] { sink = sink + static_cast<double>(hier_threshold(z, p).size()); });

  const auto inst = draw_planted_instance<S>(dims, 2, 2, 2, 3);
  const double solve = median_ms([&] { sink = sink + hihtp::hihtp(inst.op, inst.y, inst.profile).residual_norm; }, reps);
  std::printf("%-8s %-15s %10s %10.3f\n", field, "hihtp solve", "-", solve);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  std::printf("threads: %d, N=1024 N_d=128 E=128 N_r=10, median of %d runs (ms)\n", omp_get_max_threads(), reps);
  std::printf("%-8s %-15s %10s %10s %9s\n", "field", "kernel", "serial", "parallel", "speedup");
  run<double>("real", reps);
  run<Complex>("complex", reps);
}
