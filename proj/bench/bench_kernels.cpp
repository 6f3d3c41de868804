// Benchmark: serial vs OpenMP-parallel evaluation for the two heaviest
// kernels. The cutoff builder has an explicit serial reference path
// (CutoffOptions::parallel = false); the segment Monte Carlo pass is
// compared by pinning OpenMP to one thread. Each row prints the best wall
// time of the requested repetitions, the speedup, and whether the two
// paths produced bit-identical results.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "riccibound/convergence.hpp"
#include "riccibound/model.hpp"
#include "riccibound/pde.hpp"
#include "riccibound/scenario.hpp"

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

void set_threads(bool parallel) {
#ifdef _OPENMP
  omp_set_num_threads(parallel ? omp_get_num_procs() : 1);
#else
  (void)parallel;
#endif
}

struct Timing {
  double seconds = 0.0;
  double checksum = 0.0;
};

Timing time_cutoff(const rb::Model& m, bool parallel, int reps) {
  rb::CutoffOptions opt;
  opt.parallel = parallel;
  set_threads(parallel);
  Timing t;
  t.seconds = 1e300;
  for (int i = 0; i < reps; ++i) {
    double a = now_seconds();
    rb::CutoffFunction c = rb::build_cutoff(m, 1.0, opt);
    t.seconds = std::min(t.seconds, now_seconds() - a);
    t.checksum = c.sup_grad + c.sup_lap + c.min_plateau_sum;
  }
  return t;
}

Timing time_segment(const rb::Model& m, bool parallel, int reps) {
  set_threads(parallel);
  Timing t;
  t.seconds = 1e300;
  for (int i = 0; i < reps; ++i) {
    double a = now_seconds();
    rb::SegmentReport rep = rb::segment_inequality_mc(
        m, 1.0, [](double) { return 1.0; }, 1.0, 1.0, 400000, 2026);
    t.seconds = std::min(t.seconds, now_seconds() - a);
    t.checksum = rep.lhs_estimate + rep.ci_halfwidth;
  }
  return t;
}

void report(const char* name, const Timing& serial, const Timing& par) {
  double speedup = serial.seconds / std::max(par.seconds, 1e-12);
  std::printf("%-24s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n",
              name, serial.seconds, par.seconds, speedup,
              serial.checksum == par.checksum ? "results identical"
                                              : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 2;
  if (reps < 1) reps = 1;
#ifdef _OPENMP
  std::printf("OpenMP enabled, %d processor(s), best of %d repetition(s)\n",
              omp_get_num_procs(), reps);
#else
  std::printf("built without OpenMP; both columns run the serial path\n");
#endif
  rb::ModelSpec flat_spec = rb::model_by_name("euclidean");
  flat_spec.dim = 2;  // the covering lattice is quadratic in 1/eps per axis
  rb::Model flat(flat_spec);
  rb::Model hyp(rb::model_by_name("hyperbolic"));

  report("cutoff (flat n=2)", time_cutoff(flat, false, reps),
         time_cutoff(flat, true, reps));
  report("segment mc (flat)", time_segment(flat, false, reps),
         time_segment(flat, true, reps));
  report("segment mc (hyperbolic)", time_segment(hyp, false, reps),
         time_segment(hyp, true, reps));
  return 0;
}
