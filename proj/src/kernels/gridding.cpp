#include <cmath>
#include <cstring>

#include <omp.h>

#include "mrr/kernels.hpp"

namespace mrr::kernels {

void kb_gather(const cplx *grid, int G, const double *prow, const double *pcol, int M,
               const KbTable &tab, cplx *out) {
  const double half = tab.width / 2.0;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < M; ++j) {
    double pr = prow[j], pc = pcol[j];
    int r0 = int(std::ceil(pr - half)), r1 = int(std::floor(pr + half));
    int c0 = int(std::ceil(pc - half)), c1 = int(std::floor(pc + half));
    cplx acc(0.0, 0.0);
    for (int r = r0; r <= r1; ++r) {
      double wr = tab(r - pr);
      if (wr == 0.0) continue;
      int rw = ((r % G) + G) % G;
      for (int c = c0; c <= c1; ++c) {
        double wc = tab(c - pc);
        if (wc == 0.0) continue;
        int cw = ((c % G) + G) % G;
        acc += grid[size_t(rw) * G + cw] * (wr * wc);
      }
    }
    out[j] = acc;
  }
}

void kb_scatter(const cplx *samples, int M, const double *prow, const double *pcol,
                const KbTable &tab, cplx *grid, int G) {
  const double half = tab.width / 2.0;
  const size_t cells = size_t(G) * G;
  std::memset(grid, 0, cells * sizeof(cplx));

  int nthreads = 1;
#ifdef _OPENMP
  nthreads = omp_get_max_threads();
#endif
  if (nthreads <= 1 || M < 256) {
    for (int j = 0; j < M; ++j) {
      double pr = prow[j], pc = pcol[j];
      int r0 = int(std::ceil(pr - half)), r1 = int(std::floor(pr + half));
      int c0 = int(std::ceil(pc - half)), c1 = int(std::floor(pc + half));
      for (int r = r0; r <= r1; ++r) {
        double wr = tab(r - pr);
        if (wr == 0.0) continue;
        int rw = ((r % G) + G) % G;
        for (int c = c0; c <= c1; ++c) {
          double wc = tab(c - pc);
          if (wc == 0.0) continue;
          int cw = ((c % G) + G) % G;
          grid[size_t(rw) * G + cw] += samples[j] * (wr * wc);
        }
      }
    }
    return;
  }

  // Per-thread accumulation grids summed in thread order.
  std::vector<std::vector<cplx>> partial(nthreads);
#pragma omp parallel num_threads(nthreads)
  {
    int tid = omp_get_thread_num();
    partial[tid].assign(cells, cplx(0.0, 0.0));
    cplx *g = partial[tid].data();
#pragma omp for schedule(static)
    for (int j = 0; j < M; ++j) {
      double pr = prow[j], pc = pcol[j];
      int r0 = int(std::ceil(pr - half)), r1 = int(std::floor(pr + half));
      int c0 = int(std::ceil(pc - half)), c1 = int(std::floor(pc + half));
      for (int r = r0; r <= r1; ++r) {
        double wr = tab(r - pr);
        if (wr == 0.0) continue;
        int rw = ((r % G) + G) % G;
        for (int c = c0; c <= c1; ++c) {
          double wc = tab(c - pc);
          if (wc == 0.0) continue;
          int cw = ((c % G) + G) % G;
          g[size_t(rw) * G + cw] += samples[j] * (wr * wc);
        }
      }
    }
  }
  for (int t = 0; t < nthreads; ++t) {
    const cplx *g = partial[t].data();
    if (partial[t].empty()) continue;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)cells; ++i) grid[i] += g[i];
  }
}

} // namespace mrr::kernels
