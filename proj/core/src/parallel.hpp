#pragma once

#ifdef ELASTIC2D_HAVE_OPENMP
#define ELASTIC2D_PARALLEL_FOR _Pragma("omp parallel for schedule(static)")
#else
#define ELASTIC2D_PARALLEL_FOR
#endif
