#include "fairdyn/kernels.hpp"

#include <omp.h>

namespace fairdyn::kernels {

int parallel_width() { return omp_get_max_threads(); }

}  // namespace fairdyn::kernels
