#pragma once

#include <cstddef>

#include "bdrelay/kernels.hpp"

namespace bdrelay::kernels::detail {

SlotSums accumulate_scalar(const DualParams& p, const double* s1, const double* s2,
                           std::size_t n);
void evaluate_scalar(const DualParams& p, const double* s1, const double* s2, std::size_t n,
                     SlotColumns& out);

#if BDRELAY_HAVE_AVX2
SlotSums accumulate_avx2(const DualParams& p, const double* s1, const double* s2,
                         std::size_t n);
void evaluate_avx2(const DualParams& p, const double* s1, const double* s2, std::size_t n,
                   SlotColumns& out);
#endif

}  // namespace bdrelay::kernels::detail
