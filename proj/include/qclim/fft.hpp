#pragma once

#include <vector>

#include "qclim/types.hpp"

namespace qclim::fft {

// In-place DFTs of a row-major array with 1 to 3 axes. Unnormalized: forward uses e^{-i},
// inverse e^{+i}, and inverse(forward(x)) = size * x.
void forward(const std::vector<int>& dims, cplx* data);
void inverse(const std::vector<int>& dims, cplx* data);

inline void forward(const std::vector<int>& dims, VectorXc& v) { forward(dims, v.data()); }
inline void inverse(const std::vector<int>& dims, VectorXc& v) { inverse(dims, v.data()); }

// Signed integer frequency of index i on an axis of length n: i for i < n/2, i - n otherwise
// (so the Nyquist index maps to -n/2).
inline int frequency(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

}  // namespace qclim::fft
