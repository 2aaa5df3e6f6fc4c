#pragma once

#include <complex>

namespace sofred::fft {

// Unnormalized in-place transforms: forward uses e^{-2 pi i jk/n}, inverse e^{+2 pi i jk/n}.
// Plans are cached per size behind a mutex; execution is thread safe.
void forward(std::complex<double>* data, int n);
void inverse(std::complex<double>* data, int n);

} // namespace sofred::fft
