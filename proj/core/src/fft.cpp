#include "nlslab/fft.hpp"

#include <fftw3.h>

namespace nlslab {

Fft::Fft(int n) : n_(n), buf_in_(n), buf_out_(n) {
  auto* in = reinterpret_cast<fftw_complex*>(buf_in_.data());
  auto* out = reinterpret_cast<fftw_complex*>(buf_out_.data());
  plan_fwd_ = fftw_plan_dft_1d(n_, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_1d(n_, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Fft::forward(const CVec& in, CVec& out) const {
  buf_in_ = in;
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  out = buf_out_;
}

void Fft::inverse(const CVec& in, CVec& out) const {
  buf_in_ = in;
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  out = buf_out_ / static_cast<double>(n_);
}

}  // namespace nlslab
