#pragma once

#include <memory>

#include "nlslab/common.hpp"

namespace nlslab {

// Thin FFTW wrapper. Plans are created with FFTW_ESTIMATE and the library is
// used single-threaded: planning is then deterministic, which the
// byte-identical-artifacts guarantee relies on.
//
// Convention matches the usual DFT: forward(u)[m] = sum_j u[j] e^{-2pi i jm/N}
// (unnormalized); inverse includes the 1/N factor, so inverse(forward(u)) = u.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }

  void forward(const CVec& in, CVec& out) const;
  void inverse(const CVec& in, CVec& out) const;
  CVec forward(const CVec& in) const {
    CVec out(n_);
    forward(in, out);
    return out;
  }
  CVec inverse(const CVec& in) const {
    CVec out(n_);
    inverse(in, out);
    return out;
  }

 private:
  int n_;
  void* plan_fwd_;
  void* plan_inv_;
  mutable CVec buf_in_, buf_out_;
};

}  // namespace nlslab
