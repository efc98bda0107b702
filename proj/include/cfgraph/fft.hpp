#ifndef CFGRAPH_FFT_HPP
#define CFGRAPH_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace cfgraph {

using cplx = std::complex<double>;

/// One-dimensional discrete Fourier transform of a fixed length.
///
/// Forward kernel is e^{-j2*pi*k*x/N} with no scaling; inverse applies 1/N.
/// Power-of-two lengths run an iterative radix-2 transform; other lengths go
/// through Bluestein's chirp-z reduction to a power-of-two convolution.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t length() const { return n_; }

  /// In-place transform of one line of `length()` values.
  void forward(cplx* line) const;
  void inverse(cplx* line) const;

  /// Scratch size (in cplx values) needed per concurrent call.
  std::size_t scratch_size() const;

  /// Same as forward/inverse but with caller-provided scratch, so parallel
  /// line loops can reuse per-thread buffers.
  void forward(cplx* line, cplx* scratch) const;
  void inverse(cplx* line, cplx* scratch) const;

 private:
  void transform(cplx* line, cplx* scratch, bool inv) const;
  void bluestein(cplx* line, cplx* scratch, bool inv) const;

  std::size_t n_;
  bool pow2_;
  // radix-2 tables (for n_ when pow2_, else for m_)
  std::size_t m_ = 0;  // bluestein convolution length, power of two
  std::vector<std::size_t> rev_;
  std::vector<cplx> twiddle_;       // forward twiddles for the pow2 size
  std::vector<cplx> chirp_;         // w^{k^2/2}, forward direction
  std::vector<cplx> chirp_kernel_;  // pow2-FFT of the padded conjugate chirp
};

namespace detail {
/// Radix-2 in-place FFT, n a power of two. `inv` conjugates the twiddles and
/// leaves scaling to the caller.
void fft_pow2(cplx* data, std::size_t n, const std::size_t* rev, const cplx* twiddle, bool inv);
}  // namespace detail

}  // namespace cfgraph

#endif
