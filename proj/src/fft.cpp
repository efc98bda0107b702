#include "cfgraph/fft.hpp"

#include <cmath>
#include <numbers>

namespace cfgraph {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::vector<std::size_t> bitrev_table(std::size_t n) {
  std::vector<std::size_t> rev(n, 0);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 1; i < n; ++i)
    rev[i] = (rev[i >> 1] >> 1) | ((i & 1) << (log2n - 1));
  return rev;
}

// Forward twiddles e^{-j*pi*k/half} laid out per stage: for a size-n FFT the
// table holds n/2 entries for the unit root of order n; stage s strides it.
std::vector<cplx> twiddle_table(std::size_t n) {
  std::vector<cplx> t(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    t[k] = cplx(std::cos(a), std::sin(a));
  }
  return t;
}

}  // namespace

namespace detail {

void fft_pow2(cplx* data, std::size_t n, const std::size_t* rev, const cplx* twiddle, bool inv) {
  for (std::size_t i = 0; i < n; ++i)
    if (rev[i] > i) std::swap(data[i], data[rev[i]]);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t half = len >> 1;
    std::size_t step = n / len;  // twiddle stride
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx w = twiddle[k * step];
        if (inv) w = std::conj(w);
        cplx u = data[base + k];
        cplx v = data[base + k + half] * w;
        data[base + k] = u + v;
        data[base + k + half] = u - v;
      }
    }
  }
}

}  // namespace detail

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
  if (n_ == 0) throw std::invalid_argument("FftPlan: length must be positive");
  if (pow2_) {
    rev_ = bitrev_table(n_);
    twiddle_ = twiddle_table(n_);
    return;
  }
  m_ = next_pow2(2 * n_ - 1);
  rev_ = bitrev_table(m_);
  twiddle_ = twiddle_table(m_);
  // chirp_[k] = e^{-j*pi*k^2/n}; exponent reduced mod 2n to keep k^2 exact.
  chirp_.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t e = (k * k) % (2 * n_);
    double a = -std::numbers::pi * static_cast<double>(e) / static_cast<double>(n_);
    chirp_[k] = cplx(std::cos(a), std::sin(a));
  }
  std::vector<cplx> b(m_, cplx(0.0, 0.0));
  b[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n_; ++k) b[k] = b[m_ - k] = std::conj(chirp_[k]);
  detail::fft_pow2(b.data(), m_, rev_.data(), twiddle_.data(), false);
  chirp_kernel_ = std::move(b);
}

std::size_t FftPlan::scratch_size() const { return pow2_ ? 0 : m_; }

void FftPlan::forward(cplx* line) const {
  std::vector<cplx> scratch(scratch_size());
  transform(line, scratch.data(), false);
}

void FftPlan::inverse(cplx* line) const {
  std::vector<cplx> scratch(scratch_size());
  transform(line, scratch.data(), true);
}

void FftPlan::forward(cplx* line, cplx* scratch) const { transform(line, scratch, false); }
void FftPlan::inverse(cplx* line, cplx* scratch) const { transform(line, scratch, true); }

void FftPlan::transform(cplx* line, cplx* scratch, bool inv) const {
  if (n_ == 1) return;  // inverse scale 1/1
  if (pow2_) {
    detail::fft_pow2(line, n_, rev_.data(), twiddle_.data(), inv);
  } else {
    bluestein(line, scratch, inv);
  }
  if (inv) {
    double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) line[i] *= s;
  }
}

void FftPlan::bluestein(cplx* line, cplx* scratch, bool inv) const {
  // X_k = chirp_k * sum_x (line_x chirp_x) conj(chirp)_{k-x}; the sum is a
  // length-m_ cyclic convolution against the precomputed kernel. The inverse
  // direction conjugates in and out (the 1/n scale is applied by transform()).
  for (std::size_t x = 0; x < n_; ++x) {
    cplx v = inv ? std::conj(line[x]) : line[x];
    scratch[x] = v * chirp_[x];
  }
  for (std::size_t x = n_; x < m_; ++x) scratch[x] = cplx(0.0, 0.0);
  detail::fft_pow2(scratch, m_, rev_.data(), twiddle_.data(), false);
  for (std::size_t i = 0; i < m_; ++i) scratch[i] *= chirp_kernel_[i];
  detail::fft_pow2(scratch, m_, rev_.data(), twiddle_.data(), true);
  double s = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k < n_; ++k) {
    cplx v = scratch[k] * s * chirp_[k];
    line[k] = inv ? std::conj(v) : v;
  }
}

}  // namespace cfgraph
