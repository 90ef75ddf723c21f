#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace muskat {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// Iterative radix-2 Cooley-Tukey, decimation in time. sign = -1 forward, +1 inverse.
// Twiddles precomputed for the forward direction; inverse conjugates on the fly.
struct Radix2Plan {
    std::size_t n = 0;
    std::vector<std::size_t> bitrev;
    std::vector<cplx> twiddle;  // e^{-2pi i j / n}, j < n/2

    explicit Radix2Plan(std::size_t n_) : n(n_) {
        if (!is_pow2(n)) throw std::invalid_argument("Radix2Plan: size must be a power of two");
        bitrev.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            bitrev[i] = r;
        }
        twiddle.resize(n / 2);
        const double theta = -2.0 * 3.14159265358979323846 / static_cast<double>(n);
        for (std::size_t j = 0; j < n / 2; ++j)
            twiddle[j] = std::polar(1.0, theta * static_cast<double>(j));
    }

    void transform(cplx* a, int sign) const {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = bitrev[i];
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t stride = n / len;
            for (std::size_t base = 0; base < n; base += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    cplx w = twiddle[j * stride];
                    if (sign > 0) w = std::conj(w);
                    const cplx u = a[base + j];
                    const cplx v = a[base + j + half] * w;
                    a[base + j] = u + v;
                    a[base + j + half] = u - v;
                }
            }
        }
    }
};

// Bluestein chirp-z fallback for non-power-of-two sizes.
struct BluesteinPlan {
    std::size_t n = 0, m = 0;
    std::vector<cplx> chirp;    // e^{-i pi j^2 / n}
    std::vector<cplx> kernel_f; // FFT of the chirp convolution kernel, length m
    std::shared_ptr<Radix2Plan> inner;

    explicit BluesteinPlan(std::size_t n_) : n(n_) {
        m = next_pow2(2 * n - 1);
        inner = std::make_shared<Radix2Plan>(m);
        chirp.resize(n);
        const double pi = 3.14159265358979323846;
        for (std::size_t j = 0; j < n; ++j) {
            // j^2 mod 2n keeps the phase argument small
            const std::size_t q = (j * j) % (2 * n);
            chirp[j] = std::polar(1.0, -pi * static_cast<double>(q) / static_cast<double>(n));
        }
        std::vector<cplx> b(m, cplx{0.0, 0.0});
        b[0] = std::conj(chirp[0]);
        for (std::size_t j = 1; j < n; ++j) {
            b[j] = std::conj(chirp[j]);
            b[m - j] = std::conj(chirp[j]);
        }
        inner->transform(b.data(), -1);
        kernel_f = std::move(b);
    }

    void transform(cplx* a, int sign) const {
        std::vector<cplx> work(m, cplx{0.0, 0.0});
        for (std::size_t j = 0; j < n; ++j) {
            const cplx c = (sign < 0) ? chirp[j] : std::conj(chirp[j]);
            work[j] = a[j] * c;
        }
        inner->transform(work.data(), -1);
        if (sign < 0) {
            for (std::size_t j = 0; j < m; ++j) work[j] *= kernel_f[j];
        } else {
            for (std::size_t j = 0; j < m; ++j) work[j] *= std::conj(kernel_f[j]);
        }
        inner->transform(work.data(), +1);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t j = 0; j < n; ++j) {
            const cplx c = (sign < 0) ? chirp[j] : std::conj(chirp[j]);
            a[j] = work[j] * c * scale;
        }
    }
};

} // namespace detail

// FFT engine for one fixed size. Forward: X_k = sum_j x_j e^{-2pi i jk/n} (unnormalized).
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("Fft: size must be positive");
        if (detail::is_pow2(n))
            radix2_ = std::make_shared<detail::Radix2Plan>(n);
        else
            bluestein_ = std::make_shared<detail::BluesteinPlan>(n);
    }

    std::size_t size() const { return n_; }

    void forward(cplx* a) const {
        if (radix2_) radix2_->transform(a, -1);
        else bluestein_->transform(a, -1);
    }

    void inverse_unscaled(cplx* a) const {
        if (radix2_) radix2_->transform(a, +1);
        else bluestein_->transform(a, +1);
    }

    std::vector<cplx> forward(const std::vector<cplx>& x) const {
        std::vector<cplx> a = x;
        forward(a.data());
        return a;
    }

    // Inverse with 1/n normalization: inverse(forward(x)) == x.
    std::vector<cplx> inverse(const std::vector<cplx>& x) const {
        std::vector<cplx> a = x;
        inverse_unscaled(a.data());
        const double s = 1.0 / static_cast<double>(n_);
        for (auto& v : a) v *= s;
        return a;
    }

private:
    std::size_t n_;
    std::shared_ptr<detail::Radix2Plan> radix2_;
    std::shared_ptr<detail::BluesteinPlan> bluestein_;
};

} // namespace muskat
