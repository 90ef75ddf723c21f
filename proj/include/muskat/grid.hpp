#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "muskat/fft.hpp"

namespace muskat {

inline constexpr double pi = 3.14159265358979323846;

// Uniform periodic grid on [0, L). Wavenumber index p maps to the integer
// mode j in {-n/2+1, ..., n/2} and physical wavenumber 2*pi*j/L.
class PeriodicGrid {
public:
    PeriodicGrid() = default;

    PeriodicGrid(std::size_t n_points, double length)
        : n_(n_points), length_(length) {
        if (n_points % 2 != 0) throw std::invalid_argument("n_points must be even");
        if (n_points < 16) throw std::invalid_argument("n_points must be >= 16");
        if (!(length > 0.0) || !std::isfinite(length))
            throw std::invalid_argument("length must be positive");
        fft_ = std::make_shared<Fft>(n_);
        const std::size_t padded = detail::next_pow2((3 * n_) / 2 + ((3 * n_) % 2 ? 1 : 0));
        fft_padded_ = std::make_shared<Fft>(padded);
    }

    std::size_t n_points() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_); }
    double node(std::size_t j) const { return spacing() * static_cast<double>(j); }

    // Integer mode for storage index p.
    long mode(std::size_t p) const {
        return (p <= n_ / 2) ? static_cast<long>(p)
                             : static_cast<long>(p) - static_cast<long>(n_);
    }
    double wavenumber(std::size_t p) const {
        return 2.0 * pi * static_cast<double>(mode(p)) / length_;
    }
    double max_wavenumber() const { return 2.0 * pi * static_cast<double>(n_ / 2) / length_; }

    const Fft& fft() const { return *fft_; }
    const Fft& fft_padded() const { return *fft_padded_; }
    std::size_t padded_size() const { return fft_padded_->size(); }

    bool operator==(const PeriodicGrid& o) const {
        return n_ == o.n_ && length_ == o.length_;
    }
    bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }

private:
    std::size_t n_ = 0;
    double length_ = 0.0;
    std::shared_ptr<Fft> fft_;
    std::shared_ptr<Fft> fft_padded_;
};

inline PeriodicGrid make_grid(std::size_t n_points, double length) {
    return PeriodicGrid(n_points, length);
}

// Real scalar field sample with a lazily filled spectral cache. Immutable
// after construction; the cache fill is guarded so concurrent reads are safe.
class ScalarField {
    struct Cache {
        std::once_flag flag;
        std::vector<cplx> coeffs; // trig-interpolation coefficients, f = sum c_p e^{i k_p x}
    };

public:
    ScalarField() = default;

    static ScalarField from_values(const PeriodicGrid& grid, std::vector<double> values) {
        if (values.size() != grid.n_points())
            throw std::invalid_argument("field values length must equal n_points");
        for (std::size_t j = 0; j < values.size(); ++j)
            if (!std::isfinite(values[j]))
                throw std::invalid_argument("non-finite field value at node " + std::to_string(j));
        ScalarField f;
        f.grid_ = grid;
        f.values_ = std::move(values);
        f.cache_ = std::make_shared<Cache>();
        return f;
    }

    // Construct from spectral coefficients (length n, conjugate-symmetric).
    // Values are synthesized immediately; the given spectrum is kept as cache.
    static ScalarField from_spectrum(const PeriodicGrid& grid, std::vector<cplx> coeffs) {
        if (coeffs.size() != grid.n_points())
            throw std::invalid_argument("spectrum length must equal n_points");
        // coefficients are already 1/n-normalized, so synthesis is the plain
        // unscaled inverse transform
        std::vector<cplx> tmp = coeffs;
        grid.fft().inverse_unscaled(tmp.data());
        std::vector<double> vals(grid.n_points());
        for (std::size_t j = 0; j < vals.size(); ++j) {
            vals[j] = tmp[j].real();
            if (!std::isfinite(vals[j]))
                throw std::runtime_error("non-finite synthesized value at node " + std::to_string(j));
        }
        ScalarField f;
        f.grid_ = grid;
        f.values_ = std::move(vals);
        f.cache_ = std::make_shared<Cache>();
        std::call_once(f.cache_->flag, [&] { f.cache_->coeffs = std::move(coeffs); });
        return f;
    }

    const PeriodicGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }

    // Trig-interpolation coefficients c_p = (1/n) sum_j f_j e^{-i k_p x_j}.
    const std::vector<cplx>& spectrum() const {
        std::call_once(cache_->flag, [this] {
            const std::size_t n = values_.size();
            std::vector<cplx> a(n);
            for (std::size_t j = 0; j < n; ++j) a[j] = cplx{values_[j], 0.0};
            grid_.fft().forward(a.data());
            const double s = 1.0 / static_cast<double>(n);
            for (auto& v : a) v *= s;
            cache_->coeffs = std::move(a);
        });
        return cache_->coeffs;
    }

    double mean() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s / static_cast<double>(values_.size());
    }

    bool finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
    std::shared_ptr<Cache> cache_;
};

inline ScalarField sample(const PeriodicGrid& grid, const std::function<double(double)>& fn) {
    std::vector<double> vals(grid.n_points());
    for (std::size_t j = 0; j < vals.size(); ++j) {
        const double v = fn(grid.node(j));
        if (!std::isfinite(v))
            throw std::invalid_argument("sample: non-finite value at node " + std::to_string(j) +
                                        " (x = " + std::to_string(grid.node(j)) + ")");
        vals[j] = v;
    }
    return ScalarField::from_values(grid, std::move(vals));
}

inline ScalarField zero_field(const PeriodicGrid& grid) {
    return ScalarField::from_values(grid, std::vector<double>(grid.n_points(), 0.0));
}

} // namespace muskat
