#ifndef ISG_GRID_HPP
#define ISG_GRID_HPP

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include <isg/error.hpp>

namespace isg {

using ArrayX = Eigen::ArrayXd;
using ArrayXc = Eigen::ArrayXcd;

/**
 * Uniform sampling of the spectro-spatial phase over one period,
 * phi_k = 2 pi k / n_phi. The size is even so that a half-period shift is
 * an exact rotation by n_phi/2 bins.
 */
class PhaseGrid
{
public:
    static constexpr int min_size = 16;

    explicit PhaseGrid(int n_phi = 256) : m_size(n_phi)
    {
        if (n_phi < min_size || n_phi % 2 != 0) {
            throw domain_error("phase grid needs an even size >= 16, got " +
                               std::to_string(n_phi));
        }
    }

    int size() const { return m_size; }

    double step() const { return 2.0 * std::numbers::pi / m_size; }

    double phi(int k) const { return step() * k; }

    ArrayX values() const
    {
        return ArrayX::LinSpaced(m_size, 0.0, step() * (m_size - 1));
    }

    /// Number of bins for a shift expressed as a fraction of the period.
    long bins_for(double fraction) const
    {
        const double bins = fraction * m_size;
        const double rounded = std::round(bins);
        if (std::abs(bins - rounded) > 1e-9 * std::max(1.0, std::abs(bins))) {
            throw grid_resolution_error(
                "shift of " + std::to_string(fraction) +
                " period is not an integer number of bins on a " +
                std::to_string(m_size) + "-point phase grid");
        }
        return static_cast<long>(rounded);
    }

    friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

private:
    int m_size;
};

/// out(k) = in(k - bins), indices taken modulo the size.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1>
circular_shift(const Eigen::ArrayBase<Derived>& in, long bins)
{
    const Eigen::Index n = in.size();
    Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> out(n);
    if (n == 0) {
        return out;
    }
    const long s = ((bins % n) + n) % n;
    out.tail(n - s) = in.head(n - s);
    out.head(s) = in.tail(s);
    return out;
}

} // namespace isg

#endif // ISG_GRID_HPP
