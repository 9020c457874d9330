#include "filters.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ccid::detail {

Biquad::Biquad(double b0, double b1, double b2, double a0, double a1, double a2)
    : b0_(b0 / a0), b1_(b1 / a0), b2_(b2 / a0), a1_(a1 / a0), a2_(a2 / a0) {}

Biquad Biquad::lowpass(double corner_hz, double sample_rate, double q) {
    const double w0 = 2.0 * std::numbers::pi * corner_hz / sample_rate;
    const double cw = std::cos(w0);
    const double alpha = std::sin(w0) / (2.0 * q);
    return Biquad((1.0 - cw) / 2.0, 1.0 - cw, (1.0 - cw) / 2.0, 1.0 + alpha, -2.0 * cw, 1.0 - alpha);
}

double Biquad::step(double x) {
    const double y = b0_ * x + z1_;
    z1_ = b1_ * x - a1_ * y + z2_;
    z2_ = b2_ * x - a2_ * y;
    return y;
}

ButterworthLowpass::ButterworthLowpass(std::size_t order, double corner_hz, double sample_rate) {
    if (order == 0 || order % 2 != 0) {
        throw std::invalid_argument("Butterworth order must be even and positive");
    }
    if (!(corner_hz > 0.0) || !(corner_hz < sample_rate / 2.0)) {
        throw std::invalid_argument("low-pass corner must lie in (0, sample_rate/2)");
    }
    const auto n = static_cast<double>(order);
    for (std::size_t k = 1; k <= order / 2; ++k) {
        const double q = 1.0 / (2.0 * std::cos(std::numbers::pi * (2.0 * static_cast<double>(k) - 1.0) / (2.0 * n)));
        sections_.push_back(Biquad::lowpass(corner_hz, sample_rate, q));
    }
}

double ButterworthLowpass::step(double x) {
    for (auto& s : sections_) {
        x = s.step(x);
    }
    return x;
}

void ButterworthLowpass::apply(std::span<double> signal) {
    for (double& v : signal) {
        v = step(v);
    }
}

} // namespace ccid::detail
