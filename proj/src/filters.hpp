#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ccid::detail {

// Direct form II transposed second-order section.
class Biquad {
public:
    Biquad(double b0, double b1, double b2, double a0, double a1, double a2);

    // Bilinear-transform low-pass with prewarped corner (RBJ cookbook).
    static Biquad lowpass(double corner_hz, double sample_rate, double q);

    double step(double x);

private:
    double b0_, b1_, b2_, a1_, a2_;
    double z1_ = 0.0;
    double z2_ = 0.0;
};

// Cascade of sections realising an even-order Butterworth low-pass.
class ButterworthLowpass {
public:
    ButterworthLowpass(std::size_t order, double corner_hz, double sample_rate);

    double step(double x);
    void apply(std::span<double> signal);

private:
    std::vector<Biquad> sections_;
};

} // namespace ccid::detail
