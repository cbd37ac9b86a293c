#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "coleforge/core/error.hpp"
#include "coleforge/core/rng.hpp"

namespace coleforge::noise {

struct TensorShape {
    int batch = 1;
    int channels = 1;
    int height = 1;
    int width = 1;

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(batch) * static_cast<std::size_t>(channels) *
               static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    bool valid() const noexcept { return batch > 0 && channels > 0 && height > 0 && width > 0; }
    bool operator==(const TensorShape&) const = default;
};

// Dense (batch, channels, height, width) tensor, row-major.
struct Tensor4 {
    TensorShape shape;
    std::vector<double> values;

    double at(int b, int c, int y, int x) const noexcept {
        return values[((static_cast<std::size_t>(b) * static_cast<std::size_t>(shape.channels) +
                        static_cast<std::size_t>(c)) *
                           static_cast<std::size_t>(shape.height) +
                       static_cast<std::size_t>(y)) *
                          static_cast<std::size_t>(shape.width) +
                      static_cast<std::size_t>(x)];
    }
};

struct NoiseConfig {
    double alpha = 0.1;
    TensorShape shape;
    std::uint64_t seed = 0;
};

class InvalidNoiseConfig : public Error {
public:
    using Error::Error;
};

// Offset noise: E + alpha * O, where E is elementwise standard normal and O is
// one standard normal per (sample, channel) broadcast over all positions.
// E is drawn for every element first, then O, both from one Box-Muller stream
// over std::mt19937_64. The sampler owns its stream; repeated calls continue
// it. Not safe to share between threads.
class OffsetNoiseSampler {
public:
    explicit OffsetNoiseSampler(std::uint64_t seed) : normals_(seed) {}

    Tensor4 sample(double alpha, const TensorShape& shape);

private:
    NormalSource normals_;
};

Tensor4 sample_offset_noise(const NoiseConfig& cfg);

// Mean over height x width for each (sample, channel), in (b, c) order.
std::vector<double> offset_statistic(const Tensor4& tensor);

// Variance of a per-channel spatial mean: 1/(H*W) + alpha^2.
double analytic_mean_variance(double alpha, int height, int width) noexcept;

struct NoiseStatsReport {
    double alpha = 0.0;
    TensorShape sample_shape;  // batch = 1
    std::size_t samples = 0;
    std::size_t channel_means = 0;
    double empirical_mean_variance = 0.0;
    double analytic_mean_variance = 0.0;
    double relative_error = 0.0;
    double elementwise_variance = 0.0;
};

// Draws `samples` tensors of shape (1, channels, height, width) in chunks and
// reports the spread of the per-channel spatial means.
NoiseStatsReport noise_stats(double alpha, int channels, int height, int width, std::size_t samples,
                             std::uint64_t seed);

}  // namespace coleforge::noise
