#include "coleforge/noise/offset_noise.hpp"

#include <algorithm>
#include <cmath>

namespace coleforge::noise {

Tensor4 OffsetNoiseSampler::sample(double alpha, const TensorShape& shape) {
    if (!shape.valid()) throw InvalidNoiseConfig("noise shape dimensions must be positive");
    if (!std::isfinite(alpha) || alpha < 0.0) throw InvalidNoiseConfig("alpha must be finite and non-negative");
    Tensor4 t{shape, std::vector<double>(shape.size())};
    for (double& v : t.values) v = normals_.next();
    const std::size_t plane = static_cast<std::size_t>(shape.height) * static_cast<std::size_t>(shape.width);
    const std::size_t planes = static_cast<std::size_t>(shape.batch) * static_cast<std::size_t>(shape.channels);
    for (std::size_t p = 0; p < planes; ++p) {
        const double offset = alpha * normals_.next();
        auto first = t.values.begin() + static_cast<std::ptrdiff_t>(p * plane);
        std::for_each(first, first + static_cast<std::ptrdiff_t>(plane), [offset](double& v) { v += offset; });
    }
    return t;
}

Tensor4 sample_offset_noise(const NoiseConfig& cfg) {
    OffsetNoiseSampler sampler(cfg.seed);
    return sampler.sample(cfg.alpha, cfg.shape);
}

std::vector<double> offset_statistic(const Tensor4& tensor) {
    const std::size_t plane = static_cast<std::size_t>(tensor.shape.height) * static_cast<std::size_t>(tensor.shape.width);
    const std::size_t planes = static_cast<std::size_t>(tensor.shape.batch) * static_cast<std::size_t>(tensor.shape.channels);
    std::vector<double> means(planes);
    for (std::size_t p = 0; p < planes; ++p) {
        double sum = 0.0;
        const double* v = tensor.values.data() + p * plane;
        for (std::size_t i = 0; i < plane; ++i) sum += v[i];
        means[p] = sum / static_cast<double>(plane);
    }
    return means;
}

double analytic_mean_variance(double alpha, int height, int width) noexcept {
    return 1.0 / (static_cast<double>(height) * width) + alpha * alpha;
}

NoiseStatsReport noise_stats(double alpha, int channels, int height, int width, std::size_t samples,
                             std::uint64_t seed) {
    if (samples < 2) throw InvalidNoiseConfig("need at least two samples");
    NoiseStatsReport r;
    r.alpha = alpha;
    r.sample_shape = TensorShape{1, channels, height, width};
    r.samples = samples;
    r.analytic_mean_variance = analytic_mean_variance(alpha, height, width);

    OffsetNoiseSampler sampler(seed);
    constexpr std::size_t kChunk = 64;
    double mean_sum = 0.0, mean_sq = 0.0;
    double elem_sum = 0.0, elem_sq = 0.0;
    std::size_t n_means = 0, n_elems = 0;
    for (std::size_t done = 0; done < samples;) {
        const auto batch = static_cast<int>(std::min(kChunk, samples - done));
        const Tensor4 t = sampler.sample(alpha, TensorShape{batch, channels, height, width});
        for (double m : offset_statistic(t)) {
            mean_sum += m;
            mean_sq += m * m;
            ++n_means;
        }
        for (double v : t.values) {
            elem_sum += v;
            elem_sq += v * v;
        }
        n_elems += t.values.size();
        done += static_cast<std::size_t>(batch);
    }
    auto unbiased = [](double sum, double sq, std::size_t n) {
        const double mean = sum / static_cast<double>(n);
        return (sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    };
    r.channel_means = n_means;
    r.empirical_mean_variance = unbiased(mean_sum, mean_sq, n_means);
    r.elementwise_variance = unbiased(elem_sum, elem_sq, n_elems);
    r.relative_error = std::abs(r.empirical_mean_variance - r.analytic_mean_variance) / r.analytic_mean_variance;
    return r;
}

}  // namespace coleforge::noise
