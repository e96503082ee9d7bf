#pragma once

// Per-scene visual feature kernels: frame sampling, Gaussian-blurred frame
// differencing for motion, HSV brightness/contrast/saturation, and the
// weighted Total Visual Intensity aggregate. All metrics live on [0, 1].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ckg/errors.hpp"

namespace ckg {

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB triples
};

// Grayscale working frame; values stay on the [0, 255] scale.
struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<double> values;
};

struct FrameMetrics {
    std::optional<double> motion;  // absent for the first sampled frame
    double brightness = 0.0;
    double contrast = 0.0;
    double saturation = 0.0;
};

struct SceneVisualFeatures {
    std::string scene_id;
    std::size_t frame_count_sampled = 0;
    double motion = 0.0;
    double brightness = 0.0;
    double contrast = 0.0;
    double saturation = 0.0;
    double tvi = 0.0;
};

namespace detail {

inline void check_frame(const Frame& frame) {
    if (frame.width <= 0 || frame.height <= 0 ||
        frame.pixels.size() != static_cast<std::size_t>(frame.width) *
                                   static_cast<std::size_t>(frame.height) * 3) {
        throw DimensionMismatch("frame pixel buffer does not match width*height*3");
    }
}

}  // namespace detail

// Every stride-th element starting at index 0.
template <typename T>
std::vector<T> sample_frames(const std::vector<T>& frames, std::size_t stride = 5) {
    if (stride < 1) throw std::invalid_argument("sampling stride must be >= 1");
    std::vector<T> sampled;
    for (std::size_t i = 0; i < frames.size(); i += stride) sampled.push_back(frames[i]);
    return sampled;
}

// Normalized 1-D Gaussian weights; kernel_size must be odd and positive.
inline std::vector<double> gaussian_kernel(int kernel_size, double sigma) {
    if (kernel_size < 1 || kernel_size % 2 == 0) {
        throw BadKernel("kernel size must be odd and >= 1, got " + std::to_string(kernel_size));
    }
    if (kernel_size > 1 && !(sigma > 0.0 && std::isfinite(sigma))) {
        throw BadKernel("sigma must be positive and finite for kernel size > 1");
    }
    std::vector<double> weights(static_cast<std::size_t>(kernel_size));
    const int radius = kernel_size / 2;
    double sum = 0.0;
    for (int i = 0; i < kernel_size; ++i) {
        const double d = static_cast<double>(i - radius);
        weights[static_cast<std::size_t>(i)] =
            kernel_size == 1 ? 1.0 : std::exp(-0.5 * (d / sigma) * (d / sigma));
        sum += weights[static_cast<std::size_t>(i)];
    }
    for (double& w : weights) w /= sum;
    return weights;
}

inline GrayFrame to_luma(const Frame& frame) {
    detail::check_frame(frame);
    GrayFrame gray{frame.width, frame.height, {}};
    gray.values.resize(static_cast<std::size_t>(frame.width) *
                       static_cast<std::size_t>(frame.height));
    for (std::size_t i = 0; i < gray.values.size(); ++i) {
        const double r = frame.pixels[3 * i];
        const double g = frame.pixels[3 * i + 1];
        const double b = frame.pixels[3 * i + 2];
        gray.values[i] = 0.299 * r + 0.587 * g + 0.114 * b;
    }
    return gray;
}

// Luma conversion followed by a separable Gaussian with edge-replicate
// padding. A kernel of size 1 reduces to the luma pass.
inline GrayFrame gaussian_blur(const Frame& frame, int kernel_size = 5, double sigma = 1.0) {
    const std::vector<double> kernel = gaussian_kernel(kernel_size, sigma);
    GrayFrame gray = to_luma(frame);
    if (kernel_size == 1) return gray;

    const int w = gray.width;
    const int h = gray.height;
    const int radius = kernel_size / 2;
    std::vector<double> tmp(gray.values.size());

    auto clamp_index = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                acc += kernel[static_cast<std::size_t>(t + radius)] *
                       gray.values[static_cast<std::size_t>(y) * w + clamp_index(x + t, w)];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                acc += kernel[static_cast<std::size_t>(t + radius)] *
                       tmp[static_cast<std::size_t>(clamp_index(y + t, h)) * w + x];
            }
            gray.values[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return gray;
}

// Mean absolute frame difference scaled to [0, 1].
inline double motion_metric(const GrayFrame& prev, const GrayFrame& curr) {
    if (prev.width != curr.width || prev.height != curr.height ||
        prev.values.size() != curr.values.size()) {
        throw DimensionMismatch("motion metric requires frames of identical dimensions");
    }
    if (prev.values.empty()) throw DimensionMismatch("motion metric requires non-empty frames");
    double acc = 0.0;
    for (std::size_t i = 0; i < prev.values.size(); ++i) {
        acc += std::fabs(curr.values[i] - prev.values[i]);
    }
    return acc / (255.0 * static_cast<double>(prev.values.size()));
}

struct HsvAggregate {
    double brightness = 0.0;  // mean V
    double contrast = 0.0;    // population standard deviation of V
    double saturation = 0.0;  // mean S
};

inline HsvAggregate hsv_metrics(const Frame& frame) {
    detail::check_frame(frame);
    const std::size_t count =
        static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height);
    double v_sum = 0.0, v_sq_sum = 0.0, s_sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint8_t r = frame.pixels[3 * i];
        const std::uint8_t g = frame.pixels[3 * i + 1];
        const std::uint8_t b = frame.pixels[3 * i + 2];
        const double v = std::max({r, g, b}) / 255.0;
        const double lo = std::min({r, g, b}) / 255.0;
        const double s = v == 0.0 ? 0.0 : (v - lo) / v;
        v_sum += v;
        v_sq_sum += v * v;
        s_sum += s;
    }
    HsvAggregate agg;
    agg.brightness = v_sum / static_cast<double>(count);
    const double variance =
        std::max(0.0, v_sq_sum / static_cast<double>(count) - agg.brightness * agg.brightness);
    agg.contrast = std::clamp(std::sqrt(variance), 0.0, 1.0);
    agg.saturation = s_sum / static_cast<double>(count);
    return agg;
}

// Total Visual Intensity: 0.5*motion + 0.3*contrast + 0.2*saturation.
inline double tvi(double motion, double contrast, double saturation) {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in_unit(motion) || !in_unit(contrast) || !in_unit(saturation)) {
        throw OutOfRange("tvi inputs must lie in [0, 1]");
    }
    return 0.5 * motion + 0.3 * contrast + 0.2 * saturation;
}

// HSV metrics per sampled frame plus motion between consecutive blurred
// frames; the first frame carries no motion value.
inline std::vector<FrameMetrics> per_frame_metrics(const std::vector<Frame>& sampled,
                                                   int blur_kernel = 5, double blur_sigma = 1.0) {
    std::vector<FrameMetrics> metrics;
    metrics.reserve(sampled.size());
    GrayFrame prev;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        FrameMetrics m;
        const HsvAggregate hsv = hsv_metrics(sampled[i]);
        m.brightness = hsv.brightness;
        m.contrast = hsv.contrast;
        m.saturation = hsv.saturation;
        GrayFrame blurred = gaussian_blur(sampled[i], blur_kernel, blur_sigma);
        if (i > 0) m.motion = motion_metric(prev, blurred);
        prev = std::move(blurred);
        metrics.push_back(m);
    }
    return metrics;
}

// Arithmetic means of the per-frame values; motion averages only the frames
// that have one and defaults to 0 for single-frame scenes.
inline SceneVisualFeatures aggregate_scene(std::string scene_id,
                                           const std::vector<FrameMetrics>& metrics) {
    if (metrics.empty()) throw EmptyScene("scene \"" + scene_id + "\" has no sampled frames");
    SceneVisualFeatures features;
    features.scene_id = std::move(scene_id);
    features.frame_count_sampled = metrics.size();
    double motion_sum = 0.0;
    std::size_t motion_count = 0;
    for (const FrameMetrics& m : metrics) {
        if (m.motion) {
            motion_sum += *m.motion;
            ++motion_count;
        }
        features.brightness += m.brightness;
        features.contrast += m.contrast;
        features.saturation += m.saturation;
    }
    const double n = static_cast<double>(metrics.size());
    features.brightness /= n;
    features.contrast /= n;
    features.saturation /= n;
    features.motion = motion_count == 0 ? 0.0 : motion_sum / static_cast<double>(motion_count);
    features.tvi = tvi(features.motion, features.contrast, features.saturation);
    return features;
}

}  // namespace ckg
