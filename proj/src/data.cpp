#include "orient/data.hpp"

#include "orient/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

namespace orient {

namespace {

constexpr int kSupersample = 4;
constexpr std::string_view kHeaderPrefix = "# orient-dataset v1 features=";

struct Vec2 {
    double x;
    double y;
};

double cross(Vec2 a, Vec2 b, Vec2 p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

bool inside_triangle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    const double d1 = cross(a, b, p);
    const double d2 = cross(b, c, p);
    const double d3 = cross(c, a, p);
    const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(has_neg && has_pos);
}

// Coverage test in normalized image coordinates ([-1, 1]^2, y up).
class ShapeTest {
public:
    ShapeTest(SynthShape shape, Angle theta) : shape_(shape) {
        const auto [s, c] = sincos_degrees(theta.degrees());
        front_ = {s, c};
        side_ = {c, -s};
        apex_ = {0.8 * front_.x, 0.8 * front_.y};
        base_a_ = {-0.5 * front_.x + 0.45 * side_.x, -0.5 * front_.y + 0.45 * side_.y};
        base_b_ = {-0.5 * front_.x - 0.45 * side_.x, -0.5 * front_.y - 0.45 * side_.y};
    }

    bool contains(Vec2 p) const {
        if (shape_ == SynthShape::wedge) return inside_triangle(apex_, base_a_, base_b_, p);
        const double u = p.x * front_.x + p.y * front_.y;
        const double v = p.x * side_.x + p.y * side_.y;
        const double e = (u / 0.75) * (u / 0.75) + (v / 0.4) * (v / 0.4);
        const double nu = u - 0.75;
        const bool in_notch = nu * nu + v * v <= 0.3 * 0.3;
        return e <= 1.0 && !in_notch;
    }

private:
    SynthShape shape_;
    Vec2 front_{};
    Vec2 side_{};
    Vec2 apex_{};
    Vec2 base_a_{};
    Vec2 base_b_{};
};

void append_number(std::string& out, double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

double parse_number(std::string_view field, std::size_t line) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw ParseError(line, "malformed number '" + std::string(field) + "'");
    }
    return v;
}

}  // namespace

const char* to_string(SynthShape shape) noexcept {
    return shape == SynthShape::wedge ? "wedge" : "ellipse_with_notch";
}

SynthShape parse_synth_shape(const std::string& name) {
    if (name == "wedge") return SynthShape::wedge;
    if (name == "ellipse_with_notch" || name == "ellipse-with-notch") return SynthShape::ellipse_with_notch;
    throw Error(ErrorKind::invalid_config, "unknown synthetic shape '" + name + "'");
}

void validate(const SynthSpec& spec) {
    if (spec.image_side < 8) throw Error(ErrorKind::invalid_config, "image side must be at least 8");
    if (spec.count < 1) throw Error(ErrorKind::invalid_config, "sample count must be at least 1");
    if (!(spec.noise_std >= 0.0) || !std::isfinite(spec.noise_std)) {
        throw Error(ErrorKind::invalid_config, "noise std must be finite and nonnegative");
    }
}

std::vector<double> render_shape(SynthShape shape, std::size_t side, Angle theta) {
    const ShapeTest test(shape, theta);
    std::vector<double> image(side * side, 0.0);
    const double pixel = 2.0 / static_cast<double>(side);
    const double sub = pixel / kSupersample;
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            int hits = 0;
            for (int i = 0; i < kSupersample; ++i) {
                for (int j = 0; j < kSupersample; ++j) {
                    const Vec2 p{-1.0 + c * pixel + (j + 0.5) * sub, 1.0 - r * pixel - (i + 0.5) * sub};
                    hits += test.contains(p) ? 1 : 0;
                }
            }
            image[r * side + c] = static_cast<double>(hits) / (kSupersample * kSupersample);
        }
    }
    return image;
}

Dataset generate_synthetic(const SynthSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, spec.noise_std > 0.0 ? spec.noise_std : 1.0);

    Dataset out;
    out.dim = spec.image_side * spec.image_side;
    out.samples.reserve(spec.count);
    const double bin = 360.0 / static_cast<double>(spec.count);
    for (std::size_t j = 0; j < spec.count; ++j) {
        const double raw = spec.stratified ? (static_cast<double>(j) + unit(rng)) * bin
                                           : 360.0 * unit(rng);
        const Angle theta = canonicalize(raw);
        Sample s{render_shape(spec.shape, spec.image_side, theta), theta};
        if (spec.noise_std > 0.0) {
            for (double& v : s.features) v += noise(rng);
        }
        out.samples.push_back(std::move(s));
    }
    if (spec.mean_subtract) subtract_mean(out);
    return out;
}

std::vector<double> subtract_mean(Dataset& dataset) {
    std::vector<double> mean(dataset.dim, 0.0);
    if (dataset.empty()) return mean;
    for (const auto& s : dataset.samples) {
        for (std::size_t i = 0; i < dataset.dim; ++i) mean[i] += s.features[i];
    }
    for (double& m : mean) m /= static_cast<double>(dataset.size());
    for (auto& s : dataset.samples) {
        for (std::size_t i = 0; i < dataset.dim; ++i) s.features[i] -= mean[i];
    }
    return mean;
}

Dataset mirror(const Dataset& dataset) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(dataset.dim))));
    if (side * side != dataset.dim || dataset.dim == 0) {
        throw Error(ErrorKind::invalid_input,
                    "mirroring needs square images, feature length is " + std::to_string(dataset.dim));
    }
    Dataset out;
    out.dim = dataset.dim;
    out.samples.reserve(dataset.size());
    for (const auto& s : dataset.samples) {
        Sample flipped{std::vector<double>(dataset.dim), canonicalize(360.0 - s.angle.degrees())};
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t c = 0; c < side; ++c) {
                flipped.features[r * side + c] = s.features[r * side + (side - 1 - c)];
            }
        }
        out.samples.push_back(std::move(flipped));
    }
    return out;
}

Dataset mirror_augment(const Dataset& dataset) {
    Dataset flipped = mirror(dataset);
    Dataset out;
    out.dim = dataset.dim;
    out.samples.reserve(2 * dataset.size());
    out.samples.insert(out.samples.end(), dataset.samples.begin(), dataset.samples.end());
    for (auto& s : flipped.samples) out.samples.push_back(std::move(s));
    return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "' for writing");
    std::string line;
    line.append(kHeaderPrefix);
    line.append(std::to_string(dataset.dim));
    line.push_back('\n');
    os << line;
    for (const auto& s : dataset.samples) {
        if (s.features.size() != dataset.dim) {
            throw Error(ErrorKind::format_error, "sample dimension differs from dataset dimension");
        }
        line.clear();
        append_number(line, s.angle.degrees());
        for (double v : s.features) {
            line.push_back(',');
            append_number(line, v);
        }
        line.push_back('\n');
        os << line;
    }
    if (!os) throw Error(ErrorKind::io_error, "write to '" + path.string() + "' failed");
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::io_error, "cannot open dataset '" + path.string() + "'");

    std::string line;
    if (!std::getline(is, line) || line.empty()) {
        throw Error(ErrorKind::empty_dataset, "dataset file '" + path.string() + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kHeaderPrefix, 0) != 0) {
        throw ParseError(1, "missing '# orient-dataset v1 features=<n>' header", ErrorKind::format_error);
    }
    Dataset out;
    {
        const std::string_view dim_text = std::string_view(line).substr(kHeaderPrefix.size());
        const auto res = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), out.dim);
        if (res.ec != std::errc() || res.ptr != dim_text.data() + dim_text.size() || out.dim == 0) {
            throw ParseError(1, "bad feature count in header", ErrorKind::format_error);
        }
    }

    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Sample s;
        s.features.reserve(out.dim);
        std::string_view rest(line);
        bool first = true;
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view field = rest.substr(0, comma);
            const double v = parse_number(field, line_no);
            if (first) {
                if (!std::isfinite(v)) throw ParseError(line_no, "angle is not finite");
                s.angle = canonicalize(v);
                first = false;
            } else {
                s.features.push_back(v);
            }
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (s.features.size() != out.dim) {
            throw ParseError(line_no,
                             "expected " + std::to_string(out.dim) + " features, found " +
                                 std::to_string(s.features.size()),
                             ErrorKind::format_error);
        }
        out.samples.push_back(std::move(s));
    }
    if (out.empty()) {
        throw Error(ErrorKind::empty_dataset, "dataset file '" + path.string() + "' has no samples");
    }
    return out;
}

}  // namespace orient
