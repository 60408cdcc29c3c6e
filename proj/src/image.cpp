#include "hazemeter/image.hpp"

#include <cmath>

namespace haze {

LinearImage::LinearImage(int height, int width)
    : height_(height), width_(width), data_(static_cast<size_t>(height) * width * 3, 0.0) {
    if (height < 1 || width < 1) throw OutOfBounds("image dimensions must be >= 1");
}

LinearImage::LinearImage(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
    if (height < 1 || width < 1) throw OutOfBounds("image dimensions must be >= 1");
    if (data_.size() != static_cast<size_t>(height) * width * 3)
        throw ShapeMismatch("data length must be height*width*3");
    validate();
}

void LinearImage::validate() const {
    for (double v : data_)
        if (!std::isfinite(v)) throw NonFiniteValue("image contains NaN or infinity");
}

void ImageSequence::validate() const {
    if (images.empty()) throw ShapeMismatch("empty image sequence");
    for (const auto& img : images)
        if (!img.same_shape(images.front()))
            throw ShapeMismatch("sequence images must share dimensions");
    if (!shutters.empty() && shutters.size() != images.size())
        throw LengthMismatch("shutters length must match image count");
    if (!airlights.empty() && airlights.size() != images.size())
        throw LengthMismatch("airlights length must match image count");
}

std::vector<double> image_sums(const ImageSequence& seq) {
    std::vector<double> sums;
    sums.reserve(seq.images.size());
    for (const auto& img : seq.images) {
        double s = 0;
        for (double v : img.data()) s += v;
        sums.push_back(s);
    }
    return sums;
}

}  // namespace haze
