#include "hazemeter/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace haze::io {

namespace {

cv::Mat read_mat(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw IoError("cannot read image: " + path.string());
    return m;
}

void write_mat(const std::filesystem::path& path, const cv::Mat& m) {
    std::vector<int> params;
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".tif" || ext == ".tiff")
        params = {cv::IMWRITE_TIFF_COMPRESSION, 1};  // uncompressed
    if (!cv::imwrite(path.string(), m, params))
        throw IoError("cannot write image: " + path.string());
}

double code_scale(int depth) {
    switch (depth) {
        case CV_8U: return 255.0;
        case CV_16U: return 65535.0;
        default: throw IoError("unsupported pixel depth (expect 8- or 16-bit)");
    }
}

std::uint16_t quantize(double v, double scale) {
    double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint16_t>(std::lround(clamped * scale));
}

void write_header(std::ofstream& out, std::uint32_t h, std::uint32_t w, std::uint32_t c) {
    out.write("HZB1", 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&c), 4);
}

struct HzbHeader {
    std::uint32_t h = 0, w = 0, c = 0;
};

HzbHeader read_header(std::ifstream& in, const std::filesystem::path& path) {
    char magic[4];
    HzbHeader hdr;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&hdr.h), 4);
    in.read(reinterpret_cast<char*>(&hdr.w), 4);
    in.read(reinterpret_cast<char*>(&hdr.c), 4);
    if (!in || std::memcmp(magic, "HZB1", 4) != 0)
        throw IoError("bad HZB1 header: " + path.string());
    return hdr;
}

}  // namespace

LinearImage load_image(const std::filesystem::path& path) {
    cv::Mat m = read_mat(path);
    double scale = code_scale(m.depth());
    LinearImage img(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            double b, g, rr;
            if (m.channels() == 1) {
                double v = m.depth() == CV_8U ? m.at<std::uint8_t>(r, c) : m.at<std::uint16_t>(r, c);
                b = g = rr = v;
            } else if (m.channels() >= 3) {
                if (m.depth() == CV_8U) {
                    auto px = m.at<cv::Vec3b>(r, c);
                    b = px[0], g = px[1], rr = px[2];
                } else {
                    auto px = m.at<cv::Vec3w>(r, c);
                    b = px[0], g = px[1], rr = px[2];
                }
            } else {
                throw IoError("unsupported channel count");
            }
            // OpenCV stores BGR.
            img.at(r, c, 0) = rr / scale;
            img.at(r, c, 1) = g / scale;
            img.at(r, c, 2) = b / scale;
        }
    }
    return img;
}

void save_image(const std::filesystem::path& path, const LinearImage& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw IoError("bit depth must be 8 or 16");
    double scale = bit_depth == 8 ? 255.0 : 65535.0;
    cv::Mat m(img.height(), img.width(), bit_depth == 8 ? CV_8UC3 : CV_16UC3);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            std::uint16_t red = quantize(img.at(r, c, 0), scale);
            std::uint16_t grn = quantize(img.at(r, c, 1), scale);
            std::uint16_t blu = quantize(img.at(r, c, 2), scale);
            if (bit_depth == 8)
                m.at<cv::Vec3b>(r, c) = {static_cast<std::uint8_t>(blu),
                                         static_cast<std::uint8_t>(grn),
                                         static_cast<std::uint8_t>(red)};
            else
                m.at<cv::Vec3w>(r, c) = {blu, grn, red};
        }
    }
    write_mat(path, m);
}

ScalarMap load_map(const std::filesystem::path& path) {
    cv::Mat m = read_mat(path);
    double scale = code_scale(m.depth());
    ScalarMap out(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            double v;
            if (m.channels() == 1)
                v = m.depth() == CV_8U ? m.at<std::uint8_t>(r, c) : m.at<std::uint16_t>(r, c);
            else
                v = m.depth() == CV_8U ? m.at<cv::Vec3b>(r, c)[0] : m.at<cv::Vec3w>(r, c)[0];
            out.at(r, c) = v / scale;
        }
    }
    return out;
}

void save_map(const std::filesystem::path& path, const ScalarMap& map, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw IoError("bit depth must be 8 or 16");
    double scale = bit_depth == 8 ? 255.0 : 65535.0;
    cv::Mat m(map.rows, map.cols, bit_depth == 8 ? CV_8UC1 : CV_16UC1);
    for (int r = 0; r < map.rows; ++r)
        for (int c = 0; c < map.cols; ++c) {
            std::uint16_t q = quantize(map.at(r, c), scale);
            if (bit_depth == 8)
                m.at<std::uint8_t>(r, c) = static_cast<std::uint8_t>(q);
            else
                m.at<std::uint16_t>(r, c) = q;
        }
    write_mat(path, m);
}

CodedImage load_coded8(const std::filesystem::path& path) {
    cv::Mat m = read_mat(path);
    if (m.depth() != CV_8U) throw IoError("radiometric path expects an 8-bit image");
    CodedImage img;
    img.height = m.rows;
    img.width = m.cols;
    img.data.resize(static_cast<size_t>(m.rows) * m.cols * 3);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            if (m.channels() == 1) {
                auto v = m.at<std::uint8_t>(r, c);
                img.at(r, c, 0) = img.at(r, c, 1) = img.at(r, c, 2) = v;
            } else {
                auto px = m.at<cv::Vec3b>(r, c);
                img.at(r, c, 0) = px[2];
                img.at(r, c, 1) = px[1];
                img.at(r, c, 2) = px[0];
            }
        }
    return img;
}

void save_coded8(const std::filesystem::path& path, const CodedImage& img) {
    cv::Mat m(img.height, img.width, CV_8UC3);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            m.at<cv::Vec3b>(r, c) = {img.at(r, c, 2), img.at(r, c, 1), img.at(r, c, 0)};
    write_mat(path, m);
}

void save_hzb(const std::filesystem::path& path, const LinearImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_header(out, img.height(), img.width(), 3);
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.data().size() * sizeof(double)));
    if (!out) throw IoError("short write: " + path.string());
}

void save_hzb(const std::filesystem::path& path, const ScalarMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    write_header(out, map.rows, map.cols, 1);
    out.write(reinterpret_cast<const char*>(map.v.data()),
              static_cast<std::streamsize>(map.v.size() * sizeof(double)));
    if (!out) throw IoError("short write: " + path.string());
}

LinearImage load_hzb(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    HzbHeader hdr = read_header(in, path);
    if (hdr.c != 3) throw IoError("expected 3-channel HZB dump: " + path.string());
    std::vector<double> data(static_cast<size_t>(hdr.h) * hdr.w * 3);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in) throw IoError("truncated HZB dump: " + path.string());
    return LinearImage(static_cast<int>(hdr.h), static_cast<int>(hdr.w), std::move(data));
}

ScalarMap load_hzb_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    HzbHeader hdr = read_header(in, path);
    if (hdr.c != 1) throw IoError("expected 1-channel HZB dump: " + path.string());
    ScalarMap map(static_cast<int>(hdr.h), static_cast<int>(hdr.w));
    in.read(reinterpret_cast<char*>(map.v.data()),
            static_cast<std::streamsize>(map.v.size() * sizeof(double)));
    if (!in) throw IoError("truncated HZB dump: " + path.string());
    return map;
}

}  // namespace haze::io
