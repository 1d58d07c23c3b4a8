#include "awsgd/data/idx.hpp"

#include <cmath>
#include <fstream>

#include "awsgd/errors.hpp"

namespace awsgd {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t readU32BE(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) throw TruncatedPayloadError("idx header truncated");
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

void writeU32BE(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> readFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

IdxImages parseIdxImages(std::span<const std::uint8_t> bytes) {
    if (readU32BE(bytes, 0) != kImagesMagic) throw BadMagicError("not an idx image file");
    IdxImages out;
    out.count = static_cast<Index>(readU32BE(bytes, 4));
    out.imageRows = static_cast<Index>(readU32BE(bytes, 8));
    out.imageCols = static_cast<Index>(readU32BE(bytes, 12));
    const Index pixels = out.imageRows * out.imageCols;
    if (out.count < 0 || pixels < 0) throw DimensionMismatchError("negative idx dimensions");
    const std::size_t expected = 16 + static_cast<std::size_t>(out.count) * pixels;
    if (bytes.size() < expected) throw TruncatedPayloadError("idx payload shorter than header");
    if (bytes.size() > expected) throw DimensionMismatchError("idx payload longer than header");
    out.data.resize(out.count, pixels);
    for (Index i = 0; i < out.count; ++i) {
        const std::size_t base = 16 + static_cast<std::size_t>(i) * pixels;
        for (Index p = 0; p < pixels; ++p) {
            out.data(i, p) = static_cast<double>(bytes[base + p]) / 255.0;
        }
    }
    return out;
}

IdxLabels parseIdxLabels(std::span<const std::uint8_t> bytes) {
    if (readU32BE(bytes, 0) != kLabelsMagic) throw BadMagicError("not an idx label file");
    const auto count = static_cast<std::size_t>(readU32BE(bytes, 4));
    if (bytes.size() < 8 + count) throw TruncatedPayloadError("idx payload shorter than header");
    if (bytes.size() > 8 + count) throw DimensionMismatchError("idx payload longer than header");
    IdxLabels out;
    out.labels.assign(bytes.begin() + 8, bytes.end());
    return out;
}

std::vector<std::uint8_t> serializeIdxImages(const IdxImages& images) {
    std::vector<std::uint8_t> out;
    const Index pixels = images.imageRows * images.imageCols;
    out.reserve(16 + static_cast<std::size_t>(images.count) * pixels);
    writeU32BE(out, kImagesMagic);
    writeU32BE(out, static_cast<std::uint32_t>(images.count));
    writeU32BE(out, static_cast<std::uint32_t>(images.imageRows));
    writeU32BE(out, static_cast<std::uint32_t>(images.imageCols));
    for (Index i = 0; i < images.count; ++i) {
        for (Index p = 0; p < pixels; ++p) {
            out.push_back(static_cast<std::uint8_t>(std::lround(images.data(i, p) * 255.0)));
        }
    }
    return out;
}

std::vector<std::uint8_t> serializeIdxLabels(const IdxLabels& labels) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.labels.size());
    writeU32BE(out, kLabelsMagic);
    writeU32BE(out, static_cast<std::uint32_t>(labels.labels.size()));
    out.insert(out.end(), labels.labels.begin(), labels.labels.end());
    return out;
}

IdxImages loadIdxImages(const std::filesystem::path& path) {
    const auto bytes = readFile(path);
    return parseIdxImages(bytes);
}

IdxLabels loadIdxLabels(const std::filesystem::path& path) {
    const auto bytes = readFile(path);
    return parseIdxLabels(bytes);
}

Matrix digitMatrix(const IdxImages& images, const IdxLabels& labels, int digit) {
    if (static_cast<Index>(labels.labels.size()) != images.count) {
        throw DimensionMismatchError("image/label counts differ");
    }
    Index rows = 0;
    for (std::uint8_t y : labels.labels)
        if (y == digit) ++rows;
    Matrix out(rows, images.data.cols());
    Index r = 0;
    for (Index i = 0; i < images.count; ++i) {
        if (labels.labels[static_cast<std::size_t>(i)] == digit) out.row(r++) = images.data.row(i);
    }
    return out;
}

}  // namespace awsgd
