#ifndef AWSGD_DATA_IDX_HPP_
#define AWSGD_DATA_IDX_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "awsgd/common.hpp"

namespace awsgd {

// IDX containers (big-endian header, unsigned byte payload): magic
// 0x00000803 for image tensors, 0x00000801 for label vectors.
struct IdxImages {
    Index count = 0;
    Index imageRows = 0;
    Index imageCols = 0;
    Matrix data;  // count x (rows*cols), pixel bytes scaled to [0,1]
};

struct IdxLabels {
    std::vector<std::uint8_t> labels;
};

IdxImages parseIdxImages(std::span<const std::uint8_t> bytes);
IdxLabels parseIdxLabels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serializeIdxImages(const IdxImages& images);
std::vector<std::uint8_t> serializeIdxLabels(const IdxLabels& labels);

IdxImages loadIdxImages(const std::filesystem::path& path);
IdxLabels loadIdxLabels(const std::filesystem::path& path);

// Rows of the given digit, one image per row.
Matrix digitMatrix(const IdxImages& images, const IdxLabels& labels, int digit);

}  // namespace awsgd

#endif  // AWSGD_DATA_IDX_HPP_
