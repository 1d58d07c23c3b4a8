#ifndef AWSGD_DATA_MATRIX_IO_HPP_
#define AWSGD_DATA_MATRIX_IO_HPP_

#include <filesystem>
#include <vector>

#include "awsgd/common.hpp"

namespace awsgd {

// Dense matrix interchange: two little-endian u64 dims, then row-major
// little-endian f64 values.
void writeMatrixFile(const std::filesystem::path& path, const Matrix& m);
Matrix readMatrixFile(const std::filesystem::path& path);

// Headered feature CSV: `label,f0,f1,...`, labels in {-1, +1}.
struct FeatureCsv {
    Matrix features;
    std::vector<int> labels;
};

void writeFeatureCsv(const std::filesystem::path& path, const Matrix& features,
                     const std::vector<int>& labels);
FeatureCsv readFeatureCsv(const std::filesystem::path& path);

}  // namespace awsgd

#endif  // AWSGD_DATA_MATRIX_IO_HPP_
