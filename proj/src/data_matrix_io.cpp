#include "awsgd/data/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "awsgd/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "matrix interchange assumes a little-endian host");

namespace awsgd {

void writeMatrixFile(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string());
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                                   static_cast<std::uint64_t>(m.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw IoError("write failed for " + path.string());
}

Matrix readMatrixFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::uint64_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) throw TruncatedPayloadError("matrix header truncated");
    Matrix m(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
    std::vector<double> row(static_cast<std::size_t>(dims[1]));
    for (Index i = 0; i < m.rows(); ++i) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw TruncatedPayloadError("matrix payload truncated");
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
}

void writeFeatureCsv(const std::filesystem::path& path, const Matrix& features,
                     const std::vector<int>& labels) {
    if (static_cast<Index>(labels.size()) != features.rows()) {
        throw DimensionMismatchError("one label per row required");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string());
    out << "label";
    for (Index k = 0; k < features.cols(); ++k) out << ",f" << k;
    out << '\n';
    char buf[32];
    for (Index i = 0; i < features.rows(); ++i) {
        out << labels[static_cast<std::size_t>(i)];
        for (Index k = 0; k < features.cols(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", features(i, k));
            out << ',' << buf;
        }
        out << '\n';
    }
}

FeatureCsv readFeatureCsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw TruncatedPayloadError("feature csv empty");
    if (line.rfind("label", 0) != 0) throw BadMagicError("feature csv missing label header");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw TruncatedPayloadError("feature csv row empty");
        const int y = std::stoi(cell);
        if (y != 1 && y != -1) throw ConfigError("labels must be +1 or -1");
        labels.push_back(y);
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && rows.front().size() != row.size()) {
            throw DimensionMismatchError("ragged feature csv");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw TruncatedPayloadError("feature csv has no data rows");

    FeatureCsv out;
    out.labels = std::move(labels);
    out.features.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            out.features(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return out;
}

}  // namespace awsgd
